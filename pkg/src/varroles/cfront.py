"""Restricted C frontend: lowers C function definitions to C_simpl.

Supported: function definitions over scalar (int/char/float/...) parameters
and locals, pointers and arrays as opaque memory, the usual expression
operators, if/else, while, do/while, for, blocks, return, break/continue and
calls.  Anything recognised but unsupported (switch, goto, struct
declarations, preprocessor lines, ...) degrades to skip and is listed in the
function's LoweringReport.

Lowering conventions:

* calls become ``call p(slot, args...)`` where ``slot`` receives the result
  (the assigned variable, or a fresh ``__retN`` local);
* ``&x`` as an argument becomes ``ref x``;
* conditions ``if (e)`` on scalars become ``if (e != 0)``;
* ``*p`` reads/writes the synthetic array ``__deref_p``, ``p[i]`` the array ``p``;
* constant shifts become multiplication/division by a power of two;
* ``do s while (b)`` becomes ``s; while (b) { s }``;
* non-void functions get a leading ``__result`` parameter written by ``return``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .core import (
    Aop,
    Arg,
    ArrayAssign,
    ArrayRead,
    Assign,
    Bitnot,
    Bitop,
    Call,
    Comp,
    Function,
    If,
    Logop,
    Not,
    Num,
    NumLit,
    Program,
    Seq,
    Skip,
    Var,
    While,
    relabel,
    seq,
    stmt_vars,
    sub_statements,
    validate_program,
)
from .parser import KEYWORDS as CSIMPL_KEYWORDS
from .parser import ParseError

SYNTHETIC_PREFIX = "__"

SCALAR_TYPES = {
    "int", "char", "float", "double", "long", "short", "unsigned", "signed", "_Bool",
}
QUALIFIERS = {
    "const", "volatile", "static", "extern", "register", "auto", "inline",
    "__inline", "__inline__", "restrict", "__restrict", "__extension__",
}
SCALAR_TYPEDEFS = {
    "size_t", "ssize_t", "ptrdiff_t", "intptr_t", "uintptr_t", "off_t", "bool",
    "wchar_t", "time_t", "pid_t", "int8_t", "int16_t", "int32_t", "int64_t",
    "uint8_t", "uint16_t", "uint32_t", "uint64_t", "u8", "u16", "u32", "u64",
    "s8", "s16", "s32", "s64",
}
OPAQUE_TYPEDEFS = {"FILE", "va_list", "DIR"}

C_KEYWORDS = (
    SCALAR_TYPES | QUALIFIERS | {
        "void", "struct", "union", "enum", "typedef", "if", "else", "while", "do",
        "for", "return", "break", "continue", "switch", "case", "default", "goto",
        "sizeof",
    }
)


@dataclass
class LoweringReport:
    function: str
    skipped_constructs: list[tuple[int, str]] = field(default_factory=list)
    synthetic_vars: list[str] = field(default_factory=list)


# -- lexer ------------------------------------------------------------------


@dataclass(frozen=True)
class CTok:
    kind: str  # id, kw, num, char, str, op, pp, eof
    text: str
    line: int
    col: int


_C_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+|\\\n)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<num>(?:0[xX][0-9a-fA-F]+|(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)[uUlLfF]*)
  | (?P<char>L?'(?:\\.|\\[0-7]{1,3}|\\x[0-9a-fA-F]+|[^\\'\n])+')
  | (?P<str>L?"(?:\\.|[^\\"\n])*")
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\.\.\.|<<=|>>=|->|\+\+|--|<<|>>|<=|>=|==|!=|&&|\|\||[-+*/%&|^]=|[{}\[\]();,:?.+\-*/%&|^~!<>=])
    """,
    re.VERBOSE | re.DOTALL,
)


def tokenize_c(src: str) -> list[CTok]:
    toks: list[CTok] = []
    pos, line, line_start = 0, 1, 0
    at_line_start = True
    while pos < len(src):
        col = pos - line_start + 1
        if at_line_start and src[pos] == "#":
            end = pos
            while True:
                nl = src.find("\n", end)
                if nl == -1:
                    nl = len(src)
                if nl > 0 and src[nl - 1] == "\\" and nl < len(src):
                    end = nl + 1
                    continue
                break
            text = src[pos:nl]
            toks.append(CTok("pp", text, line, col))
            line += text.count("\n")
            if "\n" in text:
                line_start = pos + text.rindex("\n") + 1
            pos = nl
            continue
        m = _C_TOKEN_RE.match(src, pos)
        if m is None:
            raise ParseError(line, col, "a C token", src[pos])
        kind = m.lastgroup
        text = m.group()
        if kind == "nl":
            at_line_start = True
        elif kind not in ("ws", "comment"):
            at_line_start = False
            if kind == "id" and text in C_KEYWORDS:
                kind = "kw"
            toks.append(CTok(kind, text, line, col))
        nls = text.count("\n")
        if nls:
            line += nls
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    toks.append(CTok("eof", "", line, pos - line_start + 1))
    return toks


# -- C syntax tree ----------------------------------------------------------


@dataclass
class CExpr:
    kind: str  # name num char str unary postfix binary assign cond call index member cast sizeof comma
    op: str = ""
    args: tuple = ()
    text: str = ""
    line: int = 0


@dataclass
class Declarator:
    name: str
    kind: str  # scalar, pointer, array, function, other
    init: Optional[CExpr] = None
    init_list: bool = False
    line: int = 0


@dataclass
class CStmt:
    kind: str  # decl expr if while do for block return break continue empty unsupported label
    line: int
    expr: Optional[CExpr] = None
    cond: Optional[CExpr] = None
    step: Optional[CExpr] = None
    init: Optional["CStmt"] = None
    body: list = field(default_factory=list)  # child statements
    decls: list = field(default_factory=list)
    text: str = ""


@dataclass
class CFunction:
    name: str
    returns_value: bool
    params: list[Declarator]
    body: CStmt
    line: int


@dataclass
class TypeSpec:
    base: str  # scalar, void, other
    is_typedef: bool = False
    desc: str = ""


ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>="}
BINARY_PREC = {
    "||": 1, "&&": 2, "|": 3, "^": 4, "&": 5, "==": 6, "!=": 6,
    "<": 7, ">": 7, "<=": 7, ">=": 7, "<<": 8, ">>": 8,
    "+": 9, "-": 9, "*": 10, "/": 10, "%": 10,
}


class CParser:
    def __init__(self, src: str):
        self.toks = tokenize_c(src)
        self.i = 0
        self.typedefs: dict[str, str] = {n: "scalar" for n in SCALAR_TYPEDEFS}
        self.typedefs.update({n: "other" for n in OPAQUE_TYPEDEFS})
        self.toplevel_skips: list[tuple[int, str]] = []

    @property
    def tok(self) -> CTok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> CTok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("op", "kw") and t.text in texts

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> CTok:
        if not self.at(text):
            raise self.error(repr(text))
        t = self.tok
        self.i += 1
        return t

    def error(self, expected: str) -> ParseError:
        t = self.tok
        return ParseError(t.line, t.col, expected, t.text or "<eof>")

    def skip_balanced_until(self, *stops: str) -> None:
        """Skip tokens up to (not including) a stop token at bracket depth 0."""
        depth = 0
        while self.tok.kind != "eof":
            t = self.tok
            if t.kind == "op":
                if depth == 0 and t.text in stops:
                    return
                if t.text in "([{":
                    depth += 1
                elif t.text in ")]}":
                    if depth == 0:
                        return
                    depth -= 1
            self.i += 1
        raise self.error(" or ".join(repr(s) for s in stops))

    # -- declarations

    def starts_type(self, k: int = 0) -> bool:
        t = self.peek(k)
        if t.kind == "kw" and (t.text in SCALAR_TYPES or t.text in QUALIFIERS or t.text in (
            "void", "struct", "union", "enum", "typedef",
        )):
            return True
        if t.kind == "id" and t.text in self.typedefs:
            nxt = self.peek(k + 1)
            return nxt.kind == "id" or (nxt.kind == "op" and nxt.text in ("*", ")"))
        return False

    def type_spec(self) -> TypeSpec:
        base = None
        is_typedef = False
        words = []
        while True:
            t = self.tok
            if t.kind == "kw" and t.text == "typedef":
                is_typedef = True
                self.i += 1
            elif t.kind == "kw" and t.text in QUALIFIERS:
                self.i += 1
            elif t.kind == "kw" and t.text in SCALAR_TYPES:
                base = base or "scalar"
                words.append(t.text)
                self.i += 1
            elif t.kind == "kw" and t.text == "void":
                base = "void"
                words.append("void")
                self.i += 1
            elif t.kind == "kw" and t.text in ("struct", "union", "enum"):
                self.i += 1
                tag = ""
                if self.tok.kind == "id":
                    tag = self.tok.text
                    self.i += 1
                if self.at("{"):
                    self.i += 1
                    self.skip_balanced_until("}")
                    self.expect("}")
                base = "other"
                words.append(f"{t.text} {tag}".strip())
            elif t.kind == "id" and base is None and t.text in self.typedefs:
                base = self.typedefs[t.text]
                words.append(t.text)
                self.i += 1
            elif t.kind == "kw" and t.text == "__attribute__":
                self.i += 1
            else:
                break
        if base is None:
            if not words and not is_typedef:
                raise self.error("a type")
            base = "scalar"  # bare 'unsigned', 'const x', ...
        return TypeSpec(base, is_typedef, " ".join(words))

    def declarator(self, spec: TypeSpec) -> tuple[Declarator, Optional[list[Declarator]]]:
        """Parse one declarator; returns it and, for function declarators, the parameters."""
        pointer = False
        while self.at("*"):
            pointer = True
            self.i += 1
            while self.tok.kind == "kw" and self.tok.text in QUALIFIERS:
                self.i += 1
        line = self.tok.line
        name = ""
        nested = False
        if self.accept("("):
            # function pointer or parenthesised declarator
            inner, _ = self.declarator(spec)
            name = inner.name
            nested = True
            self.expect(")")
        elif self.tok.kind == "id":
            name = self.tok.text
            self.i += 1
        kind = "pointer" if pointer else ("scalar" if spec.base == "scalar" else "other")
        if nested:
            kind = "other"
        params = None
        while True:
            if self.accept("["):
                if not self.at("]"):
                    self.skip_balanced_until("]")
                self.expect("]")
                if kind in ("scalar", "pointer"):
                    kind = "array"
            elif self.at("("):
                self.i += 1
                plist = self.param_list()
                self.expect(")")
                if params is None and not nested:
                    params = plist
                    kind = "function"
            else:
                break
        return Declarator(name, kind, line=line), params

    def param_list(self) -> list[Declarator]:
        params: list[Declarator] = []
        if self.at(")"):
            return params
        if self.at("void") and self.peek().kind == "op" and self.peek().text == ")":
            self.i += 1
            return params
        while True:
            if self.accept("..."):
                break
            spec = self.type_spec()
            d, _ = self.declarator(spec)
            params.append(d)
            if not self.accept(","):
                break
        return params

    def translation_unit(self) -> list[CFunction]:
        functions = []
        while self.tok.kind != "eof":
            t = self.tok
            if t.kind == "pp":
                self.toplevel_skips.append((t.line, f"preprocessor line {t.text.split()[0]}"))
                self.i += 1
                continue
            if self.accept(";"):
                continue
            spec = self.type_spec()
            if self.accept(";"):
                self.toplevel_skips.append((t.line, f"type declaration {spec.desc}"))
                continue
            d, params = self.declarator(spec)
            if d.kind == "function" and self.at("{"):
                body = self.compound()
                functions.append(CFunction(d.name, spec.base != "void", params or [], body, t.line))
                continue
            # prototypes, globals and typedefs
            names = [d]
            while True:
                if self.accept("="):
                    self.skip_balanced_until(",", ";")
                if not self.accept(","):
                    break
                names.append(self.declarator(spec)[0])
            self.expect(";")
            for n in names:
                if spec.is_typedef:
                    self.typedefs[n.name] = "scalar" if n.kind == "scalar" else "other"
                    self.toplevel_skips.append((n.line, f"typedef {n.name}"))
                elif n.kind == "function":
                    self.toplevel_skips.append((n.line, f"prototype {n.name}"))
                else:
                    self.toplevel_skips.append((n.line, f"global declaration {n.name}"))
        return functions

    # -- statements

    def compound(self) -> CStmt:
        line = self.expect("{").line
        body = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                raise self.error("'}'")
            body.append(self.statement())
        self.expect("}")
        return CStmt("block", line, body=body)

    def declaration(self) -> CStmt:
        line = self.tok.line
        spec = self.type_spec()
        decls = []
        if not self.at(";"):
            while True:
                d, _ = self.declarator(spec)
                if self.accept("="):
                    if self.at("{"):
                        self.i += 1
                        self.skip_balanced_until("}")
                        self.expect("}")
                        d.init_list = True
                    else:
                        d.init = self.assignment()
                decls.append(d)
                if not self.accept(","):
                    break
        self.expect(";")
        if spec.is_typedef:
            for d in decls:
                self.typedefs[d.name] = "scalar" if d.kind == "scalar" else "other"
            return CStmt("unsupported", line, text="typedef")
        return CStmt("decl", line, decls=decls, text=spec.desc)

    def statement(self) -> CStmt:
        t = self.tok
        line = t.line
        if t.kind == "pp":
            self.i += 1
            return CStmt("unsupported", line, text=f"preprocessor line {t.text.split()[0]}")
        if self.at("{"):
            return self.compound()
        if self.accept(";"):
            return CStmt("empty", line)
        if self.accept("if"):
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            then = self.statement()
            body = [then]
            if self.accept("else"):
                body.append(self.statement())
            return CStmt("if", line, cond=cond, body=body)
        if self.accept("while"):
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            return CStmt("while", line, cond=cond, body=[self.statement()])
        if self.accept("do"):
            body = self.statement()
            self.expect("while")
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            self.expect(";")
            return CStmt("do", line, cond=cond, body=[body])
        if self.accept("for"):
            self.expect("(")
            init = None
            if self.starts_type():
                init = self.declaration()
            elif not self.accept(";"):
                init = CStmt("expr", line, expr=self.expression())
                self.expect(";")
            cond = None if self.at(";") else self.expression()
            self.expect(";")
            step = None if self.at(")") else self.expression()
            self.expect(")")
            return CStmt("for", line, init=init, cond=cond, step=step, body=[self.statement()])
        if self.accept("return"):
            expr = None if self.at(";") else self.expression()
            self.expect(";")
            return CStmt("return", line, expr=expr)
        if self.accept("break") or self.accept("continue"):
            self.expect(";")
            return CStmt("empty", line)
        if self.accept("switch"):
            self.expect("(")
            self.skip_balanced_until(")")
            self.expect(")")
            self.statement()
            return CStmt("unsupported", line, text="switch statement")
        if self.accept("goto"):
            self.i += 1
            self.expect(";")
            return CStmt("unsupported", line, text="goto")
        if self.at("case", "default"):
            self.skip_balanced_until(":")
            self.expect(":")
            return CStmt("unsupported", line, text="case label")
        if t.kind == "id" and self.peek().kind == "op" and self.peek().text == ":":
            self.i += 2
            inner = self.statement() if not self.at("}") else CStmt("empty", line)
            return CStmt("label", line, text=t.text, body=[inner])
        if self.starts_type():
            return self.declaration()
        expr = self.expression()
        self.expect(";")
        return CStmt("expr", line, expr=expr)

    # -- expressions

    def expression(self) -> CExpr:
        e = self.assignment()
        while self.at(","):
            line = self.tok.line
            self.i += 1
            e = CExpr("comma", args=(e, self.assignment()), line=line)
        return e

    def assignment(self) -> CExpr:
        lhs = self.conditional()
        if self.tok.kind == "op" and self.tok.text in ASSIGN_OPS:
            t = self.tok
            self.i += 1
            return CExpr("assign", t.text, (lhs, self.assignment()), line=t.line)
        return lhs

    def conditional(self) -> CExpr:
        c = self.binary(1)
        if self.at("?"):
            line = self.tok.line
            self.i += 1
            a = self.expression()
            self.expect(":")
            b = self.conditional()
            return CExpr("cond", args=(c, a, b), line=line)
        return c

    def binary(self, min_prec: int) -> CExpr:
        left = self.unary()
        while True:
            t = self.tok
            prec = BINARY_PREC.get(t.text) if t.kind == "op" else None
            if prec is None or prec < min_prec:
                return left
            self.i += 1
            right = self.binary(prec + 1)
            left = CExpr("binary", t.text, (left, right), line=t.line)

    def unary(self) -> CExpr:
        t = self.tok
        if t.kind == "op" and t.text in ("++", "--"):
            self.i += 1
            return CExpr("unary", "pre" + t.text, (self.unary(),), line=t.line)
        if t.kind == "op" and t.text in ("-", "+", "!", "~", "&", "*"):
            self.i += 1
            return CExpr("unary", t.text, (self.unary(),), line=t.line)
        if self.accept("sizeof"):
            if self.at("(") and self.starts_type(1):
                self.i += 1
                self.skip_balanced_until(")")
                self.expect(")")
            else:
                self.unary()
            return CExpr("sizeof", line=t.line)
        if self.at("(") and self.starts_type(1):
            self.i += 1
            self.skip_balanced_until(")")
            self.expect(")")
            return CExpr("cast", args=(self.unary(),), line=t.line)
        return self.postfix(self.primary())

    def postfix(self, e: CExpr) -> CExpr:
        while True:
            t = self.tok
            if self.accept("["):
                idx = self.expression()
                self.expect("]")
                e = CExpr("index", args=(e, idx), line=t.line)
            elif self.accept("("):
                args = []
                if not self.at(")"):
                    while True:
                        args.append(self.assignment())
                        if not self.accept(","):
                            break
                self.expect(")")
                e = CExpr("call", args=(e, tuple(args)), line=t.line)
            elif self.at(".", "->"):
                self.i += 1
                if self.tok.kind != "id":
                    raise self.error("a member name")
                e = CExpr("member", t.text, (e,), text=self.tok.text, line=t.line)
                self.i += 1
            elif self.at("++", "--"):
                self.i += 1
                e = CExpr("postfix", "post" + t.text, (e,), line=t.line)
            else:
                return e

    def primary(self) -> CExpr:
        t = self.tok
        if t.kind == "id":
            self.i += 1
            return CExpr("name", text=t.text, line=t.line)
        if t.kind == "num":
            self.i += 1
            return CExpr("num", text=t.text, line=t.line)
        if t.kind == "char":
            self.i += 1
            return CExpr("char", text=t.text, line=t.line)
        if t.kind == "str":
            self.i += 1
            while self.tok.kind == "str":
                self.i += 1
            return CExpr("str", text=t.text, line=t.line)
        if self.accept("("):
            e = self.expression()
            self.expect(")")
            return e
        raise self.error("an expression")


# -- lowering ---------------------------------------------------------------

_SIMPLE_ESCAPES = {"n": "\\n", "t": "\\t", "r": "\\r", "0": "\\0", "\\": "\\\\", "'": "\\'", '"': '"'}
_C_ESCAPE_VALUES = {"a": 7, "b": 8, "f": 12, "v": 11, "e": 27, "?": 63}


def _char_literal(text: str) -> Num:
    body = text[text.index("'") + 1:-1]
    if not body.startswith("\\"):
        value = ord(body[0])
        canon = body[0] if body[0] not in "'\\" else "\\" + body[0]
        return Num(NumLit("char", f"'{canon}'", value))
    esc = body[1:]
    if esc in _SIMPLE_ESCAPES:
        canon = _SIMPLE_ESCAPES[esc]
        from .core import char_value

        return Num(NumLit("char", f"'{canon}'", char_value(f"'{canon}'")))
    if esc.startswith("x"):
        value = int(esc[1:], 16) & 0xFF
    elif esc[0] in "01234567":
        value = int(esc, 8) & 0xFF
    else:
        value = _C_ESCAPE_VALUES.get(esc, ord(esc[0]))
    return Num(NumLit("char", f"'\\x{value:02x}'", value))


def _int_literal(text: str) -> Num:
    clean = text.rstrip("uUlL")
    if clean.lower().startswith("0x") or not any(c in clean for c in ".eE"):
        from .core import num

        return num(clean)
    clean = clean.rstrip("fF")
    return Num(NumLit("float", clean, float(clean)))


def _int(value: int) -> Num:
    return Num(NumLit("int", str(value), value))


ZERO = _int(0)
ONE = _int(1)
COMPARISONS = {"==": "=", "!=": "!=", "<": "<", ">": ">", "<=": "<=", ">=": ">="}
AOP_MAP = {"+": "+", "-": "-", "*": "*", "/": "/"}
BITOP_MAP = {"&": "bitand", "|": "bitor", "^": "bitxor"}


class _FunctionLowering:
    def __init__(self, cf: CFunction):
        self.cf = cf
        self.report = LoweringReport(cf.name)
        self.kinds: dict[str, str] = {}
        self.params: list[str] = []
        self.locals: list[str] = []
        self.counter = 0
        self.buf: list = []
        self.reported_names: set[str] = set()

    # -- bookkeeping

    def skip(self, line: int, what: str) -> None:
        self.report.skipped_constructs.append((line, what))

    def fresh(self, stem: str = "ret") -> str:
        while True:
            name = f"{SYNTHETIC_PREFIX}{stem}{self.counter}"
            self.counter += 1
            if name not in self.kinds:
                break
        self.kinds[name] = "scalar"
        self.locals.append(name)
        self.report.synthetic_vars.append(name)
        return name

    def declare(self, d: Declarator, as_param: bool = False) -> None:
        if not d.name:
            return
        previous = self.kinds.get(d.name)
        self.kinds[d.name] = d.kind
        if d.kind == "scalar" and previous != "scalar":
            (self.params if as_param else self.locals).append(d.name)
        elif d.kind == "scalar" and previous == "scalar":
            pass
        elif d.kind == "other":
            self.skip(d.line, f"declaration of non-basic variable {d.name}")
        elif d.kind == "function":
            self.skip(d.line, f"local prototype {d.name}")

    def emit(self, s) -> None:
        self.buf.append(s)

    def capture(self, fn, *args):
        """Run ``fn`` collecting the statements it emits."""
        saved, self.buf = self.buf, []
        try:
            result = fn(*args)
            return self.buf, result
        finally:
            self.buf = saved

    # -- entry

    def lower(self) -> Function:
        if self.cf.returns_value:
            self.kinds["__result"] = "scalar"
            self.params.append("__result")
        for p in self.cf.params:
            self.declare(p, as_param=True)
        body, _ = self.capture(self.stmt, self.cf.body)
        return Function(self.cf.name, tuple(self.params), tuple(self.locals), relabel(seq(*body)))

    # -- statements

    def block(self, s: CStmt):
        stmts, _ = self.capture(self.stmt, s)
        return seq(*stmts)

    def stmt(self, s: CStmt) -> None:
        k = s.kind
        if k == "block":
            for child in s.body:
                self.stmt(child)
        elif k == "decl":
            for d in s.decls:
                self.declare(d)
                if d.init_list:
                    self.skip(d.line, f"initializer list for {d.name}")
                elif d.init is not None:
                    self.store(CExpr("name", text=d.name, line=d.line), d.init, d.line)
        elif k == "expr":
            self.effect(s.expr)
        elif k == "if":
            cond = self.cond(s.cond)
            then = self.block(s.body[0])
            else_ = self.block(s.body[1]) if len(s.body) > 1 else Skip()
            self.emit(If(cond, then, else_))
        elif k == "while":
            pre, cond = self.capture(self.cond, s.cond)
            body = self.block(s.body[0])
            self.buf.extend(pre)
            self.emit(While(cond, seq(body, *pre)))
        elif k == "do":
            body = self.block(s.body[0])
            pre, cond = self.capture(self.cond, s.cond)
            self.buf.extend([body, *pre])
            self.emit(While(cond, seq(body, *pre)))
        elif k == "for":
            if s.init is not None:
                self.stmt(s.init)
            if s.cond is not None:
                pre, cond = self.capture(self.cond, s.cond)
            else:
                pre, cond = [], Comp("!=", ONE, ZERO)
            body = self.block(s.body[0])
            step, _ = self.capture(self.effect, s.step) if s.step is not None else ([], None)
            self.buf.extend(pre)
            self.emit(While(cond, seq(body, *step, *pre)))
        elif k == "return":
            if s.expr is not None:
                if self.cf.returns_value:
                    self.store(CExpr("name", text="__result", line=s.line), s.expr, s.line)
                else:
                    self.effect(s.expr)
        elif k == "label":
            self.skip(s.line, f"label {s.text}")
            self.stmt(s.body[0])
        elif k == "unsupported":
            self.skip(s.line, s.text)
        elif k == "empty":
            pass
        else:  # pragma: no cover - parser only builds the kinds above
            raise AssertionError(k)

    # -- expressions for effect

    def effect(self, e: CExpr) -> None:
        match e.kind:
            case "assign":
                self.assign(e)
            case "call":
                self.call(e, None)
            case "comma":
                self.effect(e.args[0])
                self.effect(e.args[1])
            case "unary" if e.op in ("pre++", "pre--"):
                self.step_lvalue(e.args[0], e.op[3:], e.line)
            case "postfix":
                self.step_lvalue(e.args[0], e.op[4:], e.line)
            case "cast":
                self.effect(e.args[0])
            case _:
                self.value(e)  # evaluated only for side effects

    def assign(self, e: CExpr) -> Optional[object]:
        op = e.op
        lhs, rhs = e.args
        if op == "=":
            return self.store(lhs, rhs, e.line)
        binop = op[:-1]
        return self.store(lhs, CExpr("binary", binop, (lhs, rhs), line=e.line), e.line)

    def step_lvalue(self, target: CExpr, op: str, line: int):
        delta = CExpr("num", text="1", line=line)
        return self.store(target, CExpr("binary", op[0], (target, delta), line=line), line)

    def store(self, target: CExpr, rhs: CExpr, line: int):
        """Lower ``target = rhs``; returns the C_simpl value of the assignment."""
        if target.kind == "name" and self.kinds.get(target.text) == "scalar":
            name = target.text
            rhs = self.strip_casts(rhs)
            if rhs.kind == "call":
                self.call(rhs, name)
            elif self.is_boolean(rhs):
                self.emit(If(self.cond(rhs), Assign(name, ONE), Assign(name, ZERO)))
            elif rhs.kind == "cond":
                c, a, b = rhs.args
                cond = self.cond(c)
                then_pre, a_val = self.capture(self.value, a)
                else_pre, b_val = self.capture(self.value, b)
                self.emit(If(cond, seq(*then_pre, Assign(name, a_val)), seq(*else_pre, Assign(name, b_val))))
            else:
                self.emit(Assign(name, self.value(rhs)))
            return Var(name)
        value = self.value(rhs)
        if target.kind == "name":
            kind = self.kinds.get(target.text)
            if kind in ("pointer", "array"):
                self.skip(line, f"pointer assignment to {target.text}")
                return value
            self.note_nonlocal(target.text, line)
            self.emit(ArrayAssign(target.text, ZERO, value))
            return value
        if target.kind == "index":
            array, index = self.subscript(target)
            self.emit(ArrayAssign(array, index, value))
            return value
        if target.kind == "unary" and target.op == "*":
            self.emit(ArrayAssign(self.deref_array(target.args[0]), ZERO, value))
            return value
        if target.kind == "member":
            self.value(target.args[0])
            self.emit(ArrayAssign(f"__field_{target.text}", ZERO, value))
            return value
        self.skip(line, "assignment to unsupported lvalue")
        return value

    def strip_casts(self, e: CExpr) -> CExpr:
        while e.kind == "cast":
            e = e.args[0]
        return e

    def is_boolean(self, e: CExpr) -> bool:
        e = self.strip_casts(e)
        if e.kind == "binary" and (e.op in COMPARISONS or e.op in ("&&", "||")):
            return True
        return e.kind == "unary" and e.op == "!"

    def note_nonlocal(self, name: str, line: int) -> None:
        if name not in self.reported_names:
            self.reported_names.add(name)
            self.skip(line, f"non-local identifier {name}")

    def deref_array(self, e: CExpr) -> str:
        e = self.strip_casts(e)
        if e.kind == "name":
            return f"__deref_{e.text}"
        self.value(e)
        return "__deref"

    def subscript(self, e: CExpr) -> tuple[str, object]:
        base, idx = e.args
        index = self.value(idx)
        base = self.strip_casts(base)
        while base.kind == "index":
            # only the innermost subscript is kept for multi-dimensional access
            base = self.strip_casts(base.args[0])
        if base.kind == "name":
            if base.text not in self.kinds:
                self.note_nonlocal(base.text, e.line)
            return base.text, index
        if base.kind == "member":
            self.value(base.args[0])
            return f"__field_{base.text}", index
        self.value(base)
        return "__deref", index

    def call(self, e: CExpr, target: Optional[str]) -> object:
        fn, cargs = e.args
        fn = self.strip_casts(fn)
        if fn.kind == "name":
            proc = fn.text
        else:
            self.value(fn)
            self.skip(e.line, "indirect call")
            proc = "__indirect"
        args = []
        for a in cargs:
            a = self.strip_casts(a)
            if (a.kind == "unary" and a.op == "&" and a.args[0].kind == "name"
                    and self.kinds.get(a.args[0].text) == "scalar"):
                args.append(Arg(Var(a.args[0].text), "ref"))
            else:
                args.append(Arg(self.value(a)))
        slot = target or self.fresh()
        self.emit(Call(proc, (Arg(Var(slot)), *args)))
        return Var(slot)

    # -- expressions for value

    def value(self, e: CExpr):
        match e.kind:
            case "name":
                kind = self.kinds.get(e.text)
                if kind == "scalar":
                    return Var(e.text)
                if kind is None:
                    self.note_nonlocal(e.text, e.line)
                return ArrayRead(e.text, ZERO)
            case "num":
                return _int_literal(e.text)
            case "char":
                return _char_literal(e.text)
            case "str":
                return ArrayRead("__str", ZERO)
            case "sizeof":
                return _int(8)
            case "cast":
                return self.value(e.args[0])
            case "comma":
                self.effect(e.args[0])
                return self.value(e.args[1])
            case "call":
                return self.call(e, None)
            case "assign":
                return self.assign(e)
            case "index":
                array, index = self.subscript(e)
                return ArrayRead(array, index)
            case "member":
                self.value(e.args[0])
                return ArrayRead(f"__field_{e.text}", ZERO)
            case "postfix":
                self.step_lvalue(e.args[0], e.op[4:], e.line)
                return self.value(e.args[0])
            case "cond":
                t = self.fresh("tmp")
                self.store(CExpr("name", text=t, line=e.line), e, e.line)
                return Var(t)
            case "unary":
                return self.unary_value(e)
            case "binary":
                return self.binary_value(e)
        raise AssertionError(e.kind)  # pragma: no cover

    def unary_value(self, e: CExpr):
        (a,) = e.args
        match e.op:
            case "-":
                inner = self.value(a)
                return Aop("-", ZERO, inner)
            case "+":
                return self.value(a)
            case "~":
                return Bitnot(self.value(a))
            case "!":
                return self.materialize(e)
            case "*":
                return ArrayRead(self.deref_array(a), ZERO)
            case "&":
                a = self.strip_casts(a)
                if a.kind == "name":
                    return ArrayRead(f"__addr_{a.text}", ZERO)
                self.value(a)
                return ArrayRead("__addr", ZERO)
            case "pre++" | "pre--":
                return self.step_lvalue(a, e.op[3:], e.line)
        raise AssertionError(e.op)  # pragma: no cover

    def materialize(self, e: CExpr):
        t = self.fresh("tmp")
        self.emit(If(self.cond(e), Assign(t, ONE), Assign(t, ZERO)))
        return Var(t)

    def binary_value(self, e: CExpr):
        op = e.op
        if op in COMPARISONS or op in ("&&", "||"):
            return self.materialize(e)
        l, r = e.args
        if op in ("<<", ">>"):
            shift = self.const_int(r)
            left = self.value(l)
            if shift is not None and 0 <= shift < 63:
                return Aop("*" if op == "<<" else "/", left, _int(1 << shift))
            right = self.value(r)
            slot = self.fresh()
            self.emit(Call("__shl" if op == "<<" else "__shr", (Arg(Var(slot)), Arg(left), Arg(right))))
            return Var(slot)
        left = self.value(l)
        right = self.value(r)
        if op in AOP_MAP:
            return Aop(AOP_MAP[op], left, right)
        if op in BITOP_MAP:
            return Bitop(BITOP_MAP[op], left, right)
        if op == "%":
            # a % b == a - (a / b) * b
            return Aop("-", left, Aop("*", Aop("/", left, right), right))
        raise AssertionError(op)  # pragma: no cover

    def const_int(self, e: CExpr) -> Optional[int]:
        e = self.strip_casts(e)
        if e.kind == "num":
            lit = _int_literal(e.text).lit
            if lit.kind == "int":
                return int(lit.value)
        return None

    # -- conditions

    def cond(self, e: CExpr):
        e = self.strip_casts(e)
        if e.kind == "binary":
            if e.op in COMPARISONS:
                l, r = e.args
                return Comp(COMPARISONS[e.op], self.value(l), self.value(r))
            if e.op == "&&":
                return Logop("and", self.cond(e.args[0]), self.cond(e.args[1]))
            if e.op == "||":
                return Logop("or", self.cond(e.args[0]), self.cond(e.args[1]))
        if e.kind == "unary" and e.op == "!":
            return Not(self.cond(e.args[0]))
        return Comp("!=", self.value(e), ZERO)


def _safe(name: str) -> str:
    return name + "_" if name in CSIMPL_KEYWORDS else name


def _sanitize_expr(e):
    match e:
        case Var(n):
            return Var(_safe(n))
        case Aop(op, l, r):
            return Aop(op, _sanitize_expr(l), _sanitize_expr(r))
        case Bitop(op, l, r):
            return Bitop(op, _sanitize_expr(l), _sanitize_expr(r))
        case Bitnot(a):
            return Bitnot(_sanitize_expr(a))
        case ArrayRead(a, i):
            return ArrayRead(_safe(a), _sanitize_expr(i))
        case Comp(op, l, r):
            return Comp(op, _sanitize_expr(l), _sanitize_expr(r))
        case Not(a):
            return Not(_sanitize_expr(a))
        case Logop(op, l, r):
            return Logop(op, _sanitize_expr(l), _sanitize_expr(r))
    return e


def _sanitize_stmt(s):
    match s:
        case Assign(lhs, rhs):
            return Assign(_safe(lhs), _sanitize_expr(rhs))
        case ArrayAssign(a, i, rhs):
            return ArrayAssign(_safe(a), _sanitize_expr(i), _sanitize_expr(rhs))
        case If(c, a, b):
            return If(_sanitize_expr(c), _sanitize_stmt(a), _sanitize_stmt(b))
        case Seq(a, b):
            return Seq(_sanitize_stmt(a), _sanitize_stmt(b))
        case While(c, body):
            return While(_sanitize_expr(c), _sanitize_stmt(body))
        case Call(p, args):
            return Call(_safe(p), tuple(Arg(_sanitize_expr(a.expr), a.mode) for a in args))
    return s


def _sanitize(f: Function) -> Function:
    """Rename identifiers that clash with C_simpl keywords (``end`` -> ``end_``)."""
    names = [f.name, *f.params, *f.locals]
    if not any(n in CSIMPL_KEYWORDS for n in names) and not CSIMPL_KEYWORDS & _all_names(f.body):
        return f
    return Function(
        _safe(f.name),
        tuple(_safe(p) for p in f.params),
        tuple(_safe(v) for v in f.locals),
        relabel(_sanitize_stmt(f.body)),
    )


def _all_names(s) -> set[str]:
    out = stmt_vars(s)
    for t in sub_statements(s):
        match t:
            case ArrayAssign(a, _, _):
                out.add(a)
            case Call(p, _):
                out.add(p)
    out |= {a for a in _array_names(s)}
    return out


def _array_names(s) -> set[str]:
    found: set[str] = set()

    def visit(e):
        match e:
            case ArrayRead(a, i):
                found.add(a)
                visit(i)
            case Aop(_, l, r) | Bitop(_, l, r) | Comp(_, l, r) | Logop(_, l, r):
                visit(l)
                visit(r)
            case Bitnot(a) | Not(a):
                visit(a)

    for t in sub_statements(s):
        match t:
            case Assign(_, rhs):
                visit(rhs)
            case ArrayAssign(_, i, rhs):
                visit(i)
                visit(rhs)
            case If(c, _, _) | While(c, _):
                visit(c)
            case Call(_, args):
                for a in args:
                    visit(a.expr)
    return found


def lower_c(src: str) -> tuple[Program, list[LoweringReport]]:
    """Lower C source text; raises ParseError on syntax errors."""
    parser = CParser(src)
    cfuncs = parser.translation_unit()
    functions = []
    reports = []
    if parser.toplevel_skips:
        reports.append(LoweringReport("<toplevel>", list(parser.toplevel_skips)))
    seen = set()
    for cf in cfuncs:
        if cf.name in seen:
            reports.append(LoweringReport(cf.name, [(cf.line, "duplicate definition")]))
            continue
        seen.add(cf.name)
        lowering = _FunctionLowering(cf)
        functions.append(_sanitize(lowering.lower()))
        reports.append(lowering.report)
    program = Program(tuple(functions))
    validate_program(program)
    return program, reports


def is_synthetic(name: str) -> bool:
    return name.startswith(SYNTHETIC_PREFIX)
