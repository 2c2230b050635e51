"""Concrete syntax for C_simpl: tokenizer, recursive-descent parser, printer.

Canonical form::

    begin
      var g;
      proc main(r, a)
      begin
        var t;
        t := a bitand 255;
        if (t != 0) then { call putchar(r, t) } else { skip };
        while (t > 0) do { t := t - 1 }
      end
    end

Blocks may use ``{ }`` or ``begin``/``end``; ``then``, ``do`` and the else
branch are optional on input.  Binary operators are left-associative with
precedence (tightest first): ``* /``, ``+ -``, ``bitand``, ``bitxor``,
``bitor``, comparisons, ``and``, ``or``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

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
    Program,
    Seq,
    Skip,
    Var,
    While,
    num,
    relabel,
)

KEYWORDS = {
    "begin", "end", "var", "proc", "skip", "if", "then", "else", "while", "do",
    "call", "ref", "bitand", "bitor", "bitxor", "bitnot", "and", "or", "not",
}


class ParseError(Exception):
    def __init__(self, line: int, column: int, expected: str, found: str):
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found
        super().__init__(f"{line}:{column}: expected {expected}, found {found!r}")

    def __reduce__(self):
        return ParseError, (self.line, self.column, self.expected, self.found)


@dataclass(frozen=True)
class Token:
    kind: str  # "id", "kw", "num", "char", "op", "eof"
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|//[^\n]*)
  | (?P<num>0[xX][0-9a-fA-F]+|(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<char>'(?:\\[ntr0\\'"]|\\x[0-9a-fA-F]{2}|[^\\'\n])')
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>:=|!=|<=|>=|[=<>+\-*/(){}\[\];,])
    """,
    re.VERBOSE,
)


def tokenize(src: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(line, col, "a token", src[pos])
        kind = m.lastgroup
        text = m.group()
        if kind != "ws":
            if kind == "id" and text in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, text, line, col))
        nl = text.count("\n")
        if nl:
            line += nl
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    col = pos - line_start + 1
    tokens.append(Token("eof", "", line, col))
    return tokens


_BINARY_LEVELS = [
    ("bitor",),
    ("bitxor",),
    ("bitand",),
    ("+", "-"),
    ("*", "/"),
]
COMPOPS = ("=", "!=", ">", "<", ">=", "<=")


class _Parser:
    def __init__(self, src: str):
        self.toks = tokenize(src)
        self.i = 0
        self.scope: set[str] = set()

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("kw", "op") and t.text in texts

    def error(self, expected: str, tok: Token | None = None) -> ParseError:
        t = tok or self.tok
        return ParseError(t.line, t.col, expected, t.text or "<eof>")

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(repr(text))
        t = self.tok
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def ident(self) -> Token:
        t = self.tok
        if t.kind != "id":
            raise self.error("an identifier")
        self.i += 1
        return t

    # -- program structure

    def program(self) -> Program:
        self.expect("begin")
        globals_ = self.decls()
        functions = []
        names = set()
        while self.at("proc"):
            start = self.tok
            f = self.proc()
            if f.name in names:
                raise self.error("a new procedure name", start)
            names.add(f.name)
            functions.append(f)
            self.accept(";")
        self.expect("end")
        if self.tok.kind != "eof":
            raise self.error("end of input")
        return Program(tuple(functions), tuple(globals_))

    def decls(self) -> list[str]:
        out = []
        while self.accept("var"):
            while True:
                t = self.ident()
                if t.text in out:
                    raise self.error("a fresh variable name", t)
                out.append(t.text)
                if not self.accept(","):
                    break
            self.expect(";")
        return out

    def proc(self) -> Function:
        self.expect("proc")
        name = self.ident().text
        self.expect("(")
        params: list[str] = []
        if not self.at(")"):
            while True:
                t = self.ident()
                if t.text in params:
                    raise self.error("a fresh parameter name", t)
                params.append(t.text)
                if not self.accept(","):
                    break
        self.expect(")")
        self.expect("begin")
        locals_ = self.decls()
        for v in locals_:
            if v in params:
                raise self.error(f"a local distinct from parameter {v!r}")
        self.scope = set(params) | set(locals_)
        body = self.stmt_list(("end",))
        self.expect("end")
        return Function(name, tuple(params), tuple(locals_), relabel(body))

    # -- statements

    def stmt_list(self, closers: tuple[str, ...]):
        items = []
        while not self.at(*closers):
            items.append(self.stmt())
            if not self.accept(";"):
                break
        if not items:
            return Skip()
        out = items[-1]
        for s in reversed(items[:-1]):
            out = Seq(s, out)
        return out

    def block_or_stmt(self):
        if self.accept("{"):
            body = self.stmt_list(("}",))
            self.expect("}")
            return body
        if self.accept("begin"):
            body = self.stmt_list(("end",))
            self.expect("end")
            return body
        return self.stmt()

    def stmt(self):
        t = self.tok
        if self.accept("skip"):
            return Skip()
        if self.at("{", "begin"):
            return self.block_or_stmt()
        if self.accept("if"):
            cond = self.bexpr()
            self.accept("then")
            then = self.block_or_stmt()
            else_ = self.block_or_stmt() if self.accept("else") else Skip()
            return If(cond, then, else_)
        if self.accept("while"):
            cond = self.bexpr()
            self.accept("do")
            return While(cond, self.block_or_stmt())
        if self.accept("call"):
            name = self.ident().text
            self.expect("(")
            args = []
            if not self.at(")"):
                while True:
                    args.append(self.arg())
                    if not self.accept(","):
                        break
            self.expect(")")
            return Call(name, tuple(args))
        if t.kind == "id":
            self.i += 1
            if self.accept("["):
                index = self.expr()
                self.expect("]")
                self.assign_op()
                return ArrayAssign(t.text, index, self.expr())
            self.use(t)
            self.assign_op()
            return Assign(t.text, self.expr())
        raise self.error("a statement")

    def assign_op(self):
        if not (self.accept(":=") or self.accept("=")):
            raise self.error("':='")

    def arg(self) -> Arg:
        if self.accept("ref"):
            t = self.ident()
            self.use(t)
            return Arg(Var(t.text), "ref")
        return Arg(self.expr())

    def use(self, t: Token):
        if t.text not in self.scope:
            raise ParseError(t.line, t.col, "a declared variable", t.text)

    # -- boolean expressions

    def bexpr(self):
        left = self.band()
        while self.accept("or"):
            left = Logop("or", left, self.band())
        return left

    def band(self):
        left = self.bnot()
        while self.accept("and"):
            left = Logop("and", left, self.bnot())
        return left

    def bnot(self):
        if self.accept("not"):
            return Not(self.bnot())
        if self.at("("):
            # '(' opens either a grouped boolean or an arithmetic operand
            saved = self.i
            try:
                self.i += 1
                inner = self.bexpr()
                self.expect(")")
                return inner
            except ParseError as first:
                self.i = saved
                try:
                    return self.comparison()
                except ParseError as second:
                    raise max(first, second, key=lambda e: (e.line, e.column))
        return self.comparison()

    def comparison(self):
        left = self.expr()
        t = self.tok
        if not self.at(*COMPOPS):
            raise self.error("a comparison operator")
        self.i += 1
        return Comp(t.text, left, self.expr())

    # -- arithmetic expressions

    def expr(self, level: int = 0):
        if level == len(_BINARY_LEVELS):
            return self.unary()
        ops = _BINARY_LEVELS[level]
        left = self.expr(level + 1)
        while self.at(*ops):
            op = self.tok.text
            self.i += 1
            right = self.expr(level + 1)
            left = Aop(op, left, right) if op in "+-*/" else Bitop(op, left, right)
        return left

    def unary(self):
        if self.accept("bitnot"):
            return Bitnot(self.unary())
        return self.atom()

    def atom(self):
        t = self.tok
        if t.kind in ("num", "char"):
            self.i += 1
            return num(t.text)
        if t.kind == "id":
            self.i += 1
            if self.accept("["):
                index = self.expr()
                self.expect("]")
                return ArrayRead(t.text, index)
            self.use(t)
            return Var(t.text)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        raise self.error("an expression")


def parse_program(src: str) -> Program:
    """Parse C_simpl text; raises ParseError on the first problem found."""
    return _Parser(src).program()


def parse_function(src: str) -> Function:
    """Parse a single ``proc ... end`` definition."""
    p = _Parser(src)
    f = p.proc()
    if p.tok.kind != "eof":
        raise p.error("end of input")
    return f


# -- printing ---------------------------------------------------------------

_PREC = {"bitor": 1, "bitxor": 2, "bitand": 3, "+": 4, "-": 4, "*": 5, "/": 5}


def _prec(e) -> int:
    if isinstance(e, (Aop, Bitop)):
        return _PREC[e.op]
    return 9


def print_expr(e) -> str:
    match e:
        case Var(name):
            return name
        case Num(lit):
            return lit.text
        case ArrayRead(a, i):
            return f"{a}[{print_expr(i)}]"
        case Bitnot(a):
            inner = print_expr(a)
            return f"bitnot {inner}" if _prec(a) == 9 and not isinstance(a, Bitnot) else f"bitnot ({inner})"
        case Aop(op, l, r) | Bitop(op, l, r):
            p = _PREC[op]
            ls = print_expr(l)
            rs = print_expr(r)
            # arithmetic under a bitwise operator is bracketed for readability
            mixed = isinstance(e, Bitop)
            if _prec(l) < p or (mixed and isinstance(l, Aop)):
                ls = f"({ls})"
            if _prec(r) <= p or (mixed and isinstance(r, Aop)):
                rs = f"({rs})"
            return f"{ls} {op} {rs}"
    raise TypeError(e)


def print_bexpr(b) -> str:
    match b:
        case Comp(op, l, r):
            return f"{print_expr(l)} {op} {print_expr(r)}"
        case Not(a):
            return f"not ({print_bexpr(a)})"
        case Logop(op, l, r):
            ls, rs = print_bexpr(l), print_bexpr(r)
            if isinstance(l, Logop) and l.op == "or" and op == "and":
                ls = f"({ls})"
            if isinstance(r, Logop) and (op == "and" or r.op == "or"):
                rs = f"({rs})"
            return f"{ls} {op} {rs}"
    raise TypeError(b)


def _flatten(s) -> list:
    items = []
    while isinstance(s, Seq):
        items.append(s.first)
        s = s.second
    items.append(s)
    return items


def _print_block(s, depth: int) -> list[str]:
    items = _flatten(s)
    lines: list[str] = []
    for k, item in enumerate(items):
        chunk = _print_stmt(item, depth)
        if k < len(items) - 1:
            chunk[-1] += ";"
        lines.extend(chunk)
    return lines


def _print_stmt(s, depth: int) -> list[str]:
    pad = "  " * depth
    match s:
        case Skip():
            return [pad + "skip"]
        case Assign(lhs, rhs):
            return [f"{pad}{lhs} := {print_expr(rhs)}"]
        case ArrayAssign(a, i, rhs):
            return [f"{pad}{a}[{print_expr(i)}] := {print_expr(rhs)}"]
        case Call(p, args):
            rendered = ", ".join(
                f"ref {a.expr.name}" if a.mode == "ref" else print_expr(a.expr) for a in args
            )
            return [f"{pad}call {p}({rendered})"]
        case Seq():
            return [pad + "{", *_print_block(s, depth + 1), pad + "}"]
        case If(c, a, b):
            return [
                f"{pad}if ({print_bexpr(c)}) then {{",
                *_print_block(a, depth + 1),
                pad + "} else {",
                *_print_block(b, depth + 1),
                pad + "}",
            ]
        case While(c, body):
            return [
                f"{pad}while ({print_bexpr(c)}) do {{",
                *_print_block(body, depth + 1),
                pad + "}",
            ]
    raise TypeError(s)


def print_function(f: Function, depth: int = 0) -> str:
    pad = "  " * depth
    lines = [f"{pad}proc {f.name}({', '.join(f.params)})", pad + "begin"]
    lines += [f"{pad}  var {v};" for v in f.locals]
    lines += _print_block(f.body, depth + 1)
    lines.append(pad + "end")
    return "\n".join(lines)


def pretty_print(p: Program) -> str:
    lines = ["begin"]
    lines += [f"  var {v};" for v in p.globals]
    procs = [print_function(f, 1) for f in p.functions]
    lines.append(";\n".join(procs)) if procs else None
    lines.append("end")
    return "\n".join(lines) + "\n"
