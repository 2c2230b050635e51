"""Abstract syntax of the C_simpl mini-language.

Expressions, boolean expressions and statements are immutable dataclasses.
Statement labels are diagnostic only and excluded from equality, so two trees
that differ only in labelling compare equal.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Iterator, Union

AOPS = ("+", "-", "*", "/")
BITOPS = ("bitor", "bitand", "bitxor")
COMPOPS = ("=", "!=", ">", "<", ">=", "<=")
LOGOPS = ("and", "or")


class WellFormednessError(ValueError):
    pass


@dataclass(frozen=True)
class NumLit:
    kind: str  # "int" | "float" | "char"
    text: str
    value: Union[int, float]

    def is_zero(self) -> bool:
        return self.kind == "int" and self.value == 0


# -- arithmetic expressions -------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Num:
    lit: NumLit


@dataclass(frozen=True)
class Aop:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Bitop:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Bitnot:
    arg: "Expr"


@dataclass(frozen=True)
class ArrayRead:
    array: str
    index: "Expr"


Expr = Union[Var, Num, Aop, Bitop, Bitnot, ArrayRead]


# -- boolean expressions ----------------------------------------------------


@dataclass(frozen=True)
class Comp:
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Not:
    arg: "BoolExpr"


@dataclass(frozen=True)
class Logop:
    op: str
    left: "BoolExpr"
    right: "BoolExpr"


BoolExpr = Union[Comp, Not, Logop]


# -- statements -------------------------------------------------------------


@dataclass(frozen=True)
class Arg:
    expr: Expr
    mode: str = "value"  # "value" | "ref"

    def __post_init__(self):
        if self.mode not in ("value", "ref"):
            raise WellFormednessError(f"bad argument mode {self.mode!r}")
        if self.mode == "ref" and not isinstance(self.expr, Var):
            raise WellFormednessError("only a bare variable can be passed by reference")


@dataclass(frozen=True)
class Assign:
    lhs: str
    rhs: Expr
    label: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ArrayAssign:
    array: str
    index: Expr
    rhs: Expr
    label: int = field(default=0, compare=False)


@dataclass(frozen=True)
class If:
    cond: BoolExpr
    then: "Stmt"
    else_: "Stmt"
    label: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Seq:
    first: "Stmt"
    second: "Stmt"
    label: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Skip:
    label: int = field(default=0, compare=False)


@dataclass(frozen=True)
class While:
    cond: BoolExpr
    body: "Stmt"
    label: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    proc: str
    args: tuple[Arg, ...] = ()
    label: int = field(default=0, compare=False)


Stmt = Union[Assign, ArrayAssign, If, Seq, Skip, While, Call]
EXPR_TYPES = (Var, Num, Aop, Bitop, Bitnot, ArrayRead)
BOOL_TYPES = (Comp, Not, Logop)
STMT_TYPES = (Assign, ArrayAssign, If, Seq, Skip, While, Call)


@dataclass(frozen=True)
class Function:
    name: str
    params: tuple[str, ...] = ()
    locals: tuple[str, ...] = ()
    body: Stmt = field(default_factory=Skip)


@dataclass(frozen=True)
class Program:
    functions: tuple[Function, ...] = ()
    globals: tuple[str, ...] = ()

    def function(self, name: str) -> Function:
        for f in self.functions:
            if f.name == name:
                return f
        raise KeyError(name)


# -- helpers ----------------------------------------------------------------


def num(text: str) -> Num:
    """Build a numeric literal node from its source spelling."""
    if text.startswith("'"):
        return Num(NumLit("char", text, char_value(text)))
    if any(c in text for c in ".eE") and not text.lower().startswith("0x"):
        return Num(NumLit("float", text, float(text)))
    return Num(NumLit("int", text, int(text, 0) if not _is_octal(text) else int(text, 8)))


def _is_octal(text: str) -> bool:
    return len(text) > 1 and text[0] == "0" and text[1:].isdigit()


_ESCAPES = {"n": "\n", "t": "\t", "0": "\0", "\\": "\\", "'": "'", "r": "\r", '"': '"'}


def char_value(text: str) -> int:
    body = text[1:-1]
    if body.startswith("\\x"):
        return int(body[2:], 16)
    if body.startswith("\\"):
        return ord(_ESCAPES[body[1]])
    return ord(body)


def seq(*stmts: Stmt) -> Stmt:
    """Canonical right-nested sequence of ``stmts``.

    Nested sequences are flattened and skips dropped; no statements at all
    gives skip.
    """
    items: list[Stmt] = []

    def flat(s):
        if isinstance(s, Seq):
            flat(s.first)
            flat(s.second)
        elif not isinstance(s, Skip):
            items.append(s)

    for s in stmts:
        flat(s)
    if not items:
        return Skip()
    out = items[-1]
    for s in reversed(items[:-1]):
        out = Seq(s, out)
    return out


def is_var(node) -> frozenset[str]:
    if isinstance(node, Var):
        return frozenset((node.name,))
    return frozenset()


def declared_vars(f: Function) -> frozenset[str]:
    return frozenset(f.params) | frozenset(f.locals)


def sub_statements(s: Stmt) -> Iterator[Stmt]:
    """Pre-order walk over a statement tree."""
    yield s
    if isinstance(s, If):
        yield from sub_statements(s.then)
        yield from sub_statements(s.else_)
    elif isinstance(s, Seq):
        yield from sub_statements(s.first)
        yield from sub_statements(s.second)
    elif isinstance(s, While):
        yield from sub_statements(s.body)


def expr_vars(e) -> set[str]:
    """Every scalar variable mentioned in an expression or boolean expression."""
    match e:
        case Var(name):
            return {name}
        case Num():
            return set()
        case Aop(_, l, r) | Bitop(_, l, r) | Comp(_, l, r) | Logop(_, l, r):
            return expr_vars(l) | expr_vars(r)
        case Bitnot(a) | Not(a):
            return expr_vars(a)
        case ArrayRead(_, i):
            return expr_vars(i)
    raise TypeError(e)


def stmt_vars(s: Stmt) -> set[str]:
    out: set[str] = set()
    for t in sub_statements(s):
        match t:
            case Assign(lhs, rhs):
                out |= {lhs} | expr_vars(rhs)
            case ArrayAssign(_, i, rhs):
                out |= expr_vars(i) | expr_vars(rhs)
            case If(c, _, _) | While(c, _):
                out |= expr_vars(c)
            case Call(_, args):
                for a in args:
                    out |= expr_vars(a.expr)
    return out


def relabel(s: Stmt, start: int = 1) -> Stmt:
    """Assign pre-order labels starting at ``start``."""
    counter = iter(range(start, 1 << 62))

    def go(t: Stmt) -> Stmt:
        label = next(counter)
        match t:
            case If(c, a, b):
                return If(c, go(a), go(b), label=label)
            case Seq(a, b):
                return Seq(go(a), go(b), label=label)
            case While(c, body):
                return While(c, go(body), label=label)
        return dataclasses.replace(t, label=label)

    return go(s)


def validate_function(f: Function) -> None:
    decls = list(f.params) + list(f.locals)
    seen = set()
    for v in decls:
        if not v or not (v[0].isalpha() or v[0] == "_"):
            raise WellFormednessError(f"{f.name}: bad variable name {v!r}")
        if v in seen:
            raise WellFormednessError(f"{f.name}: variable {v!r} declared twice")
        seen.add(v)
    undeclared = stmt_vars(f.body) - seen
    if undeclared:
        raise WellFormednessError(f"{f.name}: undeclared variables {sorted(undeclared)}")


def validate_program(p: Program) -> None:
    names = [f.name for f in p.functions]
    if len(set(names)) != len(names):
        raise WellFormednessError("duplicate function names")
    for f in p.functions:
        validate_function(f)
