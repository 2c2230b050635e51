"""The sixteen role analyses.

Each role is a ``Gen`` subclass holding the current result set; calling
``gen_<role>(stmt, res)`` evaluates its gen function over a statement.  The
base class supplies the rules shared by almost every role: sequences, both
branches of an ``if`` and ``while`` bodies contribute the union of their
children, and nothing else contributes.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import (
    Aop,
    ArrayAssign,
    ArrayRead,
    Assign,
    Bitnot,
    Bitop,
    Call,
    Comp,
    If,
    Logop,
    Not,
    Num,
    Seq,
    Skip,
    Var,
    While,
    expr_vars,
    is_var,
)
from .engine import AnalysisSpec, Combine, InitKind, Mode, RoleId

EMPTY: frozenset[str] = frozenset()

CHAR_RESULT_FUNCTIONS = ("getchar", "getc", "fgetc", "tolower", "toupper")
CHAR_ARGUMENT_FUNCTIONS = (
    "putchar", "tolower", "toupper", "isalnum", "isblank", "iscntrl", "isdigit",
    "isgraph", "islower", "isprint", "ispunct", "isspace", "isupper", "isxdigit",
)


@dataclass(frozen=True)
class CallRule:
    """Which argument positions (0-based, slot 0 is the return value) a
    recognised library call captures, and for which call arities."""

    role: RoleId
    positions: tuple[int, ...]
    arities: tuple[int, ...] | None  # None: any arity

    def capture(self, args) -> set[str]:
        n = len(args)
        if self.arities is not None and n not in self.arities:
            return set()
        out: set[str] = set()
        for i in self.positions:
            if i < n:
                out |= is_var(args[i].expr)
        return out


def _from(start: int) -> tuple[int, ...]:
    return tuple(range(start, 64))


STDLIB_TABLE: dict[str, tuple[CallRule, ...]] = {
    "open": (CallRule(RoleId.FILE_DESCR, (0,), (3, 4)),),
    "read": (CallRule(RoleId.FILE_DESCR, (1,), (4,)),),
    "write": (CallRule(RoleId.FILE_DESCR, (1,), (4,)),),
    "malloc": (CallRule(RoleId.ARRAY_SIZE, (1,), (2,)),),
    "printf": (CallRule(RoleId.OUTPUT, _from(1), None),),
    "sprintf": (CallRule(RoleId.OUTPUT, _from(2), None),),
    "fprintf": (CallRule(RoleId.OUTPUT, _from(2), None),),
    "getchar": (CallRule(RoleId.CHAR, (0,), (1,)),),
}
for _name in CHAR_RESULT_FUNCTIONS[1:]:
    STDLIB_TABLE[_name] = (CallRule(RoleId.CHAR, (0,), (2,)),)
for _name in CHAR_ARGUMENT_FUNCTIONS:
    STDLIB_TABLE[_name] = STDLIB_TABLE.get(_name, ()) + (CallRule(RoleId.CHAR, (1,), (2,)),)


def stdlib_capture(role: RoleId, proc: str, args) -> set[str]:
    out: set[str] = set()
    for rule in STDLIB_TABLE.get(proc, ()):
        if rule.role is role:
            out |= rule.capture(args)
    return out


class Gen:
    conditions = False  # whether if/while conditions contribute gen(b)

    def __init__(self, res: frozenset[str] = EMPTY):
        self.res = res

    def stmt(self, s) -> set[str]:
        match s:
            case Assign(lhs, rhs):
                return self.assign(lhs, rhs)
            case ArrayAssign(a, i, rhs):
                return self.array_assign(a, i, rhs)
            case If(c, then, else_):
                return self.if_(c, then, else_)
            case Seq(a, b):
                return self.stmt(a) | self.stmt(b)
            case Skip():
                return set()
            case While(c, body):
                return self.while_(c, body)
            case Call(p, args):
                return self.call(p, args)
        raise TypeError(f"not a statement: {s!r}")

    def if_(self, cond, then, else_) -> set[str]:
        out = self.stmt(then) | self.stmt(else_)
        return out | self.bexpr(cond) if self.conditions else out

    def while_(self, cond, body) -> set[str]:
        out = self.stmt(body)
        return out | self.bexpr(cond) if self.conditions else out

    def assign(self, lhs: str, rhs) -> set[str]:
        return set()

    def array_assign(self, array: str, index, rhs) -> set[str]:
        return set()

    def call(self, proc: str, args) -> set[str]:
        return set()

    def expr(self, e) -> set[str]:
        return set()

    def bexpr(self, b) -> set[str]:
        match b:
            case Comp(_, l, r):
                return self.expr(l) | self.expr(r)
            case Not(a):
                return self.bexpr(a)
            case Logop(_, l, r):
                return self.bexpr(l) | self.bexpr(r)
        raise TypeError(f"not a boolean expression: {b!r}")


class ExprGen(Gen):
    """Roles whose evidence sits inside expressions anywhere in the body."""

    conditions = True

    def assign(self, lhs, rhs):
        return self.expr(rhs)

    def array_assign(self, array, index, rhs):
        return self.expr(ArrayRead(array, index)) | self.expr(rhs)

    def call(self, proc, args):
        out: set[str] = set()
        for a in args:
            out |= self.expr(a.expr)
        return out

    def expr(self, e):
        match e:
            case Var() | Num():
                return set()
            case Aop(_, l, r):
                return self.aop(l, r)
            case Bitop(_, l, r):
                return self.bitop(l, r)
            case Bitnot(a):
                return self.bitnot(a)
            case ArrayRead(_, i):
                return self.array_read(i)
        raise TypeError(f"not an expression: {e!r}")

    def aop(self, l, r):
        return self.expr(l) | self.expr(r)

    def bitop(self, l, r):
        return self.expr(l) | self.expr(r)

    def bitnot(self, a):
        return self.expr(a)

    def array_read(self, index):
        return self.expr(index)


# -- one-run positive --------------------------------------------------------


class Bitvector(ExprGen):
    def assign(self, lhs, rhs):
        out = self.expr(rhs)
        if isinstance(rhs, Bitop):
            out.add(lhs)
        return out

    def bitop(self, l, r):
        return set(is_var(l) | is_var(r)) | self.expr(l) | self.expr(r)

    def bitnot(self, a):
        return set(is_var(a)) | self.expr(a)


class FileDescr(Gen):
    def call(self, proc, args):
        return stdlib_capture(RoleId.FILE_DESCR, proc, args)


class ArrayIndex(ExprGen):
    def array_assign(self, array, index, rhs):
        return set(is_var(index)) | self.expr(index) | self.expr(rhs)

    def array_read(self, index):
        return set(is_var(index)) | self.expr(index)


class ArraySize(Gen):
    def call(self, proc, args):
        return stdlib_capture(RoleId.ARRAY_SIZE, proc, args)


class UnresAssign(Gen):
    def assign(self, lhs, rhs):
        return {lhs} if isinstance(rhs, ArrayRead) else set()


class Output(Gen):
    def call(self, proc, args):
        return stdlib_capture(RoleId.OUTPUT, proc, args)


class Input(Gen):
    def call(self, proc, args):
        out: set[str] = set()
        for a in args:
            if a.mode == "ref":
                out |= is_var(a.expr)
        return out


class BranchCond(Gen):
    def if_(self, cond, then, else_):
        return set(expr_vars(cond)) | self.stmt(then) | self.stmt(else_)


class UsedInArithm(ExprGen):
    def aop(self, l, r):
        return set(is_var(l) | is_var(r)) | self.expr(l) | self.expr(r)


def cond_operands(b) -> set[str]:
    """Variables standing directly as operands of a comparison in ``b``."""
    match b:
        case Comp(_, l, r):
            return set(is_var(l) | is_var(r))
        case Not(a):
            return cond_operands(a)
        case Logop(_, l, r):
            return cond_operands(l) | cond_operands(r)
    raise TypeError(b)


def assigned_vars(s) -> set[str]:
    match s:
        case Assign(lhs, _):
            return {lhs}
        case If(_, a, b) | Seq(a, b):
            return assigned_vars(a) | assigned_vars(b)
        case While(_, body):
            return assigned_vars(body)
    return set()


class LoopIt(Gen):
    def while_(self, cond, body):
        return (cond_operands(cond) & assigned_vars(body)) | self.stmt(body)


# -- negative roles and fixpoint roles ----------------------------------------


class SyntConst(Gen):
    def assign(self, lhs, rhs):
        return {lhs}


def sum_operand(e) -> set[str]:
    """The variable incremented or decremented by a constant, if ``e`` is one."""
    match e:
        case Var(name):
            return {name}
        case Aop("+", l, Num()):
            return set(is_var(l))
        case Aop("+", Num(), r):
            return set(is_var(r))
        case Aop("-", l, Num()):
            return set(is_var(l))
    return set()


class Counter(Gen):
    def assign(self, lhs, rhs):
        if isinstance(rhs, Num) and rhs.lit.is_zero():
            return set()
        return {lhs} - sum_operand(rhs)


class Linear(Gen):
    def lin(self, e) -> bool:
        match e:
            case Num():
                return True
            case Var(name):
                return name in self.res
            case Aop("+" | "-", l, r):
                return self.lin(l) and self.lin(r)
            case Aop("*", Num(), r):
                return self.lin(r)
            case Aop("*", l, Num()):
                return self.lin(l)
        return False

    def assign(self, lhs, rhs):
        return set() if self.lin(rhs) else {lhs}


class ConstAssign(Gen):
    def is_const(self, e) -> bool:
        match e:
            case Num():
                return True
            case Var(name):
                return name in self.res
            case Aop(_, l, r) | Bitop(_, l, r):
                return self.is_const(l) and self.is_const(r)
            case Bitnot(a):
                return self.is_const(a)
        return False

    def assign(self, lhs, rhs):
        return set() if self.is_const(rhs) else {lhs}


class Bool(ExprGen):
    def is_bool(self, e) -> bool:
        match e:
            case Var(name):
                return name in self.res
            case Num(lit):
                return lit.kind == "int" and lit.value in (0, 1)
        return False

    def assign(self, lhs, rhs):
        out = self.expr(rhs)
        if not self.is_bool(rhs):
            out.add(lhs)
        return out

    def aop(self, l, r):
        return set(is_var(l) | is_var(r)) | self.expr(l) | self.expr(r)

    bitop = aop

    def bitnot(self, a):
        return set(is_var(a)) | self.expr(a)


class Char(Gen):
    def is_char(self, e) -> bool:
        match e:
            case Num(lit):
                return lit.kind == "char"
            case Var(name):
                return name in self.res
        return False

    def assign(self, lhs, rhs):
        return {lhs} if self.is_char(rhs) else set()

    def call(self, proc, args):
        return stdlib_capture(RoleId.CHAR, proc, args)


# -- registry -----------------------------------------------------------------


def _gen_fn(cls):
    def gen(s, res=EMPTY):
        return frozenset(cls(frozenset(res)).stmt(s))

    gen.__name__ = f"gen_{cls.__name__.lower()}"
    gen.__qualname__ = gen.__name__
    return gen


gen_bitvector = _gen_fn(Bitvector)
gen_file_descr = _gen_fn(FileDescr)
gen_array_index = _gen_fn(ArrayIndex)
gen_array_size = _gen_fn(ArraySize)
gen_unres_assign = _gen_fn(UnresAssign)
gen_output = _gen_fn(Output)
gen_input = _gen_fn(Input)
gen_branch_cond = _gen_fn(BranchCond)
gen_used_in_arithm = _gen_fn(UsedInArithm)
gen_loop_it = _gen_fn(LoopIt)
gen_synt_const = _gen_fn(SyntConst)
gen_linear = _gen_fn(Linear)
gen_counter = _gen_fn(Counter)
gen_const_assign = _gen_fn(ConstAssign)
gen_bool = _gen_fn(Bool)
gen_char = _gen_fn(Char)

_POS1 = (InitKind.EMPTY, Combine.UNION, Mode.ONE_RUN)
_NEG1 = (InitKind.ALL_VARS, Combine.SET_MINUS, Mode.ONE_RUN)
_POSF = (InitKind.EMPTY, Combine.UNION, Mode.FIXED_POINT)
_NEGF = (InitKind.ALL_VARS, Combine.SET_MINUS, Mode.FIXED_POINT)

DESCRIPTIONS = {
    RoleId.SYNT_CONST: "never the target of an assignment",
    RoleId.CONST_ASSIGN: "only ever receives literals or other constant-assigned variables",
    RoleId.COUNTER: "only reset to zero or stepped by a constant",
    RoleId.LINEAR: "only receives linear combinations of linear variables",
    RoleId.BOOL: "only holds 0, 1 or other flags and never feeds arithmetic",
    RoleId.INPUT: "passed by reference to some call",
    RoleId.OUTPUT: "printed through printf, sprintf or fprintf",
    RoleId.BRANCH_COND: "appears in an if condition",
    RoleId.BITVECTOR: "operand or target of a bitwise and/or/xor/not",
    RoleId.UNRES_ASSIGN: "receives an array element or dereferenced value",
    RoleId.CHAR: "receives character data (literals, char variables, ctype calls)",
    RoleId.LOOP_IT: "compared in a loop condition and assigned in its body",
    RoleId.FILE_DESCR: "result of open() or descriptor argument of read()/write()",
    RoleId.ARRAY_INDEX: "used directly as an array subscript",
    RoleId.ARRAY_SIZE: "size argument of malloc()",
    RoleId.USED_IN_ARITHM: "operand of + - * /",
}

_TABLE = [
    (RoleId.SYNT_CONST, _NEG1, gen_synt_const),
    (RoleId.CONST_ASSIGN, _NEGF, gen_const_assign),
    (RoleId.COUNTER, _NEGF, gen_counter),
    (RoleId.LINEAR, _NEGF, gen_linear),
    (RoleId.BOOL, _NEGF, gen_bool),
    (RoleId.INPUT, _POS1, gen_input),
    (RoleId.OUTPUT, _POS1, gen_output),
    (RoleId.BRANCH_COND, _POS1, gen_branch_cond),
    (RoleId.BITVECTOR, _POS1, gen_bitvector),
    (RoleId.UNRES_ASSIGN, _POS1, gen_unres_assign),
    (RoleId.CHAR, _POSF, gen_char),
    (RoleId.LOOP_IT, _POS1, gen_loop_it),
    (RoleId.FILE_DESCR, _POS1, gen_file_descr),
    (RoleId.ARRAY_INDEX, _POS1, gen_array_index),
    (RoleId.ARRAY_SIZE, _POS1, gen_array_size),
    (RoleId.USED_IN_ARITHM, _POS1, gen_used_in_arithm),
]

CATALOG: tuple[AnalysisSpec, ...] = tuple(
    AnalysisSpec(role, *family, gen=gen) for role, family, gen in _TABLE
)
SPECS: dict[RoleId, AnalysisSpec] = {spec.role: spec for spec in CATALOG}


def select(roles: Sequence[RoleId | str] | None = None) -> tuple[AnalysisSpec, ...]:
    """Catalog restricted to ``roles`` (all when None), in canonical order."""
    if roles is None:
        return CATALOG
    wanted = {r if isinstance(r, RoleId) else RoleId.parse(r) for r in roles}
    return tuple(spec for spec in CATALOG if spec.role in wanted)
