"""Brute-force reference for the role equations.

Each role's gen is a direct, self-contained transcription of its defining
equations (one recursive function per role, nothing shared with the package
beyond the AST node classes).  Results are found by enumerating every subset
of the function's variables and selecting the solution the family calls for:
the unique value for one-run roles, the least solution of Res = gen(Res) for
the positive fixpoint role and the greatest solution of Res = Vars - gen(Res)
for the negative fixpoint roles.
"""
from __future__ import annotations

from itertools import combinations

from varroles.core import (
    Aop, ArrayAssign, ArrayRead, Assign, Bitnot, Bitop, Call, Comp, If, Logop, Not, Num,
    Seq, Skip, Var, While,
)

E = frozenset()


def isvar(e):
    return frozenset([e.name]) if isinstance(e, Var) else E


def is_num(e):
    return isinstance(e, Num)


def walk(s, on_assign=lambda v, e: E, on_aassign=lambda a, i, e: E, on_call=lambda p, args: E,
         on_if=None, on_while=None, on_cond=lambda b: E):
    """Statement-level skeleton shared by the transcriptions below."""
    def go(t):
        match t:
            case Assign(v, e):
                return on_assign(v, e)
            case ArrayAssign(a, i, e):
                return on_aassign(a, i, e)
            case If(b, s1, s2):
                if on_if is not None:
                    return on_if(b, s1, s2, go)
                return on_cond(b) | go(s1) | go(s2)
            case Seq(s1, s2):
                return go(s1) | go(s2)
            case Skip():
                return E
            case While(b, body):
                if on_while is not None:
                    return on_while(b, body, go)
                return on_cond(b) | go(body)
            case Call(p, args):
                return on_call(p, args)
        raise TypeError(t)
    return go(s)


def bool_walk(b, on_expr):
    match b:
        case Comp(_, l, r):
            return on_expr(l) | on_expr(r)
        case Not(a):
            return bool_walk(a, on_expr)
        case Logop(_, l, r):
            return bool_walk(l, on_expr) | bool_walk(r, on_expr)
    raise TypeError(b)


# -- BITVECTOR -----------------------------------------------------------------

def bv_e(e):
    match e:
        case Var() | Num():
            return E
        case Bitop(_, l, r):
            return isvar(l) | isvar(r) | bv_e(l) | bv_e(r)
        case Aop(_, l, r):
            return bv_e(l) | bv_e(r)
        case Bitnot(a):
            return isvar(a) | bv_e(a)
        case ArrayRead(_, i):
            return bv_e(i)
    raise TypeError(e)


def gen_bitvector(s, res):
    return walk(
        s,
        on_assign=lambda v, e: bv_e(e) | (frozenset([v]) if isinstance(e, Bitop) else E),
        on_aassign=lambda a, i, e: bv_e(ArrayRead(a, i)) | bv_e(e),
        on_call=lambda p, args: frozenset().union(*[bv_e(x.expr) for x in args]),
        on_cond=lambda b: bool_walk(b, bv_e),
    )


# -- FILE_DESCR / ARRAY_SIZE / OUTPUT / INPUT / UNRES_ASSIGN -------------------

def gen_file_descr(s, res):
    def call(p, args):
        n = len(args)
        if p == "open" and 3 <= n <= 4:
            return isvar(args[0].expr)
        if p in ("read", "write") and n == 4:
            return isvar(args[1].expr)
        return E
    return walk(s, on_call=call)


def gen_array_size(s, res):
    def call(p, args):
        if p == "malloc" and len(args) == 2:
            return isvar(args[1].expr)
        return E
    return walk(s, on_call=call)


def gen_unres_assign(s, res):
    return walk(s, on_assign=lambda v, e: frozenset([v]) if isinstance(e, ArrayRead) else E)


def gen_output(s, res):
    def call(p, args):
        # positions are 1-based in the equations
        if p == "printf":
            first = 2
        elif p in ("sprintf", "fprintf"):
            first = 3
        else:
            return E
        out = E
        for i in range(first, len(args) + 1):
            out |= isvar(args[i - 1].expr)
        return out
    return walk(s, on_call=call)


def gen_input(s, res):
    def call(p, args):
        out = E
        for x in args:
            if x.mode == "ref":
                out |= isvar(x.expr)
        return out
    return walk(s, on_call=call)


# -- ARRAY_INDEX ---------------------------------------------------------------

def ai_e(e):
    match e:
        case Var() | Num():
            return E
        case ArrayRead(_, i):
            return isvar(i) | ai_e(i)
        case Aop(_, l, r) | Bitop(_, l, r):
            return ai_e(l) | ai_e(r)
        case Bitnot(a):
            return ai_e(a)
    raise TypeError(e)


def gen_array_index(s, res):
    return walk(
        s,
        on_assign=lambda v, e: ai_e(e),
        on_aassign=lambda a, i, e: isvar(i) | ai_e(i) | ai_e(e),
        on_call=lambda p, args: frozenset().union(*[ai_e(x.expr) for x in args]),
        on_cond=lambda b: bool_walk(b, ai_e),
    )


# -- BRANCH_COND ---------------------------------------------------------------

def vars_of(e):
    match e:
        case Num():
            return E
        case Var(v):
            return frozenset([v])
        case Logop(_, l, r) | Comp(_, l, r) | Aop(_, l, r) | Bitop(_, l, r):
            return vars_of(l) | vars_of(r)
        case Not(a) | Bitnot(a):
            return vars_of(a)
        case ArrayRead(_, i):
            return vars_of(i)
    raise TypeError(e)


def gen_branch_cond(s, res):
    return walk(s, on_if=lambda b, s1, s2, go: vars_of(b) | go(s1) | go(s2))


# -- USED_IN_ARITHM ------------------------------------------------------------

def ua_e(e):
    match e:
        case Var() | Num():
            return E
        case Aop(_, l, r):
            return isvar(l) | isvar(r) | ua_e(l) | ua_e(r)
        case Bitop(_, l, r):
            return ua_e(l) | ua_e(r)
        case Bitnot(a):
            return ua_e(a)
        case ArrayRead(_, i):
            return ua_e(i)
    raise TypeError(e)


def gen_used_in_arithm(s, res):
    return walk(
        s,
        on_assign=lambda v, e: ua_e(e),
        on_aassign=lambda a, i, e: ua_e(i) | ua_e(e),
        on_call=lambda p, args: frozenset().union(*[ua_e(x.expr) for x in args]),
        on_cond=lambda b: bool_walk(b, ua_e),
    )


# -- LOOP_IT -------------------------------------------------------------------

def vars_b(b):
    return bool_walk(b, isvar)


def vars_s(s):
    match s:
        case Assign(v, _):
            return frozenset([v])
        case If(_, s1, s2) | Seq(s1, s2):
            return vars_s(s1) | vars_s(s2)
        case While(_, body):
            return vars_s(body)
    return E


def gen_loop_it(s, res):
    return walk(s, on_while=lambda b, body, go: (vars_b(b) & vars_s(body)) | go(body))


# -- SYNT_CONST ----------------------------------------------------------------

def gen_synt_const(s, res):
    return walk(s, on_assign=lambda v, e: frozenset([v]))


# -- LINEAR --------------------------------------------------------------------

def lin(e, res):
    match e:
        case Num():
            return True
        case Var(v):
            return v in res
        case Aop("+", l, r) | Aop("-", l, r):
            return lin(l, res) and lin(r, res)
        case Aop("*", l, r):
            if is_num(l):
                return lin(r, res)
            if is_num(r):
                return lin(l, res)
            return False
    return False


def gen_linear(s, res):
    return walk(s, on_assign=lambda v, e: E if lin(e, res) else frozenset([v]))


# -- COUNTER -------------------------------------------------------------------

def sumd(e):
    match e:
        case Num():
            return E
        case Var(v):
            return frozenset([v])
        case Aop("+", l, r):
            if is_num(r):
                return isvar(l)
            if is_num(l):
                return isvar(r)
            return E
        case Aop("-", l, r):
            return isvar(l) if is_num(r) else E
    return E


def gen_counter(s, res):
    def assign(v, e):
        if is_num(e) and e.lit.kind == "int" and e.lit.value == 0:
            return E
        return frozenset([v]) - sumd(e)
    return walk(s, on_assign=assign)


# -- CONST_ASSIGN --------------------------------------------------------------

def is_const(e, res):
    match e:
        case Num():
            return True
        case Var(v):
            return v in res
        case Aop(_, l, r) | Bitop(_, l, r):
            return is_const(l, res) and is_const(r, res)
        case Bitnot(a):
            return is_const(a, res)
    return False


def gen_const_assign(s, res):
    return walk(s, on_assign=lambda v, e: E if is_const(e, res) else frozenset([v]))


# -- BOOL ----------------------------------------------------------------------

def bool_e(e):
    match e:
        case Var() | Num():
            return E
        case Aop(_, l, r) | Bitop(_, l, r):
            return isvar(l) | isvar(r) | bool_e(l) | bool_e(r)
        case Bitnot(a):
            return isvar(a) | bool_e(a)
        case ArrayRead(_, i):
            return bool_e(i)
    raise TypeError(e)


def is_bool(e, res):
    match e:
        case Var(v):
            return v in res
        case Num(lit):
            return lit.kind == "int" and lit.value in (0, 1)
    return False


def gen_bool(s, res):
    return walk(
        s,
        on_assign=lambda v, e: bool_e(e) | (E if is_bool(e, res) else frozenset([v])),
        on_aassign=lambda a, i, e: bool_e(i) | bool_e(e),
        on_call=lambda p, args: frozenset().union(*[bool_e(x.expr) for x in args]),
        on_cond=lambda b: bool_walk(b, bool_e),
    )


# -- CHAR ----------------------------------------------------------------------

CHAR_FIRST = {"getc", "fgetc", "tolower", "toupper"}
CHAR_SECOND = {
    "putchar", "tolower", "toupper", "isalnum", "isblank", "iscntrl", "isdigit", "isgraph",
    "islower", "isprint", "ispunct", "isspace", "isupper", "isxdigit",
}


def is_char(e, res):
    match e:
        case Num(lit):
            return lit.kind == "char"
        case Var(v):
            return v in res
    return False


def gen_char(s, res):
    def call(p, args):
        n = len(args)
        out = E
        if (n == 1 and p == "getchar") or (n == 2 and p in CHAR_FIRST):
            out |= isvar(args[0].expr)
        if n == 2 and p in CHAR_SECOND:
            out |= isvar(args[1].expr)
        return out
    return walk(s, on_assign=lambda v, e: frozenset([v]) if is_char(e, res) else E, on_call=call)


# -- solving -------------------------------------------------------------------

ONE_RUN_POS = {
    "BITVECTOR": gen_bitvector, "FILE_DESCR": gen_file_descr, "ARRAY_INDEX": gen_array_index,
    "ARRAY_SIZE": gen_array_size, "UNRES_ASSIGN": gen_unres_assign, "OUTPUT": gen_output,
    "INPUT": gen_input, "BRANCH_COND": gen_branch_cond, "USED_IN_ARITHM": gen_used_in_arithm,
    "LOOP_IT": gen_loop_it,
}
ONE_RUN_NEG = {"SYNT_CONST": gen_synt_const}
FIXED_NEG = {"LINEAR": gen_linear, "COUNTER": gen_counter, "CONST_ASSIGN": gen_const_assign, "BOOL": gen_bool}
FIXED_POS = {"CHAR": gen_char}
ALL = {**ONE_RUN_POS, **ONE_RUN_NEG, **FIXED_NEG, **FIXED_POS}


def subsets(xs):
    xs = sorted(xs)
    for k in range(len(xs) + 1):
        for c in combinations(xs, k):
            yield frozenset(c)


def solve(role: str, f) -> frozenset:
    variables = frozenset(f.params) | frozenset(f.locals)
    gen = ALL[role]
    if role in ONE_RUN_POS:
        return gen(f.body, E)
    if role in ONE_RUN_NEG:
        return variables - gen(f.body, variables)
    if role in FIXED_NEG:
        sols = [S for S in subsets(variables) if S == variables - gen(f.body, S)]
        best = max(sols, key=len)
        assert all(S <= best for S in sols), "no greatest solution"
        return best
    sols = [S for S in subsets(variables) if S == gen(f.body, S)]
    least = min(sols, key=len)
    assert all(least <= S for S in sols), "no least solution"
    return least
