"""Hypothesis strategies for well-formed C_simpl trees."""
from hypothesis import strategies as st

from varroles.core import (
    AOPS, BITOPS, COMPOPS, LOGOPS, Arg, ArrayAssign, ArrayRead, Assign, Aop, Bitnot, Bitop,
    Call, Comp, Function, If, Logop, Not, Program, Seq, Skip, Var, While, num, relabel,
)

VARS = ("a", "b", "i", "n", "val")
LITS = ("0", "1", "7", "42", "0x10", "010", "0.5", "2.5e3", "'a'", "'\\n'", "'\\''", "'\\\\'")

var_names = st.sampled_from(VARS)
array_names = st.sampled_from(("arr", "mem", "buf"))

exprs = st.recursive(
    st.one_of(var_names.map(Var), st.sampled_from(LITS).map(num)),
    lambda sub: st.one_of(
        st.builds(Aop, st.sampled_from(AOPS), sub, sub),
        st.builds(Bitop, st.sampled_from(BITOPS), sub, sub),
        st.builds(Bitnot, sub),
        st.builds(ArrayRead, array_names, sub),
    ),
    max_leaves=8,
)

bexprs = st.recursive(
    st.builds(Comp, st.sampled_from(COMPOPS), exprs, exprs),
    lambda sub: st.one_of(st.builds(Not, sub), st.builds(Logop, st.sampled_from(LOGOPS), sub, sub)),
    max_leaves=4,
)

args = st.one_of(exprs.map(Arg), var_names.map(lambda v: Arg(Var(v), "ref")))

atoms = st.one_of(
    st.builds(Assign, var_names, exprs),
    st.builds(ArrayAssign, array_names, exprs, exprs),
    st.builds(Skip),
    st.builds(Call, st.sampled_from(("p", "read", "printf", "getchar")), st.lists(args, max_size=4).map(tuple)),
)

stmts = st.recursive(
    atoms,
    lambda sub: st.one_of(
        st.builds(If, bexprs, sub, sub),
        st.builds(While, bexprs, sub),
        st.builds(Seq, sub, sub),
    ),
    max_leaves=10,
)


@st.composite
def functions(draw, name="f"):
    k = draw(st.integers(0, len(VARS)))
    params = tuple(VARS[:k])
    return Function(name, params, tuple(VARS[k:]), relabel(draw(stmts)))


@st.composite
def programs(draw):
    n = draw(st.integers(0, 3))
    fs = tuple(draw(functions(name=f"proc{i}")) for i in range(n))
    globs = tuple(draw(st.lists(st.sampled_from(("g", "h", "total")), unique=True, max_size=3)))
    return Program(fs, globs)
