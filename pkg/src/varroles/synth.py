"""Random C_simpl programs and synthetic labelled corpora.

``random_function`` feeds the property tests; ``generate_corpus`` writes
category directories whose role profiles are controlled by per-category
template weights.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

from .core import (
    AOPS,
    BITOPS,
    COMPOPS,
    LOGOPS,
    Arg,
    ArrayAssign,
    ArrayRead,
    Assign,
    Aop,
    Bitnot,
    Bitop,
    Call,
    Comp,
    Function,
    If,
    Logop,
    Not,
    Program,
    Seq,
    Skip,
    Var,
    While,
    num,
    relabel,
)
from .parser import print_function

LITERALS = ("0", "1", "2", "10", "0x1f", "017", "'a'", "'0'", "'\\n'", "0.5", "1e3")
ARRAYS = ("a", "buf")
# library calls with the arities the recognition rules look for, plus an unknown one
PROC_ARITIES = {
    "open": (3, 4), "read": (4,), "write": (4,), "malloc": (2,), "printf": (1, 2, 3),
    "sprintf": (2, 3, 4), "fprintf": (3, 4), "getchar": (1,), "getc": (2,), "putchar": (2,),
    "isdigit": (2,), "tolower": (2,), "toupper": (2,), "foo": (0, 1, 2),
}
PROCS = tuple(PROC_ARITIES)


@dataclass
class GenConfig:
    max_vars: int = 4
    max_stmts: int = 8
    max_expr_depth: int = 3
    max_args: int = 4


class _FunctionGen:
    def __init__(self, rng: random.Random, cfg: GenConfig, variables: list[str]):
        self.rng = rng
        self.cfg = cfg
        self.vars = variables
        self.budget = 0

    def expr(self, depth=0):
        r = self.rng
        if depth >= self.cfg.max_expr_depth or r.random() < 0.35:
            if self.vars and r.random() < 0.6:
                return Var(r.choice(self.vars))
            return num(r.choice(LITERALS))
        k = r.randrange(4)
        if k == 0:
            return Aop(r.choice(AOPS), self.expr(depth + 1), self.expr(depth + 1))
        if k == 1:
            return Bitop(r.choice(BITOPS), self.expr(depth + 1), self.expr(depth + 1))
        if k == 2:
            return Bitnot(self.expr(depth + 1))
        return ArrayRead(r.choice(ARRAYS), self.expr(depth + 1))

    def bexpr(self, depth=0):
        r = self.rng
        if depth >= 2 or r.random() < 0.6:
            return Comp(r.choice(COMPOPS), self.expr(1), self.expr(1))
        if r.random() < 0.3:
            return Not(self.bexpr(depth + 1))
        return Logop(r.choice(LOGOPS), self.bexpr(depth + 1), self.bexpr(depth + 1))

    def arg(self):
        if self.vars and self.rng.random() < 0.25:
            return Arg(Var(self.rng.choice(self.vars)), "ref")
        return Arg(self.expr(1))

    def stmt(self):
        """One statement; compound ones draw their children from the same budget."""
        r = self.rng
        self.budget -= 1
        choices = ["assign", "assign", "array", "call", "skip"]
        if self.budget >= 1:
            choices += ["if", "while", "seq"]
        kind = r.choice(choices)
        if kind == "assign" and self.vars:
            return Assign(r.choice(self.vars), self.expr())
        if kind in ("assign", "array"):
            return ArrayAssign(r.choice(ARRAYS), self.expr(1), self.expr())
        if kind == "call":
            proc = r.choice(PROCS)
            if r.random() < 0.7:
                n = r.choice(PROC_ARITIES[proc])
            else:
                n = r.randint(0, self.cfg.max_args)
            return Call(proc, tuple(self.arg() for _ in range(n)))
        if kind == "skip":
            return Skip()
        if kind == "if":
            then = self.stmt()
            other = self.stmt() if self.budget >= 1 and r.random() < 0.6 else Skip()
            return If(self.bexpr(), then, other)
        if kind == "while":
            return While(self.bexpr(), self.stmt())
        return Seq(self.stmt(), self.stmt() if self.budget >= 1 else Skip())


def random_function(rng: random.Random, cfg: GenConfig | None = None, name: str = "f") -> Function:
    """A well-formed random function with at most cfg.max_vars variables and cfg.max_stmts statements."""
    cfg = cfg or GenConfig()
    n = rng.randint(1, cfg.max_vars)
    variables = [f"v{i}" for i in range(n)]
    n_params = rng.randint(0, n)
    g = _FunctionGen(rng, cfg, variables)
    while True:
        # the budget is approximate (implicit else-skips are free), so redraw on overflow
        g.budget = rng.randint(1, cfg.max_stmts)
        body = g.stmt()
        while g.budget > 0:
            body = Seq(body, g.stmt())
        if count_statements(body) <= cfg.max_stmts:
            break
    return Function(name, tuple(variables[:n_params]), tuple(variables[n_params:]), relabel(body))


def random_program(rng: random.Random, cfg: GenConfig | None = None) -> Program:
    k = rng.randint(1, 3)
    globs = tuple(f"g{i}" for i in range(rng.randint(0, 2)))
    return Program(tuple(random_function(rng, cfg, name=f"p{i}") for i in range(k)), globs)


def count_statements(s) -> int:
    """Statements in a tree; sequencing itself is not counted."""
    match s:
        case If(_, a, b):
            return 1 + count_statements(a) + count_statements(b)
        case Seq(a, b):
            return count_statements(a) + count_statements(b)
        case While(_, b):
            return 1 + count_statements(b)
    return 1


# -- labelled corpora --------------------------------------------------------

# Each template is a small idiom that gives one variable a recognisable role
# mix.  ``v`` is the variable being shaped, ``w`` a helper already declared.
TEMPLATES = {
    "counter": ["{v} := 0;", "while ({w} < 10) do {{ {v} := {v} + 1; {w} := {w} + 1 }};"],
    "flag": ["{v} := 0;", "if ({w} > 3) then {{ {v} := 1 }};", "if ({v} = 1) then {{ skip }};"],
    "linear": ["{v} := 2 * {w} + 3;"],
    "bitvector": ["{v} := {w} bitand 255;", "{v} := {v} bitor 16;"],
    "unresolved": ["{v} := mem[{w}];"],
    "input": ["call recv(ref {v});"],
    "char": ["call getchar({v});", "call isdigit({w}, {v});"],
    "fd": ["call open({v}, 0, 1);", "call read({w}, {v}, ref {w}, 1);"],
    "output": ["call printf({w}, {v});"],
    "index": ["mem[{v}] := 0;"],
    "size": ["call malloc({w}, {v});"],
    "constant": ["{v} := 7;"],
}

CATEGORIES = {
    "control": {"counter": 4, "flag": 4, "linear": 3, "constant": 2, "index": 1},
    "drivers": {"bitvector": 5, "unresolved": 3, "input": 3, "index": 2, "size": 1},
    "io": {"char": 4, "fd": 3, "output": 3, "constant": 1, "linear": 1},
}


@dataclass
class CorpusConfig:
    files_per_category: int = 50
    seed: int = 42
    noise: float = 0.0  # chance a variable's template ignores its category profile
    min_vars: int = 4
    max_vars: int = 8
    categories: dict = field(default_factory=lambda: dict(CATEGORIES))


def synth_source(rng: random.Random, profile: dict, cfg: CorpusConfig) -> str:
    n = rng.randint(cfg.min_vars, cfg.max_vars)
    names = [f"x{i}" for i in range(n)]
    helper = "t"
    templates = sorted(TEMPLATES)
    kinds, weights = zip(*sorted(profile.items()))
    lines = []
    for v in names:
        if rng.random() < cfg.noise:
            kind = rng.choice(templates)
        else:
            kind = rng.choices(kinds, weights)[0]
        for tpl in TEMPLATES[kind]:
            lines.append("  " + tpl.format(v=v, w=helper))
    rng.shuffle(lines)
    lines[-1] = lines[-1].rstrip(";")
    decls = " ".join(f"var {x};" for x in names + [helper])
    return "begin\nproc main()\nbegin\n  " + decls + "\n" + "\n".join(lines) + "\nend\nend\n"


def generate_corpus(root, cfg: CorpusConfig | None = None) -> list[Path]:
    """Write ``root/<category>/f<NNN>.csimpl`` files; returns the paths written."""
    cfg = cfg or CorpusConfig()
    rng = random.Random(cfg.seed)
    root = Path(root)
    out = []
    for cat in sorted(cfg.categories):
        d = root / cat
        d.mkdir(parents=True, exist_ok=True)
        for i in range(cfg.files_per_category):
            p = d / f"f{i:03d}.csimpl"
            p.write_text(synth_source(rng, cfg.categories[cat], cfg), encoding="utf-8")
            out.append(p)
    return out


def function_source(f: Function) -> str:
    return "begin\n" + print_function(f) + "\nend\n"
