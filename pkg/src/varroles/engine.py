"""Generic evaluator for set-valued role analyses.

An analysis is the tuple (initial set, combine operator, gen function,
evaluation mode).  ``Res = Init (+) gen(body, Res)`` is computed once for
one-run analyses and iterated to a fixpoint otherwise.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .core import Function, Stmt, declared_vars


class RoleId(enum.Enum):
    SYNT_CONST = 0
    CONST_ASSIGN = 1
    COUNTER = 2
    LINEAR = 3
    BOOL = 4
    INPUT = 5
    OUTPUT = 6
    BRANCH_COND = 7
    BITVECTOR = 8
    UNRES_ASSIGN = 9
    CHAR = 10
    LOOP_IT = 11
    FILE_DESCR = 12
    ARRAY_INDEX = 13
    ARRAY_SIZE = 14
    USED_IN_ARITHM = 15

    @classmethod
    def parse(cls, name: str) -> "RoleId":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown role {name!r}") from None


ROLE_ORDER: tuple[RoleId, ...] = tuple(sorted(RoleId, key=lambda r: r.value))


class InitKind(enum.Enum):
    EMPTY = "EmptySet"
    ALL_VARS = "AllVars"


class Combine(enum.Enum):
    UNION = "Union"
    SET_MINUS = "SetMinus"


class Mode(enum.Enum):
    ONE_RUN = "OneRun"
    FIXED_POINT = "FixedPoint"


GenFn = Callable[[Stmt, frozenset], frozenset]

FAMILIES = {
    (InitKind.EMPTY, Combine.UNION, Mode.ONE_RUN): "one-run positive",
    (InitKind.ALL_VARS, Combine.SET_MINUS, Mode.ONE_RUN): "one-run negative",
    (InitKind.EMPTY, Combine.UNION, Mode.FIXED_POINT): "fixed-point positive",
    (InitKind.ALL_VARS, Combine.SET_MINUS, Mode.FIXED_POINT): "fixed-point negative",
}


@dataclass(frozen=True)
class AnalysisSpec:
    role: RoleId
    init_kind: InitKind
    combine: Combine
    mode: Mode
    gen: GenFn = field(compare=False)

    def __post_init__(self):
        if (self.init_kind, self.combine, self.mode) not in FAMILIES:
            raise ValueError(f"{self.role.name}: inconsistent analysis tuple")

    @property
    def family(self) -> str:
        return FAMILIES[self.init_kind, self.combine, self.mode]


class NonTerminationError(RuntimeError):
    pass


class AnalysisError(RuntimeError):
    def __init__(self, role: RoleId, function: str, cause: Exception):
        self.role = role
        self.function = function
        super().__init__(f"{role.name} on {function}: {cause}")


def evaluate(spec: AnalysisSpec, f: Function) -> tuple[frozenset[str], int]:
    """Return the analysis result for ``f`` and the number of gen evaluations."""
    variables = declared_vars(f)
    init = variables if spec.init_kind is InitKind.ALL_VARS else frozenset()

    def step(res: frozenset) -> frozenset:
        generated = frozenset(spec.gen(f.body, res))
        if spec.combine is Combine.UNION:
            return init | generated
        return init - generated

    res = step(init)
    iterations = 1
    if spec.mode is Mode.ONE_RUN:
        return res, iterations
    prev = init
    while res != prev:
        if iterations > len(variables) + 2:
            raise NonTerminationError(
                f"{spec.role.name} did not stabilise after {iterations} iterations"
            )
        prev, res = res, step(res)
        iterations += 1
    return res, iterations


@dataclass
class RoleAssignment:
    function: str
    roles: dict[str, frozenset[RoleId]]
    iterations: dict[RoleId, int]
    results: dict[RoleId, frozenset[str]] = field(default_factory=dict)

    def variables_with(self, role: RoleId) -> frozenset[str]:
        return frozenset(v for v, rs in self.roles.items() if role in rs)


def analyze_function(f: Function, catalog: Sequence[AnalysisSpec] | None = None) -> RoleAssignment:
    if catalog is None:
        from .catalog import CATALOG

        catalog = CATALOG
    seen = [spec.role for spec in catalog]
    if len(set(seen)) != len(seen):
        raise ValueError("catalog lists a role more than once")

    order = list(f.params) + [v for v in f.locals if v not in f.params]
    roles: dict[str, set[RoleId]] = {v: set() for v in order}
    iterations: dict[RoleId, int] = {}
    results: dict[RoleId, frozenset[str]] = {}
    for spec in catalog:
        try:
            result, n = evaluate(spec, f)
        except Exception as exc:
            raise AnalysisError(spec.role, f.name, exc) from exc
        iterations[spec.role] = n
        results[spec.role] = result
        for v in result:
            roles[v].add(spec.role)
    return RoleAssignment(
        f.name,
        {v: frozenset(rs) for v, rs in roles.items()},
        iterations,
        results,
    )


def analyze_functions(functions: Iterable[Function], catalog=None) -> list[RoleAssignment]:
    return [analyze_function(f, catalog) for f in functions]
