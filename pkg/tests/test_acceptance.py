"""End-to-end acceptance checks, one per criterion.

Each check prints a single PASS/FAIL line.  Run with ``pytest -s`` to see the
lines, or directly with ``python3 tests/test_acceptance.py``.
"""
import contextlib
import io
import itertools
import random
import sys
import tempfile
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracle  # noqa: E402
from varroles.catalog import SPECS  # noqa: E402
from varroles.cfront import lower_c  # noqa: E402
from varroles.classifier import evaluate_split  # noqa: E402
from varroles.cli import main as cli_main  # noqa: E402
from varroles.engine import Mode, RoleId, analyze_function, evaluate  # noqa: E402
from varroles.metrics import category_means, ingest_corpus  # noqa: E402
from varroles.parser import parse_program, pretty_print  # noqa: E402
from varroles.synth import CorpusConfig, count_statements, generate_corpus, random_function, random_program  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"
N_RANDOM = 1000
SEPARATION_PP = 15.0

pytestmark = pytest.mark.acceptance


def report(n, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}")
    return ok


def _random_functions():
    return [random_function(random.Random(seed)) for seed in range(N_RANDOM)]


def check_fig3():
    t = time.perf_counter()
    f = parse_program((FIXTURES / "fig3a.csimpl").read_text()).functions[0]
    bv = evaluate(SPECS[RoleId.BITVECTOR], f)
    counter, _ = evaluate(SPECS[RoleId.COUNTER], f)
    linear = evaluate(SPECS[RoleId.LINEAR], f)
    elapsed = time.perf_counter() - t
    ok = bv == ({"x"}, 1) and counter == {"n"} and linear == ({"n"}, 3) and elapsed < 1.0
    return report(
        1, ok,
        f"BITVECTOR={sorted(bv[0])}/{bv[1]} it, COUNTER={sorted(counter)}, "
        f"LINEAR={sorted(linear[0])}/{linear[1]} it, {elapsed * 1000:.1f} ms",
    )


def check_fig1b():
    program, _ = lower_c((FIXTURES / "fig1b.c").read_text())
    ra = analyze_function(program.functions[0])
    fd = ra.variables_with(RoleId.FILE_DESCR)
    ch = ra.variables_with(RoleId.CHAR)
    inp = ra.variables_with(RoleId.INPUT)
    lin = ra.variables_with(RoleId.LINEAR)
    ok = "fd" in fd and "c" in ch and "c" in inp and {"val", "c"} <= lin
    return report(
        2, ok,
        f"FILE_DESCR={sorted(fd)} CHAR={sorted(ch)} INPUT={sorted(inp)} LINEAR={sorted(lin)}",
    )


def check_oracle(functions):
    agree = {r: 0 for r in RoleId}
    nontrivial = {r: 0 for r in RoleId}
    for f in functions:
        ra = analyze_function(f)
        full = frozenset(f.params + f.locals)
        for r in RoleId:
            expected = oracle.solve(r.name, f)
            agree[r] += ra.results[r] == expected
            nontrivial[r] += bool(expected) and expected != full
    worst = min(agree.values())
    ok = worst == len(functions) and all(nontrivial.values())
    return report(
        3, ok,
        f"{len(functions)} programs x 16 roles, min agreement {worst}/{len(functions)}, "
        f"least-exercised role hit in {min(nontrivial.values())} programs",
    )


def check_bounds(functions):
    worst_slack = None
    bad = 0
    for f in functions:
        ra = analyze_function(f)
        n = len(f.params) + len(f.locals)
        for r in RoleId:
            it = ra.iterations[r]
            if SPECS[r].mode is Mode.ONE_RUN:
                bad += it != 1
            else:
                bad += it > n + 1
                slack = n + 1 - it
                worst_slack = slack if worst_slack is None else min(worst_slack, slack)
    sizes_ok = all(len(f.params) + len(f.locals) <= 4 and count_statements(f.body) <= 8 for f in functions)
    return report(
        4, bad == 0 and sizes_ok,
        f"{bad} violations; tightest fixpoint slack {worst_slack} iteration(s) below |Vars|+1",
    )


def separated_roles(means, a, b):
    return [r.name for r in RoleId if abs(means[a][r.value] - means[b][r.value]) >= SEPARATION_PP]


def check_classification():
    t = time.perf_counter()
    with tempfile.TemporaryDirectory() as d:
        generate_corpus(d, CorpusConfig(files_per_category=50, seed=42))
        examples = ingest_corpus(d).examples
    cats, means, _ = category_means(examples)
    separation = {(a, b): separated_roles(means, a, b) for a, b in itertools.combinations(cats, 2)}
    rep = evaluate_split(examples, 0.9, trials=20, seed=42)
    elapsed = time.perf_counter() - t
    ok = (
        len(examples) == 150
        and len(cats) == 3
        and all(len(v) >= 3 for v in separation.values())
        and rep.top1_mean <= 0.15
        and rep.top2_mean <= rep.top1_mean
        and elapsed < 30
    )
    min_sep = min(len(v) for v in separation.values())
    return report(
        5, ok,
        f"{len(examples)} files, >= {min_sep} roles separated by {SEPARATION_PP:.0f}pp per category pair, "
        f"top1 {100 * rep.top1_mean:.2f}% top2 {100 * rep.top2_mean:.2f}%, {elapsed:.1f} s",
    )


def check_learning_curve():
    with tempfile.TemporaryDirectory() as d:
        generate_corpus(d, CorpusConfig(files_per_category=50, seed=42, noise=0.5))
        examples = ingest_corpus(d).examples
    hi = evaluate_split(examples, 0.9, trials=20, seed=42)
    lo = evaluate_split(examples, 0.5, trials=20, seed=42)
    return report(
        6, lo.top1_mean >= hi.top1_mean,
        f"noisy corpus top1 at 0.5 = {100 * lo.top1_mean:.2f}%, at 0.9 = {100 * hi.top1_mean:.2f}% (20 trials)",
    )


def _pipeline(corpus, out):
    out.mkdir()
    files = sorted(str(p) for p in corpus.rglob("*.csimpl"))[:10]
    steps = [
        ["analyze", *files],
        ["vectorize", str(corpus), "-o", str(out / "vectors.csv")],
        ["train", str(out / "vectors.csv"), "-o", str(out / "model.json")],
        ["eval", str(out / "vectors.csv"), "--trials", "5", "-o", str(out / "eval.tsv")],
    ]
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(io.StringIO()):
        for argv in steps:
            if cli_main(argv) != 0:
                raise RuntimeError(f"step failed: {argv}")
    (out / "analyze.json").write_text(buf.getvalue())
    return {name: (out / name).read_bytes() for name in ("analyze.json", "vectors.csv", "model.json", "eval.tsv")}


def check_determinism():
    with tempfile.TemporaryDirectory() as d:
        root = Path(d)
        generate_corpus(root / "corpus", CorpusConfig(files_per_category=20, seed=11, noise=0.3))
        first = _pipeline(root / "corpus", root / "run1")
        second = _pipeline(root / "corpus", root / "run2")
    same = [k for k in first if first[k] == second[k]]
    return report(7, len(same) == len(first), f"byte-identical outputs: {', '.join(same)}")


def check_round_trip():
    failures = 0
    for seed in range(N_RANDOM):
        p = random_program(random.Random(seed))
        failures += parse_program(pretty_print(p)) != p
    return report(8, failures == 0, f"{N_RANDOM - failures}/{N_RANDOM} random programs survive print/parse")


# -- pytest entry points ---------------------------------------------------------


@pytest.fixture(scope="module")
def random_functions():
    return _random_functions()


def test_criterion_1_fig3():
    assert check_fig3()


def test_criterion_2_fig1b():
    assert check_fig1b()


def test_criterion_3_oracle(random_functions):
    assert check_oracle(random_functions)


def test_criterion_4_bounds(random_functions):
    assert check_bounds(random_functions)


def test_criterion_5_classification():
    assert check_classification()


def test_criterion_6_learning_curve():
    assert check_learning_curve()


def test_criterion_7_determinism():
    assert check_determinism()


def test_criterion_8_round_trip():
    assert check_round_trip()


if __name__ == "__main__":
    fns = _random_functions()
    results = [
        check_fig3(), check_fig1b(), check_oracle(fns), check_bounds(fns), check_classification(),
        check_learning_curve(), check_determinism(), check_round_trip(),
    ]
    sys.exit(0 if all(results) else 1)
