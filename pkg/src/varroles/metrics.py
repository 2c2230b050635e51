"""Per-file role-frequency vectors and labelled corpus ingestion."""
from __future__ import annotations

import csv
import fnmatch
import io
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .cfront import is_synthetic, lower_c
from .core import Program
from .engine import ROLE_ORDER, RoleAssignment, RoleId, analyze_function
from .parser import ParseError, parse_program

log = logging.getLogger(__name__)

SOURCE_SUFFIXES = {".c": "c", ".csimpl": "csimpl"}
CSV_HEADER = ["path", "label", "total_vars", *(r.name for r in ROLE_ORDER)]


class CorpusError(RuntimeError):
    pass


class SchemaError(ValueError):
    pass


@dataclass
class RoleVector:
    source: str
    counts: dict[RoleId, int]
    total_vars: int
    percentages: dict[RoleId, float]
    empty: bool = False  # warning flag: no variables to count

    def as_array(self) -> np.ndarray:
        return np.array([self.percentages[r] for r in ROLE_ORDER], dtype=float)

    @classmethod
    def from_percentages(cls, source: str, total_vars: int, values: Sequence[float]) -> "RoleVector":
        pct = {r: float(v) for r, v in zip(ROLE_ORDER, values)}
        counts = {r: int(round(pct[r] * total_vars / 100.0)) for r in ROLE_ORDER}
        return cls(source, counts, total_vars, pct, empty=total_vars == 0)


@dataclass
class LabeledExample:
    vector: RoleVector
    label: str

    def __post_init__(self):
        if not self.label:
            raise ValueError(f"{self.vector.source}: empty label")


def vectorize(
    assignments: Iterable[RoleAssignment], source: str | os.PathLike = "", include_synthetic: bool = False
) -> RoleVector:
    """Percentage of (function, variable) pairs holding each role.

    Variables introduced by the C frontend (``__`` prefix) are left out
    unless ``include_synthetic`` is set.
    """
    pairs: set[tuple[str, str]] = set()
    holders: dict[RoleId, set[tuple[str, str]]] = {r: set() for r in ROLE_ORDER}
    for ra in assignments:
        for var, roles in ra.roles.items():
            if not include_synthetic and is_synthetic(var):
                continue
            pairs.add((ra.function, var))
            for r in roles:
                holders[r].add((ra.function, var))
    total = len(pairs)
    counts = {r: len(holders[r]) for r in ROLE_ORDER}
    if total == 0:
        log.warning("%s: no variables to count", source)
        pct = {r: 0.0 for r in ROLE_ORDER}
    else:
        pct = {r: 100.0 * counts[r] / total for r in ROLE_ORDER}
    return RoleVector(str(source), counts, total, pct, empty=total == 0)


# -- loading and analysing source files ----------------------------------------


def detect_lang(path: str | os.PathLike, lang: str | None = None) -> str:
    if lang:
        return lang
    suffix = Path(path).suffix.lower()
    if suffix not in SOURCE_SUFFIXES:
        raise ValueError(f"{path}: cannot infer language from extension {suffix!r}")
    return SOURCE_SUFFIXES[suffix]


def load_program(path: str | os.PathLike, lang: str | None = None) -> tuple[Program, list]:
    """Read and parse (C_simpl) or lower (C) one file."""
    lang = detect_lang(path, lang)
    text = Path(path).read_text(encoding="utf-8")
    if lang == "c":
        return lower_c(text)
    return parse_program(text), []


def analyze_program(program: Program, catalog=None) -> list[RoleAssignment]:
    return [analyze_function(f, catalog) for f in program.functions]


def analyze_path(path, lang=None, catalog=None) -> list[RoleAssignment]:
    program, _ = load_program(path, lang)
    return analyze_program(program, catalog)


def thread_count() -> int:
    raw = os.environ.get("ROLE_SCOPE_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return n if n > 0 else min(8, os.cpu_count() or 1)


def parallel_map(fn, items: Sequence):
    """Order-preserving map, threaded up to ROLE_SCOPE_THREADS workers."""
    workers = min(thread_count(), max(1, len(items)))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# -- corpora ---------------------------------------------------------------


@dataclass
class IngestResult:
    examples: list[LabeledExample] = field(default_factory=list)
    skipped: list[tuple[str, str]] = field(default_factory=list)  # (relative path, reason)


def find_sources(root: Path) -> list[Path]:
    return sorted(
        (p for p in root.rglob("*") if p.is_file() and p.suffix.lower() in SOURCE_SUFFIXES),
        key=lambda p: p.relative_to(root).as_posix(),
    )


def label_for(relpath: str, labeling: Mapping[str, str] | None) -> str | None:
    """First matching glob wins, in mapping order; no mapping means the top directory."""
    if labeling is None:
        parts = relpath.split("/")
        return parts[0] if len(parts) > 1 else None
    for pattern, label in labeling.items():
        if fnmatch.fnmatchcase(relpath, pattern):
            return label
    return None


def ingest_corpus(root, labeling: Mapping[str, str] | None = None, catalog=None) -> IngestResult:
    root = Path(root)
    if not root.is_dir():
        raise CorpusError(f"{root}: not a directory")
    result = IngestResult()
    jobs = []
    for path in find_sources(root):
        rel = path.relative_to(root).as_posix()
        label = label_for(rel, labeling)
        if label is None:
            result.skipped.append((rel, "no label"))
            continue
        jobs.append((path, rel, label))

    def work(job):
        path, rel, label = job
        try:
            assignments = analyze_path(path, catalog=catalog)
        except ParseError as exc:
            return rel, None, f"parse error {exc}"
        except UnicodeDecodeError as exc:
            return rel, None, f"not UTF-8: {exc.reason}"
        except OSError as exc:
            raise CorpusError(f"{path}: {exc}") from exc
        except ValueError as exc:
            return rel, None, f"ill-formed: {exc}"
        return rel, LabeledExample(vectorize(assignments, rel), label), None

    for rel, example, reason in parallel_map(work, jobs):
        if example is None:
            log.warning("skipping %s: %s", rel, reason)
            result.skipped.append((rel, reason))
        else:
            result.examples.append(example)
    return result


def write_csv(examples: Sequence[LabeledExample], fp) -> None:
    w = csv.writer(fp, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for ex in sorted(examples, key=lambda e: e.vector.source):
        v = ex.vector
        w.writerow([v.source, ex.label, v.total_vars, *(f"{v.percentages[r]:.2f}" for r in ROLE_ORDER)])


def csv_text(examples: Sequence[LabeledExample]) -> str:
    buf = io.StringIO()
    write_csv(examples, buf)
    return buf.getvalue()


def read_csv(fp) -> list[LabeledExample]:
    rows = csv.reader(fp)
    header = next(rows, None)
    if header != CSV_HEADER:
        raise SchemaError(f"unexpected CSV header {header!r}")
    out = []
    for lineno, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != len(CSV_HEADER):
            raise SchemaError(f"line {lineno}: expected {len(CSV_HEADER)} fields, got {len(row)}")
        try:
            total = int(row[2])
            values = [float(x) for x in row[3:]]
        except ValueError as exc:
            raise SchemaError(f"line {lineno}: {exc}") from None
        out.append(LabeledExample(RoleVector.from_percentages(row[0], total, values), row[1]))
    return out


def category_means(
    examples: Sequence[LabeledExample], categories: Sequence[str] | None = None
) -> tuple[list[str], dict[str, np.ndarray], list[str]]:
    """Mean percentage vector per category; empty categories give zeros.

    Returns (categories, means, categories without files).
    """
    if categories is None:
        categories = sorted({ex.label for ex in examples})
    means = {}
    empty = []
    for cat in categories:
        rows = [ex.vector.as_array() for ex in examples if ex.label == cat]
        if rows:
            means[cat] = np.mean(rows, axis=0)
        else:
            empty.append(cat)
            means[cat] = np.zeros(len(ROLE_ORDER))
    return list(categories), means, empty


def chart_tsv(examples: Sequence[LabeledExample], categories: Sequence[str] | None = None) -> tuple[str, list[str]]:
    cats, means, empty = category_means(examples, categories)
    lines = ["\t".join(["role", *cats])]
    for k, role in enumerate(ROLE_ORDER):
        lines.append("\t".join([role.name, *(f"{means[c][k]:.2f}" for c in cats)]))
    return "\n".join(lines) + "\n", empty
