"""Command line entry point: ``varroles <command> ...``.

Exit codes: 0 success, 1 data error (unreadable or unparseable input,
schema mismatch), 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import catalog
from .cfront import lower_c
from .classifier import ConfigError, Model, ModelFormatError, eval_table, evaluate_split, predict, train
from .core import WellFormednessError
from .engine import ROLE_ORDER, RoleAssignment
from .metrics import (
    SOURCE_SUFFIXES,
    CorpusError,
    SchemaError,
    analyze_program,
    chart_tsv,
    csv_text,
    find_sources,
    ingest_corpus,
    load_program,
    parallel_map,
    read_csv,
    vectorize,
)
from .parser import ParseError, pretty_print
from .synth import CorpusConfig, generate_corpus

log = logging.getLogger("varroles")

REPORT_SCHEMA_VERSION = 1
DEFAULT_FRACTIONS = (0.9, 0.8, 0.7, 0.6, 0.5)


class DataError(Exception):
    pass


class UsageError(Exception):
    pass


def role_report(source: str, assignments: list[RoleAssignment], reports=()) -> dict:
    skipped = [
        {"function": r.function, "line": line, "construct": what}
        for r in reports
        for line, what in r.skipped_constructs
    ]
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "source": source,
        "functions": [
            {
                "name": ra.function,
                "variables": [
                    {"name": v, "roles": [r.name for r in ROLE_ORDER if r in roles]}
                    for v, roles in ra.roles.items()
                ],
                "iterations": {r.name: n for r, n in sorted(ra.iterations.items(), key=lambda t: t[0].value)},
            }
            for ra in assignments
        ],
        "skipped_constructs": skipped,
    }


def report_text(rep: dict) -> str:
    lines = [f"== {rep['source']}"]
    for fn in rep["functions"]:
        lines.append(f"{fn['name']}:")
        width = max((len(v["name"]) for v in fn["variables"]), default=0)
        for v in fn["variables"]:
            lines.append(f"  {v['name']:<{width}}  {', '.join(v['roles']) or '-'}")
    for s in rep["skipped_constructs"]:
        lines.append(f"  (skipped line {s['line']} in {s['function']}: {s['construct']})")
    return "\n".join(lines)


def _expand(paths: list[str]) -> list[Path]:
    out = []
    for p in map(Path, paths):
        out.extend(find_sources(p) if p.is_dir() else [p])
    return sorted(set(out))


def _parse_roles(spec: str | None):
    if spec is None:
        return None
    try:
        return catalog.select([s for s in spec.split(",") if s.strip()])
    except ValueError as exc:
        valid = ", ".join(r.name for r in ROLE_ORDER)
        raise UsageError(f"{exc}; valid roles: {valid}") from None


def _load(path: Path, lang: str | None):
    try:
        return load_program(path, lang)
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"{path}: {exc}") from None
    except ParseError as exc:
        raise DataError(f"{path}: parse error {exc}") from None
    except WellFormednessError as exc:
        raise DataError(f"{path}: {exc}") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# -- commands ----------------------------------------------------------------


def cmd_analyze(args) -> int:
    specs = _parse_roles(args.roles)
    paths = _expand(args.paths)
    lang = None if args.lang == "auto" else args.lang

    def work(path):
        try:
            program, reports = _load(path, lang)
        except DataError as exc:
            return None, str(exc)
        if args.emit_csimpl:
            out = Path(args.emit_csimpl) / (path.stem + ".csimpl")
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_text(pretty_print(program), encoding="utf-8")
        return role_report(str(path), analyze_program(program, specs), reports), None

    status = 0
    reports = []
    for rep, err in parallel_map(work, paths):
        if err:
            print(f"error: {err}", file=sys.stderr)
            status = 1
        else:
            reports.append(rep)
    if args.format == "json":
        print(json.dumps(reports, indent=2))
    else:
        print("\n\n".join(report_text(r) for r in reports))
    return status


def cmd_lower(args) -> int:
    path = Path(args.path)
    try:
        text = path.read_text(encoding="utf-8")
        program, reports = lower_c(text)
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"{path}: {exc}") from None
    except (ParseError, WellFormednessError) as exc:
        raise DataError(f"{path}: {exc}") from None
    out = pretty_print(program)
    if args.output:
        Path(args.output).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    for r in reports:
        for line, what in r.skipped_constructs:
            print(f"{path}:{line}: skipped in {r.function}: {what}", file=sys.stderr)
    return 0


def cmd_roles(args) -> int:
    for spec in catalog.CATALOG:
        print(f"{spec.role.name:<15} {spec.family:<21} {catalog.DESCRIPTIONS[spec.role]}")
    return 0


def _warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


def _write(text: str, output: str | None) -> None:
    if output and output != "-":
        Path(output).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def cmd_vectorize(args) -> int:
    labeling = None
    if args.labels:
        try:
            labeling = json.loads(Path(args.labels).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"{args.labels}: {exc}") from None
        if not isinstance(labeling, dict):
            raise UsageError("label map must be a JSON object of glob -> label")
    try:
        result = ingest_corpus(args.root, labeling)
    except CorpusError as exc:
        raise DataError(str(exc)) from None
    log.info("vectorized %d files, skipped %d", len(result.examples), len(result.skipped))
    if not result.examples:
        _warn(f"no labelled examples under {args.root}")
    for rel, reason in result.skipped:
        print(f"skipped {rel}: {reason}", file=sys.stderr)
    _write(csv_text(result.examples), args.output)
    return 0


def _read_vectors(path: str):
    try:
        with open(path, encoding="utf-8", newline="") as fp:
            return read_csv(fp)
    except OSError as exc:
        raise DataError(f"{path}: {exc}") from None
    except SchemaError as exc:
        raise DataError(f"{path}: {exc}") from None


def _train_kwargs(args) -> dict:
    return {"epochs": args.epochs, "learning_rate": args.learning_rate, "l2": args.l2}


def cmd_train(args) -> int:
    examples = _read_vectors(args.vectors)
    try:
        model = train(examples, seed=args.seed, **_train_kwargs(args))
    except ConfigError as exc:
        raise UsageError(str(exc)) from None
    _write(model.to_json(), args.output)
    return 0


def cmd_predict(args) -> int:
    try:
        model = Model.from_json(Path(args.model).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"{args.model}: {exc}") from None
    except ModelFormatError as exc:
        raise DataError(f"{args.model}: {exc}") from None
    status = 0
    results = []
    for path in _expand(args.paths):
        try:
            program, _ = _load(path, None)
        except DataError as exc:
            print(f"error: {exc}", file=sys.stderr)
            status = 1
            continue
        ranking = predict(model, vectorize(analyze_program(program), str(path)))
        results.append((str(path), ranking))
    if args.format == "json":
        doc = [{"source": s, "ranking": [{"label": l, "probability": p} for l, p in r]} for s, r in results]
        print(json.dumps(doc, indent=2))
    else:
        for source, ranking in results:
            print(source + "\t" + "\t".join(f"{l}={p:.4f}" for l, p in ranking))
    return status


def cmd_eval(args) -> int:
    examples = _read_vectors(args.vectors)
    fractions = args.train_fraction or list(DEFAULT_FRACTIONS)
    reports = []
    try:
        for f in fractions:
            log.info("evaluating train fraction %.2f over %d trials", f, args.trials)
            reports.append(evaluate_split(examples, f, trials=args.trials, seed=args.seed, **_train_kwargs(args)))
    except ConfigError as exc:
        raise UsageError(str(exc)) from None
    _write(eval_table(reports), args.output)
    return 0


def cmd_chart(args) -> int:
    examples = _read_vectors(args.vectors)
    text, empty = chart_tsv(examples, args.category or None)
    for cat in empty:
        _warn(f"category {cat} has no files; its column is all zeros")
    _write(text, args.output)
    return 0


def cmd_synth(args) -> int:
    cfg = CorpusConfig(files_per_category=args.files_per_category, seed=args.seed, noise=args.noise)
    paths = generate_corpus(args.root, cfg)
    print(f"wrote {len(paths)} files under {args.root}", file=sys.stderr)
    return 0


# -- argument parsing --------------------------------------------------------------


def _fraction(text: str) -> float:
    try:
        f = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < f < 1:
        raise argparse.ArgumentTypeError("train fraction must lie strictly between 0 and 1")
    return f


def _add_train_opts(p):
    p.add_argument("--epochs", type=int, default=500)
    p.add_argument("--learning-rate", type=float, default=0.1)
    p.add_argument("--l2", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=42)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="varroles", description="Variable-role analysis and role-based classification.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="print the roles of every variable")
    p.add_argument("paths", nargs="+")
    p.add_argument("--lang", choices=["auto", *SOURCE_SUFFIXES.values()], default="auto")
    p.add_argument("--roles", help="comma-separated subset of roles to compute")
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("--emit-csimpl", metavar="DIR", help="also write the C_simpl form of each input")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("lower", help="translate a C file to C_simpl")
    p.add_argument("path")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_lower)

    p = sub.add_parser("roles", help="describe the role catalog")
    p.add_argument("action", choices=["list"])
    p.set_defaults(func=cmd_roles)

    p = sub.add_parser("vectorize", help="write per-file role percentages as CSV")
    p.add_argument("root")
    p.add_argument("--labels", metavar="MAPFILE", help="JSON object mapping globs to labels, first match wins")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_vectorize)

    p = sub.add_parser("train", help="fit a classifier on a vectors CSV")
    p.add_argument("vectors")
    p.add_argument("-o", "--output", required=True)
    _add_train_opts(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="rank categories for source files")
    p.add_argument("paths", nargs="+")
    p.add_argument("--model", required=True)
    p.add_argument("--format", choices=["json", "text"], default="text")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="random-split error table")
    p.add_argument("vectors")
    p.add_argument("--train-fraction", type=_fraction, action="append")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("-o", "--output")
    _add_train_opts(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("chart", help="mean role percentages per category as TSV")
    p.add_argument("vectors")
    p.add_argument("--by-label", action="store_true", default=True, help="one column per label (the default)")
    p.add_argument("--category", action="append", help="column to include; repeatable")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_chart)

    p = sub.add_parser("synth", help="generate a synthetic labelled corpus")
    p.add_argument("root")
    p.add_argument("--files-per-category", type=int, default=50)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_synth)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    if getattr(args, "trials", 1) < 1:
        ap.error("--trials must be at least 1")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
