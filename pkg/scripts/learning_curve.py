"""Top-1/top-2 error against training fraction on synthetic corpora of varying noise."""
import argparse
import tempfile

from varroles.classifier import eval_table, evaluate_split
from varroles.metrics import ingest_corpus
from varroles.synth import CorpusConfig, generate_corpus


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--noise", type=float, action="append", help="repeatable; default 0, 0.5, 0.7")
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    for noise in args.noise or [0.0, 0.5, 0.7]:
        with tempfile.TemporaryDirectory() as d:
            generate_corpus(d, CorpusConfig(seed=args.seed, noise=noise))
            examples = ingest_corpus(d).examples
        reports = [evaluate_split(examples, f, trials=args.trials, seed=args.seed) for f in (0.9, 0.8, 0.7, 0.6, 0.5)]
        print(f"# noise {noise}")
        print(eval_table(reports), end="")


if __name__ == "__main__":
    main()
