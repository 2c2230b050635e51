"""Write a synthetic labelled C_simpl corpus and print per-category role means."""
import argparse

from varroles.metrics import category_means, chart_tsv, ingest_corpus
from varroles.synth import CorpusConfig, generate_corpus


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("root")
    ap.add_argument("--files-per-category", type=int, default=50)
    ap.add_argument("--noise", type=float, default=0.0)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    cfg = CorpusConfig(files_per_category=args.files_per_category, seed=args.seed, noise=args.noise)
    paths = generate_corpus(args.root, cfg)
    print(f"wrote {len(paths)} files under {args.root}")
    examples = ingest_corpus(args.root).examples
    text, _ = chart_tsv(examples)
    print(text, end="")


if __name__ == "__main__":
    main()
