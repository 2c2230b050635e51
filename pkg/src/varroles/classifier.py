"""One-vs-rest logistic regression over role vectors."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .engine import ROLE_ORDER
from .metrics import LabeledExample, RoleVector

MODEL_VERSION = 1
N_FEATURES = len(ROLE_ORDER)
PROB_FLOOR = 1e-12


class ConfigError(ValueError):
    pass


class ModelFormatError(ValueError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 500
    learning_rate: float = 0.1
    l2: float = 1e-4
    seed: int = 42

    def __post_init__(self):
        if self.epochs < 0 or self.learning_rate <= 0 or self.l2 < 0:
            raise ConfigError(f"bad hyperparameters {self}")


@dataclass
class Model:
    labels: list[str]
    weights: np.ndarray  # (labels, features)
    biases: np.ndarray
    feature_means: np.ndarray
    feature_stds: np.ndarray
    seed: int
    hyperparameters: dict = field(default_factory=dict)

    def scores(self, x: np.ndarray) -> np.ndarray:
        z = (np.asarray(x, dtype=float) - self.feature_means) / self.feature_stds
        return z @ self.weights.T + self.biases

    def to_json(self) -> str:
        doc = {
            "version": MODEL_VERSION,
            "labels": list(self.labels),
            "weights": self.weights.tolist(),
            "biases": self.biases.tolist(),
            "feature_means": self.feature_means.tolist(),
            "feature_stds": self.feature_stds.tolist(),
            "hyperparameters": dict(self.hyperparameters),
            "seed": self.seed,
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Model":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"model is not JSON: {exc}") from None
        if not isinstance(doc, dict) or doc.get("version") != MODEL_VERSION:
            raise ModelFormatError(f"unsupported model version {doc.get('version') if isinstance(doc, dict) else None!r}")
        try:
            m = cls(
                labels=[str(x) for x in doc["labels"]],
                weights=np.array(doc["weights"], dtype=float),
                biases=np.array(doc["biases"], dtype=float),
                feature_means=np.array(doc["feature_means"], dtype=float),
                feature_stds=np.array(doc["feature_stds"], dtype=float),
                seed=int(doc["seed"]),
                hyperparameters=dict(doc.get("hyperparameters", {})),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelFormatError(f"malformed model: {exc}") from None
        k = len(m.labels)
        if (
            k < 2
            or m.weights.shape != (k, N_FEATURES)
            or m.biases.shape != (k,)
            or m.feature_means.shape != (N_FEATURES,)
            or m.feature_stds.shape != (N_FEATURES,)
            or not np.all(m.feature_stds > 0)
        ):
            raise ModelFormatError("model arrays have the wrong shape")
        return m


def _matrix(examples: Sequence[LabeledExample]) -> tuple[np.ndarray, list[str]]:
    X = np.array([ex.vector.as_array() for ex in examples], dtype=float).reshape(-1, N_FEATURES)
    return X, [ex.label for ex in examples]


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # split by sign so neither branch overflows
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def train(
    examples: Sequence[LabeledExample],
    seed: int = 42,
    epochs: int = 500,
    learning_rate: float = 0.1,
    l2: float = 1e-4,
) -> Model:
    cfg = TrainConfig(epochs, learning_rate, l2, seed)
    examples = sorted(examples, key=lambda e: (e.vector.source, e.label))
    labels = sorted({ex.label for ex in examples})
    if len(labels) < 2:
        raise ConfigError(f"need at least 2 labels to train, got {len(labels)}")
    X, y = _matrix(examples)
    means = X.mean(axis=0)
    stds = X.std(axis=0)
    stds[stds == 0] = 1.0
    Z = (X - means) / stds
    Y = np.array([[1.0 if lab == l else 0.0 for l in labels] for lab in y])

    # weights start at zero, so the run is fully determined by the data
    n = len(examples)
    W = np.zeros((len(labels), N_FEATURES))
    b = np.zeros(len(labels))
    for _ in range(cfg.epochs):
        P = _sigmoid(Z @ W.T + b)
        G = P - Y
        W -= cfg.learning_rate * (G.T @ Z / n + cfg.l2 * W)
        b -= cfg.learning_rate * G.mean(axis=0)
    return Model(labels, W, b, means, stds, cfg.seed, {k: v for k, v in asdict(cfg).items() if k != "seed"})


def predict(model: Model, v: RoleVector | np.ndarray) -> list[tuple[str, float]]:
    """Labels with softmax probabilities, most probable first."""
    x = v.as_array() if isinstance(v, RoleVector) else np.asarray(v, dtype=float)
    s = model.scores(x)
    e = np.exp(s - s.max())
    p = e / e.sum()
    # far outside the training range the softmax saturates to exact 0/1;
    # keep every probability strictly inside (0, 1)
    p = np.clip(p, PROB_FLOOR, 1.0)
    p = p / p.sum()
    # rank on raw scores so saturated labels keep their order
    order = sorted(range(len(s)), key=lambda k: (-s[k], model.labels[k]))
    return [(model.labels[k], float(p[k])) for k in order]


# -- evaluation ------------------------------------------------------------------


@dataclass
class SplitReport:
    train_fraction: float
    trials: int
    top1_errors: list[float]
    top2_errors: list[float]

    @property
    def top1_mean(self) -> float:
        return float(np.mean(self.top1_errors))

    @property
    def top1_std(self) -> float:
        return float(np.std(self.top1_errors))

    @property
    def top2_mean(self) -> float:
        return float(np.mean(self.top2_errors))

    @property
    def top2_std(self) -> float:
        return float(np.std(self.top2_errors))


def stratified_split(labels: Sequence[str], fraction: float, rng: np.random.Generator) -> tuple[list[int], list[int]]:
    train_idx, test_idx = [], []
    for lab in sorted(set(labels)):
        idx = [i for i, l in enumerate(labels) if l == lab]
        idx = [idx[j] for j in rng.permutation(len(idx))]
        k = min(len(idx), max(1, math.floor(fraction * len(idx) + 0.5)))
        train_idx += idx[:k]
        test_idx += idx[k:]
    return sorted(train_idx), sorted(test_idx)


def evaluate_split(
    examples: Sequence[LabeledExample],
    train_fraction: float,
    trials: int = 20,
    seed: int = 42,
    **train_kwargs,
) -> SplitReport:
    if not 0 < train_fraction < 1:
        raise ConfigError(f"train fraction must be in (0, 1), got {train_fraction}")
    if trials < 1:
        raise ConfigError("trials must be at least 1")
    examples = sorted(examples, key=lambda e: (e.vector.source, e.label))
    labels = [ex.label for ex in examples]
    all_labels = set(labels)
    if len(all_labels) < 2:
        raise ConfigError("need at least 2 labels to evaluate")
    top1, top2 = [], []
    for t in range(trials):
        rng = np.random.default_rng(seed + t)
        for _attempt in range(100):
            tr, te = stratified_split(labels, train_fraction, rng)
            if {labels[i] for i in tr} == all_labels:
                break
        else:
            raise ConfigError("could not draw a training split covering every label")
        if not te:
            raise ConfigError(f"train fraction {train_fraction} leaves no test examples")
        model = train([examples[i] for i in tr], seed=seed + t, **train_kwargs)
        miss1 = miss2 = 0
        for i in te:
            ranked = [lab for lab, _ in predict(model, examples[i].vector)]
            miss1 += ranked[0] != labels[i]
            miss2 += labels[i] not in ranked[:2]
        top1.append(miss1 / len(te))
        top2.append(miss2 / len(te))
    return SplitReport(train_fraction, trials, top1, top2)


def eval_table(reports: Sequence[SplitReport]) -> str:
    """Error table, percentages with two decimals."""
    lines = ["train_fraction\ttop1_error\ttop1_std\ttop2_error\ttop2_std"]
    for r in reports:
        lines.append(
            f"{r.train_fraction:.2f}\t{100 * r.top1_mean:.2f}\t{100 * r.top1_std:.2f}"
            f"\t{100 * r.top2_mean:.2f}\t{100 * r.top2_std:.2f}"
        )
    return "\n".join(lines) + "\n"
