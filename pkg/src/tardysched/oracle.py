"""MLP early/tardy oracle: training, scoring and thresholded classification.

A small feed-forward network written directly in numpy (ReLU hidden layers,
two-logit softmax output, cross-entropy loss, Adam). Output column 1 is the
early class; the early softmax component is the job's prediction score.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import Instance, ValidationError
from .features import FeatureMatrix, featurize

HIDDEN = (80, 80)
FORMAT_VERSION = 1


class TrainingError(ValueError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    batch_size: int = 256
    epochs: int = 20
    seed: int = 0
    train_fraction: float = 0.8
    hidden: tuple[int, ...] = HIDDEN

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ValidationError("train_fraction must lie in (0, 1)")
        if self.batch_size < 1 or self.epochs < 0 or self.learning_rate <= 0:
            raise ValidationError("batch_size >= 1, epochs >= 0 and learning_rate > 0 required")


@dataclass
class MlpModel:
    dims: tuple[int, ...]
    weights: list[np.ndarray]  # weights[k] has shape (dims[k], dims[k+1])
    biases: list[np.ndarray]
    # inputs are standardised with the training-set statistics before layer 0
    input_mean: np.ndarray
    input_scale: np.ndarray
    seed: int = 0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.weights) != len(self.dims) - 1 or len(self.biases) != len(self.weights):
            raise ValidationError("layer count does not match dims")
        for k, (W, b) in enumerate(zip(self.weights, self.biases)):
            if W.shape != (self.dims[k], self.dims[k + 1]) or b.shape != (self.dims[k + 1],):
                raise ValidationError(f"layer {k} has shape {W.shape}/{b.shape}, dims say {self.dims}")
            if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
                raise ValidationError(f"layer {k} has non-finite parameters")

    @property
    def input_width(self) -> int:
        return self.dims[0]

    def logits(self, X: np.ndarray) -> np.ndarray:
        h = (np.asarray(X, dtype=np.float64) - self.input_mean) / self.input_scale
        last = len(self.weights) - 1
        for k, (W, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ W + b
            if k < last:
                h = np.maximum(h, 0.0)
        return h

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "dims": list(self.dims),
            "weights": [W.tolist() for W in self.weights],
            "biases": [b.tolist() for b in self.biases],
            "input_mean": self.input_mean.tolist(),
            "input_scale": self.input_scale.tolist(),
            "seed": self.seed,
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MlpModel":
        return cls(
            dims=tuple(doc["dims"]),
            weights=[np.array(W, dtype=np.float64).reshape(doc["dims"][k], doc["dims"][k + 1])
                     for k, W in enumerate(doc["weights"])],
            biases=[np.array(b, dtype=np.float64) for b in doc["biases"]],
            input_mean=np.array(doc["input_mean"], dtype=np.float64),
            input_scale=np.array(doc["input_scale"], dtype=np.float64),
            seed=doc.get("seed", 0),
            metadata=doc.get("metadata", {}),
        )

    def save(self, path) -> None:
        # json writes floats with repr, which round-trips exactly
        Path(path).write_text(json.dumps(self.to_dict()))

    @classmethod
    def load(cls, path) -> "MlpModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


def init_model(dims, seed: int, input_mean=None, input_scale=None) -> MlpModel:
    """He-initialised network; biases start at zero."""
    rng = np.random.default_rng(seed)
    weights = [rng.normal(0.0, math.sqrt(2.0 / dims[k]), (dims[k], dims[k + 1]))
               for k in range(len(dims) - 1)]
    biases = [np.zeros(dims[k + 1]) for k in range(len(dims) - 1)]
    if input_mean is None:
        input_mean = np.zeros(dims[0])
    if input_scale is None:
        input_scale = np.ones(dims[0])
    return MlpModel(tuple(dims), weights, biases, np.asarray(input_mean, float),
                    np.asarray(input_scale, float), seed)


def loss_and_grads(model: MlpModel, X: np.ndarray, y: np.ndarray):
    """Mean softmax cross-entropy and its gradients w.r.t. every weight and bias."""
    h = (X - model.input_mean) / model.input_scale
    acts = [h]
    last = len(model.weights) - 1
    for k, (W, b) in enumerate(zip(model.weights, model.biases)):
        h = h @ W + b
        if k < last:
            h = np.maximum(h, 0.0)
        acts.append(h)
    z = acts[-1]
    z = z - z.max(axis=1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    m = len(X)
    yi = y.astype(np.int64)
    loss = -logp[np.arange(m), yi].mean()
    delta = np.exp(logp)
    delta[np.arange(m), yi] -= 1.0
    delta /= m
    gW, gb = [None] * len(model.weights), [None] * len(model.weights)
    for k in range(last, -1, -1):
        gW[k] = acts[k].T @ delta
        gb[k] = delta.sum(axis=0)
        if k > 0:
            delta = (delta @ model.weights[k].T) * (acts[k] > 0)
    return float(loss), gW, gb


def _metrics(model: MlpModel, X: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    if len(X) == 0:
        return math.nan, math.nan
    z = model.logits(X)
    z = z - z.max(axis=1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    loss = -logp[np.arange(len(y)), y.astype(np.int64)].mean()
    acc = np.mean(np.argmax(z, axis=1) == y)
    return float(loss), float(acc)


@dataclass
class TrainResult:
    model: MlpModel
    history: list[dict]
    train_idx: np.ndarray
    val_idx: np.ndarray

    @property
    def val_accuracy(self) -> float:
        return self.history[-1]["val_acc"]


def train(X: np.ndarray, y: np.ndarray, config: TrainConfig = TrainConfig()) -> TrainResult:
    """Fit the MLP on rows ``X`` with labels ``y`` (1 = early) using a seeded 80/20 split."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y).astype(np.int64)
    if X.ndim != 2 or len(X) == 0:
        raise TrainingError("empty training set")
    if len(y) != len(X) or not np.isin(y, (0, 1)).all():
        raise TrainingError("labels must be 0/1, one per row")
    if len(np.unique(y)) < 2:
        raise TrainingError("training set contains a single class")

    rng = np.random.default_rng(config.seed)
    perm = rng.permutation(len(X))
    cut = min(max(int(round(config.train_fraction * len(X))), 1), len(X) - 1)
    train_idx, val_idx = np.sort(perm[:cut]), np.sort(perm[cut:])
    Xt, yt, Xv, yv = X[train_idx], y[train_idx], X[val_idx], y[val_idx]

    mean = Xt.mean(axis=0)
    scale = Xt.std(axis=0)
    scale = np.where(scale > 0, scale, 1.0)
    dims = (X.shape[1], *config.hidden, 2)
    model = init_model(dims, config.seed, mean, scale)
    params = model.weights + model.biases
    m1 = [np.zeros_like(q) for q in params]
    m2 = [np.zeros_like(q) for q in params]
    b1, b2, eps = 0.9, 0.999, 1e-8
    step = 0
    history = []
    for epoch in range(config.epochs):
        order = rng.permutation(len(Xt))
        for start in range(0, len(order), config.batch_size):
            batch = order[start:start + config.batch_size]
            _, gW, gb = loss_and_grads(model, Xt[batch], yt[batch])
            step += 1
            for q, g, a, v in zip(params, gW + gb, m1, m2):
                a *= b1
                a += (1 - b1) * g
                v *= b2
                v += (1 - b2) * g * g
                ahat = a / (1 - b1 ** step)
                vhat = v / (1 - b2 ** step)
                q -= config.learning_rate * ahat / (np.sqrt(vhat) + eps)
        tl, ta = _metrics(model, Xt, yt)
        vl, va = _metrics(model, Xv, yv)
        history.append({"epoch": epoch + 1, "train_loss": tl, "train_acc": ta,
                        "val_loss": vl, "val_acc": va})
    if not history:
        tl, ta = _metrics(model, Xt, yt)
        vl, va = _metrics(model, Xv, yv)
        history.append({"epoch": 0, "train_loss": tl, "train_acc": ta, "val_loss": vl, "val_acc": va})
    model.metadata = {
        "learning_rate": config.learning_rate, "batch_size": config.batch_size,
        "epochs": config.epochs, "train_fraction": config.train_fraction,
        "samples": int(len(X)), "val_acc": history[-1]["val_acc"],
    }
    return TrainResult(model, history, train_idx, val_idx)


def predict_proba(model: MlpModel, X) -> np.ndarray:
    """n x 2 softmax outputs, column 0 tardy, column 1 early."""
    rows = X.rows if isinstance(X, FeatureMatrix) else np.asarray(X, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] != model.input_width:
        raise ValidationError(f"feature width {rows.shape[-1]} does not match model input {model.input_width}")
    z = model.logits(rows)
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def predict_scores(model: MlpModel, X) -> np.ndarray:
    return predict_proba(model, X)[:, 1]


def classify(instance: Instance, model: MlpModel, alpha: float = 0.5, mode: str = "full"):
    """Labels (early iff score >= alpha) and scores for every job of ``instance``."""
    if not 0 <= alpha <= 1:
        raise ValidationError("alpha must lie in [0, 1]")
    scores = predict_scores(model, featurize(instance, mode))
    return threshold(scores, alpha), scores


def threshold(scores, alpha: float = 0.5) -> np.ndarray:
    return np.asarray(scores) >= alpha
