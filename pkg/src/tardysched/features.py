"""Per-job feature vectors.

Every job carries eight parameters: w, p, d, dd, w/p, d/dd, w-p, dd-d. The
``full`` representation turns each parameter column into a z-score and into a
z-score of its logarithm, both taken over the jobs of the same instance, so a
job is described relative to the rest of its instance (16 features).
``minimal`` is the raw eight parameters; ``aggregated`` appends the instance
mean, std, min and max of each parameter (40 features).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Instance, ValidationError

PARAMETER_NAMES = ("w", "p", "d", "dd", "w_over_p", "d_over_dd", "w_minus_p", "dd_minus_d")
MODES = ("minimal", "aggregated", "full")
WIDTHS = {"minimal": 8, "aggregated": 40, "full": 16}
LOG_FLOOR = 1e-9


@dataclass(frozen=True)
class FeatureMatrix:
    rows: np.ndarray
    mode: str

    @property
    def width(self) -> int:
        return self.rows.shape[1]

    def __len__(self) -> int:
        return len(self.rows)


def feature_names(mode: str = "full") -> list[str]:
    if mode == "minimal":
        return list(PARAMETER_NAMES)
    if mode == "aggregated":
        stats = [f"{k}_{s}" for s in ("avg", "std", "min", "max") for k in PARAMETER_NAMES]
        return list(PARAMETER_NAMES) + stats
    if mode == "full":
        return [f"{k}_dev" for k in PARAMETER_NAMES] + [f"{k}_rel" for k in PARAMETER_NAMES]
    raise ValidationError(f"unknown feature mode {mode!r}")


def job_parameters(instance: Instance) -> np.ndarray:
    """n x 8 matrix of the raw job parameters."""
    w, p, d, dd = instance.weights, instance.durations, instance.due_dates, instance.deadlines
    return np.column_stack([w, p, d, dd, w / p, d / dd, w - p, dd - d])


def zscore(x: np.ndarray) -> np.ndarray:
    """Column-wise (x - mean) / std with population std; zero-spread columns map to 0."""
    # identical values can leave a round-off std; test the spread exactly
    spread = np.ptp(x, axis=0) > 0
    sd = np.where(spread, x.std(axis=0), 1.0)
    return np.where(spread, (x - x.mean(axis=0)) / sd, 0.0)


def featurize(instance: Instance, mode: str = "full") -> FeatureMatrix:
    if instance.n < 1:
        raise ValidationError("cannot featurize an empty instance")
    x = job_parameters(instance)
    if mode == "minimal":
        rows = x
    elif mode == "aggregated":
        stats = np.concatenate([x.mean(0), x.std(0), x.min(0), x.max(0)])
        rows = np.hstack([x, np.broadcast_to(stats, (len(x), len(stats)))])
    elif mode == "full":
        # w-p and dd-d may be <= 0; clamp before the log
        logs = np.log(np.maximum(x, LOG_FLOOR))
        rows = np.hstack([zscore(x), zscore(logs)])
    else:
        raise ValidationError(f"unknown feature mode {mode!r}")
    return FeatureMatrix(np.ascontiguousarray(rows, dtype=np.float64), mode)
