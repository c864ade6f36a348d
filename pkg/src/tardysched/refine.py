"""Instance reduction for label-fixed jobs and exact re-solving of uncertain predictions."""
from __future__ import annotations

import numpy as np

from .core import Instance, ValidationError, validate_labels
from .exact import OPTIMAL, solve_exact

DEFAULT_GAMMA = 25
DEFAULT_BETA = 60.0


def _shift(values: np.ndarray, key: float, p: float) -> np.ndarray:
    return np.where(values <= key, np.minimum(values, key - p), values - p)


def reduce_instance(instance: Instance, job_id: int, key: float) -> Instance:
    """Drop ``job_id`` whose label is fixed through its sort key D (d if early, dd if tardy).

    Weights and durations of the other jobs are kept; their due dates and
    deadlines are moved so that the remaining instance has a feasible schedule
    with early set E iff the original has one with early set E + {job_id}
    (or E, when the job is tardy). Jobs of the result keep their relative order.
    """
    n = instance.n
    if not 0 <= job_id < n:
        raise ValidationError(f"job {job_id} not in instance of {n} jobs")
    d, dd = instance.due_dates[job_id], instance.deadlines[job_id]
    if key != d and key != dd:
        raise ValidationError(f"D value {key} is neither the due date {d} nor the deadline {dd}")
    keep = np.arange(n) != job_id
    p = instance.durations[job_id]
    return Instance(
        instance.weights[keep],
        instance.durations[keep],
        _shift(instance.due_dates[keep], key, p),
        _shift(instance.deadlines[keep], key, p),
        meta={k: v for k, v in instance.meta.items() if k != "n"},
        strict=False,
    )


def reduce_fixed(instance: Instance, fixed_ids, labels) -> tuple[Instance, np.ndarray]:
    """Remove every job in ``fixed_ids`` using its label; returns (reduced, kept original ids).

    Jobs leave in non-increasing order of D (ties: higher id first), each
    removal using the due date or deadline as left by the removals before it.
    The shift is monotone, so this order is the same before and after shifting.
    """
    labels = validate_labels(instance, labels)
    fixed_ids = np.asarray(sorted(set(int(j) for j in fixed_ids)), dtype=np.int64)
    d = instance.due_dates.copy()
    dd = instance.deadlines.copy()
    p = instance.durations
    if len(fixed_ids):
        key0 = np.where(labels[fixed_ids], d[fixed_ids], dd[fixed_ids])
        for j in fixed_ids[np.lexsort((-fixed_ids, -key0))]:
            key = d[j] if labels[j] else dd[j]
            d = _shift(d, key, p[j])
            dd = _shift(dd, key, p[j])
    keep = np.ones(instance.n, dtype=bool)
    keep[fixed_ids] = False
    ids = np.flatnonzero(keep)
    reduced = Instance(
        instance.weights[ids], p[ids], d[ids], dd[ids],
        meta={k: v for k, v in instance.meta.items() if k != "n"}, strict=False,
    )
    return reduced, ids


def refine(instance: Instance, labels, scores, gamma: int = DEFAULT_GAMMA,
           beta: float = DEFAULT_BETA, *, solver=solve_exact, return_info: bool = False):
    """Re-solve the ``gamma`` least confident predictions exactly.

    Jobs are ranked by |score - 0.5|; all but the first ``gamma`` are removed
    with their predicted labels and the reduced instance is solved with time
    limit ``beta``. Only a proven optimum overwrites the kept jobs' labels.
    """
    labels = validate_labels(instance, labels)
    scores = np.asarray(scores, dtype=np.float64)
    n = instance.n
    if scores.shape != (n,):
        raise ValidationError(f"expected {n} scores")
    if not (0 <= gamma <= n):
        raise ValidationError(f"gamma must lie in [0, {n}]")
    if not beta > 0:
        raise ValidationError("beta must be positive")
    info = {"kept": [], "status": None, "solver_calls": 0}
    out = labels.copy()
    if gamma > 0:
        rank = np.lexsort((np.arange(n), np.abs(scores - 0.5)))
        kept, removed = rank[:gamma], rank[gamma:]
        reduced, ids = reduce_fixed(instance, removed, labels)
        info["kept"] = ids.tolist()
        info["solver_calls"] = 1
        result = solver(reduced, beta)
        info["status"] = result.status
        if result.status == OPTIMAL:
            out[ids] = result.labels
    out.setflags(write=False)
    return (out, info) if return_info else out
