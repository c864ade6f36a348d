"""Instance and schedule data model, objective evaluation and label feasibility.

Labels are boolean numpy arrays indexed by job id: ``True`` means the job is
early (must finish by its due date), ``False`` means tardy (must finish by its
deadline). Scores are float arrays in [0, 1].
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

EARLY = True
TARDY = False


class ValidationError(ValueError):
    """Malformed input: broken permutation, wrong lengths, violated invariants."""


class InfeasibleScheduleError(ValueError):
    """A schedule misses at least one hard deadline."""


class InfeasibleInstanceError(ValueError):
    """No schedule of the instance meets all deadlines (EDF fails)."""


class InvariantViolation(RuntimeError):
    """An internal consistency check failed; indicates a bug, not bad input."""


@dataclass(frozen=True)
class Job:
    id: int
    weight: float
    duration: float
    due_date: float
    deadline: float

    def __post_init__(self):
        if not (self.weight > 0 and self.duration > 0):
            raise ValidationError(f"job {self.id}: weight and duration must be positive")
        if not (self.duration <= self.due_date <= self.deadline):
            raise ValidationError(
                f"job {self.id}: need duration <= due_date <= deadline, got "
                f"p={self.duration}, d={self.due_date}, dd={self.deadline}"
            )


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Instance:
    """A set of jobs stored column-wise.

    ``strict=False`` skips the per-job ``p <= d <= dd`` check; reduced instances
    produced by the refine step may legitimately contain jobs with ``d < p``
    (such jobs can only be tardy).
    """

    weights: np.ndarray
    durations: np.ndarray
    due_dates: np.ndarray
    deadlines: np.ndarray
    meta: dict = field(default_factory=dict)
    strict: bool = True

    def __post_init__(self):
        for name in ("weights", "durations", "due_dates", "deadlines"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        n = len(self.weights)
        if not (len(self.durations) == len(self.due_dates) == len(self.deadlines) == n):
            raise ValidationError("job parameter columns differ in length")
        cols = np.concatenate([self.weights, self.durations, self.due_dates, self.deadlines])
        if not np.all(np.isfinite(cols)):
            raise ValidationError("job parameters must be finite")
        if np.any(self.weights <= 0) or np.any(self.durations <= 0):
            bad = int(np.flatnonzero((self.weights <= 0) | (self.durations <= 0))[0])
            raise ValidationError(f"job {bad}: weight and duration must be positive")
        if self.strict:
            bad = (self.durations > self.due_dates) | (self.due_dates > self.deadlines)
            if np.any(bad):
                j = int(np.flatnonzero(bad)[0])
                raise ValidationError(
                    f"job {j}: need duration <= due_date <= deadline, got "
                    f"p={self.durations[j]}, d={self.due_dates[j]}, dd={self.deadlines[j]}"
                )
        meta = dict(self.meta)
        meta["n"] = n
        object.__setattr__(self, "meta", meta)

    @classmethod
    def from_jobs(cls, jobs: Sequence[Job], meta: dict | None = None) -> "Instance":
        for pos, job in enumerate(jobs):
            if job.id != pos:
                raise ValidationError(f"job id {job.id} at position {pos}")
        return cls(
            [j.weight for j in jobs],
            [j.duration for j in jobs],
            [j.due_date for j in jobs],
            [j.deadline for j in jobs],
            meta=meta or {},
        )

    @classmethod
    def from_arrays(cls, w, p, d, dd, meta: dict | None = None, strict: bool = True):
        return cls(w, p, d, dd, meta=meta or {}, strict=strict)

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def jobs(self) -> list[Job]:
        if not self.strict:
            raise ValidationError("relaxed instance jobs do not satisfy Job invariants")
        return [
            Job(i, float(w), float(p), float(d), float(dd))
            for i, (w, p, d, dd) in enumerate(
                zip(self.weights, self.durations, self.due_dates, self.deadlines)
            )
        ]

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, k), getattr(other, k))
            for k in ("weights", "durations", "due_dates", "deadlines")
        )

    __hash__ = None  # type: ignore[assignment]

    def subset(self, ids: Iterable[int]) -> "Instance":
        ids = np.asarray(list(ids), dtype=int)
        return Instance(
            self.weights[ids], self.durations[ids], self.due_dates[ids], self.deadlines[ids],
            meta={k: v for k, v in self.meta.items() if k != "n"}, strict=self.strict,
        )


@dataclass(frozen=True, eq=False)
class Schedule:
    """A processing order plus the quantities it induces.

    ``completion_times`` and ``early`` are indexed by job id. ``objective`` is
    the weight of jobs finishing by their due date; it is only meaningful when
    ``feasible`` holds.
    """

    order: np.ndarray
    completion_times: np.ndarray
    early: np.ndarray
    objective: float
    feasible: bool

    @property
    def tardy(self) -> np.ndarray:
        return ~self.early


def weight_sum(weights: np.ndarray, mask: np.ndarray) -> float:
    # fsum is correctly rounded, so equal sets give equal objectives in any order
    return math.fsum(weights[mask].tolist())


def validate_order(instance: Instance, order) -> np.ndarray:
    order = np.asarray(order)
    if order.ndim != 1 or len(order) != instance.n:
        raise ValidationError(f"order must list all {instance.n} jobs, got {len(order)}")
    if not np.issubdtype(order.dtype, np.integer):
        if len(order) and not np.all(np.mod(order, 1) == 0):
            raise ValidationError("order entries must be integers")
        order = order.astype(np.int64)
    seen = np.zeros(instance.n, dtype=bool)
    for j in order:
        if j < 0 or j >= instance.n or seen[j]:
            raise ValidationError(f"order is not a permutation: bad or repeated id {j}")
        seen[j] = True
    return order.astype(np.int64)


def validate_labels(instance: Instance, labels) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.shape != (instance.n,):
        raise ValidationError(f"expected {instance.n} labels, got shape {labels.shape}")
    return labels.astype(bool)


def completion_times(instance: Instance, order) -> np.ndarray:
    """Completion time of every job (indexed by id) when processed in ``order``."""
    order = validate_order(instance, order)
    c = np.empty(instance.n)
    c[order] = np.cumsum(instance.durations[order])
    return c


def make_schedule(instance: Instance, order) -> Schedule:
    order = validate_order(instance, order)
    c = completion_times(instance, order)
    early = c <= instance.due_dates
    feasible = bool(np.all(c <= instance.deadlines))
    order = order.copy()
    for arr in (order, c, early):
        arr.setflags(write=False)
    return Schedule(order, c, early, weight_sum(instance.weights, early), feasible)


def objective(instance: Instance, schedule: Schedule | Sequence[int]) -> float:
    """Weighted number of early jobs; raises if any deadline is missed."""
    if not isinstance(schedule, Schedule):
        schedule = make_schedule(instance, schedule)
    c = completion_times(instance, schedule.order)
    if not np.array_equal(c, schedule.completion_times):
        raise ValidationError("completion times inconsistent with order")
    late = np.flatnonzero(c > instance.deadlines)
    if len(late):
        raise InfeasibleScheduleError(f"job {int(late[0])} completes after its deadline")
    return weight_sum(instance.weights, c <= instance.due_dates)


def sort_keys(instance: Instance, labels: np.ndarray) -> np.ndarray:
    """D_j: due date for early jobs, deadline for tardy ones."""
    return np.where(labels, instance.due_dates, instance.deadlines)


def d_sort(instance: Instance, labels) -> np.ndarray:
    """Job ids in non-descending D order, ties by id."""
    labels = validate_labels(instance, labels)
    return np.lexsort((np.arange(instance.n), sort_keys(instance, labels)))


def labels_feasible(instance: Instance, labels) -> bool:
    """True iff every job meets its D when jobs run in D order."""
    labels = validate_labels(instance, labels)
    key = sort_keys(instance, labels)
    order = np.lexsort((np.arange(instance.n), key))
    return bool(np.all(np.cumsum(instance.durations[order]) <= key[order]))


def derive_labels_from_schedule(instance: Instance, schedule: Schedule) -> np.ndarray:
    c = completion_times(instance, schedule.order)
    if np.any(c > instance.deadlines):
        raise InfeasibleScheduleError("cannot derive labels from an infeasible schedule")
    return c <= instance.due_dates


def label_objective(instance: Instance, labels) -> float:
    """Weight of the jobs labelled early."""
    return weight_sum(instance.weights, validate_labels(instance, labels))
