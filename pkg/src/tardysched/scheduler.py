"""EDF feasibility checks and the label-to-schedule feasibility framework."""
from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .core import (
    InfeasibleInstanceError,
    Instance,
    Schedule,
    ValidationError,
    make_schedule,
    validate_labels,
)


def edf_order(instance: Instance) -> np.ndarray:
    return np.lexsort((np.arange(instance.n), instance.deadlines))


def edf_feasible(instance: Instance, excluded=(), start_time: float = 0.0) -> bool:
    """Can the non-excluded jobs, run by deadline from ``start_time``, all meet their deadlines?"""
    if start_time < 0:
        raise ValidationError("start_time must be non-negative")
    keep = np.ones(instance.n, dtype=bool)
    keep[list(excluded)] = False
    order = edf_order(instance)
    order = order[keep[order]]
    finish = start_time + np.cumsum(instance.durations[order])
    return bool(np.all(finish <= instance.deadlines[order]))


class _EdfChecker:
    """EDF checks against one deadline-sorted list, skipping scheduled jobs.

    ``slack[k]`` is the deadline of the k-th job in EDF order minus the work of
    the unscheduled jobs up to and including it; scheduled positions hold inf.
    """

    def __init__(self, instance: Instance):
        self.order = edf_order(instance)
        self.pos = np.empty(instance.n, dtype=np.int64)
        self.pos[self.order] = np.arange(instance.n)
        self.p = instance.durations[self.order]
        self.slack = instance.deadlines[self.order] - np.cumsum(self.p)

    def mark_scheduled(self, job: int) -> None:
        k = self.pos[job]
        self.slack[k + 1:] += self.p[k]
        self.slack[k] = np.inf

    def feasible_without(self, job: int, start_time: float) -> bool:
        # jobs after ``job`` in EDF order no longer wait for it
        k = self.pos[job]
        if k > 0 and self.slack[:k].min() < start_time:
            return False
        return k + 1 == len(self.slack) or self.slack[k + 1:].min() >= start_time - self.p[k]


@dataclass(frozen=True)
class SchedulingTrace:
    schedule: Schedule
    final_labels: np.ndarray
    demoted: tuple[int, ...]
    steps: int


def schedule_from_labels_traced(instance: Instance, labels) -> SchedulingTrace:
    labels = validate_labels(instance, labels).copy()
    n = instance.n
    if not edf_feasible(instance):
        raise InfeasibleInstanceError("instance fails the EDF check")
    d, dd, p = instance.due_dates, instance.deadlines, instance.durations
    # remaining part of s, kept sorted by (D, id); a heap pops in the same order
    s = [(float(d[j] if labels[j] else dd[j]), j) for j in range(n)]
    heapq.heapify(s)
    checker = _EdfChecker(instance)
    order: list[int] = []
    demoted: list[int] = []
    length = 0.0
    steps = 0
    while s:
        steps += 1
        _, j = heapq.heappop(s)
        if labels[j]:
            sched_now = checker.feasible_without(j, length + p[j])
        else:
            sched_now = True
        if sched_now:
            order.append(j)
            checker.mark_scheduled(j)
            length += p[j]
        else:
            labels[j] = False
            demoted.append(j)
            heapq.heappush(s, (float(dd[j]), j))
    schedule = make_schedule(instance, order)
    labels.setflags(write=False)
    return SchedulingTrace(schedule, labels, tuple(demoted), steps)


def schedule_from_labels(instance: Instance, labels) -> Schedule:
    """Turn early/tardy predictions into a deadline-feasible schedule.

    Jobs are taken in D order. An early-labelled job is scheduled only if the
    jobs left after it can still meet their deadlines under EDF; otherwise it
    is relabelled tardy and pushed back to its deadline position. The early
    set of the result follows actual completion times, so it may contain
    tardy-labelled jobs that happened to finish on time.

    Raises InfeasibleInstanceError when no feasible schedule exists.
    """
    return schedule_from_labels_traced(instance, labels).schedule


def edf_schedule(instance: Instance) -> Schedule:
    sched = make_schedule(instance, edf_order(instance))
    if not sched.feasible:
        raise InfeasibleInstanceError("EDF order misses a deadline")
    return sched


def edd_schedule(instance: Instance) -> Schedule:
    # may be deadline-infeasible; callers check ``schedule.feasible``
    return make_schedule(instance, np.lexsort((np.arange(instance.n), instance.due_dates)))
