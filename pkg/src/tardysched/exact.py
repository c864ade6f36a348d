"""Exact solvers: exhaustive enumeration for tiny instances and branch-and-bound.

The branch-and-bound searches over early/tardy decisions. A label vector is
feasible iff for every time t

    sum_{early j, d_j <= t} p_j + sum_{tardy j, dd_j <= t} p_j <= t,

which, with x_j = 1 for early jobs, is a packing constraint over the jobs whose
window [d_j, dd_j) contains t. Its LP relaxation gives the node bound; the
bound is re-derived from the LP duals by weak duality so that solver
tolerances can only loosen it, never cut off an optimum.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
import highspy

from .core import Instance, ValidationError, label_objective, labels_feasible, weight_sum
from .scheduler import edf_feasible, schedule_from_labels

OPTIMAL = "optimal"
TIMEOUT = "timeout"
INFEASIBLE = "infeasible"

BRUTE_FORCE_MAX_N = 20
TIME_CHECK_EVERY = 1024
# any strictly better solution improves by more than this (data carry 6 decimals)
IMPROVE_TOL = 1e-7
# capacity slack so float round-off in the LP can only over-estimate
CAP_SLACK = 1e-7
INT_TOL = 1e-9
DIVE_EVERY = 16


@dataclass(frozen=True)
class SolveResult:
    status: str
    labels: np.ndarray | None
    objective: float
    nodes_explored: int
    elapsed: float

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _infeasible(nodes: int, t0: float) -> SolveResult:
    return SolveResult(INFEASIBLE, None, math.nan, nodes, time.perf_counter() - t0)


def brute_force(instance: Instance) -> SolveResult:
    """Enumerate all 2^n label vectors and keep the heaviest feasible early set."""
    t0 = time.perf_counter()
    n = instance.n
    if n > BRUTE_FORCE_MAX_N:
        raise ValidationError(f"brute force refuses n={n} > {BRUTE_FORCE_MAX_N}")
    if not edf_feasible(instance):
        return _infeasible(0, t0)
    bits = ((np.arange(2 ** n)[:, None] >> np.arange(n)) & 1).astype(bool)
    best, best_labels = -math.inf, None
    for labels in bits:
        if labels_feasible(instance, labels):
            value = label_objective(instance, labels)
            if value > best:
                best, best_labels = value, labels.copy()
    return SolveResult(OPTIMAL, best_labels, best, 2 ** n, time.perf_counter() - t0)


def dominance_matrix(instance: Instance) -> np.ndarray:
    """``dom[i, j]``: job j dominates job i (i early => j early, j tardy => i tardy)."""
    w, p, d, dd = instance.weights, instance.durations, instance.due_dates, instance.deadlines
    return (
        (w[None, :] > w[:, None])
        & (p[None, :] <= p[:, None])
        & (d[None, :] >= d[:, None])
        & (dd[None, :] <= dd[:, None])
    )


def dominance_violations(dom: np.ndarray, labels: np.ndarray) -> list[tuple[int, int]]:
    """Pairs (i, j) with j dominating i where i is early but j is tardy."""
    labels = np.asarray(labels, dtype=bool)
    ii, jj = np.nonzero(dom & labels[:, None] & ~labels[None, :])
    return list(zip(ii.tolist(), jj.tolist()))


def greedy_completion(instance: Instance, base: np.ndarray, priority: np.ndarray) -> np.ndarray:
    """Add jobs to the early set ``base`` in ``priority`` order while it stays feasible."""
    labels = np.asarray(base, dtype=bool).copy()
    for j in priority:
        if not labels[j]:
            labels[j] = True
            if not labels_feasible(instance, labels):
                labels[j] = False
    return labels


class _Relaxation:
    """Packing LP over the checkpoints where the feasibility constraint can bind.

    One HiGHS model lives for the whole search; nodes only change column
    bounds, so each re-solve warm-starts from the previous basis.
    """

    def __init__(self, instance: Instance):
        p, d, dd = instance.durations, instance.due_dates, instance.deadlines
        n = instance.n
        ts = np.unique(np.concatenate([d, dd]))
        by_deadline = np.argsort(dd, kind="stable")
        cum = np.concatenate([[0.0], np.cumsum(p[by_deadline])])
        closed = cum[np.searchsorted(dd[by_deadline], ts, side="right")]
        cover = (d[None, :] <= ts[:, None]) & (ts[:, None] < dd[None, :])
        keep = cover.any(axis=1)
        self.cap = (ts - closed + CAP_SLACK)[keep]
        self.A = np.where(cover[keep], p[None, :], 0.0)
        self.w = instance.weights
        self.cols = np.arange(n, dtype=np.int32)

        m = len(self.cap)
        lp = highspy.HighsLp()
        lp.num_col_, lp.num_row_ = n, m
        lp.col_cost_ = -self.w
        lp.col_lower_ = np.zeros(n)
        lp.col_upper_ = np.ones(n)
        lp.row_lower_ = np.full(m, -highspy.kHighsInf)
        lp.row_upper_ = self.cap
        csc = self.A.T  # column j lists the rows covering job j
        nz = csc != 0
        lp.a_matrix_.format_ = highspy.MatrixFormat.kColwise
        lp.a_matrix_.start_ = np.concatenate([[0], np.cumsum(nz.sum(axis=1))]).astype(np.int32)
        lp.a_matrix_.index_ = np.nonzero(nz)[1].astype(np.int32)
        lp.a_matrix_.value_ = csc[nz]
        self.highs = highspy.Highs()
        self.highs.setOptionValue("output_flag", False)
        self.highs.setOptionValue("presolve", "off")
        self.highs.setOptionValue("threads", 1)
        self.highs.passModel(lp)

    def solve(self, fixed: np.ndarray):
        """Return (x, duals) for the node LP, or None if it has no usable optimum."""
        lower = (fixed == 1).astype(float)
        upper = (fixed != 0).astype(float)
        self.highs.changeColsBounds(len(self.cols), self.cols, lower, upper)
        self.highs.run()
        if self.highs.getModelStatus() != highspy.HighsModelStatus.kOptimal:
            return None
        sol = self.highs.getSolution()
        x = np.clip(np.asarray(sol.col_value), 0.0, 1.0)
        duals = np.maximum(-np.asarray(sol.row_dual), 0.0)
        return x, duals

    def reduced_costs(self, fixed: np.ndarray, duals: np.ndarray) -> np.ndarray:
        """Per-job ``w_j - (A^T duals)_j``; only meaningful for undecided jobs."""
        return self.w - duals @ self.A

    def bound(self, fixed: np.ndarray, duals: np.ndarray) -> float:
        """Lagrangian upper bound for the node; valid for any non-negative duals."""
        rc = self.reduced_costs(fixed, duals)
        early = fixed == 1
        free = fixed == -1
        return (
            float(duals @ self.cap)
            + float(rc[early].sum())
            + float(np.maximum(rc[free], 0.0).sum())
        )


def solve_exact(
    instance: Instance,
    time_limit: float = 60.0,
    *,
    dominance: bool = True,
    bound: str = "lp",
    on_node: Callable[[np.ndarray], None] | None = None,
) -> SolveResult:
    """Branch-and-bound for the maximum-weight feasible early set.

    Depth-first, early branch first. Nodes are pruned by partial feasibility
    (undecided jobs treated as tardy), by the bound (``"lp"``: LP relaxation;
    ``"simple"``: committed plus all undecided weight) and, when ``dominance``
    is set, by propagating the pairwise dominance implications. ``on_node``
    receives each explored node's decision vector (-1 undecided, 0 tardy,
    1 early).
    """
    if not time_limit > 0:
        raise ValidationError("time_limit must be positive")
    if bound not in ("lp", "simple"):
        raise ValidationError(f"unknown bound {bound!r}")
    t0 = time.perf_counter()
    n = instance.n
    if not edf_feasible(instance):
        return _infeasible(0, t0)

    w = instance.weights
    branch_order = np.lexsort((np.arange(n), instance.deadlines))
    dom = dominance_matrix(instance) if dominance else np.zeros((n, n), dtype=bool)
    dom_succ = [np.flatnonzero(dom[i]) for i in range(n)]
    dom_pred = [np.flatnonzero(dom[:, j]) for j in range(n)]

    def fix(fixed: np.ndarray, job: int, value: int) -> np.ndarray | None:
        # dominance is transitive, so direct successors/predecessors close it
        if fixed[job] == 1 - value:
            return None
        out = fixed.copy()
        out[job] = value
        implied = dom_succ[job] if value == 1 else dom_pred[job]
        if len(implied):
            if np.any(out[implied] == 1 - value):
                return None
            out[implied] = value
        return out

    root = np.full(n, -1, dtype=np.int8)
    # a job that cannot be early even with every other job tardy is always tardy
    for j in range(n):
        alone = np.zeros(n, dtype=bool)
        alone[j] = True
        if root[j] == -1 and not labels_feasible(instance, alone):
            root = fix(root, j, 0)

    best, best_labels = -math.inf, np.zeros(n, dtype=bool)

    def offer(labels: np.ndarray) -> None:
        nonlocal best, best_labels
        value = weight_sum(w, labels)
        if value > best and labels_feasible(instance, labels):
            best, best_labels = value, labels.copy()

    offer(np.zeros(n, dtype=bool))
    offer(schedule_from_labels(instance, np.zeros(n, dtype=bool)).early)
    relax = _Relaxation(instance) if bound == "lp" else None
    ratio = w / instance.durations

    def dive(fixed: np.ndarray, x: np.ndarray) -> None:
        free = fixed == -1
        base = (fixed == 1) | (free & (x >= 1 - INT_TOL))
        if not labels_feasible(instance, base):
            return
        cand = np.flatnonzero(free & ~base)
        cand = cand[np.lexsort((cand, -ratio[cand], -x[cand]))]
        offer(greedy_completion(instance, base, cand))

    if relax is not None:
        sol = relax.solve(root)
        if sol is not None:
            offer(schedule_from_labels(instance, sol[0] > 0.5).early)
            dive(root, sol[0])

    stack = [root]
    nodes = 0
    timed_out = False
    while stack:
        fixed = stack.pop()
        nodes += 1
        if nodes % TIME_CHECK_EVERY == 0 and time.perf_counter() - t0 > time_limit:
            timed_out = True
            break
        if on_node is not None:
            on_node(fixed)
        early = fixed == 1
        if not labels_feasible(instance, early):
            continue
        free = fixed == -1
        if not free.any():
            offer(early)
            continue
        if weight_sum(w, early) + float(w[free].sum()) <= best + IMPROVE_TOL:
            continue
        candidates = branch_order[free[branch_order]]
        sol = relax.solve(fixed) if relax is not None else None
        if relax is not None and time.perf_counter() - t0 > time_limit:
            timed_out = True
            break
        if sol is not None:
            x, duals = sol
            offer(early | (free & (x >= 1 - INT_TOL)))
            if nodes % DIVE_EVERY == 0:
                dive(fixed, x)
            ub = relax.bound(fixed, duals)
            if ub <= best + IMPROVE_TOL:
                continue
            # reduced-cost fixing: moving job j against its LP side costs |rc_j|
            rc = relax.reduced_costs(fixed, duals)
            slack = ub - best - IMPROVE_TOL
            for job in np.flatnonzero(free & (np.abs(rc) >= slack)):
                if fixed[job] == -1:
                    fixed = fix(fixed, int(job), 0 if rc[job] < 0 else 1)
                    if fixed is None:
                        break
            if fixed is None:
                continue
            free = fixed == -1
            if not free.any():
                offer(fixed == 1)
                continue
            candidates = branch_order[free[branch_order]]
            xf = x[candidates]
            fractional = candidates[(xf > INT_TOL) & (xf < 1 - INT_TOL)]
            if len(fractional):
                candidates = fractional
        job = int(candidates[0])
        for value in (0, 1):  # early child pushed last, explored first
            child = fix(fixed, job, value)
            if child is not None:
                stack.append(child)

    status = TIMEOUT if timed_out else OPTIMAL
    labels = np.asarray(best_labels, dtype=bool)
    labels.setflags(write=False)
    return SolveResult(status, labels, weight_sum(w, labels), nodes, time.perf_counter() - t0)
