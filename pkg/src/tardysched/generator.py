"""Seeded instance generation for the fifteen benchmark families.

Every family draws the four job columns in a fixed order (random weights,
durations, due dates, deadlines, then derived weights) from a PCG64 stream
seeded with ``SeedSequence([seed, family, n, attempt])``. Values are rounded
to six decimals as they are drawn so written instances reload bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import Instance
from .scheduler import edf_feasible

PRNG = "PCG64"
DECIMALS = 6
JOB_RETRIES = 100
INSTANCE_RETRIES = 50

# (a, b) due-date window fractions for families 11-15
AB_PAIRS = {11: (0.1, 0.3), 12: (0.1, 0.7), 13: (0.3, 0.5), 14: (0.3, 0.7), 15: (0.5, 0.7)}
FAMILIES = tuple(range(1, 16))


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class DatasetSpec:
    family: int
    n: int
    seed: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be in 1..15, got {self.family}")
        if self.n < 1:
            raise ValueError("n must be at least 1")


Sampler = Callable[[np.random.Generator, int], np.ndarray]


def _uniform(lo, hi) -> Sampler:
    return lambda rng, k: rng.uniform(lo, hi, k)


def _normal(mu, sigma) -> Sampler:
    return lambda rng, k: rng.normal(mu, sigma, k)


def _lognormal(mu, sigma) -> Sampler:
    return lambda rng, k: rng.lognormal(mu, sigma, k)


def _exponential(mean) -> Sampler:
    # Exp(x) in the family table is read as the mean, not the rate
    return lambda rng, k: rng.exponential(mean, k)


@dataclass(frozen=True)
class _Recipe:
    weight: Sampler | None  # None: derived from other columns
    duration: Sampler
    due: Callable[[float], Sampler]  # total duration -> sampler
    deadline: str  # "uniform", "linear_weight" or "normal"
    deadline_hi: float = 1.1  # upper end of U(d, hi * sum p)
    derive_weight: Callable | None = None  # (p, d, n) -> w


def _recipe(family: int) -> _Recipe:
    frac = lambda lo, hi: (lambda total: _uniform(lo * total, hi * total))  # noqa: E731
    if family == 1:
        return _Recipe(_normal(50, 20), _uniform(1, 100), frac(0.3, 0.7), "uniform")
    if family == 2:
        return _Recipe(_uniform(30, 80), _normal(50, 10),
                       lambda t: _normal(0.5 * t, 0.1 * t), "uniform", 1.2)
    if family == 3:
        return _Recipe(None, _normal(40, 15), frac(0.3, 0.7), "uniform",
                       derive_weight=lambda p, d, n: 2 * p + 20)
    if family == 4:
        return _Recipe(None, _normal(35, 10), frac(0.3, 0.7), "uniform",
                       derive_weight=lambda p, d, n: p ** 2 + 10)
    if family == 5:
        return _Recipe(_uniform(20, 80), _normal(45, 15), frac(0.5, 0.8), "linear_weight")
    if family == 6:
        return _Recipe(None, _normal(40, 10), frac(0.3, 0.7), "uniform",
                       derive_weight=lambda p, d, n: 100 / (p + 1))
    if family == 7:
        return _Recipe(_uniform(10, 60), _exponential(30), frac(0.3, 0.7), "uniform")
    if family == 8:
        return _Recipe(_lognormal(3, 1), _lognormal(4, 1), frac(0.3, 0.7), "uniform")
    if family == 9:
        return _Recipe(None, _normal(40, 10), frac(0.3, 0.7), "uniform",
                       derive_weight=lambda p, d, n: 1.5 * p + 0.2 * d)
    if family == 10:
        return _Recipe(_lognormal(4, 2), _exponential(40),
                       lambda t: _normal(0.5 * t, 100), "normal")
    a, b = AB_PAIRS[family]
    return _Recipe(_uniform(1, 100), _uniform(1, 100), frac(a, b), "uniform")


def _round(x):
    return np.round(x, DECIMALS)


def _draw_column(rng, sampler: Sampler, n: int, ok: Callable[[np.ndarray, np.ndarray], np.ndarray],
                 clamp: Callable[[np.ndarray], np.ndarray] | None = None) -> np.ndarray:
    """Draw n values; redraw the ones failing ``ok`` job by job, then clamp leftovers."""
    x = _round(sampler(rng, n))
    idx = np.arange(n)
    for j in np.flatnonzero(~ok(x, idx)):
        for _ in range(JOB_RETRIES):
            x[j] = _round(sampler(rng, 1)[0])
            if ok(x[j:j + 1], idx[j:j + 1])[0]:
                break
    if clamp is not None:
        x = clamp(x)
    return x


def _positive(x, idx):
    return x > 0


def _attempt(spec: DatasetSpec, attempt: int) -> Instance:
    n = spec.n
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([spec.seed, spec.family, n, attempt])))
    r = _recipe(spec.family)
    tiny = 10.0 ** -DECIMALS
    w = None
    if r.weight is not None:
        w = _draw_column(rng, r.weight, n, _positive, lambda x: np.maximum(x, tiny))
    p = _draw_column(rng, r.duration, n, _positive, lambda x: np.maximum(x, tiny))
    total = float(p.sum())
    d = _draw_column(rng, r.due(total), n, lambda x, i: x >= p[i], lambda x: np.maximum(x, p))

    if r.deadline == "uniform":
        hi = r.deadline_hi * total
        # U(d_i, hi) with a per-job lower end; d_i > hi leaves only dd = d_i
        dd = _round(rng.uniform(np.minimum(d, hi), hi))
        dd = np.maximum(dd, d)
    elif r.deadline == "linear_weight":
        dd = _round(d + (n / 5) * w)
    else:  # family 10: dd ~ N(2 d, 200)
        dd = _round(rng.normal(2 * d, 200, n))
        for j in np.flatnonzero(dd < d):
            for _ in range(JOB_RETRIES):
                dd[j] = _round(rng.normal(2 * d[j], 200))
                if dd[j] >= d[j]:
                    break
        dd = np.maximum(dd, d)

    if w is None:
        w = _round(r.derive_weight(p, d, n))
        w = np.maximum(w, tiny)
    meta = {"family": spec.family, "seed": spec.seed, "prng": PRNG, "attempt": attempt}
    return Instance(w, p, d, dd, meta=meta)


def generate(spec: DatasetSpec) -> Instance:
    """Deterministic instance for ``spec`` that passes the EDF check."""
    for attempt in range(INSTANCE_RETRIES):
        inst = _attempt(spec, attempt)
        if edf_feasible(inst):
            return inst
    raise GenerationError(
        f"family {spec.family}, n={spec.n}, seed={spec.seed}: no EDF-feasible instance "
        f"after {INSTANCE_RETRIES} attempts"
    )


def generate_many(family: int, n: int, seed: int, count: int) -> list[Instance]:
    return [generate(DatasetSpec(family, n, seed + k)) for k in range(count)]
