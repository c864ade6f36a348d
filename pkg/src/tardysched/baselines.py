"""Comparison heuristics. Each one proposes early/tardy labels and lets
``schedule_from_labels`` turn them into a feasible schedule."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .core import Instance, Schedule, ValidationError
from .scheduler import schedule_from_labels


class _Evaluator:
    """Label vector -> schedule, memoised on the label bytes."""

    def __init__(self, instance: Instance):
        self.instance = instance
        self.cache: dict[bytes, Schedule] = {}
        self.calls = 0

    def __call__(self, labels: np.ndarray) -> Schedule:
        key = np.packbits(labels).tobytes()
        sched = self.cache.get(key)
        if sched is None:
            self.calls += 1
            sched = schedule_from_labels(self.instance, labels)
            self.cache[key] = sched
        return sched


@dataclass
class HeuristicRun:
    schedule: Schedule
    epochs: int
    seconds: float
    history: list[float] = field(default_factory=list)  # best objective after each epoch

    @property
    def seconds_per_epoch(self) -> float:
        return self.seconds / max(self.epochs, 1)


def rule_based(instance: Instance, seed: int = 0) -> Schedule:
    """Best of random (fair coin per job), all-early and all-tardy labels."""
    rng = np.random.default_rng(seed)
    n = instance.n
    candidates = [rng.random(n) < 0.5, np.ones(n, dtype=bool), np.zeros(n, dtype=bool)]
    best = None
    for labels in candidates:
        sched = schedule_from_labels(instance, labels)
        if best is None or sched.objective > best.objective:
            best = sched
    return best


# --------------------------------------------------------------------------
# genetic algorithm over permutations


@dataclass(frozen=True)
class GAParams:
    population: int = 50
    crossover_prob: float = 0.9
    mutation_prob: float = 0.02
    elitism: int = 2
    generations: int | None = 200
    tournament: int = 2


def decode_permutation(instance: Instance, perm: np.ndarray) -> np.ndarray:
    """Early iff the job meets its due date when jobs run in ``perm`` order."""
    perm = np.asarray(perm)
    early = np.empty(instance.n, dtype=bool)
    early[perm] = np.cumsum(instance.durations[perm]) <= instance.due_dates[perm]
    return early


def order_crossover(a: np.ndarray, b: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """OX: copy a[i:j], fill the rest with b's remaining genes in b's order."""
    n = len(a)
    i, j = sorted(rng.integers(0, n + 1, size=2).tolist())
    child = np.full(n, -1, dtype=np.int64)
    child[i:j] = a[i:j]
    taken = np.zeros(n, dtype=bool)
    taken[a[i:j]] = True
    rest = b[~taken[b]]
    child[:i] = rest[:i]
    child[j:] = rest[i:]
    return child


def swap_mutation(perm: np.ndarray, prob: float, rng: np.random.Generator) -> np.ndarray:
    perm = perm.copy()
    n = len(perm)
    for k in np.flatnonzero(rng.random(n) < prob):
        other = rng.integers(n)
        perm[k], perm[other] = perm[other], perm[k]
    return perm


def run_ga(instance: Instance, params: GAParams = GAParams(), time_budget: float = 300.0,
           seed: int = 0) -> HeuristicRun:
    if not time_budget > 0:
        raise ValidationError("time_budget must be positive")
    t0 = time.perf_counter()
    n = instance.n
    rng = np.random.default_rng(seed)
    evaluate = _Evaluator(instance)

    def fitness(perm):
        return evaluate(decode_permutation(instance, perm))

    if n == 1:
        sched = fitness(np.zeros(1, dtype=np.int64))
        return HeuristicRun(sched, 0, time.perf_counter() - t0, [sched.objective])

    pop = [rng.permutation(n) for _ in range(params.population)]
    scheds = [fitness(p) for p in pop]
    fit = np.array([s.objective for s in scheds])
    history = []
    epochs = 0
    while params.generations is None or epochs < params.generations:
        if time.perf_counter() - t0 > time_budget:
            break
        ranked = np.lexsort((np.arange(len(pop)), -fit))
        new_pop = [pop[k] for k in ranked[:params.elitism]]
        new_scheds = [scheds[k] for k in ranked[:params.elitism]]

        fit_list = fit.tolist()

        def pick():
            # first entrant wins ties
            entrants = rng.integers(len(pop), size=params.tournament).tolist()
            return pop[max(entrants, key=fit_list.__getitem__)]

        while len(new_pop) < params.population:
            a, b = pick(), pick()
            child = order_crossover(a, b, rng) if rng.random() < params.crossover_prob else a.copy()
            child = swap_mutation(child, params.mutation_prob, rng)
            new_pop.append(child)
            new_scheds.append(fitness(child))
        pop, scheds = new_pop, new_scheds
        fit = np.array([s.objective for s in scheds])
        epochs += 1
        history.append(float(fit.max()))
    best = int(np.lexsort((np.arange(len(pop)), -fit))[0])
    return HeuristicRun(scheds[best], epochs, time.perf_counter() - t0, history)


def ga(instance: Instance, params: GAParams = GAParams(), time_budget: float = 300.0,
       seed: int = 0) -> Schedule:
    return run_ga(instance, params, time_budget, seed).schedule


# --------------------------------------------------------------------------
# Honey Badger over real vectors in [0, 1]^n


@dataclass(frozen=True)
class HBAParams:
    population: int = 30
    beta: float = 6.0  # ability to get food
    C: float = 2.0  # density factor scale
    iterations: int | None = 200
    # density decay horizon when ``iterations`` is None
    horizon: int = 200


def round_labels(x: np.ndarray) -> np.ndarray:
    return np.asarray(x) >= 0.5


def run_honey_badger(instance: Instance, params: HBAParams = HBAParams(), time_budget: float = 300.0,
                     seed: int = 0) -> HeuristicRun:
    if not time_budget > 0:
        raise ValidationError("time_budget must be positive")
    t0 = time.perf_counter()
    n = instance.n
    rng = np.random.default_rng(seed)
    evaluate = _Evaluator(instance)
    N = params.population
    eps = np.finfo(float).eps

    X = rng.random((N, n))
    scheds = [evaluate(round_labels(x)) for x in X]
    fit = np.array([s.objective for s in scheds])
    best = int(np.lexsort((np.arange(N), -fit))[0])
    prey, prey_sched = X[best].copy(), scheds[best]
    tmax = params.iterations or params.horizon
    history = []
    t = 0
    while params.iterations is None or t < params.iterations:
        if time.perf_counter() - t0 > time_budget:
            break
        alpha = params.C * math.exp(-t / tmax)
        for i in range(N):
            dist = prey - X[i]
            source = (X[i] - X[(i + 1) % N]) ** 2
            intensity = rng.random() * source / (4 * math.pi * dist ** 2 + eps)
            flag = 1.0 if rng.random() <= 0.5 else -1.0
            if rng.random() < 0.5:  # digging phase
                r3, r4, r5 = rng.random(n), rng.random(n), rng.random(n)
                cardioid = np.abs(np.cos(2 * math.pi * r4) * (1 - np.cos(2 * math.pi * r5)))
                cand = (prey + flag * params.beta * intensity * prey
                        + flag * r3 * alpha * dist * cardioid)
            else:  # honey phase
                cand = prey + flag * rng.random(n) * alpha * dist
            cand = np.clip(cand, 0.0, 1.0)
            sched = evaluate(round_labels(cand))
            if sched.objective > fit[i]:
                X[i], fit[i], scheds[i] = cand, sched.objective, sched
                if sched.objective > prey_sched.objective:
                    prey, prey_sched = cand.copy(), sched
        t += 1
        history.append(prey_sched.objective)
    return HeuristicRun(prey_sched, t, time.perf_counter() - t0, history)


def honey_badger(instance: Instance, params: HBAParams = HBAParams(), time_budget: float = 300.0,
                 seed: int = 0) -> Schedule:
    return run_honey_badger(instance, params, time_budget, seed).schedule
