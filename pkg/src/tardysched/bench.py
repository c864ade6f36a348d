"""End-to-end pipeline, optimality gaps, experiment runner and calibration report."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import baselines
from .core import Instance, InvariantViolation, Schedule, ValidationError, objective
from .exact import OPTIMAL, SolveResult, solve_exact
from .features import featurize
from .formats import BenchRecord, save_records
from .generator import generate_many
from .oracle import MlpModel, predict_scores
from .refine import DEFAULT_BETA, DEFAULT_GAMMA, refine
from .scheduler import edf_feasible, schedule_from_labels

METHODS = ("proposed", "rule_based", "ga", "hba")
NEEDS_MODEL = ("proposed",)


@dataclass(frozen=True)
class PipelineConfig:
    model: MlpModel | None = None
    alpha: float = 0.5
    gamma: int = DEFAULT_GAMMA
    beta: float = DEFAULT_BETA
    timeout: float = 300.0

    def __post_init__(self):
        if not self.timeout > 0:
            raise ValidationError("timeout must be positive")
        if not 0 <= self.alpha <= 1:
            raise ValidationError("alpha must lie in [0, 1]")
        if self.gamma < 0 or not self.beta > 0:
            raise ValidationError("gamma >= 0 and beta > 0 required")


@dataclass
class PipelineRun:
    schedule: Schedule
    labels: np.ndarray  # labels handed to the scheduler, after refinement
    scores: np.ndarray
    timings: dict[str, float]
    refine_status: str | None

    @property
    def runtime(self) -> float:
        return sum(self.timings.values())


def run_pipeline(instance: Instance, config: PipelineConfig) -> PipelineRun:
    """featurize -> classify -> refine -> schedule, timing each stage."""
    if config.model is None:
        raise ValidationError("the pipeline needs a trained model")
    timings = {}
    t = time.perf_counter()
    feats = featurize(instance, "full")
    timings["features"] = time.perf_counter() - t

    t = time.perf_counter()
    scores = predict_scores(config.model, feats)
    labels = scores >= config.alpha
    timings["classify"] = time.perf_counter() - t

    t = time.perf_counter()
    gamma = min(config.gamma, instance.n)
    labels, info = refine(instance, labels, scores, gamma, config.beta, return_info=True)
    timings["refine"] = time.perf_counter() - t

    t = time.perf_counter()
    schedule = schedule_from_labels(instance, labels)
    timings["schedule"] = time.perf_counter() - t
    return PipelineRun(schedule, labels, scores, timings, info["status"])


def gap(f_star: float, f: float) -> float:
    """Optimality gap in percent."""
    if not f_star > 0:
        raise ValidationError(f"gap needs a positive optimum, got {f_star}")
    if f < 0:
        raise ValidationError(f"objective {f} is negative")
    if f > f_star:
        raise InvariantViolation(f"objective {f} exceeds the proven optimum {f_star}")
    return (f_star - f) / f_star * 100.0


def _check_schedule(instance: Instance, schedule: Schedule, method: str) -> float:
    """Recompute the objective from the order alone; refuse anything infeasible."""
    if not schedule.feasible:
        raise InvariantViolation(f"{method} returned an infeasible schedule")
    f = objective(instance, schedule.order)
    if f != schedule.objective:
        raise InvariantViolation(f"{method} reported {schedule.objective}, recomputed {f}")
    return f


@dataclass(frozen=True)
class ExperimentConfig:
    pipeline: PipelineConfig = PipelineConfig()
    # wall-clock cap for GA and Honey Badger; the generation caps below bind first
    # in the default setting so results do not depend on machine speed
    heuristic_budget: float = 300.0
    ga: baselines.GAParams = baselines.GAParams()
    hba: baselines.HBAParams = baselines.HBAParams()


def run_method(instance: Instance, method: str, config: ExperimentConfig, seed: int) -> Schedule:
    if method == "proposed":
        return run_pipeline(instance, config.pipeline).schedule
    if method == "rule_based":
        return baselines.rule_based(instance, seed)
    if method == "ga":
        return baselines.ga(instance, config.ga, config.heuristic_budget, seed)
    if method == "hba":
        return baselines.honey_badger(instance, config.hba, config.heuristic_budget, seed)
    raise ValidationError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")


def make_record(instance: Instance, method: str, f: float, reference: SolveResult,
                runtime: float) -> BenchRecord:
    m = instance.meta
    if reference.status == OPTIMAL:
        f_star = float(reference.objective)
        # an instance where no job can be early has f* = 0; any feasible schedule is optimal there
        g = gap(f_star, f) if f_star > 0 else 0.0
        status = OPTIMAL
    else:
        # unproven reference: keep the incumbent for information, no gap
        f_star = float(reference.objective) if reference.labels is not None else math.nan
        g = math.nan
        status = reference.status
    return BenchRecord(
        family=int(m.get("family", -1)), n=instance.n, seed=int(m.get("seed", -1)),
        method=method, status=status, objective=float(f), f_star=f_star, gap=float(g),
        optimal=bool(g == 0.0), runtime=float(runtime),
    )


def evaluate_instance(instance: Instance, methods, config: ExperimentConfig,
                      reference: SolveResult | None = None) -> list[BenchRecord]:
    if not edf_feasible(instance):
        raise ValidationError("instance admits no feasible schedule")
    if reference is None:
        reference = solve_exact(instance, config.pipeline.timeout)
    seed = int(instance.meta.get("seed", 0))
    records = []
    for method in methods:
        t = time.perf_counter()
        schedule = run_method(instance, method, config, seed)
        runtime = time.perf_counter() - t
        f = _check_schedule(instance, schedule, method)
        records.append(make_record(instance, method, f, reference, runtime))
    return records


def _sort_key(r: BenchRecord):
    return (r.family, r.n, r.seed, r.method)


def run_experiment(families, sizes, methods, count: int, seed: int,
                   config: ExperimentConfig = ExperimentConfig(), out_dir=None,
                   progress=None) -> list[BenchRecord]:
    """Every method on ``count`` generated instances per (family, size).

    Optional ``out_dir`` receives records.csv and summary.md.
    """
    methods = list(methods)
    for m in methods:
        if m not in METHODS:
            raise ValidationError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
    if any(m in NEEDS_MODEL for m in methods) and config.pipeline.model is None:
        raise ValidationError("method 'proposed' needs a model")
    records = []
    for family in families:
        for n in sizes:
            for instance in generate_many(family, n, seed, count):
                records.extend(evaluate_instance(instance, methods, config))
                if progress is not None:
                    progress(instance)
    records.sort(key=_sort_key)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        save_records(out / "records.csv", records)
        (out / "summary.md").write_text(aggregate_table(records))
    return records


@dataclass(frozen=True)
class Aggregate:
    key: tuple
    instances: int  # records with a proven optimum
    unproven: int
    mean_gap: float
    n_opt: float  # percent of proven records solved to optimality


def aggregate(records, by=("method", "n")) -> list[Aggregate]:
    groups: dict[tuple, list[BenchRecord]] = {}
    for r in records:
        groups.setdefault(tuple(getattr(r, k) for k in by), []).append(r)
    out = []
    for key in sorted(groups):
        rs = groups[key]
        proven = [r for r in rs if r.status == OPTIMAL]
        gaps = [r.gap for r in proven]
        out.append(Aggregate(
            key, len(proven), len(rs) - len(proven),
            math.fsum(gaps) / len(gaps) if gaps else math.nan,
            100.0 * sum(r.optimal for r in proven) / len(proven) if proven else math.nan,
        ))
    return out


def aggregate_table(records, by=("method", "n")) -> str:
    head = [*by, "instances", "Δ_avg (%)", "n_opt (%)", "unproven"]
    lines = ["| " + " | ".join(head) + " |", "|" + "---|" * len(head)]
    for a in aggregate(records, by):
        cells = [*map(str, a.key), str(a.instances), f"{a.mean_gap:.4f}", f"{a.n_opt:.1f}", str(a.unproven)]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# calibration


@dataclass
class CalibrationReport:
    edges: np.ndarray  # bin b covers [edges[b], edges[b+1]); the last bin is closed
    counts: np.ndarray
    errors: np.ndarray

    @property
    def error_rate(self) -> np.ndarray:
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(self.counts > 0, self.errors / np.maximum(self.counts, 1), np.nan)

    def pooled_error(self, *ranges) -> float:
        """Error rate over all bins lying inside any of the closed score ranges."""
        lo, hi = self.edges[:-1], self.edges[1:]
        tol = 1e-9
        mask = np.zeros(len(self.counts), dtype=bool)
        for a, b in ranges:
            mask |= (lo >= a - tol) & (hi <= b + tol)
        total = self.counts[mask].sum()
        return float(self.errors[mask].sum() / total) if total else math.nan

    def to_markdown(self) -> str:
        lines = ["| bin | count | errors | error rate |", "|---|---|---|---|"]
        for b, (c, e, r) in enumerate(zip(self.counts, self.errors, self.error_rate)):
            close = "]" if b == len(self.counts) - 1 else ")"
            lines.append(f"| [{self.edges[b]:.2f}, {self.edges[b + 1]:.2f}{close} | {c} | {e} | "
                         + ("-" if c == 0 else f"{r:.4f}") + " |")
        return "\n".join(lines) + "\n"


def calibration_from_scores(scores, labels, bin_width: float = 0.05,
                            alpha: float = 0.5) -> CalibrationReport:
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(bool)
    if len(scores) == 0:
        raise ValidationError("calibration needs at least one labelled row")
    if scores.shape != labels.shape:
        raise ValidationError("one label per score required")
    nbins = int(round(1.0 / bin_width))
    if nbins < 1 or not math.isclose(nbins * bin_width, 1.0):
        raise ValidationError("bin_width must divide 1")
    edges = np.linspace(0.0, 1.0, nbins + 1)
    idx = np.clip(np.searchsorted(edges, scores, side="right") - 1, 0, nbins - 1)
    wrong = (scores >= alpha) != labels
    counts = np.bincount(idx, minlength=nbins)
    errors = np.bincount(idx, weights=wrong, minlength=nbins).astype(np.int64)
    return CalibrationReport(edges, counts, errors)


def calibration_report(model: MlpModel, X, y, bin_width: float = 0.05) -> CalibrationReport:
    return calibration_from_scores(predict_scores(model, np.asarray(X, dtype=np.float64)), y, bin_width)
