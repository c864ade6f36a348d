"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v -s`` or
``python tests/test_acceptance.py``. The full run takes roughly 20 minutes on
one core; most of it is exact labelling of the training corpus and the
held-out benchmark.
"""
import math
import time
from functools import lru_cache

import numpy as np
import pytest

from tardysched.baselines import GAParams, HBAParams, ga, honey_badger, rule_based
from tardysched.bench import (
    ExperimentConfig,
    PipelineConfig,
    calibration_report,
    evaluate_instance,
    run_pipeline,
)
from tardysched.core import labels_feasible, weight_sum
from tardysched.exact import OPTIMAL, brute_force, dominance_matrix, dominance_violations, solve_exact
from tardysched.features import featurize
from tardysched.generator import FAMILIES, DatasetSpec, generate, generate_many
from tardysched.oracle import TrainConfig, predict_scores, train
from tardysched.refine import reduce_instance
from tardysched.scheduler import edf_feasible, schedule_from_labels

pytestmark = pytest.mark.acceptance

TRAIN_FAMILIES = (1, 11, 12, 13, 14, 15)
# per family: 320 instances with 100 jobs and 60 with 50 jobs, 35,000 rows
CORPUS = ((100, 320), (50, 60))
CORPUS_SEED = 1000
HELD_OUT_SEED = 900_000
HELD_OUT = 100
LABEL_LIMIT = 60.0
# generation caps give GA (population 50) and Honey Badger (population 30)
# about the same number of objective evaluations, roughly 500 per instance
BENCH_GA = GAParams(generations=10)
BENCH_HBA = HBAParams(iterations=17)


def report(capsys, number, ok, detail):
    with capsys.disabled():
        print(f"\ncriterion {number} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


def _is_feasible(inst, schedule):
    order = np.asarray(schedule.order)
    if sorted(order.tolist()) != list(range(inst.n)):
        return False
    finish = np.cumsum(inst.durations[order])
    return bool(np.all(finish <= inst.deadlines[order]))


@lru_cache(maxsize=None)
def corpus():
    """Exactly labelled rows for the training families; ``blocks`` maps (family, n) to row slices."""
    X, y, blocks, start, unproven = [], [], {}, 0, 0
    t0 = time.perf_counter()
    for n, count in CORPUS:
        for family in TRAIN_FAMILIES:
            for inst in generate_many(family, n, CORPUS_SEED, count):
                result = solve_exact(inst, LABEL_LIMIT)
                if not result.optimal:
                    unproven += 1
                    continue
                X.append(featurize(inst, "full").rows)
                y.append(result.labels.astype(np.int64))
            rows = sum(len(a) for a in y) - start
            blocks[family, n] = slice(start, start + rows)
            start += rows
    return np.vstack(X), np.concatenate(y), blocks, unproven, time.perf_counter() - t0


@lru_cache(maxsize=None)
def trained():
    X, y, _, _, _ = corpus()
    t0 = time.perf_counter()
    result = train(X, y, TrainConfig(seed=0))
    return result, time.perf_counter() - t0


@lru_cache(maxsize=None)
def held_out_records():
    model = trained()[0].model
    config = ExperimentConfig(
        PipelineConfig(model, alpha=0.5, gamma=25, beta=60.0, timeout=300.0),
        ga=BENCH_GA, hba=BENCH_HBA,
    )
    records, exact_seconds = [], 0.0
    for family in TRAIN_FAMILIES:
        for inst in generate_many(family, 100, HELD_OUT_SEED, HELD_OUT):
            t = time.perf_counter()
            reference = solve_exact(inst, 300.0)
            exact_seconds += time.perf_counter() - t
            records += evaluate_instance(inst, ("proposed", "rule_based", "ga", "hba"), config, reference)
    return records, exact_seconds


def _mean_gaps(records, method):
    """Per family mean gap over instances with a proven reference."""
    out = {}
    for family in TRAIN_FAMILIES:
        gaps = [r.gap for r in records if r.family == family and r.method == method and r.status == OPTIMAL]
        out[family] = sum(gaps) / len(gaps) if gaps else math.nan
    return out


def test_criterion_1_feasibility(capsys):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    checked = failures = 0
    for k in range(10_000):
        family = FAMILIES[k % len(FAMILIES)]
        inst = generate(DatasetSpec(family, int(rng.integers(5, 201)), int(rng.integers(0, 2**40))))
        if not edf_feasible(inst):
            continue
        labels = rng.random(inst.n) < rng.random()
        checked += 1
        schedule = schedule_from_labels(inst, labels)
        failures += not (schedule.feasible and _is_feasible(inst, schedule))
    elapsed = time.perf_counter() - t0
    ok = checked == 10_000 and failures == 0 and elapsed < 120
    report(capsys, 1, ok, f"{checked} pairs, {failures} infeasible schedules, {elapsed:.1f}s (limit 120s)")


@lru_cache(maxsize=None)
def small_set():
    rng = np.random.default_rng(7)
    return [generate(DatasetSpec(FAMILIES[k % 15], int(rng.integers(1, 15)), 50_000 + k)) for k in range(500)]


def test_criterion_2_exact_matches_brute_force(capsys):
    t0 = time.perf_counter()
    bad = [i.meta["seed"] for i in small_set() if solve_exact(i).objective != brute_force(i).objective]
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 300
    report(capsys, 2, ok, f"500 instances, {len(bad)} mismatches, {elapsed:.1f}s (limit 300s)")


def test_criterion_3_reduction(capsys):
    rng = np.random.default_rng(11)
    t0 = time.perf_counter()
    checks = {True: 0, False: 0}
    bad = 0
    for k in range(300):
        inst = generate(DatasetSpec(FAMILIES[k % 15], int(rng.integers(2, 13)), 70_000 + k))
        best = brute_force(inst)
        for early in (True, False):
            pool = np.flatnonzero(best.labels == early)
            if len(pool) == 0:
                continue
            j = int(rng.choice(pool))
            key = inst.due_dates[j] if early else inst.deadlines[j]
            sub = brute_force(reduce_instance(inst, j, key))
            combined = np.zeros(inst.n, dtype=bool)
            combined[np.delete(np.arange(inst.n), j)] = sub.labels
            combined[j] = early
            # f*(reduced) + w_j [early] as one correctly rounded sum over the same job set
            value = weight_sum(inst.weights, combined)
            checks[early] += 1
            bad += sub.status != OPTIMAL or not labels_feasible(inst, combined) or value != best.objective
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and min(checks.values()) > 0 and elapsed < 300
    report(capsys, 3, ok, f"{checks[True]} early and {checks[False]} tardy removals, "
                          f"{bad} mismatches, {elapsed:.1f}s (limit 300s)")


def test_criterion_4_dominance(capsys):
    differ = violations = 0
    for inst in small_set():
        on = solve_exact(inst, dominance=True)
        off = solve_exact(inst, dominance=False)
        differ += on.objective != off.objective
        violations += bool(dominance_violations(dominance_matrix(inst), on.labels))
    ok = differ == 0 and violations == 0
    report(capsys, 4, ok, f"500 instances, {differ} objective differences, {violations} with violated implications")


def test_criterion_5_validation_accuracy(capsys):
    X, _, _, unproven, label_seconds = corpus()
    result, train_seconds = trained()
    acc = result.val_accuracy
    total = label_seconds + train_seconds
    ok = len(X) >= 200_000 and acc >= 0.93 and total <= 1800
    report(capsys, 5, ok, f"{len(X)} samples ({unproven} unproven instances dropped), "
                          f"val accuracy {acc:.4f} (need 0.93), {total:.0f}s (limit 1800s)")


def test_criterion_6_pipeline_quality(capsys):
    records, exact_seconds = held_out_records()
    proposed = [r for r in records if r.method == "proposed"]
    proven = [r for r in proposed if r.status == OPTIMAL]
    per_family = _mean_gaps(records, "proposed")
    mean_gap = sum(per_family.values()) / len(per_family)
    share = sum(r.optimal for r in proven) / len(proposed)
    seconds = exact_seconds + sum(r.runtime for r in proposed)
    ok = mean_gap <= 1.0 and share >= 0.6 and seconds <= 900
    detail = ", ".join(f"f{f} {g:.3f}%" for f, g in per_family.items())
    report(capsys, 6, ok, f"mean gap {mean_gap:.4f}% (limit 1.0), optimal {100 * share:.1f}% (need 60), "
                          f"{seconds:.0f}s (limit 900s); per family: {detail}")


def test_criterion_7_method_ordering(capsys):
    records, _ = held_out_records()
    gaps = {m: _mean_gaps(records, m) for m in ("proposed", "rule_based", "ga", "hba")}
    losses = [
        (f, m) for f in TRAIN_FAMILIES for m in ("rule_based", "ga", "hba")
        if not gaps["proposed"][f] < gaps[m][f]
    ]
    rows = "; ".join(
        f"f{f}: " + " ".join(f"{m}={gaps[m][f]:.2f}" for m in gaps) for f in TRAIN_FAMILIES
    )
    report(capsys, 7, not losses, f"{len(losses)} family/method pairs out of order; {rows}")


def test_criterion_8_calibration(capsys):
    X, y, _, _, _ = corpus()
    result, _ = trained()
    rep = calibration_report(result.model, X[result.val_idx], y[result.val_idx])
    middle = rep.pooled_error((0.45, 0.55))
    tails = rep.pooled_error((0.0, 0.05), (0.95, 1.0))
    report(capsys, 8, middle > tails, f"error rate {middle:.4f} in [0.45, 0.55] vs {tails:.4f} in the tails")


def test_criterion_9_feature_ablation(capsys):
    X, y, blocks, _, _ = corpus()
    rows = blocks[1, 100]
    insts = generate_many(1, 100, CORPUS_SEED, CORPUS[0][1])
    labels = y[rows]
    acc = {}
    for mode in ("minimal", "aggregated", "full"):
        feats = np.vstack([featurize(i, mode).rows for i in insts])
        assert len(feats) == len(labels)
        acc[mode] = train(feats, labels, TrainConfig(seed=0)).val_accuracy
    ok = acc["full"] >= acc["aggregated"] >= acc["minimal"] and acc["full"] >= acc["minimal"] + 0.05
    report(capsys, 9, ok, ", ".join(f"{m} {a:.4f}" for m, a in acc.items()) + " (need full >= minimal + 0.05)")


def test_criterion_10_performance(capsys):
    model = trained()[0].model
    inst = generate(DatasetSpec(1, 5000, 123))
    run = run_pipeline(inst, PipelineConfig(model, gamma=25, beta=60.0))
    feats = featurize(inst, "full")
    reps = 20
    t = time.perf_counter()
    for _ in range(reps):
        predict_scores(model, feats)
    per_job_ms = 1000 * (time.perf_counter() - t) / (reps * inst.n)
    ok = run.runtime <= 60 and per_job_ms <= 0.1 and run.schedule.feasible
    report(capsys, 10, ok, f"pipeline {run.runtime:.2f}s at n=5000 (limit 60s), "
                           f"inference {per_job_ms:.5f} ms/job (limit 0.1)")


def test_criterion_11_determinism(capsys):
    failures = []
    for family in FAMILIES:
        a, b = generate(DatasetSpec(family, 60, 99)), generate(DatasetSpec(family, 60, 99))
        if any(getattr(a, c).tobytes() != getattr(b, c).tobytes()
               for c in ("weights", "durations", "due_dates", "deadlines")):
            failures.append(f"generate f{family}")
    X, y, _, _, _ = corpus()
    m1 = train(X[:5000], y[:5000], TrainConfig(seed=3, epochs=3)).model
    m2 = train(X[:5000], y[:5000], TrainConfig(seed=3, epochs=3)).model
    if any(p.tobytes() != q.tobytes() for p, q in zip(m1.weights + m1.biases, m2.weights + m2.biases)):
        failures.append("train")
    inst = generate(DatasetSpec(13, 80, 5))
    for name, run in [
        ("rule_based", lambda: rule_based(inst, 4)),
        ("ga", lambda: ga(inst, GAParams(generations=20), 300.0, 4)),
        ("hba", lambda: honey_badger(inst, HBAParams(iterations=20), 300.0, 4)),
    ]:
        s1, s2 = run(), run()
        if s1.order.tobytes() != s2.order.tobytes() or s1.objective != s2.objective:
            failures.append(name)
    report(capsys, 11, not failures, "all bitwise identical" if not failures else f"differs: {failures}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v", "-p", "no:cacheprovider"]))
