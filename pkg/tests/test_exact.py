import math

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import instances, integer_instances, make
from tardysched.core import ValidationError, label_objective, labels_feasible
from tardysched.exact import (
    INFEASIBLE,
    OPTIMAL,
    brute_force,
    dominance_matrix,
    dominance_violations,
    solve_exact,
)
from tardysched.generator import DatasetSpec, generate


def test_brute_force_examples():
    r = brute_force(make([(4, 2, 3, 3)]))
    assert r.status == OPTIMAL and r.labels.tolist() == [True] and r.objective == 4
    r = brute_force(make([(10, 4, 4, 6), (6, 3, 3, 7)]))
    assert r.labels.tolist() == [True, False] and r.objective == 10
    assert not labels_feasible(make([(10, 4, 4, 6), (6, 3, 3, 7)]), [True, True])


def test_infeasible_instances():
    inst = make([(1, 3, 3, 4), (1, 3, 3, 4)])
    for solver in (brute_force, solve_exact):
        r = solver(inst)
        assert r.status == INFEASIBLE and r.labels is None and math.isnan(r.objective)


def test_brute_force_refuses_large_n():
    with pytest.raises(ValidationError):
        brute_force(generate(DatasetSpec(1, 21, 0)))


def test_time_limit_must_be_positive():
    with pytest.raises(ValidationError):
        solve_exact(make([(1, 1, 1, 1)]), 0.0)


def test_all_early_when_everything_fits():
    inst = make([(3, 1, 5, 9), (4, 2, 5, 9), (5, 1, 9, 9)])
    r = solve_exact(inst)
    assert r.labels.all() and r.objective == 12


@given(instances(max_n=11))
def test_exact_matches_brute_force(inst):
    a, b = solve_exact(inst, 30.0), brute_force(inst)
    assert a.status == b.status == OPTIMAL
    assert a.objective == b.objective
    assert labels_feasible(inst, a.labels)
    assert label_objective(inst, a.labels) == a.objective


@given(instances(max_n=11))
def test_exact_variants_agree(inst):
    ref = solve_exact(inst, 30.0).objective
    assert solve_exact(inst, 30.0, dominance=False).objective == ref
    assert solve_exact(inst, 30.0, bound="simple").objective == ref
    assert solve_exact(inst, 30.0, bound="simple", dominance=False).objective == ref


@settings(max_examples=30)
@given(integer_instances(min_n=3, max_n=10))
def test_no_explored_node_breaks_dominance(inst):
    dom = dominance_matrix(inst)
    seen = []

    def check(fixed):
        early = fixed == 1
        tardy = fixed == 0
        seen.append(bool(np.any(dom & early[:, None] & tardy[None, :])))

    r = solve_exact(inst, 30.0, on_node=check, bound="simple")
    assert not any(seen)
    assert dominance_violations(dom, r.labels) == []


def test_dominance_definition():
    # job 1 beats job 0 on all four criteria; job 2 has equal weight so dominates nobody
    inst = make([(5, 3, 4, 9), (6, 2, 5, 8), (5, 3, 4, 9)])
    dom = dominance_matrix(inst)
    assert dom[0, 1] and dom[2, 1]
    assert not dom[1, 0] and not dom[0, 2] and not dom[2, 0]
    assert dominance_violations(dom, np.array([True, False, False])) == [(0, 1)]


def test_larger_budget_never_worse():
    inst = generate(DatasetSpec(3, 120, 4))
    short = solve_exact(inst, 0.05)
    longer = solve_exact(inst, 2.0)
    assert longer.objective >= short.objective
    assert labels_feasible(inst, short.labels)


def test_result_reports_effort():
    r = solve_exact(generate(DatasetSpec(11, 40, 1)), 30.0)
    assert r.optimal and r.nodes_explored >= 1 and r.elapsed >= 0
