"""Tests for minimizer matching, DE grouping, and descriptive statistics."""

import numpy as np
import pytest

from multide import (
    Point,
    RunRecord,
    aggregate,
    count_ngp,
    get_problem,
    group_de_runs,
    match_minimizers,
)


def pts(*coords):
    return [Point(np.array(c, dtype=float), 0.0) for c in coords]


def record(seed, nfe, bests, et=0.5):
    return RunRecord(
        algorithm="de", seed=seed, elapsed_seconds=et, nfe=nfe,
        final_bests=bests, generations_used=[10], problem="B1",
    )


# ------------------------------------------------------------------- NGP

def test_count_ngp_all_four_himmelblau():
    problem = get_problem("B1")
    assert count_ngp(pts(*problem.known_minimizers), problem) == 4


def test_count_ngp_duplicates_count_once():
    problem = get_problem("B1")
    assert count_ngp(pts((3.0, 2.0), (3.0, 2.0), (3.0, 2.0), (3.0, 2.0)), problem) == 1


def test_count_ngp_near_match_and_miss():
    problem = get_problem("B1")
    bests = pts((3.02, 2.01), (5.9, 5.9))
    assert count_ngp(bests, problem) == 1
    assert match_minimizers(bests, problem) == {0}


def test_count_ngp_bounded_and_monotone():
    problem = get_problem("B1")
    bests = pts((3.0, 2.0))
    assert count_ngp(bests, problem) == 1
    more = bests + pts((-2.805118, 3.131313))
    assert count_ngp(more, problem) == 2
    everything = more + pts(*problem.known_minimizers)
    assert count_ngp(everything, problem) == problem.minimizer_count


def test_match_boundary_is_inclusive():
    problem = get_problem("B1")
    at_tol = pts((3.0 + problem.match_tolerance, 2.0))
    assert count_ngp(at_tol, problem) == 1


# --------------------------------------------------------------- grouping

def test_group_de_runs_shapes_and_sums():
    records = [record(seed=i, nfe=100 + i, bests=pts((3.0, 2.0))) for i in range(12)]
    groups = group_de_runs(records, 4)
    assert len(groups) == 3
    assert groups[0].nfe == sum(100 + i for i in range(4))
    assert groups[0].elapsed_seconds == pytest.approx(2.0)
    assert len(groups[0].final_bests) == 4
    assert groups[0].seed == 0 and groups[1].seed == 4


def test_group_of_identical_runs_has_ngp_one():
    problem = get_problem("B1")
    records = [record(seed=i, nfe=50, bests=pts((3.0, 2.0))) for i in range(4)]
    group = group_de_runs(records, 4)[0]
    assert count_ngp(group.final_bests, problem) == 1


def test_group_de_runs_rejects_indivisible_count():
    records = [record(seed=i, nfe=1, bests=pts((0.0, 0.0))) for i in range(10)]
    with pytest.raises(ValueError):
        group_de_runs(records, 4)


# ------------------------------------------------------------- aggregation

def test_aggregate_constant_values():
    stats = aggregate([2.0, 2.0, 2.0, 2.0])
    assert stats.mean == 2.0
    assert stats.stddev == 0.0
    assert stats.cv_percent == 0.0


def test_aggregate_population_convention():
    stats = aggregate([0.0, 4.0])
    assert stats.mean == 2.0
    assert stats.stddev == 2.0
    assert stats.cv_percent == 100.0


def test_aggregate_zero_mean_has_no_cv():
    stats = aggregate([0.0, 0.0, 0.0])
    assert stats.mean == 0.0
    assert stats.cv_percent is None


def test_aggregate_refuses_single_value():
    with pytest.raises(ValueError):
        aggregate([3.14])


def test_aggregate_permutation_invariant_and_scale_covariant():
    values = [1.0, 5.0, 2.5, 9.0, 4.0]
    base = aggregate(values)
    shuffled = aggregate([values[i] for i in [3, 0, 4, 2, 1]])
    assert shuffled == base
    scaled = aggregate([7.0 * v for v in values])
    assert scaled.mean == pytest.approx(7.0 * base.mean, rel=1e-15)
    assert scaled.stddev == pytest.approx(7.0 * base.stddev, rel=1e-12)
    assert scaled.cv_percent == pytest.approx(base.cv_percent, rel=1e-12)


def test_all_fours_ngp_list_has_zero_sigma():
    stats = aggregate([4.0] * 30)
    assert stats.mean == 4.0
    assert stats.stddev == 0.0
