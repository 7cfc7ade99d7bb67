"""Tests for normalization, trajectories, and attainment surfaces."""

import logging

import numpy as np
import pytest

from modehb.errors import EmptyPopulationError, MetricsError, NormalizationError
from modehb.metrics import (
    LOG_HV_DIFF_FLOOR,
    RunMetadata,
    RunTrajectory,
    attainment_surface,
    empirical_best_hv,
    final_front,
    hv_trajectory,
    log_hv_diff,
    normalize,
)
from modehb.optimizer import EvaluationRecord
from modehb.scheduler import build_ladder
from oracles import staircase_attains

LADDER = build_ladder(1, 4, 2)
UNIT = ((0.0, 1.0), (0.0, 1.0))


def make_run(points, fidelities=None, costs=None, seed=0, optimizer="modehb_nsga2"):
    """A hand-built trajectory; fidelities default to b_max everywhere."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n = len(points)
    fidelities = fidelities or [LADDER.b_max] * n
    costs = costs or list(fidelities)
    records = tuple(
        EvaluationRecord(
            seq=i + 1,
            genotype=np.array([0.5, 0.5]),
            fidelity=float(fidelities[i]),
            objectives=points[i],
            cost=float(costs[i]),
        )
        for i in range(n)
    )
    meta = RunMetadata(
        seed=seed, optimizer=optimizer, benchmark="toy", ladder=LADDER,
        stop_cause="max_tae",
    )
    return RunTrajectory(records=records, metadata=meta)


# --------------------------------------------------------------- normalize


def test_normalize_basic_and_shapes():
    out = normalize([[0.0, 2.0], [1.0, 0.0]], ((0.0, 1.0), (0.0, 2.0)))
    assert np.allclose(out, [[0.0, 1.0], [1.0, 0.0]])
    vec = normalize([0.5, 1.0], ((0.0, 1.0), (0.0, 2.0)))
    assert vec.shape == (2,)
    assert vec == pytest.approx([0.5, 0.5])


def test_normalize_clamps_and_warns(caplog):
    with caplog.at_level(logging.WARNING, logger="modehb.metrics"):
        out = normalize([[-0.5, 0.5], [1.5, 0.5]], UNIT)
    assert np.allclose(out, [[0.0, 0.5], [1.0, 0.5]])
    assert any("clamped" in rec.message for rec in caplog.records)
    caplog.clear()
    with caplog.at_level(logging.WARNING, logger="modehb.metrics"):
        normalize([[-0.5, 0.5]], UNIT, warn=False)
    assert not caplog.records


def test_normalize_validation():
    with pytest.raises(NormalizationError):
        normalize([[0.5, 0.5]], ((0.0, 0.0), (0.0, 1.0)))
    with pytest.raises(NormalizationError):
        normalize([[0.5, 0.5, 0.5]], UNIT)


# ------------------------------------------------------------- trajectory


def test_hv_trajectory_hand_case():
    run = make_run(
        [(0.5, 0.5), (0.1, 0.1), (0.25, 0.75)],
        fidelities=[4.0, 1.0, 4.0],
        costs=[4.0, 1.0, 4.0],
    )
    series = hv_trajectory(run, UNIT)
    assert np.array_equal(series.tae, [1, 2, 3])
    assert series.cumulative_cost == pytest.approx([4.0, 5.0, 9.0])
    # The cheap mid-run record is ignored by the front; HV holds steady.
    assert series.hv == pytest.approx([0.25, 0.25, 0.3125])


def test_hv_trajectory_is_zero_until_first_full_fidelity_record():
    run = make_run(
        [(0.1, 0.1), (0.2, 0.2), (0.5, 0.5)],
        fidelities=[1.0, 2.0, 4.0],
    )
    series = hv_trajectory(run, UNIT)
    assert series.hv == pytest.approx([0.0, 0.0, 0.25])


def test_hv_trajectory_never_decreases():
    rng = np.random.default_rng(2)
    pts = rng.uniform(size=(40, 2))
    fids = rng.choice(LADDER.levels, size=40)
    run = make_run(pts, fidelities=list(fids))
    series = hv_trajectory(run, UNIT)
    assert np.all(np.diff(series.hv) >= 0.0)
    assert np.all(np.diff(series.cumulative_cost) > 0.0)


# ------------------------------------------------------------ log hv diff


def test_log_hv_diff_values():
    assert log_hv_diff(2.0 / 3.0, 2.0 / 3.0) == pytest.approx(-12.0)
    assert log_hv_diff(2.0 / 3.0 - 0.01, 2.0 / 3.0) == pytest.approx(-2.0)
    assert log_hv_diff(0.5667, 2.0 / 3.0) == pytest.approx(-1.0, abs=0.01)
    # Overshooting the reference front still floors at the minimum gap.
    assert log_hv_diff(0.7, 2.0 / 3.0) == pytest.approx(-12.0)
    assert LOG_HV_DIFF_FLOOR == 1e-12


# ------------------------------------------------------- fronts and unions


def test_final_front_filters_and_normalizes():
    run = make_run(
        [(1.0, 0.5), (0.4, 1.6), (1.9, 1.9), (0.2, 0.2)],
        fidelities=[4.0, 4.0, 4.0, 1.0],
    )
    front = final_front(run, ((0.0, 2.0), (0.0, 2.0)))
    # The cheap (0.2, 0.2) record is excluded; (1.9, 1.9) is dominated.
    assert sorted(map(tuple, front)) == [
        pytest.approx((0.2, 0.8)),
        pytest.approx((0.5, 0.25)),
    ]
    empty = final_front(make_run([(0.5, 0.5)], fidelities=[1.0]), UNIT)
    assert empty.shape == (0, 2)


def test_empirical_best_hv_unions_runs():
    a = make_run([(0.5, 0.5)])
    b = make_run([(0.25, 0.75)])
    assert empirical_best_hv([a], UNIT) == pytest.approx(0.25)
    assert empirical_best_hv([a, b], UNIT) == pytest.approx(0.3125)
    with pytest.raises(EmptyPopulationError):
        empirical_best_hv([make_run([(0.5, 0.5)], fidelities=[1.0])], UNIT)


# -------------------------------------------------------------- attainment


def test_attainment_surface_single_run_is_its_front():
    run = make_run([(0.2, 0.8), (0.6, 0.4), (0.5, 0.5)])
    surface = attainment_surface([run], 1, UNIT)
    assert sorted(map(tuple, surface)) == [
        pytest.approx((0.2, 0.8)),
        pytest.approx((0.5, 0.5)),
        pytest.approx((0.6, 0.4)),
    ]
    # Dominated points never produce corners.
    dominated = make_run([(0.2, 0.8), (0.6, 0.4), (0.7, 0.9)])
    surface = attainment_surface([dominated], 1, UNIT)
    assert len(surface) == 2


def test_attainment_surface_k2_needs_both_runs():
    runs = [make_run([(0.2, 0.8)]), make_run([(0.8, 0.2)])]
    k1 = attainment_surface(runs, 1, UNIT)
    k2 = attainment_surface(runs, 2, UNIT)
    assert [tuple(p) for p in k1] == [
        pytest.approx((0.2, 0.8)),
        pytest.approx((0.8, 0.2)),
    ]
    # Only the upper-right corner is attained by both runs.
    assert [tuple(p) for p in k2] == [pytest.approx((0.8, 0.8))]


def test_attainment_surface_identical_runs_collapse():
    runs = [make_run([(0.3, 0.6), (0.6, 0.3)])] * 3
    for k in (1, 2, 3):
        surface = attainment_surface(runs, k, UNIT)
        assert sorted(map(tuple, surface)) == [
            pytest.approx((0.3, 0.6)),
            pytest.approx((0.6, 0.3)),
        ]


def test_attainment_surface_validation():
    runs = [make_run([(0.5, 0.5)])]
    with pytest.raises(MetricsError):
        attainment_surface(runs, 0, UNIT)
    with pytest.raises(MetricsError):
        attainment_surface(runs, 2, UNIT)


def test_attainment_regions_nest_with_k():
    rng = np.random.default_rng(9)
    runs = [make_run(rng.uniform(0.05, 0.95, size=(6, 2))) for _ in range(4)]
    surfaces = {k: attainment_surface(runs, k, UNIT) for k in (1, 2, 3, 4)}
    grid = rng.uniform(size=(500, 2))
    for z in grid:
        attained = [staircase_attains(z, surfaces[k]) for k in (1, 2, 3, 4)]
        # Once a level fails, every deeper level fails too.
        assert attained == sorted(attained, reverse=True)
