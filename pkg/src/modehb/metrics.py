"""Run trajectories and Pareto-quality metrics.

Front approximations use full-fidelity evaluations only: a record
contributes to hypervolume and attainment computations iff its fidelity
equals the ladder's b_max.  All hypervolumes are computed in normalized
objective space with reference point (1, 1).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import EmptyPopulationError, MetricsError, NormalizationError
from .pareto import hypervolume, non_dominated_sort
from .scheduler import FidelityLadder

if TYPE_CHECKING:
    from .optimizer import EvaluationRecord

logger = logging.getLogger(__name__)

LOG_HV_DIFF_FLOOR = 1e-12


@dataclass(frozen=True)
class RunMetadata:
    """Provenance of one run; complete enough to regenerate reports."""

    seed: int
    optimizer: str
    benchmark: str
    ladder: FidelityLadder
    stop_cause: str | None


@dataclass(frozen=True)
class RunTrajectory:
    """Seq-ordered evaluation records plus run metadata."""

    records: tuple["EvaluationRecord", ...]
    metadata: RunMetadata


@dataclass(frozen=True)
class HVSeries:
    """Hypervolume over budget: parallel cost / TAE / HV arrays."""

    cumulative_cost: np.ndarray
    tae: np.ndarray
    hv: np.ndarray


def normalize(values, bounds, *, warn: bool = True) -> np.ndarray:
    """Min-max normalize objective vectors (rows) into [0, 1].

    Values outside the bounds are clamped; by contract that should only
    happen marginally, so clamping logs a warning (one aggregate message
    per call).

    Raises:
        NormalizationError: If any bound is degenerate (min >= max).
    """
    arr = np.atleast_2d(np.asarray(values, dtype=float))
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)
    if np.any(hi <= lo):
        raise NormalizationError(f"degenerate objective bounds {bounds}")
    if arr.shape[1] != len(bounds):
        raise NormalizationError(
            f"{arr.shape[1]} objectives but {len(bounds)} bounds"
        )
    out = (arr - lo) / (hi - lo)
    outside = (out < 0.0) | (out > 1.0)
    if np.any(outside):
        if warn:
            logger.warning(
                "clamped %d of %d normalized values outside [0, 1]",
                int(outside.sum()),
                out.size,
            )
        out = np.clip(out, 0.0, 1.0)
    return out if np.asarray(values).ndim > 1 else out[0]


def _is_bmax(record, b_max: float) -> bool:
    return record.fidelity == b_max


def hv_trajectory(run: RunTrajectory, bounds) -> HVSeries:
    """Normalized-HV growth of the archive's full-fidelity front.

    One series point per record; the HV value is that of the non-dominated
    set of all b_max records seen so far (0.0 before the first).
    """
    b_max = run.metadata.ladder.b_max
    ref = np.array([1.0, 1.0])
    costs = np.empty(len(run.records))
    taes = np.empty(len(run.records), dtype=int)
    hvs = np.empty(len(run.records))
    front_points: list[np.ndarray] = []
    hv = 0.0
    cumulative = 0.0
    for i, rec in enumerate(run.records):
        cumulative += rec.cost
        if _is_bmax(rec, b_max):
            front_points.append(normalize(rec.objectives, bounds, warn=False))
            hv = hypervolume(np.array(front_points), ref)
        costs[i] = cumulative
        taes[i] = i + 1
        hvs[i] = hv
    return HVSeries(costs, taes, hvs)


def log_hv_diff(hv: float, hv_best: float) -> float:
    """log10 of the HV gap to the best-known front, floored at 1e-12."""
    return float(np.log10(max(hv_best - hv, LOG_HV_DIFF_FLOOR)))


def empirical_best_hv(runs, bounds) -> float:
    """HV of the union front of all b_max records across runs.

    Raises:
        EmptyPopulationError: If no run holds any full-fidelity record.
    """
    points = []
    for run in runs:
        b_max = run.metadata.ladder.b_max
        points.extend(
            normalize(rec.objectives, bounds, warn=False)
            for rec in run.records
            if _is_bmax(rec, b_max)
        )
    if not points:
        raise EmptyPopulationError("no full-fidelity records in any run")
    return hypervolume(np.array(points), np.array([1.0, 1.0]))


def final_front(run: RunTrajectory, bounds) -> np.ndarray:
    """Non-dominated normalized b_max points of the whole archive."""
    b_max = run.metadata.ladder.b_max
    pts = [
        normalize(rec.objectives, bounds, warn=False)
        for rec in run.records
        if _is_bmax(rec, b_max)
    ]
    if not pts:
        return np.empty((0, 2))
    pts = np.array(pts)
    return pts[non_dominated_sort(pts)[0]]


def attainment_surface(runs, k: int, bounds) -> np.ndarray:
    """k-th summary attainment surface of the runs' final fronts.

    A point z is k-attained when at least k runs' final b_max fronts
    weakly dominate it.  The boundary of that region is a staircase;
    returned as its corner points (f1, f2) sorted by f1 ascending in
    normalized space (empty when fewer than k runs attain anything).

    Raises:
        MetricsError: If k is outside [1, len(runs)].
    """
    runs = list(runs)
    if not 1 <= k <= len(runs):
        raise MetricsError(f"attainment level k={k} out of range [1, {len(runs)}]")
    fronts = [final_front(run, bounds) for run in runs]
    xs = np.unique(
        np.concatenate([f[:, 0] for f in fronts if f.size] or [np.empty(0)])
    )
    corners: list[tuple[float, float]] = []
    prev_y = np.inf
    for x in xs:
        # Cheapest f2 each run attains at f1 <= x; k-th smallest of those.
        ys = []
        for f in fronts:
            reach = f[f[:, 0] <= x, 1] if f.size else np.empty(0)
            ys.append(reach.min() if reach.size else np.inf)
        y = float(np.sort(ys)[k - 1])
        if np.isfinite(y) and y < prev_y:
            corners.append((float(x), y))
            prev_y = y
    return np.array(corners) if corners else np.empty((0, 2))
