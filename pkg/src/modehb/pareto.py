"""Pareto machinery: dominance, sorting, diversity ranking, hypervolume.

All functions treat objectives as minimized and operate on raw values;
dominance and front membership are invariant under per-objective monotone
rescaling, so callers only need to normalize before hypervolume
computations (pass objectives scaled so the reference point is (1, 1)).
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DimensionError,
    EmptyPopulationError,
    SelectionError,
    UnsupportedDimensionError,
)

RANKING_STRATEGIES = ("crowding", "epsnet")


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise DimensionError(f"expected a 2-D array of points, got shape {pts.shape}")
    if pts.shape[1] < 2:
        raise DimensionError("objective vectors need at least two components")
    if not np.all(np.isfinite(pts)):
        raise ValueError("objective values must be finite")
    return pts


def dominates(a, b) -> bool:
    """True iff a weakly dominates b and is strictly better somewhere."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return bool(np.all(a <= b) and np.any(a < b))


def _domination_matrix(pts: np.ndarray) -> np.ndarray:
    """dom[i, j] == True iff point i dominates point j."""
    leq = np.all(pts[:, None, :] <= pts[None, :, :], axis=2)
    lt = np.any(pts[:, None, :] < pts[None, :, :], axis=2)
    return leq & lt


def non_dominated_sort(points) -> list[list[int]]:
    """Partition points into fronts F1 < F2 < ... of input indices.

    Within each front the input order is preserved.

    Raises:
        EmptyPopulationError: If no points were given.
    """
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        raise EmptyPopulationError("cannot sort an empty population")
    pts = _as_points(pts)
    dom = _domination_matrix(pts)
    counts = dom.sum(axis=0)
    fronts: list[list[int]] = []
    current = [i for i in range(len(pts)) if counts[i] == 0]
    while current:
        fronts.append(current)
        nxt: list[int] = []
        for i in current:
            for j in np.flatnonzero(dom[i]):
                counts[j] -= 1
                if counts[j] == 0:
                    nxt.append(int(j))
        current = sorted(nxt)
    return fronts


def front_ranks(points) -> np.ndarray:
    """1-based front rank per point (rank 1 == non-dominated)."""
    ranks = np.empty(len(np.asarray(points)), dtype=int)
    for r, front in enumerate(non_dominated_sort(points), start=1):
        ranks[front] = r
    return ranks


def crowding_distance(front) -> np.ndarray:
    """NSGA-II crowding distance of a single front.

    Per objective the front is sorted, min-max normalized to [0, 1], the
    boundary points get +inf and each interior point the gap between its
    two sort neighbours; scores are summed over objectives.  Fronts of
    size <= 2 are all +inf.  A constant objective contributes 0.
    """
    pts = _as_points(front)
    m = len(pts)
    if m <= 2:
        return np.full(m, np.inf)
    dist = np.zeros(m)
    for values in pts.T:
        order = np.argsort(values, kind="stable")
        lo, hi = values[order[0]], values[order[-1]]
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        if hi > lo:
            norm = (values - lo) / (hi - lo)
            gaps = norm[order[2:]] - norm[order[:-2]]
            dist[order[1:-1]] += gaps
    return dist


def epsnet_order(front) -> list[int]:
    """Greedy max-min-distance ordering of a front (input indices).

    The first ranked point is input index 0; every further step picks the
    unranked point with the largest Euclidean distance to its closest
    already-ranked point, ties broken by lowest input index.
    """
    pts = _as_points(front)
    m = len(pts)
    order = [0]
    if m == 1:
        return order
    # min_dist[i] = distance of i to the closest ranked point so far.
    min_dist = np.linalg.norm(pts - pts[0], axis=1)
    min_dist[0] = -np.inf
    for _ in range(m - 1):
        best = int(np.argmax(min_dist))  # argmax takes the lowest index on ties
        order.append(best)
        min_dist = np.minimum(min_dist, np.linalg.norm(pts - pts[best], axis=1))
        min_dist[best] = -np.inf
    return order


def hypervolume(points, ref) -> float:
    """Exact 2-D hypervolume dominated by points, bounded by ref.

    Points with any component beyond ref are dropped (they contribute
    nothing).  Uses the standard sweep: sort the non-dominated subset by
    f1 ascending and accumulate (ref1 - f1_i) * (prev_f2 - f2_i).

    Raises:
        UnsupportedDimensionError: For dimensions other than 2.
    """
    pts = np.asarray(points, dtype=float)
    ref = np.asarray(ref, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or ref.shape != (2,):
        raise UnsupportedDimensionError(
            "exact hypervolume is implemented for exactly two objectives"
        )
    if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(ref))):
        raise ValueError("objective values must be finite")
    pts = pts[np.all(pts <= ref, axis=1)]
    if len(pts) == 0:
        return 0.0
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    hv = 0.0
    prev_f2 = ref[1]
    for f1, f2 in pts[order]:
        if f2 < prev_f2:  # non-dominated within the sweep
            hv += (ref[0] - f1) * (prev_f2 - f2)
            prev_f2 = f2
    return float(hv)


def hv_contributions(points, ref) -> np.ndarray:
    """Exclusive hypervolume HV(S) - HV(S w/o p) per point.

    Dominated points and duplicates contribute exactly 0.
    """
    pts = np.asarray(points, dtype=float)
    total = hypervolume(pts, ref)
    out = np.empty(len(pts))
    for i in range(len(pts)):
        out[i] = total - hypervolume(np.delete(pts, i, axis=0), ref)
    return out


def rank_and_truncate(points, k: int, strategy: str) -> list[int]:
    """Select k points by front rank, splitting one front by a strategy.

    Whole fronts are taken in order until the next would overflow k; the
    splitting front is ordered by ``crowding`` (descending distance, ties
    by input index) or ``epsnet`` (greedy max-min order) and truncated.

    Returns:
        Input indices of the selected points: whole fronts in input order
        followed by the truncated front in strategy order.

    Raises:
        SelectionError: If k is out of range or the strategy is unknown.
    """
    pts = _as_points(points)
    if not 1 <= k <= len(pts):
        raise SelectionError(f"k={k} out of range for {len(pts)} points")
    if strategy not in RANKING_STRATEGIES:
        raise SelectionError(f"unknown ranking strategy {strategy!r}")
    selected: list[int] = []
    for front in non_dominated_sort(pts):
        if len(selected) + len(front) <= k:
            selected.extend(front)
            if len(selected) == k:
                break
            continue
        need = k - len(selected)
        sub = pts[front]
        if strategy == "crowding":
            dist = crowding_distance(sub)
            order = sorted(range(len(front)), key=lambda i: (-dist[i], i))
        else:
            order = epsnet_order(sub)
        selected.extend(front[i] for i in order[:need])
        break
    return selected
