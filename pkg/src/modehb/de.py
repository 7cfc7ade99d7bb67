"""Differential-evolution operators and multi-objective survivor selection.

Genotypes live in [0, 1]^d throughout; mutants are clipped back into the
box.  Selection follows the rank-then-hypervolume rule: the offspring
replaces its parent when it ranks strictly better in the joint
non-dominated sort, is discarded when strictly worse, and on equal rank
the least hypervolume contributor of the last front (restricted to the
parent's own sub-population) is evicted instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import DimensionError, InsufficientParentsError, SelectionError
from .pareto import hv_contributions, non_dominated_sort

if TYPE_CHECKING:
    from .optimizer import EvaluationRecord


@dataclass(frozen=True)
class DEParams:
    """Mutation scaling factor F and crossover probability CR."""

    scaling_factor: float = 0.5
    crossover_prob: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.scaling_factor <= 2.0:
            raise ValueError(f"scaling_factor must be in (0, 2], got {self.scaling_factor}")
        if not 0.0 < self.crossover_prob <= 1.0:
            raise ValueError(f"crossover_prob must be in (0, 1], got {self.crossover_prob}")


@dataclass
class Individual:
    """A genotype plus its evaluation record once evaluated."""

    genotype: np.ndarray
    record: "EvaluationRecord | None" = None


def rand1_combine(r1, r2, r3, scaling_factor: float) -> np.ndarray:
    """rand/1 mutant r1 + F * (r2 - r3), clipped to [0, 1]."""
    mutant = np.asarray(r1, dtype=float) + scaling_factor * (
        np.asarray(r2, dtype=float) - np.asarray(r3, dtype=float)
    )
    return np.clip(mutant, 0.0, 1.0)


def mutate_rand1(pool, params: DEParams, rng: np.random.Generator) -> np.ndarray:
    """Pick three distinct pool members uniformly and combine them.

    Raises:
        InsufficientParentsError: If the pool holds fewer than 3 genotypes
            (callers fall back to the global population, see optimizer).
    """
    if len(pool) < 3:
        raise InsufficientParentsError(
            f"mutation needs 3 parents, pool has {len(pool)}"
        )
    i1, i2, i3 = rng.choice(len(pool), size=3, replace=False)
    return rand1_combine(pool[i1], pool[i2], pool[i3], params.scaling_factor)


def crossover_binomial(
    target, mutant, params: DEParams, rng: np.random.Generator
) -> np.ndarray:
    """Binomial crossover; one uniformly chosen coordinate is always mutant.

    Draw order (part of the determinism contract): first the forced
    coordinate index, then one uniform per coordinate.
    """
    target = np.asarray(target, dtype=float)
    mutant = np.asarray(mutant, dtype=float)
    if target.shape != mutant.shape:
        raise DimensionError(f"shape mismatch {target.shape} vs {mutant.shape}")
    forced = rng.integers(len(target))
    take = rng.random(len(target)) < params.crossover_prob
    take[forced] = True
    return np.where(take, mutant, target)


def mo_selection(
    objectives,
    owners,
    seqs,
    parent: int,
    offspring: int,
    ref,
) -> int:
    """Pick the member a freshly evaluated offspring replaces (or itself).

    Args:
        objectives: (N, n) objective rows of the global population with the
            offspring already included provisionally; scaled so that ref is
            the hypervolume reference point.
        owners: Sub-population tag per row (the fidelity owning the member).
        seqs: Evaluation sequence number per row.
        parent: Row index of the parent (the DE target).
        offspring: Row index of the offspring.
        ref: Hypervolume reference point.

    Returns:
        The victim's row index: the parent when the offspring ranks
        strictly better, the offspring when strictly worse, otherwise the
        minimum-contribution member of the last front among rows owned by
        the parent's sub-population (contribution ties broken by earliest
        seq; no owned row in the last front falls back to the parent).

    Raises:
        SelectionError: On malformed indices or mismatched fidelities.
    """
    objectives = np.asarray(objectives, dtype=float)
    owners = np.asarray(owners)
    seqs = np.asarray(seqs)
    n_rows = len(objectives)
    if not (0 <= parent < n_rows and 0 <= offspring < n_rows) or parent == offspring:
        raise SelectionError(f"invalid parent/offspring rows {parent}, {offspring}")
    if len(owners) != n_rows or len(seqs) != n_rows:
        raise SelectionError("owners/seqs must match the objective rows")
    if owners[parent] != owners[offspring]:
        raise SelectionError(
            "parent and offspring must be evaluated at the same fidelity"
        )

    fronts = non_dominated_sort(objectives)
    rank = np.empty(n_rows, dtype=int)
    for r, front in enumerate(fronts, start=1):
        rank[front] = r

    if rank[parent] > rank[offspring]:
        return parent
    if rank[parent] < rank[offspring]:
        return offspring

    last = fronts[-1]
    owned = [i for i in last if owners[i] == owners[parent]]
    if not owned:
        return parent
    contrib = hv_contributions(objectives[last], ref)
    by_row = dict(zip(last, contrib))
    return min(owned, key=lambda i: (by_row[i], seqs[i]))
