"""The optimization loop: DE-evolved successive-halving sub-populations.

One run keeps a fixed-capacity sub-population per fidelity level (sizes
frozen from the first, largest bracket).  The first bracket fills them
vanilla-SH style: random genotypes at the cheapest fidelity, the top
1/eta promoted and re-evaluated one level up.  Every later bracket walks
its rungs spending the planned per-rung evaluation count (cycling over
the sub-population when a rung is larger than its capacity), evolving
each target with rand/1 mutation over the parent pool (the genotypes
promoted out of the previous rung of the same bracket), binomial
crossover, and rank/hypervolume survivor selection against the global
population.

Each promotion refreshes the parent pool at the target fidelity, pools
persist across the brackets of one iteration and are cleared between
iterations; a rung whose pool holds fewer than three genotypes tops it
up from the global population (per-target, uniformly, skipping genotypes
already in the pool).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .de import DEParams, Individual, crossover_binomial, mo_selection, mutate_rand1
from .errors import EvaluationError, NormalizationError, SelectionError
from .metrics import RunMetadata, RunTrajectory
from .pareto import rank_and_truncate
from .scheduler import BracketPlan, FidelityLadder, dehb_iteration_plan
from .space import SearchSpace, encode_sample

VARIANTS = {"nsga2": "crowding", "epsnet": "epsnet"}

# Fixed stream tags: every consumer derives its generator from
# (tag, run seed), so adding a consumer never perturbs the others.
_STREAMS = {"optimizer": 1, "benchmark": 2}

_REF = np.array([1.0, 1.0])


def derive_rng(seed: int, stream: str) -> np.random.Generator:
    """Named RNG sub-stream of a run seed."""
    return np.random.default_rng(np.random.SeedSequence([_STREAMS[stream], seed]))


def tae_budget(n_hyperparameters: int) -> int:
    """Evaluation budget ceil(20 + 80 * sqrt(#hyperparameters))."""
    if n_hyperparameters < 1:
        raise ValueError("need at least one hyperparameter")
    return math.ceil(20.0 + 80.0 * math.sqrt(n_hyperparameters))


@dataclass(frozen=True)
class StoppingCriteria:
    """Run limits; at least one must be set.  Checked before every
    evaluation, so max_tae is exact and never overshot."""

    max_tae: int | None = None
    max_wallclock: float | None = None

    def __post_init__(self):
        if self.max_tae is None and self.max_wallclock is None:
            raise ValueError("at least one stopping criterion is required")
        if self.max_tae is not None and self.max_tae < 1:
            raise ValueError(f"max_tae must be >= 1, got {self.max_tae}")
        if self.max_wallclock is not None and self.max_wallclock <= 0:
            raise ValueError(f"max_wallclock must be > 0, got {self.max_wallclock}")

    def cause_if_tripped(self, tae: int, cost: float) -> str | None:
        if self.max_tae is not None and tae >= self.max_tae:
            return "max_tae"
        if self.max_wallclock is not None and cost >= self.max_wallclock:
            return "max_wallclock"
        return None


@dataclass(frozen=True)
class EvaluationRecord:
    """One target-algorithm execution."""

    seq: int
    genotype: np.ndarray
    fidelity: float
    objectives: np.ndarray
    cost: float


class _BudgetExhausted(Exception):
    def __init__(self, cause: str):
        super().__init__(cause)
        self.cause = cause


@dataclass
class OptimizerState:
    """Mutable per-run state shared by the rung-evolution steps."""

    space: SearchSpace
    ladder: FidelityLadder
    variant: str
    de_params: DEParams
    rng: np.random.Generator
    capacities: dict[float, int]
    objective_mins: np.ndarray
    objective_ranges: np.ndarray
    sub_populations: dict[float, list[Individual]] = field(default_factory=dict)
    parent_pool: dict[float, list[np.ndarray]] = field(default_factory=dict)
    archive: list[EvaluationRecord] = field(default_factory=list)
    cumulative_cost: float = 0.0

    @property
    def global_population(self) -> list[Individual]:
        """Union view over all sub-populations, cheapest fidelity first."""
        return [
            ind
            for level in self.ladder.levels
            for ind in self.sub_populations.get(level, [])
        ]

    def normalized(self, objectives) -> np.ndarray:
        """Scale objectives so the declared bounds map to [0, 1].

        Deliberately unclamped: dominance comparisons keep their full
        signal outside the bounds box, and the hypervolume sweep already
        ignores points beyond the (1, 1) reference.
        """
        return (np.asarray(objectives, dtype=float) - self.objective_mins) / (
            self.objective_ranges
        )

    def audit(self):
        """Cheap consistency check run after every rung pass."""
        for level, members in self.sub_populations.items():
            assert len(members) == self.capacities[level], (
                f"sub-population at {level} has {len(members)} members, "
                f"capacity {self.capacities[level]}"
            )
            for ind in members:
                assert ind.record is not None and ind.record.fidelity == level


def initialize(
    space: SearchSpace,
    ladder: FidelityLadder,
    seed: int,
    variant: str,
    de_params: DEParams | None = None,
    objective_bounds=((0.0, 1.0), (0.0, 1.0)),
) -> OptimizerState:
    """Fresh run state with the lowest sub-population sampled (unevaluated).

    Sub-population capacities are the first bracket's rung sizes; higher
    fidelities are filled by the first bracket's promotions as it runs.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}, expected {sorted(VARIANTS)}")
    mins = np.array([b[0] for b in objective_bounds], dtype=float)
    ranges = np.array([b[1] - b[0] for b in objective_bounds], dtype=float)
    if np.any(ranges <= 0):
        raise NormalizationError(f"degenerate objective bounds {objective_bounds}")
    rng = derive_rng(seed, "optimizer")
    first = dehb_iteration_plan(ladder)[0]
    state = OptimizerState(
        space=space,
        ladder=ladder,
        variant=variant,
        de_params=de_params or DEParams(),
        rng=rng,
        capacities=dict(first.rungs),
        objective_mins=mins,
        objective_ranges=ranges,
    )
    b_min = ladder.levels[0]
    state.sub_populations[b_min] = [
        Individual(encode_sample(space, rng)) for _ in range(state.capacities[b_min])
    ]
    return state


def promote(records, k: int, variant: str) -> list[np.ndarray]:
    """Genotypes of the top-k records by front rank + variant ordering."""
    objectives = np.array([rec.objectives for rec in records])
    chosen = rank_and_truncate(objectives, k, VARIANTS[variant])
    return [records[i].genotype for i in chosen]


def _evaluate(state, objective_fn, genotype, fidelity, stop) -> EvaluationRecord:
    cause = stop.cause_if_tripped(len(state.archive), state.cumulative_cost)
    if cause is not None:
        raise _BudgetExhausted(cause)
    try:
        objectives, cost = objective_fn(genotype, fidelity)
    except Exception as exc:
        raise EvaluationError(
            f"evaluation failed at fidelity {fidelity}: {exc}"
        ) from exc
    objectives = np.asarray(objectives, dtype=float)
    if not np.all(np.isfinite(objectives)):
        raise EvaluationError(f"non-finite objectives {objectives}")
    record = EvaluationRecord(
        seq=len(state.archive) + 1,
        genotype=np.array(genotype, dtype=float, copy=True),
        fidelity=float(fidelity),
        objectives=objectives,
        cost=float(cost),
    )
    state.archive.append(record)
    state.cumulative_cost += record.cost
    return record


def _mutation_pool(state: OptimizerState, fidelity: float) -> list[np.ndarray]:
    """Per-target mutation pool: parent pool topped up to three members.

    Fill-ins are drawn uniformly without replacement from the global
    population, skipping genotypes already in the pool; if even that runs
    dry (tiny ladders) fresh random genotypes complete the pool.
    """
    pool = list(state.parent_pool.get(fidelity, ()))
    if len(pool) >= 3:
        return pool
    candidates = [
        ind.genotype
        for ind in state.global_population
        if not any(np.array_equal(ind.genotype, g) for g in pool)
    ]
    take = min(3 - len(pool), len(candidates))
    if take > 0:
        for i in state.rng.choice(len(candidates), size=take, replace=False):
            pool.append(candidates[i])
    while len(pool) < 3:
        pool.append(encode_sample(state.space, state.rng))
    return pool


def _apply_selection(
    state: OptimizerState, fidelity: float, slot: int, offspring: Individual
):
    """Run survivor selection for one offspring and apply the outcome."""
    if offspring.record is None:
        raise SelectionError("offspring must be evaluated before selection")
    rows: list[tuple[float, int]] = []
    objectives = []
    owners = []
    seqs = []
    for level in state.ladder.levels:
        for j, ind in enumerate(state.sub_populations.get(level, [])):
            rows.append((level, j))
            objectives.append(ind.record.objectives)
            owners.append(level)
            seqs.append(ind.record.seq)
    parent_row = rows.index((fidelity, slot))
    objectives.append(offspring.record.objectives)
    owners.append(fidelity)
    seqs.append(offspring.record.seq)
    offspring_row = len(rows)
    victim = mo_selection(
        state.normalized(np.array(objectives)),
        owners,
        seqs,
        parent_row,
        offspring_row,
        _REF,
    )
    if victim == offspring_row:
        return
    level, j = rows[victim]
    assert level == fidelity, "victim must belong to the evolved sub-population"
    state.sub_populations[level][j] = offspring


def evolve_rung(
    state: OptimizerState, fidelity: float, objective_fn, stop, n_slots: int | None = None
):
    """One DE pass over the sub-population at the given fidelity.

    ``n_slots`` is the rung's planned evaluation count (defaults to the
    sub-population size); when it exceeds the capacity the targets cycle
    through the members again, so every bracket spends its proper
    successive-halving budget regardless of the frozen capacities.
    """
    sub = state.sub_populations[fidelity]
    if n_slots is None:
        n_slots = len(sub)
    for raw_slot in range(n_slots):
        slot = raw_slot % len(sub)
        parent = sub[slot]
        pool = _mutation_pool(state, fidelity)
        mutant = mutate_rand1(pool, state.de_params, state.rng)
        child = crossover_binomial(
            parent.genotype, mutant, state.de_params, state.rng
        )
        record = _evaluate(state, objective_fn, child, fidelity, stop)
        _apply_selection(state, fidelity, slot, Individual(child, record))
    state.audit()


def _vanilla_bracket(state: OptimizerState, bracket: BracketPlan, objective_fn, stop):
    """First bracket: evaluate the random init, promote, fill upwards."""
    b_min, _ = bracket.rungs[0]
    for ind in state.sub_populations[b_min]:
        ind.record = _evaluate(state, objective_fn, ind.genotype, b_min, stop)
    for (level, _), (nxt, n_nxt) in zip(bracket.rungs, bracket.rungs[1:]):
        records = [ind.record for ind in state.sub_populations[level]]
        genotypes = promote(records, min(n_nxt, len(records)), state.variant)
        state.parent_pool[nxt] = list(genotypes)
        state.sub_populations[nxt] = [
            Individual(g, _evaluate(state, objective_fn, g, nxt, stop))
            for g in genotypes
        ]


def _de_bracket(state: OptimizerState, bracket: BracketPlan, objective_fn, stop):
    for i, (level, n_configs) in enumerate(bracket.rungs):
        evolve_rung(state, level, objective_fn, stop, n_configs)
        if i + 1 < len(bracket.rungs):
            nxt, n_nxt = bracket.rungs[i + 1]
            records = [ind.record for ind in state.sub_populations[level]]
            state.parent_pool[nxt] = promote(
                records, min(n_nxt, len(records)), state.variant
            )


def run(
    space: SearchSpace,
    ladder: FidelityLadder,
    variant: str,
    objective_fn,
    stop: StoppingCriteria,
    seed: int,
    *,
    objective_bounds,
    de_params: DEParams | None = None,
    benchmark_name: str = "",
) -> RunTrajectory:
    """One full optimization run; returns the seq-ordered archive.

    ``objective_fn(genotype, fidelity) -> (objectives, cost_seconds)`` is
    evaluated at ladder fidelities only.  The declared objective bounds
    feed the in-loop normalized hypervolume (reference point (1, 1)).
    """
    state = initialize(space, ladder, seed, variant, de_params, objective_bounds)
    plan = dehb_iteration_plan(ladder)
    stop_cause = None
    first = True
    try:
        while True:
            state.parent_pool.clear()
            for bracket in plan:
                if first:
                    _vanilla_bracket(state, bracket, objective_fn, stop)
                    first = False
                else:
                    _de_bracket(state, bracket, objective_fn, stop)
    except _BudgetExhausted as exhausted:
        stop_cause = exhausted.cause
    return RunTrajectory(
        records=tuple(state.archive),
        metadata=RunMetadata(
            seed=seed,
            optimizer=f"modehb_{variant}",
            benchmark=benchmark_name,
            ladder=ladder,
            stop_cause=stop_cause,
        ),
    )


def run_random_search(
    space: SearchSpace,
    ladder: FidelityLadder,
    objective_fn,
    stop: StoppingCriteria,
    seed: int,
    *,
    benchmark_name: str = "",
) -> RunTrajectory:
    """Uniform random sampling evaluated at b_max only (the baseline)."""
    rng = derive_rng(seed, "optimizer")
    b_max = ladder.levels[-1]
    archive: list[EvaluationRecord] = []
    cumulative = 0.0
    stop_cause = None
    while True:
        stop_cause = stop.cause_if_tripped(len(archive), cumulative)
        if stop_cause is not None:
            break
        genotype = encode_sample(space, rng)
        try:
            objectives, cost = objective_fn(genotype, b_max)
        except Exception as exc:
            raise EvaluationError(f"evaluation failed at b_max: {exc}") from exc
        objectives = np.asarray(objectives, dtype=float)
        if not np.all(np.isfinite(objectives)):
            raise EvaluationError(f"non-finite objectives {objectives}")
        archive.append(
            EvaluationRecord(
                seq=len(archive) + 1,
                genotype=genotype,
                fidelity=float(b_max),
                objectives=objectives,
                cost=float(cost),
            )
        )
        cumulative += float(cost)
    return RunTrajectory(
        records=tuple(archive),
        metadata=RunMetadata(
            seed=seed,
            optimizer="random_search",
            benchmark=benchmark_name,
            ladder=ladder,
            stop_cause=stop_cause,
        ),
    )
