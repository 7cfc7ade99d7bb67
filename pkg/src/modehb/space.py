"""Search-space definition and unit-hypercube genotype encoding.

Optimizers operate exclusively on genotypes in [0, 1]^d; this module maps
them onto typed hyperparameter values.  Continuous parameters use a linear
(or log-linear) map, integers round the continuous map to the nearest
value, and categorical/ordinal parameters split the unit interval into k
equal-width bins.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError

KINDS = ("continuous", "integer", "categorical", "ordinal")


@dataclass(frozen=True)
class ParameterSpec:
    """Declaration of a single hyperparameter.

    Args:
        name: Unique parameter name.
        kind: One of ``continuous``, ``integer``, ``categorical``,
            ``ordinal``.
        lower: Lower bound (continuous/integer only).
        upper: Upper bound (continuous/integer only).
        log: Sample on a log scale (requires ``lower > 0``).
        choices: Value list for categorical/ordinal parameters; ordinal
            choices are treated as already ordered.
    """

    name: str
    kind: str
    lower: float | None = None
    upper: float | None = None
    log: bool = False
    choices: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown parameter kind {self.kind!r}")
        if self.kind in ("continuous", "integer"):
            if self.lower is None or self.upper is None:
                raise ValueError(f"{self.name}: numeric parameters need bounds")
            if not self.lower < self.upper:
                raise ValueError(f"{self.name}: lower must be < upper")
            if self.log and self.lower <= 0:
                raise ValueError(f"{self.name}: log scale requires lower > 0")
        else:
            if len(self.choices) == 0:
                raise ValueError(f"{self.name}: choices must be non-empty")
            if len(set(self.choices)) != len(self.choices):
                raise ValueError(f"{self.name}: duplicate choices")


@dataclass(frozen=True)
class SearchSpace:
    """Ordered collection of parameters; genotype dimension == len(params)."""

    params: tuple[ParameterSpec, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if len(self.params) < 1:
            raise ValueError("search space needs at least one parameter")
        names = [p.name for p in self.params]
        if len(set(names)) != len(names):
            raise ValueError("parameter names must be unique")

    def __len__(self) -> int:
        return len(self.params)


def encode_sample(space: SearchSpace, rng: np.random.Generator) -> np.ndarray:
    """Draw a uniform random genotype in [0, 1]^d."""
    return rng.uniform(0.0, 1.0, size=len(space))


def _decode_one(spec: ParameterSpec, c: float):
    if spec.kind == "continuous":
        if spec.log:
            return math.exp(
                math.log(spec.lower) + c * (math.log(spec.upper) - math.log(spec.lower))
            )
        return spec.lower + c * (spec.upper - spec.lower)
    if spec.kind == "integer":
        if spec.log:
            raw = math.exp(
                math.log(spec.lower) + c * (math.log(spec.upper) - math.log(spec.lower))
            )
        else:
            raw = spec.lower + c * (spec.upper - spec.lower)
        # Round half up so decoding is a monotone step function of c.
        value = int(math.floor(raw + 0.5))
        return min(max(value, int(spec.lower)), int(spec.upper))
    # Equal-width bins; c == 1.0 falls into the last bin.
    k = len(spec.choices)
    return spec.choices[min(int(math.floor(c * k)), k - 1)]


def decode(space: SearchSpace, genotype) -> dict:
    """Map a genotype in [0, 1]^d to a {name: value} configuration.

    Raises:
        DimensionError: If the genotype length does not match the space.
    """
    genotype = np.asarray(genotype, dtype=float)
    if genotype.shape != (len(space),):
        raise DimensionError(
            f"genotype has shape {genotype.shape}, expected ({len(space)},)"
        )
    if np.any(genotype < 0.0) or np.any(genotype > 1.0):
        raise ValueError("genotype components must lie in [0, 1]")
    return {p.name: _decode_one(p, float(c)) for p, c in zip(space.params, genotype)}


def space_from_json(doc) -> SearchSpace:
    """Build a SearchSpace from a JSON array (or its parsed form).

    Each entry is an object with fields ``name``, ``kind`` and, depending
    on the kind, ``lower``/``upper``/``log`` or ``choices``.
    """
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    if not isinstance(doc, list):
        raise ValueError("space document must be a JSON array")
    params = []
    for entry in doc:
        params.append(
            ParameterSpec(
                name=entry["name"],
                kind=entry["kind"],
                lower=entry.get("lower"),
                upper=entry.get("upper"),
                log=bool(entry.get("log", False)),
                choices=tuple(entry.get("choices", ())),
            )
        )
    return SearchSpace(tuple(params))
