"""Node fitness, its reciprocal (unfitness), and fitness generators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidFitnessError, InvalidInputError, InvalidSpecError
from .rng import RandomStream

__all__ = [
    "FITNESS_CAP",
    "LOG_SPACE_THRESHOLD",
    "NodeRecord",
    "LognormalSpec",
    "check_fitness",
    "unfitness",
    "lnfa_fitness",
    "standard_normal",
    "sample_lognormal",
    "nodes_from_fitness",
    "fitness_array",
]

#: Largest accepted fitness. Sums of a few thousand capped values stay finite.
FITNESS_CAP = 1e300

#: Attribute products longer than this are accumulated as a sum of logs.
LOG_SPACE_THRESHOLD = 64


def check_fitness(value) -> float:
    """Return ``value`` as a float if it is a usable fitness, else raise."""
    try:
        phi = float(value)
    except (TypeError, ValueError):
        raise InvalidFitnessError(f"fitness must be a real number, got {value!r}") from None
    if math.isnan(phi) or math.isinf(phi):
        raise InvalidFitnessError(f"fitness must be finite, got {phi!r}")
    if phi <= 0.0:
        raise InvalidFitnessError(f"fitness must be strictly positive, got {phi!r}")
    if phi > FITNESS_CAP:
        raise InvalidFitnessError(f"fitness {phi!r} exceeds the cap {FITNESS_CAP!r}")
    return phi


def unfitness(fitness) -> float:
    """Reciprocal of a fitness value.

    >>> unfitness(2.0)
    0.5
    """
    return 1.0 / check_fitness(fitness)


@dataclass(frozen=True)
class NodeRecord:
    """A node identifier with its fitness. ``unfitness`` is derived."""

    id: int
    fitness: float
    unfitness: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if isinstance(self.id, bool) or not isinstance(self.id, (int, np.integer)) or self.id < 0:
            raise InvalidInputError(f"node id must be a non-negative integer, got {self.id!r}")
        object.__setattr__(self, "id", int(self.id))
        object.__setattr__(self, "fitness", check_fitness(self.fitness))
        object.__setattr__(self, "unfitness", 1.0 / self.fitness)


@dataclass(frozen=True)
class LognormalSpec:
    """Log-normal law with log-scale location ``mu`` and shape ``sigma``."""

    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        mu, sigma = float(self.mu), float(self.sigma)
        if not math.isfinite(mu):
            raise InvalidSpecError(f"mu must be finite, got {mu!r}")
        if not math.isfinite(sigma) or sigma < 0.0:
            raise InvalidSpecError(f"sigma must be finite and non-negative, got {sigma!r}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)


def lnfa_fitness(attrs: Sequence[float]) -> float:
    """Fitness as the product of positive attribute factors.

    Long attribute lists are multiplied in log space to avoid intermediate
    overflow; the result must still be a valid fitness.
    """
    values = [float(a) for a in attrs]
    if not values:
        raise InvalidInputError("attribute vector must not be empty")
    for a in values:
        if not (math.isfinite(a) and a > 0.0):
            raise InvalidInputError(f"attributes must be positive and finite, got {a!r}")
    if len(values) > LOG_SPACE_THRESHOLD:
        return check_fitness(math.exp(math.fsum(math.log(a) for a in values)))
    return check_fitness(math.prod(values))


def standard_normal(count: int, seed: int) -> np.ndarray:
    """The standard-normal draws that ``sample_lognormal`` transforms for this seed."""
    if count < 1:
        raise InvalidInputError(f"count must be at least 1, got {count}")
    return RandomStream(seed).standard_normal(count)


def sample_lognormal(spec: LognormalSpec, count: int, seed: int) -> np.ndarray:
    """Draw ``count`` log-normal fitness values, ``exp(mu + sigma * z)``.

    Raises
    ------
    InvalidSpecError
        If ``sigma`` is negative.
    InvalidFitnessError
        If a draw under- or overflows the accepted fitness range.
    """
    if not isinstance(spec, LognormalSpec):
        spec = LognormalSpec(*spec)
    z = standard_normal(count, seed)
    draws = np.exp(spec.mu + spec.sigma * z)
    bad = ~((draws > 0.0) & (draws <= FITNESS_CAP))
    if bad.any():
        raise InvalidFitnessError(
            f"log-normal draw {draws[bad][0]!r} falls outside (0, {FITNESS_CAP!r}]"
        )
    return draws


def nodes_from_fitness(values: Iterable[float], start_id: int = 0) -> list[NodeRecord]:
    """Wrap raw fitness values as ``NodeRecord``s with consecutive ids."""
    return [NodeRecord(start_id + i, v) for i, v in enumerate(values)]


def fitness_array(nodes) -> np.ndarray:
    """Validated 1-d float array of fitness from records or raw values."""
    if isinstance(nodes, np.ndarray):
        phi = np.asarray(nodes, dtype=np.float64).ravel()
        if phi.size and not ((phi > 0.0) & (phi <= FITNESS_CAP)).all():
            check_fitness(phi[~((phi > 0.0) & (phi <= FITNESS_CAP))][0])
        return phi
    nodes = list(nodes)
    return np.array(
        [n.fitness if isinstance(n, NodeRecord) else check_fitness(n) for n in nodes],
        dtype=np.float64,
    )
