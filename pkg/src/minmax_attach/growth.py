"""Network growth under degree-, fitness- and minimax-based attachment rules."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import DegenerateWeightsError, InvalidInputError
from .fitness import FITNESS_CAP, LognormalSpec, check_fitness, fitness_array
from .homogeneous import closed_form_solution, proportional_attachment
from .rng import RandomStream, check_seed

__all__ = [
    "MODELS",
    "LnfaSource",
    "GrowthConfig",
    "TieredGrowthConfig",
    "GrownGraph",
    "DegreeDistribution",
    "FrequencyReport",
    "attachment_weights",
    "draw_fitness",
    "grow_homogeneous",
    "grow_tiered",
    "empirical_attachment_check",
    "degree_distribution",
]

MODELS = ("barabasi-albert", "bianconi-barabasi", "fitness-proportional", "minmax-derived")


@dataclass(frozen=True)
class LnfaSource:
    """Fitness as a product of independent log-normal attributes, one spec per attribute."""

    attributes: tuple

    def __post_init__(self):
        attrs = tuple(a if isinstance(a, LognormalSpec) else LognormalSpec(*a) for a in self.attributes)
        if not attrs:
            raise InvalidInputError("LnfaSource needs at least one attribute")
        object.__setattr__(self, "attributes", attrs)


FitnessSource = Union[LognormalSpec, LnfaSource, Sequence[float]]


def draw_fitness(source: FitnessSource, count: int, stream: RandomStream) -> np.ndarray:
    """``count`` fitness values from ``source``, consuming normals from ``stream``.

    Explicit value lists are used as given (first ``count`` entries) and
    consume nothing.
    """
    if isinstance(source, LognormalSpec):
        z = stream.standard_normal(count)
        phi = np.exp(source.mu + source.sigma * z)
    elif isinstance(source, LnfaSource):
        mus = np.array([a.mu for a in source.attributes])
        sigmas = np.array([a.sigma for a in source.attributes])
        z = stream.standard_normal(count * mus.size).reshape(count, mus.size)
        # log of the attribute product
        phi = np.exp((mus + sigmas * z).sum(axis=1))
    else:
        values = list(source)
        if len(values) < count:
            raise InvalidInputError(f"{len(values)} explicit fitness values for {count} nodes")
        phi = np.array([check_fitness(v) for v in values[:count]], dtype=np.float64)
    bad = ~((phi > 0.0) & (phi <= FITNESS_CAP))
    if bad.any():
        check_fitness(phi[bad][0])
    return phi


def attachment_weights(model: str, degrees, fitness) -> np.ndarray:
    """Normalised attachment probabilities over existing nodes.

    ``barabasi-albert`` weights by degree, ``bianconi-barabasi`` by degree
    times fitness, ``fitness-proportional`` by fitness, and
    ``minmax-derived`` takes ``p`` from the minimax closed-form solution.
    """
    if model == "minmax-derived":
        return closed_form_solution(fitness_array(np.asarray(fitness, dtype=np.float64))).p
    if model == "fitness-proportional":
        return proportional_attachment(np.asarray(fitness, dtype=np.float64))
    k = np.asarray(degrees, dtype=np.float64)
    if model == "barabasi-albert":
        w = k
    elif model == "bianconi-barabasi":
        w = k * fitness_array(np.asarray(fitness, dtype=np.float64))
    else:
        raise InvalidInputError(f"unknown model {model!r}; choose from {MODELS}")
    total = w.sum()
    if not total > 0:
        raise DegenerateWeightsError(f"all {model} weights are zero")
    return w / total


@dataclass(frozen=True)
class GrowthConfig:
    """Parameters of one homogeneous growth run.

    ``seed_size`` defaults to ``max(links, 2)``; the run starts from a
    clique on that many nodes.
    """

    model: str
    nodes: int
    links: int = 1
    fitness: FitnessSource = LognormalSpec(0.0, 1.0)
    seed_size: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise InvalidInputError(f"unknown model {self.model!r}; choose from {MODELS}")
        if self.links < 1:
            raise InvalidInputError("links must be positive")
        size = max(self.links, 2) if self.seed_size is None else self.seed_size
        if size < 1:
            raise InvalidInputError("seed_size must be positive")
        if self.links > size:
            raise InvalidInputError(f"links ({self.links}) exceeds the seed graph size ({size})")
        if self.nodes < size:
            raise InvalidInputError(f"target node count {self.nodes} is below the seed graph size {size}")
        check_seed(self.seed)
        object.__setattr__(self, "seed_size", size)


@dataclass(frozen=True)
class TieredGrowthConfig:
    """Per-tier log-normal fitness laws and tier sizes; tier 0 is the top tier."""

    tier_specs: tuple
    sizes: tuple
    seed: int = 0

    def __post_init__(self):
        specs = tuple(s if isinstance(s, LognormalSpec) else LognormalSpec(*s) for s in self.tier_specs)
        sizes = tuple(int(n) for n in self.sizes)
        if len(specs) < 2:
            raise InvalidInputError("tiered growth needs at least two tiers")
        if len(sizes) != len(specs):
            raise InvalidInputError(f"{len(specs)} tier specs but {len(sizes)} tier sizes")
        if min(sizes) < 1:
            raise InvalidInputError("every tier needs at least one node")
        check_seed(self.seed)
        object.__setattr__(self, "tier_specs", specs)
        object.__setattr__(self, "sizes", sizes)


@dataclass(frozen=True)
class GrownGraph:
    """Undirected graph from a growth run.

    ``tier`` is -1 for every node of a homogeneous graph. ``edges`` has one
    ``(source, target)`` row per edge, with the newer node as source.
    """

    fitness: np.ndarray
    tier: np.ndarray
    edges: np.ndarray
    degree: np.ndarray = field(init=False)

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "degree", np.bincount(edges.ravel(), minlength=self.fitness.size))

    @property
    def node_count(self) -> int:
        return int(self.fitness.size)

    @property
    def ids(self) -> np.ndarray:
        return np.arange(self.node_count)

    @property
    def tiered(self) -> bool:
        return bool(self.node_count) and bool((self.tier >= 0).all())


def grow_homogeneous(config: GrowthConfig) -> GrownGraph:
    """Grow a graph by sequential attachment.

    All fitness values are drawn first, then each new node links to
    ``config.links`` distinct existing nodes. Targets are drawn one at a
    time from the attachment weights, with chosen nodes removed and the
    rest renormalised.
    """
    stream = RandomStream(config.seed)
    n, s, links = config.nodes, config.seed_size, config.links
    phi = draw_fitness(config.fitness, n, stream)
    degree = np.zeros(n, dtype=np.int64)
    edges = [(b, a) for b in range(s) for a in range(b)]
    for b, a in edges:
        degree[a] += 1
        degree[b] += 1
    for t in range(s, n):
        probs = attachment_weights(config.model, degree[:t], phi[:t]).copy()
        chosen = []
        for r in range(links):
            if r:
                probs[chosen[-1]] = 0.0
                total = probs.sum()
                if not total > 0:
                    raise DegenerateWeightsError(
                        f"only {r} of {t} existing nodes have positive weight; {links} needed"
                    )
                probs /= total
            chosen.append(int(stream.categorical(probs, 1)[0]))
        edges.extend((t, c) for c in chosen)
        degree[t] += links
        degree[chosen] += 1
    return GrownGraph(fitness=phi, tier=np.full(n, -1, dtype=np.int64), edges=np.array(edges, dtype=np.int64))


def grow_tiered(config: TieredGrowthConfig) -> GrownGraph:
    """Grow a layered network tier by tier, starting from the top tier (0).

    Every node of tier ``k >= 1`` makes one edge to tier ``k - 1``, drawn
    from that tier's closed-form minimax distribution (proportional to
    fitness within the tier). Top-tier nodes make no upward edge. Node ids
    are global and follow tier order.
    """
    stream = RandomStream(config.seed)
    phis = [draw_fitness(spec, n, stream) for spec, n in zip(config.tier_specs, config.sizes)]
    starts = np.concatenate([[0], np.cumsum(config.sizes)]).astype(np.int64)
    edges = []
    for k in range(1, len(phis)):
        p_above = closed_form_solution(phis[k - 1]).p
        targets = stream.categorical(p_above, config.sizes[k]) + starts[k - 1]
        sources = np.arange(starts[k], starts[k + 1])
        edges.append(np.column_stack([sources, targets]))
    tier = np.repeat(np.arange(len(phis), dtype=np.int64), config.sizes)
    return GrownGraph(fitness=np.concatenate(phis), tier=tier, edges=np.concatenate(edges))


@dataclass(frozen=True)
class FrequencyReport:
    """Empirical versus expected frequencies for a categorical sampler."""

    counts: np.ndarray
    frequencies: np.ndarray
    expected: np.ndarray
    bounds: np.ndarray  # 3 * sqrt(p (1 - p) / draws)
    within: np.ndarray

    @property
    def passed(self) -> bool:
        return bool(self.within.all())


def empirical_attachment_check(probs, draws: int, seed: int) -> FrequencyReport:
    """Sample ``probs`` ``draws`` times and test every frequency against 3-sigma bounds."""
    if draws < 1:
        raise InvalidInputError("draws must be positive")
    p = np.asarray(probs, dtype=np.float64)
    idx = RandomStream(seed).categorical(p, draws)
    counts = np.bincount(idx, minlength=p.size)
    freq = counts / draws
    bounds = 3.0 * np.sqrt(p * (1.0 - p) / draws)
    return FrequencyReport(counts, freq, p, bounds, np.abs(freq - p) <= bounds)


@dataclass(frozen=True)
class DegreeDistribution:
    """Degree histogram and its complementary CDF.

    ``ccdf`` lists ``(d, fraction of nodes with degree >= d)`` for every
    degree ``d`` that occurs, in increasing order.
    """

    counts: dict
    ccdf: tuple

    @property
    def node_count(self) -> int:
        return sum(self.counts.values())


def degree_distribution(graph: GrownGraph) -> DegreeDistribution:
    hist = Counter(int(d) for d in graph.degree)
    n = graph.node_count
    ccdf, remaining = [], n
    for d in sorted(hist):
        ccdf.append((d, remaining / n))
        remaining -= hist[d]
    return DegreeDistribution(counts=dict(sorted(hist.items())), ccdf=tuple(ccdf))
