"""Minimax-unfitness attachment for tiered (layered) populations.

A path picks exactly one node from every tier, in tier order; an implicit
origin before the first tier and destination after the last carry no
fitness and no cost. The objective sums the worst expected unfitness of
every tier, and since each tier's probabilities sum to one independently
the problem splits into one homogeneous problem per tier.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _msa
from .rng import RandomStream
from .errors import InvalidInputError, OracleLimitError
from .fitness import LognormalSpec, NodeRecord, nodes_from_fitness
from .growth import draw_fitness
from .homogeneous import (
    KKTReport,
    MinmaxSolution,
    MsaTrace,
    _solution_from_counts,
    _trace,
    closed_form_solution,
    verify_kkt,
)

__all__ = [
    "BRUTE_FORCE_LIMIT",
    "TieredPopulation",
    "TieredSolution",
    "PathSelection",
    "sample_tiered",
    "closed_form_tiered",
    "path_cost",
    "best_path",
    "brute_force_best_path",
    "msa_a1",
    "verify_kkt_tiered",
]

BRUTE_FORCE_LIMIT = 10**6


@dataclass(frozen=True)
class TieredPopulation:
    """Ordered tiers of nodes; ``tiers[k]`` is tier ``k``."""

    tiers: tuple

    def __post_init__(self):
        tiers = tuple(tuple(t) for t in self.tiers)
        if not tiers:
            raise InvalidInputError("a tiered population needs at least one tier")
        for k, tier in enumerate(tiers):
            if not tier:
                raise InvalidInputError(f"tier {k} is empty")
            for node in tier:
                if not isinstance(node, NodeRecord):
                    raise InvalidInputError(f"tier {k} holds a non-NodeRecord entry {node!r}")
            ids = [n.id for n in tier]
            if len(set(ids)) != len(ids):
                raise InvalidInputError(f"tier {k} has duplicate node ids")
        object.__setattr__(self, "tiers", tiers)

    @classmethod
    def from_fitness(cls, tiers: Sequence[Sequence[float]]) -> "TieredPopulation":
        """Build a population whose node ids count from 0 within each tier."""
        return cls(tuple(tuple(NodeRecord(i, v) for i, v in enumerate(t)) for t in tiers))

    def __len__(self):
        return len(self.tiers)

    @property
    def sizes(self) -> tuple:
        return tuple(len(t) for t in self.tiers)

    @property
    def path_count(self) -> int:
        return math.prod(self.sizes)

    def fitness(self, k: int) -> np.ndarray:
        return np.array([n.fitness for n in self.tiers[k]], dtype=np.float64)

    def unfitness(self, k: int) -> np.ndarray:
        return 1.0 / self.fitness(k)

    def ids(self, k: int) -> list:
        return [n.id for n in self.tiers[k]]

    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.sizes)]).astype(np.int64)


@dataclass(frozen=True)
class PathSelection:
    """One node per tier: ``choice[k]`` is the node id chosen in tier ``k``."""

    choice: tuple

    def __post_init__(self):
        object.__setattr__(self, "choice", tuple(int(c) for c in self.choice))

    def __len__(self):
        return len(self.choice)

    def __getitem__(self, k):
        return self.choice[k]

    def as_mapping(self) -> dict:
        return dict(enumerate(self.choice))


@dataclass(frozen=True)
class TieredSolution:
    """Per-tier attachment ``p``, duals ``q``, tier values and multipliers."""

    p: tuple
    q: tuple
    values: tuple
    lambdas: tuple

    def tier(self, k: int) -> MinmaxSolution:
        return MinmaxSolution(p=self.p[k], q=self.q[k], value=self.values[k], lam=self.lambdas[k])

    @property
    def objective(self) -> float:
        """Sum of the tier values."""
        return math.fsum(self.values)

    @classmethod
    def from_tiers(cls, sols: Sequence[MinmaxSolution]) -> "TieredSolution":
        return cls(
            p=tuple(s.p for s in sols),
            q=tuple(s.q for s in sols),
            values=tuple(s.value for s in sols),
            lambdas=tuple(s.lam for s in sols),
        )


def sample_tiered(specs: Sequence[LognormalSpec], sizes: Sequence[int], seed: int) -> TieredPopulation:
    """Log-normal fitness per tier from one seeded stream, tier 0 drawn first.

    Tier ``k`` consumes the next ``sizes[k]`` normals of the stream, so the
    values match those ``grow_tiered`` draws for the same seed.
    """
    specs = [s if isinstance(s, LognormalSpec) else LognormalSpec(*s) for s in specs]
    if len(specs) != len(sizes):
        raise InvalidInputError(f"{len(specs)} tier specs but {len(sizes)} tier sizes")
    stream = RandomStream(seed)
    return TieredPopulation(tuple(
        tuple(nodes_from_fitness(draw_fitness(spec, n, stream))) for spec, n in zip(specs, sizes)
    ))


def closed_form_tiered(pop: TieredPopulation) -> TieredSolution:
    """Per-tier proportional solution: ``p_ik = phi_ik / sum_j phi_jk``, ``V_k = 1/sum_j phi_jk``."""
    return TieredSolution.from_tiers([closed_form_solution(pop.fitness(k)) for k in range(len(pop))])


def _as_duals(pop, duals):
    if len(duals) != len(pop):
        raise InvalidInputError(f"expected duals for {len(pop)} tiers, got {len(duals)}")
    out = []
    for k, q in enumerate(duals):
        q = np.asarray(q, dtype=np.float64)
        if q.shape != (pop.sizes[k],):
            raise InvalidInputError(f"tier {k} duals have shape {q.shape}, expected ({pop.sizes[k]},)")
        out.append(q)
    return out


def path_cost(pop: TieredPopulation, duals, path: PathSelection) -> float:
    """Sum over tiers of ``U_jk * q_jk`` for the nodes on ``path``."""
    duals = _as_duals(pop, duals)
    total = 0.0
    for k, node_id in enumerate(path.choice):
        j = pop.ids(k).index(node_id)
        total += pop.tiers[k][j].unfitness * duals[k][j]
    return total


def best_path(pop: TieredPopulation, duals) -> PathSelection:
    """Least-cost path under dual-weighted unfitness, without enumerating paths.

    The cost is a sum of one term per tier, so the shortest route through
    the layered graph takes the cheapest node of every tier independently.
    Ties go to the lowest position within the tier.
    """
    duals = _as_duals(pop, duals)
    choice = []
    for k, q in enumerate(duals):
        j = int(np.argmin(pop.unfitness(k) * q))
        choice.append(pop.tiers[k][j].id)
    return PathSelection(tuple(choice))


def brute_force_best_path(pop: TieredPopulation, duals, limit: int = BRUTE_FORCE_LIMIT) -> PathSelection:
    """Least-cost path by enumerating every path; a test oracle for ``best_path``.

    Path costs are summed exactly as rationals, so rounding cannot create
    or break ties. Paths are visited in lexicographic order of tier
    positions and only a strictly cheaper path replaces the incumbent,
    which reproduces the lowest-position tie-break of ``best_path``.
    """
    if pop.path_count > limit:
        raise OracleLimitError(f"{pop.path_count} paths exceed the enumeration limit {limit}")
    duals = _as_duals(pop, duals)
    weights = [[Fraction(float(w)) for w in pop.unfitness(k) * q] for k, q in enumerate(duals)]
    best, best_cost = None, None
    for combo in itertools.product(*(range(n) for n in pop.sizes)):
        cost = sum(weights[k][j] for k, j in enumerate(combo))
        if best_cost is None or cost < best_cost:
            best, best_cost = combo, cost
    return PathSelection(tuple(pop.tiers[k][j].id for k, j in enumerate(best)))


def msa_a1(pop: TieredPopulation, max_iterations: int = 1_000_000, gap_tolerance: float = 1e-3,
           trace_stride: int = 0, record_paths: bool = True):
    """Solve the tiered problem by successive averages over best paths.

    Each iteration takes the best path under the averaged tier duals, moves
    every tier's node-usage average toward that path with weight ``1/m``,
    lets each tier's demon pick its most exposed node, and averages the
    duals likewise. The run stops when every tier's relative gap is at most
    ``gap_tolerance`` at the same iteration.

    Returns
    -------
    solution : TieredSolution
    traces : list of MsaTrace
        One per tier. ``traces[k].converged`` reports the joint stopping
        condition, so it is the same for every tier.
    paths : set of PathSelection, or None
        Distinct best paths found along the way; ``None`` when
        ``record_paths`` is False.
    """
    if max_iterations < 1:
        raise InvalidInputError("max_iterations must be positive")
    if not gap_tolerance > 0:
        raise InvalidInputError("gap_tolerance must be positive")
    if trace_stride < 0:
        raise InvalidInputError("trace_stride must be non-negative")
    offsets = pop.offsets()
    U = np.concatenate([pop.unfitness(k) for k in range(len(pop))])
    res = _msa.run(U, offsets, int(max_iterations), float(gap_tolerance), int(trace_stride),
                   record_paths=record_paths)
    sols, traces = [], []
    for k in range(len(pop)):
        a, b = offsets[k], offsets[k + 1]
        sols.append(_solution_from_counts(U[a:b], res.p_counts[a:b], res.q_counts[a:b],
                                          res.iterations))
        traces.append(_trace(res, k, a, b))
    paths = None
    if record_paths:
        paths = {
            PathSelection(tuple(pop.tiers[k][pos - offsets[k]].id for k, pos in enumerate(row)))
            for row in res.paths
        }
    return TieredSolution.from_tiers(sols), traces, paths


def verify_kkt_tiered(pop: TieredPopulation, candidate: TieredSolution,
                      tolerance: float = 1e-9) -> list[KKTReport]:
    """Run the homogeneous optimality checks on every tier; one report per tier."""
    if len(candidate.p) != len(pop):
        raise InvalidInputError(f"candidate covers {len(candidate.p)} tiers, population has {len(pop)}")
    return [verify_kkt(pop.fitness(k), candidate.tier(k), tolerance) for k in range(len(pop))]
