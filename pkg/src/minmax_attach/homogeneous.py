"""Minimax-unfitness attachment for a homogeneous population.

Every node may attach to every other. The attachment distribution ``p``
minimises the worst expected unfitness ``max_j p_j * U_j`` over the
probability simplex. The optimum puts ``p_j`` proportional to fitness and
the value ``V`` equals ``1 / sum(fitness)``. ``msa_a0`` reaches the same
point by successive averaging of best responses in the induced zero-sum
game, and ``verify_kkt`` certifies any candidate against the optimality
conditions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _msa
from .errors import InvalidInputError
from .fitness import fitness_array

__all__ = [
    "MinmaxSolution",
    "MsaTrace",
    "KKTCheck",
    "KKTReport",
    "proportional_attachment",
    "closed_form_solution",
    "msa_a0",
    "verify_kkt",
]

SIMPLEX_TOL = 1e-9


def _check_simplex(name, values):
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise InvalidInputError(f"{name} must be a non-empty 1-d array")
    if (values < 0).any() or abs(values.sum() - 1.0) > SIMPLEX_TOL:
        raise InvalidInputError(f"{name} must be non-negative and sum to 1")
    return values


@dataclass(frozen=True)
class MinmaxSolution:
    """Attachment probabilities ``p``, dual (incidence) probabilities ``q``,
    game value ``value`` and normalisation multiplier ``lam``.

    ``lam`` uses the sign convention in which it equals ``value`` at the
    optimum, so both are non-negative.
    """

    p: np.ndarray
    q: np.ndarray
    value: float
    lam: float

    def __post_init__(self):
        p = _check_simplex("p", self.p)
        q = _check_simplex("q", self.q)
        if p.shape != q.shape:
            raise InvalidInputError("p and q must have the same length")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "lam", float(self.lam))


@dataclass(frozen=True)
class MsaTrace:
    """Bounds history of a successive-averages run.

    ``iterations``, ``upper``, ``lower`` and ``gap`` are aligned arrays.
    ``upper`` is ``max_j p*_j U_j`` and ``lower`` is ``min_j U_j q*_j``; they
    bracket the game value at every iteration. Records are kept at
    iterations 1, 2, 5, 10, 20, 50, ..., at multiples of the trace stride,
    and at the last iteration. ``p_snapshots``/``q_snapshots`` hold one row
    per entry of ``snapshot_iterations`` (empty when the stride is 0).
    """

    iterations: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    snapshot_iterations: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    p_snapshots: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    q_snapshots: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    converged: bool = False

    @property
    def gap(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def relative_gap(self) -> np.ndarray:
        return (self.upper - self.lower) / self.upper

    @property
    def final_iteration(self) -> int:
        return int(self.iterations[-1])

    @property
    def final_gap(self) -> float:
        """Relative gap at the last iteration."""
        return float(self.relative_gap[-1])

    def records(self):
        """Yield ``(iteration, upper, lower, gap)`` tuples."""
        for m, u, lo in zip(self.iterations, self.upper, self.lower):
            yield int(m), float(u), float(lo), float(u - lo)

    def at(self, iteration: int):
        """The ``(upper, lower)`` pair recorded at ``iteration``."""
        hit = np.flatnonzero(self.iterations == iteration)
        if hit.size == 0:
            raise KeyError(f"iteration {iteration} was not recorded")
        k = hit[0]
        return float(self.upper[k]), float(self.lower[k])


def proportional_attachment(nodes) -> np.ndarray:
    """Attachment probabilities proportional to fitness."""
    phi = fitness_array(nodes)
    if phi.size == 0:
        raise InvalidInputError("population must contain at least one node")
    return phi / phi.sum()


def closed_form_solution(nodes) -> MinmaxSolution:
    """Exact minimax solution: ``p = q = phi / sum(phi)``, ``V = lam = 1/sum(phi)``.

    Parameters
    ----------
    nodes : sequence of NodeRecord, sequence of float, or ndarray
        The population's fitness values.
    """
    phi = fitness_array(nodes)
    if phi.size == 0:
        raise InvalidInputError("population must contain at least one node")
    total = phi.sum()
    p = phi / total
    value = 1.0 / total
    return MinmaxSolution(p=p, q=p.copy(), value=value, lam=value)


def msa_a0(nodes, max_iterations: int = 1_000_000, gap_tolerance: float = 1e-3,
           trace_stride: int = 0):
    """Solve the homogeneous problem by the method of successive averages.

    Each iteration the system best-responds to the averaged demon strategy
    (node with the smallest ``U_j q*_j``), the attachment average moves
    toward it with weight ``1/m``, then the demon best-responds to the new
    average (node with the largest ``p*_j U_j``) and the dual average moves
    likewise. Ties go to the lowest index. The run stops once the relative
    gap ``(upper - lower) / upper`` is at most ``gap_tolerance``.

    Returns
    -------
    solution : MinmaxSolution
        Final averages; ``value`` and ``lam`` are ``max_j p*_j U_j``.
    trace : MsaTrace
        Bounds history. ``trace.converged`` is False when ``max_iterations``
        ran out first, in which case the solution is the last iterate.
    """
    phi = fitness_array(nodes)
    if phi.size == 0:
        raise InvalidInputError("population must contain at least one node")
    if max_iterations < 1:
        raise InvalidInputError("max_iterations must be positive")
    if not gap_tolerance > 0:
        raise InvalidInputError("gap_tolerance must be positive")
    if trace_stride < 0:
        raise InvalidInputError("trace_stride must be non-negative")
    U = 1.0 / phi
    res = _msa.run(U, np.array([0, phi.size]), int(max_iterations), float(gap_tolerance),
                   int(trace_stride))
    return _solution_from_counts(U, res.p_counts, res.q_counts, res.iterations), _trace(res, 0)


def _solution_from_counts(U, cp, cq, m):
    p = cp / m
    q = cq / m
    value = float(np.max(p * U))
    return MinmaxSolution(p=p, q=q, value=value, lam=value)


def _trace(res, block, lo=None, hi=None):
    snaps_p = res.p_snapshots if lo is None else res.p_snapshots[:, lo:hi]
    snaps_q = res.q_snapshots if lo is None else res.q_snapshots[:, lo:hi]
    return MsaTrace(
        iterations=res.record_iterations.copy(),
        upper=res.upper[:, block].copy(),
        lower=res.lower[:, block].copy(),
        snapshot_iterations=res.snapshot_iterations.copy(),
        p_snapshots=snaps_p.copy(),
        q_snapshots=snaps_q.copy(),
        converged=res.converged,
    )


@dataclass(frozen=True)
class KKTCheck:
    name: str
    passed: bool
    worst: float  # largest violation found; 0.0 when none
    detail: str = ""


@dataclass(frozen=True)
class KKTReport:
    """Outcome of each optimality condition for one candidate solution."""

    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name) -> KKTCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def __str__(self):
        return "\n".join(
            f"{'PASS' if c.passed else 'FAIL'} {c.name} worst={c.worst:.3e}"
            + (f" ({c.detail})" if c.detail else "")
            for c in self.checks
        )


def verify_kkt(nodes, candidate: MinmaxSolution, tolerance: float = 1e-9) -> KKTReport:
    """Check a candidate against the optimality conditions.

    Conditions, each reported separately:

    - ``feasibility``: ``V >= p_j U_j`` for every node
    - ``complementary_slackness``: ``q_j > tol`` implies ``p_j U_j == V``
    - ``primal_dual_equality``: ``p_j == q_j``
    - ``lambda_equals_value``: ``lam == V``
    - ``simplex_p`` / ``simplex_q``: non-negative and summing to one

    A failing condition is a report entry, never an exception.
    """
    phi = fitness_array(nodes)
    U = 1.0 / phi
    p = np.asarray(candidate.p, dtype=np.float64)
    q = np.asarray(candidate.q, dtype=np.float64)
    if p.shape != U.shape or q.shape != U.shape:
        raise InvalidInputError(
            f"candidate has {p.size} entries but the population has {U.size} nodes"
        )
    V = candidate.value
    pU = p * U
    checks = []

    over = float(np.max(pU - V))
    checks.append(KKTCheck("feasibility", over <= tolerance, max(over, 0.0),
                           f"node {int(np.argmax(pU - V))}" if over > tolerance else ""))

    active = q > tolerance
    slack = np.abs(pU - V)[active]
    worst = float(slack.max()) if slack.size else 0.0
    bad = np.flatnonzero(active & (np.abs(pU - V) > tolerance))
    checks.append(KKTCheck("complementary_slackness", worst <= tolerance, worst,
                           f"nodes {bad.tolist()}" if bad.size else ""))

    diff = float(np.max(np.abs(p - q)))
    checks.append(KKTCheck("primal_dual_equality", diff <= tolerance, diff))

    dl = abs(candidate.lam - V)
    checks.append(KKTCheck("lambda_equals_value", dl <= tolerance, dl))

    for name, v in (("simplex_p", p), ("simplex_q", q)):
        err = max(abs(float(v.sum()) - 1.0), float(max(-v.min(), 0.0)))
        checks.append(KKTCheck(name, err <= tolerance, err))
    return KKTReport(tuple(checks))
