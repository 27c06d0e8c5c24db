"""The jumping engine against step-by-step reference runs and plain float averaging."""

import numpy as np
import pytest

from minmax_attach import _msa
from minmax_attach.tiered import TieredPopulation, brute_force_best_path


def random_instance(rng, trial):
    nblk = int(rng.integers(1, 4))
    sizes = rng.integers(1, 7, size=nblk)
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
    kind = trial % 3
    if kind == 0:
        phi = rng.lognormal(0.0, rng.uniform(0.0, 3.0), offsets[-1])
    elif kind == 1:  # many exact ties
        phi = rng.integers(1, 4, offsets[-1]).astype(float)
    else:
        phi = np.ones(offsets[-1])
    return 1.0 / phi, offsets


@pytest.mark.parametrize("chunk", range(4))
def test_engine_matches_reference(chunk):
    rng = np.random.default_rng(1000 + chunk)
    for trial in range(60):
        U, offsets = random_instance(rng, trial)
        tol = [1e-2, 1e-3, 1e-9][trial % 3]
        max_it = int(rng.integers(1, 2500))
        res = _msa.run(U, offsets, max_it, tol, record_paths=True)
        seen = set()
        m, conv, cp, cq = _msa.reference_run(
            U, offsets, max_it, tol, on_iteration=lambda m, c, d, cp, cq: seen.add(tuple(c))
        )
        assert (res.iterations, res.converged) == (m, conv)
        assert np.array_equal(res.p_counts, cp)
        assert np.array_equal(res.q_counts, cq)
        assert res.paths == seen


def test_engine_matches_reference_across_log_buffer_flushes():
    rng = np.random.default_rng(7)
    U = 1.0 / rng.lognormal(0, 1, 12)
    offsets = np.array([0, 4, 8, 12])
    res = _msa.run(U, offsets, 3000, 1e-12, record_paths=True, log_rows=3)
    seen = set()
    _msa.reference_run(U, offsets, 3000, 1e-12, on_iteration=lambda m, c, d, cp, cq: seen.add(tuple(c)))
    assert res.paths == seen


@pytest.mark.parametrize("limit", [0, 63, 64])
def test_paths_without_flag_table(monkeypatch, limit):
    # below the table limit every change of choice is logged and deduplicated afterwards
    monkeypatch.setattr(_msa, "SEEN_TABLE_LIMIT", limit)
    rng = np.random.default_rng(11)
    U = 1.0 / rng.lognormal(0, 1, 12)
    offsets = np.array([0, 4, 8, 12])
    res = _msa.run(U, offsets, 3000, 1e-12, record_paths=True, log_rows=5)
    seen = set()
    _msa.reference_run(U, offsets, 3000, 1e-12, on_iteration=lambda m, c, d, cp, cq: seen.add(tuple(c)))
    assert res.paths == seen


def test_recorded_bounds_match_reference():
    rng = np.random.default_rng(3)
    U = 1.0 / rng.lognormal(0, 1, 8)
    offsets = np.array([0, 8])
    res = _msa.run(U, offsets, 1000, 1e-15, trace_stride=7)
    expected = {}

    def grab(m, c, d, cp, cq):
        expected[m] = (np.max(U * cp) / m, np.min(U * cq) / m, cp / m, cq / m)

    _msa.reference_run(U, offsets, 1000, 1e-15, on_iteration=grab)
    for row, m in enumerate(res.record_iterations):
        assert res.upper[row, 0] == expected[m][0]
        assert res.lower[row, 0] == expected[m][1]
    for row, m in enumerate(res.snapshot_iterations):
        assert m % 7 == 0
        assert np.array_equal(res.p_snapshots[row], expected[m][2])
        assert np.array_equal(res.q_snapshots[row], expected[m][3])


def test_record_iterations_are_log_marks_stride_and_final():
    U = 1.0 / np.array([1.0, 2.0, 5.0])
    res = _msa.run(U, np.array([0, 3]), 1234, 1e-15, trace_stride=500)
    assert res.record_iterations.tolist() == [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 1234]
    assert res.snapshot_iterations.tolist() == [500, 1000]


def test_log_marks():
    assert _msa.log_marks(60) == [1, 2, 5, 10, 20, 50]
    assert _msa.log_marks(1) == [1]


def float_averaging_replay(U, iterations):
    """Successive averages stepped one iteration at a time in floats, p* started uniform."""
    n = U.size
    q_avg = np.full(n, 1.0 / n)
    p_avg = np.full(n, 1.0 / n)
    for m in range(1, iterations + 1):
        p = np.zeros(n)
        p[np.argmin(U * q_avg)] = 1.0
        p_avg = (1.0 / m) * p + (1.0 - 1.0 / m) * p_avg
        q = np.zeros(n)
        q[np.argmax(p_avg * U)] = 1.0
        q_avg = (1.0 / m) * q + (1.0 - 1.0 / m) * q_avg
    return p_avg, q_avg


@pytest.mark.parametrize("seed", range(5))
def test_counts_equal_literal_float_averaging(seed):
    rng = np.random.default_rng(seed)
    U = 1.0 / rng.lognormal(0, 1, 6)
    p_lit, q_lit = float_averaging_replay(U, 400)
    res = _msa.run(U, np.array([0, 6]), 400, 1e-300)
    np.testing.assert_allclose(res.p_counts / 400, p_lit, rtol=0, atol=1e-12)
    np.testing.assert_allclose(res.q_counts / 400, q_lit, rtol=0, atol=1e-12)


@pytest.mark.parametrize("seed", range(3))
def test_tiered_counts_equal_float_replay_with_enumerated_paths(seed):
    rng = np.random.default_rng(50 + seed)
    pop = TieredPopulation.from_fitness([rng.lognormal(0, 1, n) for n in (3, 2, 4)])
    q_avg = [np.full(n, 1.0 / n) for n in pop.sizes]
    p_avg = [np.zeros(n) for n in pop.sizes]
    iterations = 300
    for m in range(1, iterations + 1):
        path = brute_force_best_path(pop, q_avg)
        for k in range(len(pop)):
            delta = np.zeros(pop.sizes[k])
            delta[pop.ids(k).index(path[k])] = 1.0
            p_avg[k] = (1.0 / m) * delta + (1.0 - 1.0 / m) * p_avg[k]
            q = np.zeros(pop.sizes[k])
            q[np.argmax(p_avg[k] * pop.unfitness(k))] = 1.0
            q_avg[k] = (1.0 / m) * q + (1.0 - 1.0 / m) * q_avg[k]
    U = np.concatenate([pop.unfitness(k) for k in range(len(pop))])
    res = _msa.run(U, pop.offsets(), iterations, 1e-300)
    np.testing.assert_allclose(res.p_counts / iterations, np.concatenate(p_avg), atol=1e-12)
    np.testing.assert_allclose(res.q_counts / iterations, np.concatenate(q_avg), atol=1e-12)


def test_sandwich_and_averaging_identity_every_iteration():
    rng = np.random.default_rng(11)
    phi = rng.lognormal(0, 1, 7)
    U = 1.0 / phi
    value = 1.0 / phi.sum()
    tallies = {"p": np.zeros(7), "q": np.zeros(7)}

    def check(m, choice, demon, cp, cq):
        tallies["p"][choice[0]] += 1
        tallies["q"][demon[0]] += 1
        assert np.array_equal(cp, tallies["p"]) and np.array_equal(cq, tallies["q"])
        p, q = cp / m, cq / m
        assert np.min(U * q) <= value + 1e-9
        assert value <= np.max(p * U) + 1e-9
        assert np.max(p * U) - np.min(U * q) >= -1e-12

    _msa.reference_run(U, np.array([0, 7]), 5000, 1e-300, on_iteration=check)


def test_single_node_converges_at_first_iteration():
    res = _msa.run(np.array([0.5]), np.array([0, 1]), 100, 1e-9)
    assert res.iterations == 1 and res.converged
    assert res.p_counts.tolist() == [1.0] and res.q_counts.tolist() == [1.0]
