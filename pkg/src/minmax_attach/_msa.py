"""Successive-averages engine shared by the homogeneous and tiered solvers.

Both solvers play the same game: in every block (a whole homogeneous
population, or one tier) the system picks the node with the smallest
``U_j * q*_j`` and the demon picks the node with the largest ``p*_j * U_j``.
With uniform ``1/m`` averaging, ``p*`` and ``q*`` after ``m`` iterations are
exactly the best-response counts divided by ``m``, so the engine stores the
integer counts (as float64, exact below 2**53) and compares ``U_j * count_j``.
The common factor ``1/m`` never changes an argmin or argmax.

Best responses stay fixed for long runs of iterations. ``_advance`` finds the
length of each run in closed form and applies it in one step, which yields
the same counts, iteration numbers and stopping point as stepping one
iteration at a time (``reference_run`` does that and is the test oracle).

Ties always go to the lowest node index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

# _advance return codes
_REACHED_STOP = 0
_CONVERGED = 1
_LOG_FULL = 2

# largest path count for which distinct paths are tracked with a flag table
SEEN_TABLE_LIMIT = 1 << 24


@numba.njit(cache=True)
def _rel_gap(A, B):
    return (A - B) / A


@numba.njit(cache=True)
def _largest_true(pred_args, lo, hi, kind):
    # Binary search for the largest s in [lo, hi] with _run_holds(s) true,
    # given that it holds at lo and is monotone (true then false).
    if _run_holds(pred_args, hi, kind):
        return hi
    while hi - lo > 1:
        mid = lo + (hi - lo) // 2
        if _run_holds(pred_args, mid, kind):
            lo = mid
        else:
            hi = mid
    return lo


@numba.njit(cache=True)
def _run_holds(a, s, kind):
    # kind 0: system and demon disagree. The demon's node i stays the argmax
    # while the system's node j, whose count grows, does not overtake it.
    #   a = (U_j, cp_j before the run, U_i * cp_i, 1.0 if i < j else 0.0)
    # kind 1: both pick node j. j stays the system's argmin while its growing
    # dual count keeps it below the lower-index minimum L and at or below the
    # higher-index minimum R.
    #   a = (U_j, cq_j before the run, L, R)
    if kind == 0:
        v = a[0] * (a[1] + s + 1.0)
        return v < a[2] or (v == a[2] and a[3] == 1.0)
    v = a[0] * (a[1] + s)
    return v < a[2] and v <= a[3]


@numba.njit(cache=True)
def _all_converged(U, kinds, js, iis, cp, cq, others, s, tol):
    for k in range(kinds.shape[0]):
        j = js[k]
        i = iis[k]
        if kinds[k] == 0:
            A = U[i] * cp[i]
            B = U[j] * cq[j]
        else:
            A = U[j] * (cp[j] + s + 1.0)
            B = U[j] * (cq[j] + s + 1.0)
            if others[k] < B:
                B = others[k]
        if not _rel_gap(A, B) <= tol:
            return False
    return True


@numba.njit(cache=True)
def _first_step(U, offsets, cp, cq, tol):
    # Iteration 1: q* is uniform within each block, so the system's choice
    # is the node with the smallest unfitness.
    nblk = offsets.shape[0] - 1
    choice = np.empty(nblk, dtype=np.int64)
    done = True
    for k in range(nblk):
        a, b = offsets[k], offsets[k + 1]
        j = a
        for x in range(a + 1, b):
            if U[x] < U[j]:
                j = x
        cp[j] += 1.0
        i = a
        for x in range(a + 1, b):
            if U[x] * cp[x] > U[i] * cp[i]:
                i = x
        cq[i] += 1.0
        A = U[a] * cp[a]
        B = U[a] * cq[a]
        for x in range(a + 1, b):
            if U[x] * cp[x] > A:
                A = U[x] * cp[x]
            if U[x] * cq[x] < B:
                B = U[x] * cq[x]
        if not _rel_gap(A, B) <= tol:
            done = False
        choice[k] = j
    return choice, done


@numba.njit(cache=True)
def _plan_block(U, a, b, cp, cq, tmax, args):
    # Best responses in block [a, b) and how many iterations (at most tmax)
    # they stay unchanged. Returns (kind, j, i, other_min, length).
    j = a
    for x in range(a + 1, b):
        if U[x] * cq[x] < U[j] * cq[j]:
            j = x
    # demon's argmax after the system's count at j goes up by one
    i = a
    best = U[a] * (cp[a] + 1.0) if a == j else U[a] * cp[a]
    for x in range(a + 1, b):
        v = U[x] * (cp[x] + 1.0) if x == j else U[x] * cp[x]
        if v > best:
            best = v
            i = x
    if i != j:
        args[0] = U[j]
        args[1] = cp[j]
        args[2] = U[i] * cp[i]
        args[3] = 1.0 if i < j else 0.0
        return 0, j, i, 0.0, _largest_true(args, 0, tmax - 1, 0) + 1
    L = np.inf
    R = np.inf
    for x in range(a, j):
        if U[x] * cq[x] < L:
            L = U[x] * cq[x]
    for x in range(j + 1, b):
        if U[x] * cq[x] < R:
            R = U[x] * cq[x]
    args[0] = U[j]
    args[1] = cq[j]
    args[2] = L
    args[3] = R
    # s = 0 holds because j is the current argmin
    t = 1
    if tmax >= 2 and _run_holds(args, 1, 1):
        t = _largest_true(args, 1, tmax - 1, 1) + 1
    return 1, j, i, min(L, R), t


@numba.njit(cache=True)
def _is_new_path(choice, offsets, seen, strides):
    # with a non-empty ``seen`` table a path is new only on its first visit;
    # without one every change of choice counts as new
    if seen.shape[0] == 0:
        return True
    code = 0
    for k in range(strides.shape[0]):
        code += (choice[k] - offsets[k]) * strides[k]
    if seen[code]:
        return False
    seen[code] = 1
    return True


@numba.njit(cache=True)
def _advance(U, offsets, cp, cq, m, m_stop, tol, log, nlog, seen, strides):
    """Execute iterations ``m .. m_stop`` in place, stopping early on convergence.

    Returns ``(last_iteration, status, nlog)``. The system's per-block choice
    is appended to ``log`` (when it has rows) whenever it changes, or, when
    ``seen`` is non-empty, only the first time each path occurs.
    """
    nblk = offsets.shape[0] - 1
    kinds = np.empty(nblk, dtype=np.int64)
    js = np.empty(nblk, dtype=np.int64)
    iis = np.empty(nblk, dtype=np.int64)
    others = np.empty(nblk, dtype=np.float64)
    run_end = np.zeros(nblk, dtype=np.int64)
    args = np.empty(4, dtype=np.float64)
    cap = log.shape[0]
    last = m - 1

    if m == 1 and m_stop >= 1:
        if nlog >= cap and cap > 0:
            return last, _LOG_FULL, nlog
        choice, done = _first_step(U, offsets, cp, cq, tol)
        if cap > 0 and _is_new_path(choice, offsets, seen, strides):
            log[nlog, :] = choice
            nlog += 1
        last = 1
        m = 2
        if done:
            return last, _CONVERGED, nlog

    while m <= m_stop:
        if cap > 0 and nlog >= cap:
            return last, _LOG_FULL, nlog
        # re-plan only the blocks whose run has ended; a block's run depends
        # on its own counts alone
        T = m_stop - m + 1
        for k in range(nblk):
            if run_end[k] < m:
                kind, j, i, oth, t = _plan_block(
                    U, offsets[k], offsets[k + 1], cp, cq, m_stop - m + 1, args
                )
                kinds[k] = kind
                js[k] = j
                iis[k] = i
                others[k] = oth
                run_end[k] = m + t - 1
            if run_end[k] - m + 1 < T:
                T = run_end[k] - m + 1

        # Within a run the gap is constant for disagreeing blocks and
        # non-increasing for agreeing blocks, except possibly on the run's
        # final iteration. Only the window's last iteration can be a final
        # one, so it is checked on its own.
        converged = True
        if _all_converged(U, kinds, js, iis, cp, cq, others, 0.0, tol):
            s_stop = 0
        elif T >= 3 and _all_converged(U, kinds, js, iis, cp, cq, others, T - 2.0, tol):
            lo, hi = 0, T - 2
            while hi - lo > 1:
                mid = lo + (hi - lo) // 2
                if _all_converged(U, kinds, js, iis, cp, cq, others, float(mid), tol):
                    hi = mid
                else:
                    lo = mid
            s_stop = hi
        elif T >= 2 and _all_converged(U, kinds, js, iis, cp, cq, others, T - 1.0, tol):
            s_stop = T - 1
        else:
            s_stop = T - 1
            converged = False

        n = s_stop + 1.0
        for k in range(nblk):
            cp[js[k]] += n
            cq[iis[k]] += n
        if cap > 0:
            fresh = nlog == 0
            if not fresh:
                for k in range(nblk):
                    if log[nlog - 1, k] != js[k]:
                        fresh = True
                        break
            if fresh and _is_new_path(js, offsets, seen, strides):
                log[nlog, :] = js
                nlog += 1
        last = m + s_stop
        m = last + 1
        if converged:
            return last, _CONVERGED, nlog
    return last, _REACHED_STOP, nlog


def log_marks(limit: int):
    """Iterations 1, 2, 5, 10, 20, 50, ... up to ``limit`` inclusive."""
    out = []
    base = 1
    while base <= limit:
        for f in (1, 2, 5):
            if f * base <= limit:
                out.append(f * base)
        base *= 10
    return out


@dataclass
class EngineResult:
    iterations: int
    converged: bool
    p_counts: np.ndarray
    q_counts: np.ndarray
    # one row per recorded iteration; columns are blocks
    record_iterations: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    snapshot_iterations: np.ndarray
    p_snapshots: np.ndarray
    q_snapshots: np.ndarray
    paths: set | None


def block_bounds(U, offsets, cp, cq):
    """Per-block ``max U*cp`` and ``min U*cq`` (bounds before dividing by m)."""
    up = np.maximum.reduceat(U * cp, offsets[:-1])
    lo = np.minimum.reduceat(U * cq, offsets[:-1])
    return up, lo


def run(U, offsets, max_iterations, tol, trace_stride=0, record_paths=False, log_rows=65536):
    """Drive ``_advance`` and collect bounds, snapshots and discovered paths.

    Bounds are recorded at iterations 1, 2, 5, 10, ... , at every multiple of
    ``trace_stride`` (when positive), and at the final iteration. Per-node
    snapshots are taken only at multiples of ``trace_stride``.
    """
    U = np.ascontiguousarray(U, dtype=np.float64)
    offsets = np.ascontiguousarray(offsets, dtype=np.int64)
    nblk = offsets.size - 1
    cp = np.zeros(U.size)
    cq = np.zeros(U.size)
    log = np.empty((log_rows if record_paths else 0, nblk), dtype=np.int64)
    paths = set() if record_paths else None
    # mixed-radix path codes, last block varying fastest
    sizes = [int(n) for n in np.diff(offsets)]
    strides = np.ones(nblk, dtype=np.int64)
    path_count = 1
    for k in range(nblk - 1, -1, -1):
        if path_count <= SEEN_TABLE_LIMIT:
            strides[k] = path_count
        path_count *= sizes[k]
    seen = np.zeros(path_count if record_paths and path_count <= SEEN_TABLE_LIMIT else 0, dtype=np.uint8)

    marks = iter(log_marks(max_iterations))
    next_mark = next(marks, None)
    rec_it, rec_up, rec_lo = [], [], []
    snap_it, snap_p, snap_q = [], [], []

    def flush(nlog):
        if nlog:
            for row in np.unique(log[:nlog], axis=0):
                paths.add(tuple(int(x) for x in row))

    def record(m):
        up, lo = block_bounds(U, offsets, cp, cq)
        rec_it.append(m)
        rec_up.append(up / m)
        rec_lo.append(lo / m)

    m = 1
    converged = False
    last = 0
    while m <= max_iterations:
        stop = max_iterations
        if next_mark is not None:
            stop = min(stop, next_mark)
        if trace_stride > 0:
            stop = min(stop, (m // trace_stride + 1) * trace_stride if m % trace_stride else m)
        last, status, nlog = _advance(U, offsets, cp, cq, m, stop, float(tol), log, 0, seen, strides)
        if record_paths:
            flush(nlog)
        m = last + 1
        if status == _LOG_FULL:
            continue
        converged = status == _CONVERGED
        at_mark = next_mark is not None and last == next_mark
        if at_mark:
            next_mark = next(marks, None)
        at_snap = trace_stride > 0 and last % trace_stride == 0
        if at_mark or at_snap or converged or last == max_iterations:
            record(last)
        if at_snap:
            snap_it.append(last)
            snap_p.append(cp / last)
            snap_q.append(cq / last)
        if converged:
            break

    n = U.size
    return EngineResult(
        iterations=last,
        converged=converged,
        p_counts=cp,
        q_counts=cq,
        record_iterations=np.array(rec_it, dtype=np.int64),
        upper=np.array(rec_up, dtype=np.float64).reshape(-1, nblk),
        lower=np.array(rec_lo, dtype=np.float64).reshape(-1, nblk),
        snapshot_iterations=np.array(snap_it, dtype=np.int64),
        p_snapshots=np.array(snap_p, dtype=np.float64).reshape(-1, n),
        q_snapshots=np.array(snap_q, dtype=np.float64).reshape(-1, n),
        paths=paths,
    )


def reference_run(U, offsets, max_iterations, tol, on_iteration=None):
    """One-iteration-at-a-time successive averages; the engine's test oracle.

    Follows the tabulated steps literally on counts. ``on_iteration`` is
    called after every iteration as ``on_iteration(m, choice, demon, cp, cq)``.
    Returns ``(iterations, converged, cp, cq)``.
    """
    U = np.asarray(U, dtype=np.float64)
    offsets = np.asarray(offsets, dtype=np.int64)
    blocks = [(int(offsets[k]), int(offsets[k + 1])) for k in range(offsets.size - 1)]
    cp = np.zeros(U.size)
    cq = np.zeros(U.size)
    for m in range(1, max_iterations + 1):
        choice, demon = [], []
        done = True
        for a, b in blocks:
            weighted = U[a:b] * (cq[a:b] if m > 1 else 1.0)
            j = a + int(np.argmin(weighted))
            cp[j] += 1.0
            i = a + int(np.argmax(U[a:b] * cp[a:b]))
            cq[i] += 1.0
            A = float(np.max(U[a:b] * cp[a:b]))
            B = float(np.min(U[a:b] * cq[a:b]))
            if not (A - B) / A <= tol:
                done = False
            choice.append(j)
            demon.append(i)
        if on_iteration is not None:
            on_iteration(m, choice, demon, cp, cq)
        if done:
            return m, True, cp, cq
    return max_iterations, False, cp, cq
