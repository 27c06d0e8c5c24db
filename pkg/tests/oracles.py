"""Independent oracles for the minimax problems; no package solver code is used."""

import numpy as np


def simplex_grid_minmax(U, resolution=1000):
    """Smallest ``max_j p_j U_j`` over the 3-node probability simplex grid ``{i/resolution}``."""
    U = np.asarray(U, dtype=np.float64)
    assert U.shape == (3,)
    i, j = np.meshgrid(np.arange(resolution + 1), np.arange(resolution + 1), indexing="ij")
    keep = i + j <= resolution
    p0 = i[keep] / resolution
    p1 = j[keep] / resolution
    p2 = (resolution - i[keep] - j[keep]) / resolution
    worst = np.maximum(np.maximum(p0 * U[0], p1 * U[1]), p2 * U[2])
    k = int(np.argmin(worst))
    return float(worst[k]), np.array([p0[k], p1[k], p2[k]])


def simplex_grid_minmax_any(U, resolution):
    """Grid minimum of ``max_j p_j U_j`` for 1 to 3 nodes."""
    U = np.asarray(U, dtype=np.float64)
    if U.size == 1:
        return float(U[0])
    if U.size == 2:
        a = np.arange(resolution + 1) / resolution
        return float(np.min(np.maximum(a * U[0], (1 - a) * U[1])))
    return simplex_grid_minmax(U, resolution)[0]
