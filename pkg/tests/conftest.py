import numpy as np
import pytest

from lppgeo import LatticeWindow, sample_weight_field


@pytest.fixture
def small_window():
    return LatticeWindow(0, 7, 0, 7)


@pytest.fixture
def small_field(small_window):
    return sample_weight_field(small_window, 12345)


def brute_force_passage(weights: np.ndarray) -> np.ndarray:
    """O(4^n) oracle: max path weight from (0,0) to each site, both
    endpoint weights included except the terminal one is excluded.

    Independent of the library recursion: enumerates every up-right path
    by recursion on the last step.
    """
    nx, ny = weights.shape
    G = np.full((nx, ny), -np.inf)

    def best(i, j):
        if G[i, j] > -np.inf:
            return G[i, j]
        if i == 0 and j == 0:
            G[0, 0] = 0.0
            return 0.0
        cands = []
        if i > 0:
            cands.append(best(i - 1, j) + weights[i - 1, j])
        if j > 0:
            cands.append(best(i, j - 1) + weights[i, j - 1])
        G[i, j] = max(cands)
        return G[i, j]

    for i in range(nx):
        for j in range(ny):
            best(i, j)
    return G
