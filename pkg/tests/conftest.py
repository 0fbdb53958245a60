import numpy as np
import pytest

from devineq.bipartite import WeightedBipartitePanel


def make_panel(wages, employment=None, year=1998):
    """Panel with one year slice from plain nested lists/arrays."""
    w = np.asarray(wages, dtype=float)
    e = np.asarray(employment, dtype=float) if employment is not None else w.copy()
    regions = tuple(f"r{i}" for i in range(w.shape[0]))
    sectors = tuple(f"s{j}" for j in range(w.shape[1]))
    return WeightedBipartitePanel(
        regions=regions, sectors=sectors, wages={year: w}, employment={year: e}
    )


@pytest.fixture
def tiny_panel():
    # the 2x2 hand-oracle slice: W = [[2,0],[1,1]], E likewise
    return make_panel([[2.0, 0.0], [1.0, 1.0]])


def brute_force_share_ratio(matrix):
    """Independent loop-based oracle for the share-ratio (RCA/LQ) formula."""
    m = np.asarray(matrix, dtype=float)
    total = m.sum()
    out = np.zeros_like(m)
    for r in range(m.shape[0]):
        for s in range(m.shape[1]):
            col = m[:, s].sum()
            row = m[r, :].sum()
            if col > 0 and row > 0:
                out[r, s] = (m[r, s] / col) / (row / total)
    return out
