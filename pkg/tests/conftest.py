import numpy as np
import pytest

from symbidisk import AlphaGrid, GPoint, NodeSet


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def solver_grid():
    return AlphaGrid.solver_default()


@pytest.fixture
def diagonal_pair():
    """Nodes symmetrized from z = +-0.5; every coordinate image is -+0.5."""
    return NodeSet.from_pairs([(1.0, 0.25), (-1.0, 0.25)])


def random_gpoint(rng, rmax=0.9):
    r = rmax * np.sqrt(rng.random(2))
    th = rng.random(2) * 2.0 * np.pi
    z1, z2 = r[0] * np.exp(1j * th[0]), r[1] * np.exp(1j * th[1])
    return GPoint(z1 + z2, z1 * z2)


def random_nodes(rng, n, rmax=0.85, min_sep=1e-2):
    pts = []
    while len(pts) < n:
        q = random_gpoint(rng, rmax)
        if all(abs(q.s - o.s) + abs(q.p - o.p) > min_sep for o in pts):
            pts.append(q)
    return NodeSet(tuple(pts))
