import numpy as np
import pytest

from polyshadow.polytopes import make_polytope


@pytest.fixture(scope="session")
def tetra():
    return make_polytope("simplex", 3)


@pytest.fixture(scope="session")
def cube():
    return make_polytope("cube", 3)


@pytest.fixture(scope="session")
def octa():
    return make_polytope("crosspolytope", 3)


@pytest.fixture
def rng():
    return np.random.default_rng(20120312)


def brute_force_hull(points, tol=1e-12):
    """Extreme points by the O(m^3) supporting-line test, returned as a set of tuples."""
    pts = np.asarray(points, dtype=float)
    m = len(pts)
    extreme = set()
    for i in range(m):
        for j in range(m):
            if i == j or np.allclose(pts[i], pts[j]):
                continue
            d = pts[j] - pts[i]
            cross = d[0] * (pts[:, 1] - pts[i, 1]) - d[1] * (pts[:, 0] - pts[i, 0])
            if np.all(cross >= -tol):
                # i -> j is a hull edge; keep its endpoints only if no point lies past them
                on = np.abs(cross) <= tol
                t = (pts[on] - pts[i]) @ d / (d @ d)
                if t.min() >= -tol and t.max() <= 1 + tol:
                    extreme.add(tuple(np.round(pts[i], 12)))
                    extreme.add(tuple(np.round(pts[j], 12)))
    return extreme
