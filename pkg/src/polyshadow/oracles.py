"""Closed-form shadow area and perimeter on fundamental angular domains.

Directions are written U = (cos t sin f, sin t sin f, cos f).  The cube is
described on the first octant (t, f in [0, pi/2]), the tetrahedron on the
first dodecant (t in [0, pi/3]) and the octahedron on the first hexadecant
(t in [0, pi/4]), each with f in [0, pi/2].  Everything else follows by
symmetry, with multiplicities 8, 12 and 16.  These formulas are independent of
the hull pipeline and are used to cross-check it.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import estimators
from .closedforms import arccot
from .errors import DomainError
from .polytopes import Name, make_polytope

R2, R3, R6 = math.sqrt(2.0), math.sqrt(3.0), math.sqrt(6.0)
GAMMA = arccot(2 * R2)
DELTA = arccot(R2)

BODIES = {
    "cube3": (Name.CUBE, 0.5 * math.pi, 8),
    "simplex3": (Name.SIMPLEX, math.pi / 3, 12),
    "crosspolytope3": (Name.CROSSPOLYTOPE, 0.25 * math.pi, 16),
}


def _unit(theta, phi):
    sp = math.sin(phi)
    return math.cos(theta) * sp, math.sin(theta) * sp, math.cos(phi)


def _sqrt(v):
    return math.sqrt(max(v, 0.0))


def _arcsec_big(v):
    # arcsec for v >= 1, stable as v -> infinity
    return math.acos(min(1.0, 1.0 / v)) if math.isfinite(v) else 0.5 * math.pi


def _tan(phi):
    c = math.cos(phi)
    return math.inf if c <= 0 else math.sin(phi) / c


def cube_oracle(u) -> tuple[float, float]:
    x, y, z = (float(c) for c in u)
    if min(x, y, z) < 0:
        raise DomainError("cube oracle needs U in the first octant")
    cw = x + y + z
    pw = 2 * (_sqrt(1 - x * x) + _sqrt(1 - y * y) + _sqrt(1 - z * z))
    return cw, pw


# --- tetrahedron -----------------------------------------------------------

def simplex_alpha(phi: float) -> float:
    if phi < GAMMA:
        return 0.0
    return _arcsec_big(2 * R2 * _tan(phi))


def simplex_beta(phi: float) -> float:
    return 2 * math.pi / 3 - simplex_alpha(phi)


def simplex_branch(theta: float, phi: float) -> int:
    if not (0 <= theta <= math.pi / 3 and 0 <= phi <= 0.5 * math.pi):
        raise DomainError("(theta, phi) outside the first dodecant")
    a, b = simplex_alpha(phi), simplex_beta(phi)
    if DELTA <= phi and b <= theta:
        return 1
    if GAMMA <= phi and theta <= min(a, b):
        return 2
    if phi <= DELTA and a <= theta:
        return 3
    raise DomainError("(theta, phi) not covered by any branch")


def simplex_formula(branch: int, x: float, y: float, z: float) -> tuple[float, float]:
    if branch == 1:
        cw = (R6 * x + 3 * R2 * y + R3 * z) / 12
        pw = (3 * _sqrt(4 - (R3 * x - y) ** 2)
              + R3 * _sqrt(12 - (x - R3 * y + 2 * R2 * z) ** 2)
              + 2 * R3 * _sqrt(3 - (x - R2 * z) ** 2)) / 6
    elif branch == 2:
        cw = R3 / 6 * (R2 * x + z)
        pw = R3 / 6 * (R3 * _sqrt(4 - (R3 * x - y) ** 2) + R3 * _sqrt(4 - (R3 * x + y) ** 2)
                       + _sqrt(12 - (x - R3 * y + 2 * R2 * z) ** 2)
                       + _sqrt(12 - (x + R3 * y + 2 * R2 * z) ** 2))
    elif branch == 3:
        cw = R3 / 4 * z
        pw = 0.5 * (_sqrt(4 - (R3 * x - y) ** 2) + 2 * _sqrt(1 - y * y)
                    + _sqrt(4 - (R3 * x + y) ** 2))
    else:
        raise DomainError(f"no simplex branch {branch}")
    return cw, pw


def simplex_oracle(theta: float, phi: float) -> tuple[float, float, int]:
    branch = simplex_branch(theta, phi)
    return (*simplex_formula(branch, *_unit(theta, phi)), branch)


# --- octahedron ------------------------------------------------------------

def cross_alpha(phi: float) -> float:
    if phi < DELTA:
        return 0.25 * math.pi
    return 0.25 * math.pi - _arcsec_big(R2 * _tan(phi))


def cross_beta(phi: float) -> float:
    return -cross_alpha(phi)


def cross_branch(theta: float, phi: float) -> int:
    if not (0 <= theta <= 0.25 * math.pi and 0 <= phi <= 0.5 * math.pi):
        raise DomainError("(theta, phi) outside the first hexadecant")
    a, b = cross_alpha(phi), cross_beta(phi)
    if DELTA <= phi and max(a, b) <= theta:
        return 1
    if 0.25 * math.pi <= phi and theta <= b:
        return 2
    if phi <= 0.25 * math.pi and theta <= a:
        return 3
    raise DomainError("(theta, phi) not covered by any branch")


def cross_formula(branch: int, x: float, y: float, z: float) -> tuple[float, float]:
    if branch == 1:
        cw = 0.5 * (x + y + z)
        pw = R2 * (_sqrt(2 - (x + y) ** 2) + _sqrt(2 - (x + z) ** 2) + _sqrt(2 - (y + z) ** 2))
    elif branch == 2:
        cw = x
        pw = R2 * (_sqrt(2 - (y - z) ** 2) + _sqrt(2 - (y + z) ** 2))
    elif branch == 3:
        cw = z
        pw = R2 * (_sqrt(2 - (x - y) ** 2) + _sqrt(2 - (x + y) ** 2))
    else:
        raise DomainError(f"no crosspolytope branch {branch}")
    return cw, pw


def cross_oracle(theta: float, phi: float) -> tuple[float, float, int]:
    branch = cross_branch(theta, phi)
    return (*cross_formula(branch, *_unit(theta, phi)), branch)


def oracle(body: str, theta: float, phi: float) -> tuple[float, float, int]:
    """(cw, pw, branch) for ``body`` in its fundamental domain."""
    if body == "cube3":
        if not (0 <= theta <= 0.5 * math.pi and 0 <= phi <= 0.5 * math.pi):
            raise DomainError("(theta, phi) outside the first octant")
        return (*cube_oracle(_unit(theta, phi)), 1)
    if body == "simplex3":
        return simplex_oracle(theta, phi)
    if body == "crosspolytope3":
        return cross_oracle(theta, phi)
    raise DomainError(f"no oracle for {body}")


# --- sampling and cross-checks ----------------------------------------------

def sample_domain(body: str, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Angles distributed like U uniform on the sphere, folded into the domain.

    U is folded into the first octant; points with theta beyond the domain's
    limit are rejected.
    """
    _, theta_max, _ = BODIES[body]
    thetas, phis = [], []
    have = 0
    while have < n:
        g = rng.standard_normal((2 * (n - have) + 16, 3))
        u = np.abs(g / np.linalg.norm(g, axis=1)[:, None])
        t = np.arctan2(u[:, 1], u[:, 0])
        keep = t <= theta_max
        thetas.append(t[keep])
        phis.append(np.arccos(np.clip(u[keep, 2], -1, 1)))
        have += int(keep.sum())
    return np.concatenate(thetas)[:n], np.concatenate(phis)[:n]


@dataclass
class CrossCheck:
    body: str
    n_points: int
    max_abs_err_cw: float
    max_abs_err_pw: float
    branch_counts: dict[int, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "body": self.body, "n_points": self.n_points,
            "max_abs_err_cw": float(self.max_abs_err_cw),
            "max_abs_err_pw": float(self.max_abs_err_pw),
            "branch_counts": {str(k): v for k, v in sorted(self.branch_counts.items())},
        }


def cross_check(body: str, n_points: int = 10_000, seed: int = 0) -> CrossCheck:
    """Compare oracle values with the hull pipeline at random domain points."""
    from .subspace import frames3, units_from_angles3

    name, _, _ = BODIES[body]
    poly = make_polytope(name, 3)
    rng = np.random.default_rng(seed)
    theta, phi = sample_domain(body, n_points, rng)
    cw_h, pw_h, nv = estimators.shadows_from_rows(poly, frames3(units_from_angles3(theta, phi)))
    ok = nv > 0
    counts: dict[int, int] = {}
    err_cw = err_pw = 0.0
    for t, f, c, p, good in zip(theta, phi, cw_h, pw_h, ok):
        cw, pw, br = oracle(body, float(t), float(f))
        counts[br] = counts.get(br, 0) + 1
        if good:
            err_cw = max(err_cw, abs(cw - float(c)))
            err_pw = max(err_pw, abs(pw - float(p)))
    return CrossCheck(body, n_points, err_cw, err_pw, counts)


def _panels(breaks, nodes_per_panel):
    x, w = np.polynomial.legendre.leggauss(nodes_per_panel)
    breaks = sorted(set(breaks))
    xs, ws = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b - a > 1e-15:
            xs.append(0.5 * (b - a) * (x + 1) + a)
            ws.append(0.5 * (b - a) * w)
    return np.concatenate(xs), np.concatenate(ws)


def _theta_breaks(body, phi):
    if body == "simplex3":
        return [simplex_alpha(phi), simplex_beta(phi)]
    if body == "crosspolytope3":
        return [cross_alpha(phi), cross_beta(phi)]
    return []


def oracle_moments(body: str, nodes_per_panel: int = 48) -> dict[str, float]:
    """Full-sphere moments by integrating the oracle over its domain.

    Panels break at the branch boundaries, so each panel sees one smooth
    formula.
    """
    _, theta_max, mult = BODIES[body]
    phis, wphis = _panels([0.0, GAMMA, DELTA, 0.25 * math.pi, 0.5 * math.pi], nodes_per_panel)
    acc = dict.fromkeys(estimators.MOMENTS, 0.0)
    for f, wf in zip(phis, wphis):
        inner = [0.0, theta_max] + [b for b in _theta_breaks(body, f) if 0 < b < theta_max]
        ts, wts = _panels(inner, nodes_per_panel)
        sf = math.sin(f)
        for t, wt in zip(ts, wts):
            cw, pw, _ = oracle(body, float(t), float(f))
            w = wt * wf * sf
            acc["cw"] += w * cw
            acc["cw2"] += w * cw * cw
            acc["pw"] += w * pw
            acc["pw2"] += w * pw * pw
            acc["cwpw"] += w * cw * pw
    return {k: v * mult / (4 * math.pi) for k, v in acc.items()}


# --- widths of the square and triangle --------------------------------------

WIDTH_SUPPORT = {
    Name.SQUARE: (1.0, R2),
    Name.TRIANGLE: (R3 / 2, 1.0),
}


def width_density(body, w: float) -> float:
    """Density of the width of the unit square or unit equilateral triangle."""
    name = Name(body) if not isinstance(body, Name) else body
    lo, hi = WIDTH_SUPPORT[name]
    if not lo <= w < hi:
        return 0.0
    if name is Name.SQUARE:
        return 4 / math.pi / math.sqrt(2 - w * w)
    return 6 / math.pi / math.sqrt(1 - w * w)


def width_cdf(body, w: float) -> float:
    name = Name(body) if not isinstance(body, Name) else body
    lo, hi = WIDTH_SUPPORT[name]
    if w <= lo:
        return 0.0
    if w >= hi:
        return 1.0
    if name is Name.SQUARE:
        return 4 / math.pi * (math.asin(w / R2) - 0.25 * math.pi)
    return 6 / math.pi * (math.asin(w) - math.pi / 3)


def sample_widths(body, n: int, rng: np.random.Generator) -> np.ndarray:
    """Widths along uniform random directions, from the vertex projections."""
    poly = make_polytope(body, 2)
    t = rng.uniform(0.0, 2 * math.pi, n)
    proj = np.outer(np.cos(t), poly.vertices[:, 0]) + np.outer(np.sin(t), poly.vertices[:, 1])
    return proj.max(axis=1) - proj.min(axis=1)


@dataclass(frozen=True)
class ChiSquare:
    statistic: float
    dof: int
    p_value: float


def width_chi2(body, n: int = 100_000, bins: int = 20, seed: int = 0) -> ChiSquare:
    """Pearson chi-square of sampled widths against the width density.

    Bins have equal probability under the density (edges from its inverse CDF).
    """
    name = Name(body) if not isinstance(body, Name) else body
    q = (np.arange(1, bins) / bins)
    if name is Name.SQUARE:
        edges = R2 * np.sin(q * math.pi / 4 + math.pi / 4)
    else:
        edges = np.sin(q * math.pi / 6 + math.pi / 3)
    w = sample_widths(name, n, np.random.default_rng(seed))
    observed = np.bincount(np.searchsorted(edges, w), minlength=bins)
    expected = n / bins
    chi2 = float(((observed - expected) ** 2 / expected).sum())
    dof = bins - 1
    return ChiSquare(chi2, dof, float(stats.chi2.sf(chi2, dof)))


# --- intrinsic volumes of a box ----------------------------------------------

def box_intrinsic_volumes(*sides: float) -> tuple[float, ...]:
    """Elementary symmetric polynomials V_1..V_n of the side lengths."""
    if any(z < 0 for z in sides):
        raise DomainError("side lengths must be nonnegative")
    return tuple(
        float(sum(math.prod(c) for c in itertools.combinations(sides, j)))
        for j in range(1, len(sides) + 1)
    )


# --- the octahedron / doubled tetrahedron area identity ---------------------

def kolmogorov_sf(lam: float) -> float:
    """Survival function of the limiting Kolmogorov distribution."""
    if lam < 0.2:
        return 1.0
    total = 0.0
    for k in range(1, 101):
        term = math.exp(-2 * k * k * lam * lam)
        total += term if k % 2 else -term
        if term < 1e-17:
            break
    return min(1.0, max(0.0, 2 * total))


def ks_2samp(a, b) -> tuple[float, float]:
    """Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    n, m = a.size, b.size
    grid = np.concatenate([a, b])
    d = float(np.max(np.abs(np.searchsorted(a, grid, side="right") / n
                            - np.searchsorted(b, grid, side="right") / m)))
    en = math.sqrt(n * m / (n + m))
    return d, kolmogorov_sf((en + 0.12 + 0.11 / en) * d)


@dataclass(frozen=True)
class IdentityReport:
    n_samples: int
    seed: int
    ks_statistic: float
    p_value: float
    verdict: str
    mean_octa: float
    mean_twice_tetra: float
    mean_diff: float
    se_diff: float
    alpha: float = 0.01

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def distribution_identity_test(n_samples: int = 100_000, seed: int = 0, workers: int = 1,
                               alpha: float = 0.01) -> IdentityReport:
    """Compare the law of the octahedron's shadow area with twice the tetrahedron's.

    The verdict is "consistent" or "inconsistent" at level ``alpha``; a KS test
    cannot prove the identity.
    """
    if n_samples < 10_000:
        raise ValueError("need at least 10^4 samples per body")
    octa = estimators.sample_shadows(make_polytope(Name.CROSSPOLYTOPE, 3), n_samples, seed,
                                     workers, stream=1).cw
    tetra = 2 * estimators.sample_shadows(make_polytope(Name.SIMPLEX, 3), n_samples, seed,
                                          workers, stream=2).cw
    d, p = ks_2samp(octa, tetra)
    se = math.sqrt(octa.var(ddof=1) / octa.size + tetra.var(ddof=1) / tetra.size)
    return IdentityReport(
        n_samples=n_samples, seed=seed, ks_statistic=d, p_value=p,
        verdict="consistent" if p > alpha else "inconsistent",
        mean_octa=float(octa.mean()), mean_twice_tetra=float(tetra.mean()),
        mean_diff=float(tetra.mean() - octa.mean()), se_diff=se, alpha=alpha,
    )
