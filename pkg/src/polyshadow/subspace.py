"""Random 2-planes in R^3 and R^4 and their orthonormal projection frames.

A plane in R^3 is the orthogonal complement of a unit vector U; in R^4 it is
the complement of an orthonormal pair (U, V).  The frame rows are the first two
rows of the rotation matrices

    M3(U)    = [[s, -xy/s, -xz/s], [0, z/s, -y/s]],           s = sqrt(1 - x^2)
    M4(U, V) = [[s, -(pq+xy)/s, -(pr+xz)/s, -(ps'+xw)/s],
                [0, (rw-s'z)/s, -(qw-s'y)/s, (qz-ry)/s]],      s = sqrt(1 - p^2 - x^2)

with U = (x, y, z[, w]) and V = (p, q, r, s').  Near the singular set
(s^2 <= 1e-12) the inputs are cyclically permuted first and the resulting rows
permuted back, which gives an orthonormal frame of the same plane.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .polytopes import Polytope

POLE_EPS = 1e-12


@dataclass(frozen=True)
class ProjectionFrame:
    dim: int
    rows: np.ndarray  # (2, dim)

    @property
    def e1(self) -> np.ndarray:
        return self.rows[0]

    @property
    def e2(self) -> np.ndarray:
        return self.rows[1]


@dataclass(frozen=True)
class SphericalAngles:
    theta: float
    phi: float
    psi: float | None = None
    kappa: float | None = None
    lam: float | None = None

    def __post_init__(self):
        two_pi, pi = 2 * np.pi, np.pi
        if not (0 <= self.theta < two_pi and 0 <= self.phi <= pi):
            raise ValueError("theta must lie in [0, 2pi) and phi in [0, pi]")
        four = (self.psi, self.kappa, self.lam)
        if any(a is not None for a in four):
            if any(a is None for a in four):
                raise ValueError("psi, kappa and lam must be given together")
            if not (0 <= self.psi <= pi and 0 <= self.kappa < two_pi and 0 <= self.lam <= pi):
                raise ValueError("psi, lam must lie in [0, pi] and kappa in [0, 2pi)")


def _check_dim(dim):
    if dim not in (3, 4):
        raise ConfigurationError(f"random planes are only supported in dimension 3 or 4, got {dim}")


# --- sampling ---------------------------------------------------------------

def sample_units(dim: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` points uniform on the unit sphere S^{dim-1} (normalized Gaussians)."""
    g = rng.standard_normal((n, dim))
    r = np.sqrt(np.einsum("ij,ij->i", g, g))
    bad = r == 0.0
    while bad.any():  # probability zero, kept for totality
        g[bad] = rng.standard_normal((int(bad.sum()), dim))
        r = np.sqrt(np.einsum("ij,ij->i", g, g))
        bad = r == 0.0
    return g / r[:, None]


def sample_unit(dim: int, rng: np.random.Generator) -> np.ndarray:
    _check_dim(dim)
    return sample_units(dim, 1, rng)[0]


def orthogonal_basis(u: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the complement of unit vectors ``u`` in R^4.

    Returns an array (..., 3, 4) holding (-y,x,-w,z), (-z,w,x,-y), (-w,-z,y,x).
    """
    x, y, z, w = np.moveaxis(np.asarray(u, dtype=float), -1, 0)
    a = np.stack([-y, x, -w, z], axis=-1)
    b = np.stack([-z, w, x, -y], axis=-1)
    c = np.stack([-w, -z, y, x], axis=-1)
    return np.stack([a, b, c], axis=-2)


def orthogonal_point(u, kappa: float, lam: float) -> np.ndarray:
    """Point on the unit 2-sphere orthogonal to ``u`` in R^4 at angles (kappa, lam)."""
    u = np.asarray(u, dtype=float)
    if u.shape != (4,):
        raise ConfigurationError("orthogonal_point needs a 4-vector")
    coef = np.array([np.cos(kappa) * np.sin(lam), np.sin(kappa) * np.sin(lam), np.cos(lam)])
    return coef @ orthogonal_basis(u)


def sample_pairs(n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Uniform U on S^3, then V uniform on the 2-sphere orthogonal to U."""
    u = sample_units(4, n, rng)
    coef = sample_units(3, n, rng)
    v = np.einsum("ik,ikj->ij", coef, orthogonal_basis(u))
    return u, v


# --- frames -----------------------------------------------------------------

def _m3_rows(u):
    x, y, z = u[:, 0], u[:, 1], u[:, 2]
    s = np.sqrt(np.maximum(1.0 - x * x, 0.0))
    out = np.empty((u.shape[0], 2, 3))
    out[:, 0, 0] = s
    out[:, 0, 1] = -x * y / s
    out[:, 0, 2] = -x * z / s
    out[:, 1, 0] = 0.0
    out[:, 1, 1] = z / s
    out[:, 1, 2] = -y / s
    return out


def _m4_rows(u, v):
    x, y, z, w = u.T
    p, q, r, s4 = v.T
    s = np.sqrt(np.maximum(1.0 - p * p - x * x, 0.0))
    out = np.empty((u.shape[0], 2, 4))
    out[:, 0, 0] = s
    out[:, 0, 1] = -(p * q + x * y) / s
    out[:, 0, 2] = -(p * r + x * z) / s
    out[:, 0, 3] = -(p * s4 + x * w) / s
    out[:, 1, 0] = 0.0
    out[:, 1, 1] = (r * w - s4 * z) / s
    out[:, 1, 2] = -(q * w - s4 * y) / s
    out[:, 1, 3] = (q * z - r * y) / s
    return out


def _shifted(rows_fn, vecs, weight):
    """Apply ``rows_fn`` with a cyclic coordinate shift wherever ``weight`` is tiny."""
    bad = 1.0 - weight <= POLE_EPS
    if not bad.any():
        return rows_fn(*vecs)
    out = np.empty((vecs[0].shape[0], 2, vecs[0].shape[1]))
    good = ~bad
    if good.any():
        out[good] = rows_fn(*(a[good] for a in vecs))
    sub = [a[bad] for a in vecs]
    mass = sum(a * a for a in sub)
    shift = np.argmin(mass, axis=1)
    for k in np.unique(shift):
        sel = shift == k
        rolled = [np.roll(a[sel], -k, axis=1) for a in sub]
        rows = rows_fn(*rolled)
        idx = np.flatnonzero(bad)[sel]
        out[idx] = np.roll(rows, k, axis=2)
    return out


def frames3(u: np.ndarray) -> np.ndarray:
    """Batched frame rows, shape (B, 2, 3), for unit vectors ``u`` of shape (B, 3)."""
    u = np.atleast_2d(np.asarray(u, dtype=float))
    return _shifted(_m3_rows, (u,), u[:, 0] ** 2)


def frames4(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    u = np.atleast_2d(np.asarray(u, dtype=float))
    v = np.atleast_2d(np.asarray(v, dtype=float))
    return _shifted(_m4_rows, (u, v), u[:, 0] ** 2 + v[:, 0] ** 2)


def frame3(u) -> ProjectionFrame:
    u = np.asarray(u, dtype=float)
    if u.shape != (3,):
        raise ConfigurationError("frame3 needs a 3-vector")
    return ProjectionFrame(3, frames3(u[None])[0])


def frame4(u, v) -> ProjectionFrame:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != (4,) or v.shape != (4,):
        raise ConfigurationError("frame4 needs two 4-vectors")
    return ProjectionFrame(4, frames4(u[None], v[None])[0])


# --- spherical coordinates --------------------------------------------------

def angles_to_unit(a: SphericalAngles, dim: int):
    """U (and V when dim == 4) from spherical angles.

    Weight for dim 3: sin(phi) / (4 pi).  For dim 4:
    sin(phi) sin(psi)^2 / (2 pi^2) times sin(lam) / (4 pi).
    """
    _check_dim(dim)
    st, ct = np.sin(a.theta), np.cos(a.theta)
    sp, cp = np.sin(a.phi), np.cos(a.phi)
    if dim == 3:
        return np.array([ct * sp, st * sp, cp])
    if a.psi is None:
        raise ValueError("dimension 4 needs psi, kappa and lam")
    ss, cs = np.sin(a.psi), np.cos(a.psi)
    u = np.array([ct * sp * ss, st * sp * ss, cp * ss, cs])
    return u, orthogonal_point(u, a.kappa, a.lam)


def units_from_angles3(theta, phi) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    sp = np.sin(phi)
    return np.stack([np.cos(theta) * sp, np.sin(theta) * sp, np.cos(phi)], axis=-1)


# --- projection -------------------------------------------------------------

def project(frame: ProjectionFrame, p: Polytope) -> np.ndarray:
    """Images (e1.v, e2.v) of every vertex, shape (m, 2)."""
    if frame.dim != p.dim:
        raise ConfigurationError("frame and polytope dimensions differ")
    return p.vertices @ frame.rows.T


def project_batch(rows: np.ndarray, p: Polytope) -> np.ndarray:
    """Images for a batch of frame rows (B, 2, n); result (B, m, 2)."""
    return np.ascontiguousarray(np.einsum("mj,bkj->bmk", p.vertices, rows))


# --- reproducible streams ---------------------------------------------------

def block_rng(seed: int, block: int, stream: int = 0) -> np.random.Generator:
    """Counter-based Philox generator for one fixed-size block of samples.

    Keyed only by (seed, stream, block) so results do not depend on how blocks
    are distributed over workers.
    """
    ss = np.random.SeedSequence([int(seed), int(stream), int(block)])
    return np.random.Generator(np.random.Philox(ss))
