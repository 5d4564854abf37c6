"""Moment estimators for the area (cw) and perimeter (pw) of random shadows."""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import geometry, subspace
from .errors import ConfigurationError, UnsupportedMethodError
from .polytopes import Polytope

BLOCK_SIZE = 1 << 15

MOMENTS = ("cw", "cw2", "pw", "pw2", "cwpw")


@dataclass(frozen=True)
class ShadowSample:
    cw: float
    pw: float
    nverts: int


@dataclass(frozen=True)
class ShadowBatch:
    """Per-sample arrays, in sample-index order."""

    cw: np.ndarray
    pw: np.ndarray
    nverts: np.ndarray
    degenerate_count: int = 0

    def __len__(self):
        return self.cw.shape[0]


@dataclass(frozen=True)
class MomentReport:
    polytope: str
    method: str
    n_samples: int
    seed: int | None
    mean_cw: float
    mean_cw2: float
    mean_pw: float
    mean_pw2: float
    mean_cwpw: float
    se_cw: float
    se_cw2: float
    se_pw: float
    se_pw2: float
    se_cwpw: float
    correlation: float
    se_correlation: float
    mean_nverts: float
    se_nverts: float
    vertex_hist: dict[int, float] = field(default_factory=dict)
    vertex_se: dict[int, float] = field(default_factory=dict)
    degenerate_count: int = 0

    def mean(self, key: str) -> float:
        return getattr(self, f"mean_{key}")

    def se(self, key: str) -> float:
        return getattr(self, f"se_{key}")

    def to_dict(self) -> dict:
        d = {}
        for k, v in self.__dict__.items():
            if k in ("vertex_hist", "vertex_se"):
                d[k] = {str(n): v[n] for n in sorted(v)}
            else:
                d[k] = v
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_num)

    def csv_row(self) -> dict:
        row = {}
        for k, v in self.to_dict().items():
            if isinstance(v, dict):
                row[k] = ";".join(f"{n}:{_fmt(p)}" for n, p in v.items())
            elif isinstance(v, float):
                row[k] = _fmt(v)
            else:
                row[k] = "" if v is None else str(v)
        return row


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _num(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    raise TypeError(type(x))


def reports_to_csv(reports) -> str:
    rows = [r.csv_row() for r in reports]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


# --- single shadows ---------------------------------------------------------

def shadow(p: Polytope, frame: subspace.ProjectionFrame) -> ShadowSample:
    poly = geometry.convex_hull(subspace.project(frame, p))
    return ShadowSample(geometry.area(poly), geometry.perimeter(poly), len(poly))


def shadows_from_rows(p: Polytope, rows: np.ndarray):
    """Vectorized shadows for frame rows (B, 2, n); nverts == 0 marks degeneracy."""
    images = subspace.project_batch(rows, p)
    b = images.shape[0]
    cw = np.empty(b)
    pw = np.empty(b)
    nv = np.empty(b, dtype=np.int64)
    geometry.shadow_batch(images, cw, pw, nv)
    return cw, pw, nv


def _random_rows(dim, n, rng):
    if dim == 3:
        return subspace.frames3(subspace.sample_units(3, n, rng))
    u, v = subspace.sample_pairs(n, rng)
    return subspace.frames4(u, v)


def _block(p: Polytope, seed: int, block: int, size: int, stream: int):
    rng = subspace.block_rng(seed, block, stream)
    cw, pw, nv = shadows_from_rows(p, _random_rows(p.dim, size, rng))
    degenerate = 0
    bad = np.flatnonzero(nv == 0)
    while bad.size:  # redraw from the same stream
        degenerate += bad.size
        c2, p2, n2 = shadows_from_rows(p, _random_rows(p.dim, bad.size, rng))
        cw[bad], pw[bad], nv[bad] = c2, p2, n2
        bad = bad[n2 == 0]
    return cw, pw, nv, degenerate


def sample_shadows(p: Polytope, n_samples: int, seed: int, workers: int = 1,
                   stream: int = 0) -> ShadowBatch:
    """Draw ``n_samples`` random shadows of ``p``.

    Samples are generated in fixed blocks of ``BLOCK_SIZE``, each with its own
    counter-based stream, and concatenated in block order, so the result is the
    same for every ``workers`` value.
    """
    if p.dim not in (3, 4):
        raise ConfigurationError("random shadows need a 3D or 4D polytope")
    n_blocks = -(-n_samples // BLOCK_SIZE)
    sizes = [min(BLOCK_SIZE, n_samples - b * BLOCK_SIZE) for b in range(n_blocks)]

    def run(b):
        return _block(p, seed, b, sizes[b], stream)

    if workers > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(run, range(n_blocks)))
    else:
        parts = [run(b) for b in range(n_blocks)]
    cw = np.concatenate([q[0] for q in parts])
    pw = np.concatenate([q[1] for q in parts])
    nv = np.concatenate([q[2] for q in parts])
    return ShadowBatch(cw, pw, nv, sum(q[3] for q in parts))


# --- moment reports ---------------------------------------------------------

def _weighted_report(p, method, cw, pw, nv, weights, n, seed, degenerate, with_se):
    """Moments under ``weights``; ``weights=None`` means equal weights (plain means)."""
    series = {"cw": cw, "cw2": cw * cw, "pw": pw, "pw2": pw * pw, "cwpw": cw * pw}
    if weights is None:
        means = {k: float(np.mean(x)) for k, x in series.items()}
    else:
        w = weights / weights.sum()
        means = {k: float(np.dot(w, x)) for k, x in series.items()}
    var_cw = max(means["cw2"] - means["cw"] ** 2, 0.0)
    var_pw = max(means["pw2"] - means["pw"] ** 2, 0.0)
    cov = means["cwpw"] - means["cw"] * means["pw"]
    corr = cov / math.sqrt(var_cw * var_pw) if var_cw > 0 and var_pw > 0 else float("nan")

    ses = {k: 0.0 for k in series}
    se_corr = 0.0
    if with_se:
        for k, x in series.items():
            ses[k] = float(np.std(x, ddof=1) / math.sqrt(n))
        # delta method through the influence function of Pearson's r
        a = (cw - means["cw"]) / math.sqrt(var_cw)
        b = (pw - means["pw"]) / math.sqrt(var_pw)
        infl = a * b - 0.5 * corr * (a * a + b * b)
        se_corr = float(np.std(infl, ddof=1) / math.sqrt(n))

    hist, vse = {}, {}
    for k in np.unique(nv):
        mask = nv == k
        prob = float(mask.sum()) / n if weights is None else float(w[mask].sum())
        hist[int(k)] = prob
        vse[int(k)] = math.sqrt(prob * (1 - prob) / n) if with_se else 0.0
    mean_nv = float(np.mean(nv)) if weights is None else float(np.dot(w, nv))
    se_nv = float(np.std(nv, ddof=1) / math.sqrt(n)) if with_se else 0.0

    return MomentReport(
        polytope=p.label, method=method, n_samples=n, seed=seed,
        mean_cw=means["cw"], mean_cw2=means["cw2"], mean_pw=means["pw"],
        mean_pw2=means["pw2"], mean_cwpw=means["cwpw"],
        se_cw=ses["cw"], se_cw2=ses["cw2"], se_pw=ses["pw"], se_pw2=ses["pw2"],
        se_cwpw=ses["cwpw"], correlation=corr, se_correlation=se_corr,
        mean_nverts=mean_nv, se_nverts=se_nv,
        vertex_hist=hist, vertex_se=vse, degenerate_count=degenerate,
    )


def report_from_batch(p: Polytope, batch: ShadowBatch, seed: int | None) -> MomentReport:
    n = len(batch)
    return _weighted_report(p, "MonteCarlo", batch.cw, batch.pw, batch.nverts,
                            None, n, seed, batch.degenerate_count, True)


def estimate_mc(p: Polytope, n_samples: int, seed: int = 0, workers: int = 1) -> MomentReport:
    if n_samples < 2:
        raise ValueError("need at least two samples")
    batch = sample_shadows(p, n_samples, seed, workers)
    return report_from_batch(p, batch, seed)


def facet_normals(p: Polytope) -> np.ndarray:
    """Unit facet normals of a 3D polytope, one per +-pair, by brute force."""
    v = p.vertices
    found = []
    for i, j, k in itertools.combinations(range(len(v)), 3):
        n = np.cross(v[j] - v[i], v[k] - v[i])
        norm = np.linalg.norm(n)
        if norm < 1e-9:
            continue
        n /= norm
        side = (v - v[i]) @ n
        if side.max() > 1e-9 and side.min() < -1e-9:
            continue
        if not any(abs(abs(n @ m) - 1.0) < 1e-9 for m in found):
            found.append(n)
    return np.array(found)


def edge_directions(p: Polytope) -> np.ndarray:
    """Unit directions of the edges of a 3D polytope (shortest vertex pairs).

    Valid for the regular bodies here, where every edge has the minimal length.
    """
    v = p.vertices
    diffs = [v[j] - v[i] for i, j in itertools.combinations(range(len(v)), 2)]
    lengths = np.array([np.linalg.norm(d) for d in diffs])
    keep = lengths < lengths.min() * (1 + 1e-9)
    return np.array([d / l for d, l, k in zip(diffs, lengths, keep) if k])


def _gl_panels(breaks, total):
    """Gauss-Legendre nodes on consecutive panels, ``total`` nodes shared by length."""
    breaks = np.unique(breaks)
    span = breaks[-1] - breaks[0]
    xs, ws = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b - a < 1e-14:
            continue
        k = max(4, int(round(total * (b - a) / span)))
        x, w = np.polynomial.legendre.leggauss(k)
        xs.append(0.5 * (b - a) * (x + 1.0) + a)
        ws.append(0.5 * (b - a) * w)
    return np.concatenate(xs), np.concatenate(ws)


def quadrature_nodes3(p: Polytope, grid_theta: int, grid_phi: int):
    """Nodes (theta, phi) and weights sin(phi)/(4 pi) dtheta dphi on the sphere.

    The shadow area and perimeter are smooth except where U crosses a plane
    parallel to a facet.  Panels break at those great circles: phi at the
    circles' extreme latitudes, theta at each circle's crossing of the current
    latitude.  Every panel uses Gauss-Legendre nodes.
    """
    normals = facet_normals(p)
    edges = edge_directions(p)
    phi_breaks = [0.0, 0.5 * np.pi, np.pi]
    theta_fixed = [0.0, 2 * np.pi]
    for n in normals:
        top = math.sqrt(max(1.0 - n[2] ** 2, 0.0))
        lo = math.acos(min(top, 1.0))
        phi_breaks += [lo, np.pi - lo]
    for d in edges:
        # perimeter has a conical point where U is parallel to an edge
        lat = math.acos(max(-1.0, min(1.0, d[2])))
        phi_breaks += [lat, np.pi - lat]
        if math.hypot(d[0], d[1]) > 1e-12:
            az = math.atan2(d[1], d[0]) % (2 * np.pi)
            theta_fixed += [az, (az + np.pi) % (2 * np.pi)]
    phis, wphis = _gl_panels(np.array(phi_breaks), grid_phi)

    thetas, phis_out, weights = [], [], []
    for phi, wphi in zip(phis, wphis):
        breaks = list(theta_fixed)
        cot = math.cos(phi) / math.sin(phi)
        for n in normals:
            r = math.hypot(n[0], n[1])
            if r < 1e-12:
                continue
            c = -n[2] * cot / r
            if abs(c) > 1.0:
                continue
            t0 = math.atan2(n[1], n[0])
            d = math.acos(c)
            breaks += [(t0 + d) % (2 * np.pi), (t0 - d) % (2 * np.pi)]
        th, wth = _gl_panels(np.array(breaks), grid_theta)
        thetas.append(th)
        phis_out.append(np.full(th.shape, phi))
        weights.append(wth * wphi * math.sin(phi) / (4 * np.pi))
    return np.concatenate(thetas), np.concatenate(phis_out), np.concatenate(weights)


def estimate_quadrature3(p: Polytope, grid_theta: int = 256, grid_phi: int = 256) -> MomentReport:
    """Panelled Gauss-Legendre evaluation over (theta, phi), weight sin(phi)/(4 pi)."""
    if p.dim != 3:
        raise UnsupportedMethodError("quadrature is only available for 3D polytopes")
    if grid_theta < 8 or grid_phi < 8:
        raise ValueError("quadrature grids need at least 8 nodes")
    theta, phi, weights = quadrature_nodes3(p, grid_theta, grid_phi)
    cw, pw, nv = shadows_from_rows(p, subspace.frames3(subspace.units_from_angles3(theta, phi)))
    if (nv == 0).any():
        raise RuntimeError("quadrature node produced a degenerate shadow")
    return _weighted_report(p, "Quadrature", cw, pw, nv, weights, weights.size,
                            None, 0, False)


def vertex_distribution(p: Polytope, n_samples: int, seed: int = 0, workers: int = 1):
    """Vertex-count frequencies with binomial standard errors.

    Returns ``(probabilities, stderrs, expected_count, expected_count_se)``.
    """
    r = estimate_mc(p, n_samples, seed, workers)
    return r.vertex_hist, r.vertex_se, r.mean_nverts, r.se_nverts
