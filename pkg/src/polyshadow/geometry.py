"""Planar convex hulls, polygon area and perimeter.

The hull is Andrew's monotone chain with exact turn tests.  Afterwards a
vertex whose turn has cross product within ``1e-12 * scale**2`` of zero counts
as collinear and is dropped, where ``scale`` is the largest coordinate
magnitude.  The batched
kernel used by the estimators shares the same code path as ``convex_hull``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba as nb
import numpy as np

from .errors import DegenerateShadowError

COLLINEAR_RTOL = 1e-12


@nb.njit(cache=True, nogil=True)
def _hull_indices(pts, out):
    """Write hull vertex indices (CCW) into ``out``; return their count.

    Returns 0 when all points are collinear within tolerance.
    """
    m = pts.shape[0]
    scale = 0.0
    for i in range(m):
        for j in range(2):
            a = abs(pts[i, j])
            if a > scale:
                scale = a
    if scale == 0.0 or m < 3:
        return 0
    tol = COLLINEAR_RTOL * scale * scale

    order = np.empty(m, dtype=np.int64)
    for i in range(m):
        order[i] = i
    for i in range(1, m):  # insertion sort, m <= 16
        key = order[i]
        kx = pts[key, 0]
        ky = pts[key, 1]
        j = i - 1
        while j >= 0 and (pts[order[j], 0] > kx
                          or (pts[order[j], 0] == kx and pts[order[j], 1] > ky)):
            order[j + 1] = order[j]
            j -= 1
        order[j + 1] = key

    hull = np.empty(2 * m, dtype=np.int64)
    k = 0
    for t in range(m):
        p = order[t]
        while k >= 2:
            o = hull[k - 2]
            a = hull[k - 1]
            c = ((pts[a, 0] - pts[o, 0]) * (pts[p, 1] - pts[o, 1])
                 - (pts[a, 1] - pts[o, 1]) * (pts[p, 0] - pts[o, 0]))
            if c <= 0.0:
                k -= 1
            else:
                break
        hull[k] = p
        k += 1
    lower = k + 1
    for t in range(m - 2, -1, -1):
        p = order[t]
        while k >= lower:
            o = hull[k - 2]
            a = hull[k - 1]
            c = ((pts[a, 0] - pts[o, 0]) * (pts[p, 1] - pts[o, 1])
                 - (pts[a, 1] - pts[o, 1]) * (pts[p, 0] - pts[o, 0]))
            if c <= 0.0:
                k -= 1
            else:
                break
        hull[k] = p
        k += 1
    k -= 1  # last point repeats the first

    # drop near-collinear vertices; on a convex cycle the flagged vertex is
    # geometrically between its neighbours, which the x-sorted chain cannot promise
    changed = True
    while changed and k >= 3:
        changed = False
        for i in range(k):
            o = hull[(i - 1) % k]
            a = hull[i]
            p = hull[(i + 1) % k]
            c = ((pts[a, 0] - pts[o, 0]) * (pts[p, 1] - pts[o, 1])
                 - (pts[a, 1] - pts[o, 1]) * (pts[p, 0] - pts[o, 0]))
            if c <= tol:
                for j in range(i, k - 1):
                    hull[j] = hull[j + 1]
                k -= 1
                changed = True
                break
    if k < 3:
        return 0
    for i in range(k):
        out[i] = hull[i]
    return k


@nb.njit(cache=True, nogil=True)
def _area_perimeter(pts, idx, k):
    a = 0.0
    per = 0.0
    for i in range(k):
        p = idx[i]
        q = idx[(i + 1) % k]
        a += pts[p, 0] * pts[q, 1] - pts[q, 0] * pts[p, 1]
        per += np.hypot(pts[q, 0] - pts[p, 0], pts[q, 1] - pts[p, 1])
    return 0.5 * a, per


@nb.njit(cache=True, nogil=True)
def shadow_batch(images, cw, pw, nverts):
    """Fill area, perimeter and hull size for a batch of projected point sets.

    ``images`` has shape (B, m, 2).  Degenerate shadows get ``nverts = 0`` and
    zero area and perimeter.
    """
    b, m = images.shape[0], images.shape[1]
    idx = np.empty(m, dtype=np.int64)
    for s in range(b):
        pts = images[s]
        k = _hull_indices(pts, idx)
        if k == 0:
            cw[s] = 0.0
            pw[s] = 0.0
            nverts[s] = 0
            continue
        a, per = _area_perimeter(pts, idx, k)
        scale = 0.0
        for i in range(m):
            scale = max(scale, abs(pts[i, 0]), abs(pts[i, 1]))
        if a <= COLLINEAR_RTOL * scale * scale:
            cw[s] = 0.0
            pw[s] = 0.0
            nverts[s] = 0
            continue
        cw[s] = a
        pw[s] = per
        nverts[s] = k


@dataclass(frozen=True)
class Polygon:
    """Strictly convex polygon, vertices counter-clockwise."""

    vertices: np.ndarray

    def __len__(self) -> int:
        return self.vertices.shape[0]


def convex_hull(points) -> Polygon:
    pts = np.ascontiguousarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("expected an (m, 2) array of points")
    idx = np.empty(pts.shape[0], dtype=np.int64)
    k = _hull_indices(pts, idx)
    if k == 0:
        raise DegenerateShadowError("points are collinear or coincident")
    verts = pts[idx[:k]].copy()
    verts.setflags(write=False)
    return Polygon(verts)


def area(p: Polygon) -> float:
    v = p.vertices
    w = np.roll(v, -1, axis=0)
    return 0.5 * float(np.sum(v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]))


def perimeter(p: Polygon) -> float:
    v = p.vertices
    d = np.roll(v, -1, axis=0) - v
    return float(np.sum(np.hypot(d[:, 0], d[:, 1])))
