"""The fixed regular polytopes whose shadows are measured.

All bodies are centred at the origin.  Simplices and crosspolytopes have unit
edge length, cubes have unit side.  Three-dimensional coordinates follow the
classical vertex matrices (tetrahedron with a vertex on the +z axis, cube with
corners at (+-1/2, +-1/2, +-1/2), octahedron at +-e_i/sqrt(2)).
"""
from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError


class Name(str, enum.Enum):
    SIMPLEX = "simplex"
    CUBE = "cube"
    CROSSPOLYTOPE = "crosspolytope"
    SQUARE = "square"
    TRIANGLE = "triangle"


_ALIASES = {
    "tetrahedron": Name.SIMPLEX,
    "tetra": Name.SIMPLEX,
    "octahedron": Name.CROSSPOLYTOPE,
    "octa": Name.CROSSPOLYTOPE,
    "cross": Name.CROSSPOLYTOPE,
}

SUPPORTED = {
    (Name.SIMPLEX, 3), (Name.SIMPLEX, 4),
    (Name.CUBE, 3), (Name.CUBE, 4),
    (Name.CROSSPOLYTOPE, 3), (Name.CROSSPOLYTOPE, 4),
    (Name.SQUARE, 2), (Name.TRIANGLE, 2),
}


@dataclass(frozen=True)
class Polytope:
    name: Name
    dim: int
    vertices: np.ndarray  # shape (m, dim), read-only

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def label(self) -> str:
        return f"{self.name.value}{self.dim}"

    def scaled(self, s: float) -> "Polytope":
        return _freeze(self.name, self.dim, s * self.vertices)

    def to_dict(self) -> dict:
        return {
            "name": self.name.value,
            "dim": self.dim,
            "vertices": [[repr(float(c)) for c in v] for v in self.vertices],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "Polytope":
        verts = np.array([[float(c) for c in v] for v in d["vertices"]])
        return _freeze(parse_name(d["name"]), int(d["dim"]), verts)


def parse_name(name) -> Name:
    if isinstance(name, Name):
        return name
    key = str(name).strip().lower()
    if key in _ALIASES:
        return _ALIASES[key]
    try:
        return Name(key)
    except ValueError:
        raise ConfigurationError(f"unknown polytope {name!r}") from None


def _freeze(name: Name, dim: int, verts: np.ndarray) -> Polytope:
    verts = np.array(verts, dtype=float)
    # lexicographic order so serialized output is stable
    order = np.lexsort(verts.T[::-1])
    verts = np.ascontiguousarray(verts[order])
    verts.setflags(write=False)
    return Polytope(name, dim, verts)


def _regular_simplex(n: int) -> np.ndarray:
    # e_0..e_n in R^{n+1} have pairwise distance sqrt(2); centre them and
    # express in an orthonormal basis of the hyperplane sum(x) = 0
    pts = np.eye(n + 1) / np.sqrt(2.0)
    pts -= pts.mean(axis=0)
    basis = np.zeros((n + 1, n))
    for k in range(1, n + 1):  # Helmert basis
        basis[:k, k - 1] = 1.0
        basis[k, k - 1] = -k
        basis[:, k - 1] /= np.sqrt(k * (k + 1))
    return pts @ basis


def make_polytope(name, dim: int) -> Polytope:
    """Build one of the supported polytopes.

    Raises ConfigurationError for any (name, dim) pair outside the supported
    set: simplex, cube and crosspolytope in dimensions 3 and 4, plus the square
    and equilateral triangle in dimension 2.
    """
    name = parse_name(name)
    dim = int(dim)
    if (name, dim) not in SUPPORTED:
        raise ConfigurationError(f"unsupported polytope {name.value} in dimension {dim}")

    if name in (Name.CUBE, Name.SQUARE):
        verts = np.array(list(itertools.product((-0.5, 0.5), repeat=dim)))
    elif name is Name.CROSSPOLYTOPE:
        eye = np.eye(dim) / np.sqrt(2.0)
        verts = np.vstack([eye, -eye])
    elif name is Name.TRIANGLE:
        r3 = np.sqrt(3.0)
        verts = np.array([[0.0, r3 / 3], [0.5, -r3 / 6], [-0.5, -r3 / 6]])
    elif dim == 3:
        r3, r6 = np.sqrt(3.0), np.sqrt(6.0)
        verts = np.array([
            [0.0, 0.0, r6 / 4],
            [r3 / 3, 0.0, -r6 / 12],
            [-r3 / 6, 0.5, -r6 / 12],
            [-r3 / 6, -0.5, -r6 / 12],
        ])
    else:
        verts = _regular_simplex(dim)
    return _freeze(name, dim, verts)


def all_polytopes(dim: int) -> list[Polytope]:
    return [make_polytope(n, dim) for n in (Name.SIMPLEX, Name.CUBE, Name.CROSSPOLYTOPE)]


def surface_area(p: Polytope) -> float:
    """Surface area of a 3D body (unit edge / unit side)."""
    if p.dim != 3:
        raise ConfigurationError("surface area is only tabulated for 3D bodies")
    return {
        Name.SIMPLEX: np.sqrt(3.0),
        Name.CUBE: 6.0,
        Name.CROSSPOLYTOPE: 2.0 * np.sqrt(3.0),
    }[p.name]
