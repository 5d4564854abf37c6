import itertools
import json

import numpy as np
import pytest

from polyshadow.errors import ConfigurationError
from polyshadow.polytopes import SUPPORTED, Name, Polytope, make_polytope, surface_area


def _pairwise(v):
    return np.array([np.linalg.norm(a - b) for a, b in itertools.combinations(v, 2)])


@pytest.mark.parametrize("name,dim", sorted(SUPPORTED, key=lambda t: (t[0].value, t[1])))
def test_centred(name, dim):
    p = make_polytope(name, dim)
    assert p.vertices.shape[1] == dim
    assert np.abs(p.vertices.mean(axis=0)).max() < 1e-12


@pytest.mark.parametrize("name", ["simplex", "crosspolytope"])
@pytest.mark.parametrize("dim", [3, 4])
def test_unit_edges(name, dim):
    d = _pairwise(make_polytope(name, dim).vertices)
    edges = d[d < d.min() + 1e-9]
    assert np.all(np.abs(edges - 1) <= 1e-12)


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_cube_coordinates(dim):
    name = "square" if dim == 2 else "cube"
    v = make_polytope(name, dim).vertices
    assert v.shape == (2 ** dim, dim)
    assert set(np.unique(v)) == {-0.5, 0.5}


def test_cube3_matches_vertex_matrix(cube):
    expected = {tuple(c) for c in itertools.product((-0.5, 0.5), repeat=3)}
    assert {tuple(v) for v in cube.vertices} == expected


def test_octahedron_matches_vertex_matrix(octa):
    s = 1 / np.sqrt(2)
    expected = {tuple(sign * s * e) for e in np.eye(3) for sign in (1, -1)}
    assert {tuple(np.round(v, 15)) for v in octa.vertices} == {tuple(np.round(v, 15)) for v in expected}


def test_tetrahedron_matches_vertex_matrix(tetra):
    r3, r6 = np.sqrt(3), np.sqrt(6)
    cols = np.array([[0, r3 / 3, -r3 / 6, -r3 / 6],
                     [0, 0, 0.5, -0.5],
                     [r6 / 4, -r6 / 12, -r6 / 12, -r6 / 12]]).T
    got = sorted(map(tuple, np.round(tetra.vertices, 14)))
    assert got == sorted(map(tuple, np.round(cols, 14)))


def test_simplex4_all_distances_one():
    v = make_polytope("simplex", 4).vertices
    assert v.shape == (5, 4)
    d = _pairwise(v)
    assert len(d) == 10
    np.testing.assert_allclose(d, 1.0, atol=1e-12)


@pytest.mark.parametrize("dim", [3, 4])
def test_simplex_gram_two_eigenvalue_groups(dim):
    v = make_polytope("simplex", dim).vertices
    eig = np.linalg.eigvalsh(v @ v.T)
    groups = np.unique(np.round(eig, 10))
    assert len(groups) == 2


def test_triangle_unit_edge():
    d = _pairwise(make_polytope("triangle", 2).vertices)
    np.testing.assert_allclose(d, 1.0, atol=1e-12)


@pytest.mark.parametrize("name,dim", [("cube", 2), ("square", 3), ("simplex", 5), ("triangle", 3), ("blob", 3)])
def test_unsupported(name, dim):
    with pytest.raises(ConfigurationError):
        make_polytope(name, dim)


def test_aliases():
    assert make_polytope("octahedron", 3).name is Name.CROSSPOLYTOPE
    assert make_polytope("tetrahedron", 3).name is Name.SIMPLEX


def test_json_roundtrip_and_stable_order():
    p = make_polytope("crosspolytope", 4)
    text = p.to_json()
    assert text == make_polytope("crosspolytope", 4).to_json()
    d = json.loads(text)
    assert set(d) == {"name", "dim", "vertices"}
    assert all(isinstance(c, str) for v in d["vertices"] for c in v)
    q = Polytope.from_dict(d)
    np.testing.assert_array_equal(q.vertices, p.vertices)


def test_vertices_read_only(cube):
    with pytest.raises(ValueError):
        cube.vertices[0, 0] = 1.0


def test_surface_areas():
    assert surface_area(make_polytope("cube", 3)) == 6.0
    assert surface_area(make_polytope("simplex", 3)) == pytest.approx(np.sqrt(3))
    assert surface_area(make_polytope("crosspolytope", 3)) == pytest.approx(2 * np.sqrt(3))
