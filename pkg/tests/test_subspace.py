import math

import numpy as np
import pytest

from polyshadow.errors import ConfigurationError
from polyshadow.estimators import shadows_from_rows
from polyshadow.geometry import convex_hull
from polyshadow.polytopes import make_polytope
from polyshadow.subspace import (
    SphericalAngles, angles_to_unit, block_rng, frame3, frame4, frames3, frames4,
    orthogonal_point, project, sample_pairs, sample_unit, sample_units,
)


def frame_violation(rows, *normals):
    e1, e2 = rows
    worst = max(abs(e1 @ e1 - 1), abs(e2 @ e2 - 1), abs(e1 @ e2))
    for n in normals:
        worst = max(worst, abs(e1 @ n), abs(e2 @ n))
    return worst


def test_sample_unit_norm(rng):
    for dim in (3, 4):
        u = sample_unit(dim, rng)
        assert u.shape == (dim,)
        assert abs(np.linalg.norm(u) - 1) < 1e-12


def test_sample_unit_bad_dim(rng):
    with pytest.raises(ConfigurationError):
        sample_unit(5, rng)


def test_sphere_moments(rng):
    n = 100_000
    u = sample_units(3, n, rng)
    sigma = 1 / math.sqrt(3 * n)
    assert np.all(np.abs(u.mean(axis=0)) < 4 * sigma)
    # x^2 on S^2 has mean 1/3 and variance 4/45
    se = math.sqrt(4 / 45 / n)
    assert np.all(np.abs((u ** 2).mean(axis=0) - 1 / 3) < 4 * se)


def test_frame3_north_pole():
    f = frame3([0, 0, 1])
    np.testing.assert_array_equal(f.e1, [1, 0, 0])
    np.testing.assert_array_equal(f.e2, [0, 1, 0])


def test_frame3_y_axis():
    f = frame3([0, 1, 0])
    np.testing.assert_allclose(f.e1, [1, 0, 0], atol=0)
    np.testing.assert_allclose(f.e2, [0, 0, -1], atol=0)


def test_frame3_matches_matrix_rows(rng):
    u = sample_unit(3, rng)
    x, y, z = u
    s = math.sqrt(1 - x * x)
    f = frame3(u)
    np.testing.assert_allclose(f.e1, [s, -x * y / s, -x * z / s], atol=1e-15)
    np.testing.assert_allclose(f.e2, [0, z / s, -y / s], atol=1e-15)


@pytest.mark.parametrize("u", [[1, 0, 0], [-1, 0, 0], [1, 1e-7, 0], [1 - 1e-13, 0, math.sqrt(2e-13)]])
def test_frame3_pole_prerotation(u):
    u = np.asarray(u, dtype=float)
    u /= np.linalg.norm(u)
    f = frame3(u)
    assert np.all(np.isfinite(f.rows))
    assert frame_violation(f.rows, u) < 1e-12


def test_frame3_pole_shadow_unchanged(cube):
    # at U = e_x the shadow of the cube is the unit square
    rows = frames3(np.array([[1.0, 0, 0]]))
    cw, pw, nv = shadows_from_rows(cube, rows)
    assert cw[0] == pytest.approx(1.0, abs=1e-14)
    assert pw[0] == pytest.approx(4.0, abs=1e-14)


def test_orthogonal_point_example():
    v = orthogonal_point([0, 0, 0, 1], 0.0, math.pi / 2)
    np.testing.assert_allclose(v, [0, 0, -1, 0], atol=1e-16)


def test_orthogonal_point_properties(rng):
    for _ in range(200):
        u = sample_unit(4, rng)
        k, lam = rng.uniform(0, 2 * math.pi), rng.uniform(0, math.pi)
        v = orthogonal_point(u, k, lam)
        assert abs(v @ u) < 1e-12
        assert abs(np.linalg.norm(v) - 1) < 1e-12


def test_orthogonal_point_uniform_on_two_sphere(rng):
    # with (kappa, lam) ~ sin(lam)/(4 pi) the coefficient vector is uniform on S^2,
    # so V's mean is 0 and E[(V.a)^2] = 1/3 for each orthonormal direction a
    u = sample_unit(4, rng)
    n = 50_000
    k = rng.uniform(0, 2 * math.pi, n)
    lam = np.arccos(1 - 2 * rng.uniform(size=n))
    vs = np.array([orthogonal_point(u, a, b) for a, b in zip(k, lam)])
    a = np.array([-u[1], u[0], -u[3], u[2]])
    assert np.abs(vs.mean(axis=0)).max() < 4 / math.sqrt(3 * n)
    assert abs(((vs @ a) ** 2).mean() - 1 / 3) < 4 * math.sqrt(4 / 45 / n)


def test_frame4_example():
    f = frame4([0, 0, 0, 1], [0, 0, 1, 0])
    np.testing.assert_allclose(f.e1, [1, 0, 0, 0], atol=0)
    np.testing.assert_allclose(f.e2, [0, 1, 0, 0], atol=0)


def test_frame4_random_and_projects_u_v_to_origin(rng):
    u, v = sample_pairs(500, rng)
    rows = frames4(u, v)
    for r, a, b in zip(rows, u, v):
        assert frame_violation(r, a, b) < 1e-12
        np.testing.assert_allclose(r @ a, 0, atol=1e-12)
        np.testing.assert_allclose(r @ b, 0, atol=1e-12)


def test_frame4_singular_plane():
    # U, V span a plane containing e_1 so 1 - p^2 - x^2 = 0
    u = np.array([1.0, 0, 0, 0])
    v = np.array([0, 0, 0, 1.0])
    f = frame4(u, v)
    assert frame_violation(f.rows, u, v) < 1e-12


def test_frame_invariants_bulk(rng):
    u = sample_units(3, 10_000, rng)
    rows = frames3(u)
    worst = max(frame_violation(r, a) for r, a in zip(rows, u))
    assert worst < 1e-10
    u4, v4 = sample_pairs(10_000, rng)
    rows = frames4(u4, v4)
    worst = max(frame_violation(r, a, b) for r, a, b in zip(rows, u4, v4))
    assert worst < 1e-10


def test_angles_to_unit():
    np.testing.assert_allclose(angles_to_unit(SphericalAngles(0.0, math.pi / 2), 3), [1, 0, 0], atol=1e-16)
    u, v = angles_to_unit(SphericalAngles(math.pi / 2, math.pi / 2, math.pi / 2, 0.3, 1.1), 4)
    np.testing.assert_allclose(u, [0, 1, 0, 0], atol=1e-16)
    assert abs(u @ v) < 1e-15


def test_angle_ranges_checked():
    with pytest.raises(ValueError):
        SphericalAngles(7.0, 0.1)
    with pytest.raises(ValueError):
        SphericalAngles(0.1, 0.1, psi=0.2)


def test_density_normalisation():
    x, w = np.polynomial.legendre.leggauss(32)
    phi = math.pi / 2 * (x + 1)
    total = 2 * math.pi * (math.pi / 2) * np.dot(w, np.sin(phi))
    assert total / (4 * math.pi) == pytest.approx(1.0, abs=1e-14)


def test_project_examples(cube, tetra, octa):
    f = frame3([0, 0, 1])
    pts = project(f, cube)
    assert {tuple(p) for p in pts} == {(a, b) for a in (-0.5, 0.5) for b in (-0.5, 0.5)}
    g = frame3(np.array([0.3, -0.5, 0.8]) / np.linalg.norm([0.3, -0.5, 0.8]))
    np.testing.assert_allclose(project(g, tetra).mean(axis=0), 0, atol=1e-15)
    hull = convex_hull(project(f, octa)).vertices
    s = 1 / math.sqrt(2)
    assert {tuple(np.round(p, 14)) for p in hull} == {
        tuple(np.round(p, 14)) for p in [(s, 0), (-s, 0), (0, s), (0, -s)]}


def test_project_linear(rng, tetra):
    f = frame3(sample_unit(3, rng))
    np.testing.assert_allclose(project(f, tetra.scaled(2.5)), 2.5 * project(f, tetra), atol=1e-15)


def test_project_dimension_mismatch(cube):
    with pytest.raises(ConfigurationError):
        project(frame4([0, 0, 0, 1], [0, 0, 1, 0]), cube)


def test_two_parameterisations_agree(cube):
    n = 100_000
    rng = block_rng(5, 0)
    cw_a, _, _ = shadows_from_rows(cube, frames3(sample_units(3, n, rng)))
    theta = rng.uniform(0, 2 * math.pi, n)
    phi = np.arccos(1 - 2 * rng.uniform(size=n))  # density sin(phi)/2
    units = np.array([angles_to_unit(SphericalAngles(t, p), 3) for t, p in zip(theta, phi)])
    cw_b, _, _ = shadows_from_rows(cube, frames3(units))
    se = math.sqrt(cw_a.var() / n + cw_b.var() / n)
    assert abs(cw_a.mean() - cw_b.mean()) < 4 * se


def test_block_rng_reproducible():
    a = block_rng(1, 3).standard_normal(5)
    b = block_rng(1, 3).standard_normal(5)
    c = block_rng(1, 4).standard_normal(5)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
