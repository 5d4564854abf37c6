import math
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from polyshadow import closedforms as cf
from polyshadow.errors import ConfigurationError, DomainError

A3 = math.acos(1 / 3)


def test_arcsec_values():
    assert cf.arcsec(1.0) == 0.0
    assert cf.arcsec(2.0) == pytest.approx(math.pi / 3, abs=1e-15)
    assert cf.arcsec(3.0) == pytest.approx(1.2309594173407747, abs=1e-15)
    with pytest.raises(DomainError):
        cf.arcsec(0.5)


def test_arccot():
    assert cf.arccot(1.0) == pytest.approx(math.pi / 4, abs=1e-16)
    assert cf.arccot(math.sqrt(2)) == pytest.approx(math.atan(1 / math.sqrt(2)), abs=1e-16)


def test_erf_known_value():
    assert cf.erf(1.0) == pytest.approx(0.842700792949715, abs=1e-15)
    assert cf.erf(0.0) == 0.0
    assert math.isnan(cf.erf(float("nan")))


@settings(max_examples=300, deadline=None)
@given(st.floats(-8, 8))
def test_erf_against_scipy(x):
    assert abs(cf.erf(x) - special.erf(x)) < 2e-15


def test_erf_odd_and_tails():
    for x in (0.3, 2.9, 3.1, 5.0, 30.0):
        assert cf.erf(-x) == -cf.erf(x)
    assert 1 - cf.erf(4.0) == pytest.approx(special.erfc(4.0), rel=1e-9)


def test_elliptic_E_values():
    assert cf.elliptic_E(0.0) == pytest.approx(math.pi / 2, abs=1e-15)
    assert cf.elliptic_E(1.0) == pytest.approx(1.0, abs=1e-15)
    assert cf.elliptic_E(1 / math.sqrt(2)) == pytest.approx(1.3506438810476755, abs=1e-14)
    with pytest.raises(DomainError):
        cf.elliptic_E(1.5)


@pytest.mark.parametrize("xi", [0.1, 0.5, 0.9, 0.999, 1 - 1e-9])
def test_elliptic_E_against_scipy(xi):
    assert cf.elliptic_E(xi) == pytest.approx(special.ellipe(xi * xi), abs=1e-13)


def test_hyp3f2_dixon():
    # Dixon's theorem with a=1, b=1/2, c=1/4
    a, b, c = 1.0, 0.5, 0.25
    g = math.gamma
    closed = (g(1 + a / 2) * g(1 + a - b) * g(1 + a - c) * g(1 + a / 2 - b - c)
              / (g(1 + a) * g(1 + a / 2 - b) * g(1 + a / 2 - c) * g(1 + a - b - c)))
    assert cf.hyp3f2_unit(a, b, c, 1 + a - b, 1 + a - c) == pytest.approx(closed, abs=1e-13)


def test_hyp3f2_gauss_reduction():
    # with a3 == b2 the series is 2F1 at 1, given by Gauss's formula
    g = math.gamma
    a, b, c = 0.3, 0.7, 2.5
    closed = g(c) * g(c - a - b) / (g(c - a) * g(c - b))
    assert cf.hyp3f2_unit(a, b, 1.2, c, 1.2) == pytest.approx(closed, abs=1e-13)


def test_hyp3f2_terminating():
    # (-2)_k terms stop after k = 2
    expected = 1 + (-2 * 1 * 1) / (3 * 4) + (-2 * -1) * (1 * 2) * (1 * 2) / (3 * 4 * 4 * 5 * 2)
    assert cf.hyp3f2_unit(-2, 1, 1, 3, 4) == pytest.approx(expected, abs=1e-15)


def test_hyp3f2_constant_and_divergence():
    assert cf.hyp3f2_unit(-0.5, 0.5, 1.5, 1, 2) == pytest.approx(0.7553025383038854, abs=1e-14)
    with pytest.raises(DomainError):
        cf.hyp3f2_unit(1, 1, 1, 1, 1)
    with pytest.raises(DomainError):
        cf.hyp3f2_unit(0.5, 0.5, 0.5, -1, 2)


def test_pw2_integrals():
    h = cf.hyp3f2_unit(-0.5, 0.5, 1.5, 1, 2)
    assert cf.cube_I_pw2() == pytest.approx(math.pi / 3, abs=1e-12)
    assert cf.cube_J_pw2() == pytest.approx(math.pi ** 2 / 8 * h, abs=1e-12)


def test_cwpw_integrals():
    assert cf.cube_I_cwpw() == pytest.approx(math.pi / 6, abs=1e-12)
    assert cf.cube_J_cwpw() == pytest.approx(2 / 3, abs=1e-12)


def test_assembly_gives_cube_pw2():
    val = cf.cube_assembly(cf.cube_I_pw2(), cf.cube_J_pw2())
    assert val == pytest.approx(22.237117433439470, abs=1e-9)


def test_cwpw_assembly_prefactor():
    # cw*pw = sum_{i,j} |u_i| sqrt(1 - u_j^2) needs 16/(4 pi) rather than 32/(4 pi)
    i, j = cf.cube_I_cwpw(), cf.cube_J_cwpw()
    assert 16 * (3 * i + 6 * j) / (4 * math.pi) == pytest.approx(2 + 16 / math.pi, abs=1e-12)
    assert cf.cube_assembly(i, j) == pytest.approx(4 + 32 / math.pi, abs=1e-12)


def test_table_size_and_runtime():
    cf.reference_table.cache_clear()
    t0 = time.perf_counter()
    table = cf.reference_table()
    assert time.perf_counter() - t0 < 1.0
    assert len(table) >= 30


@pytest.mark.parametrize("key,value", [
    ("cube3.E_pw2", 22.237117433439470),
    ("cube3.E_cwpw", 7.092958178940650),
    ("simplex3.E_cw2", 0.188561220515812),
    ("cube3.E_cw2", 1 + 4 / math.pi),
    ("simplex3.E_pw", 1.5 * (math.pi - A3)),
    ("crosspolytope3.E_pw", 3 * A3),
    ("simplex3.P3", 0.3509593121),
])
def test_table_values(key, value):
    assert cf.reference_table().value(key) == pytest.approx(value, abs=max(1e-10, 1e-12 * abs(value)))


def test_vertex_probabilities_sum_to_one():
    t = cf.reference_table()
    assert t.value("simplex3.P3") + t.value("simplex3.P4") == pytest.approx(1.0, abs=1e-15)
    assert t.value("crosspolytope3.P4") + t.value("crosspolytope3.P6") == pytest.approx(1.0, abs=1e-15)


def test_tetra_octa_duality():
    # a tetrahedron shadow is a triangle exactly when the octahedron shadow is a hexagon
    t = cf.reference_table()
    assert t.value("simplex3.P3") == t.value("crosspolytope3.P6")


def test_cube_correlation_from_moments():
    t = cf.reference_table()
    m = {k: t.value(f"cube3.E_{k}") for k in ("cw", "cw2", "pw", "pw2", "cwpw")}
    r = (m["cwpw"] - m["cw"] * m["pw"]) / math.sqrt((m["cw2"] - m["cw"] ** 2) * (m["pw2"] - m["pw"] ** 2))
    assert t.value("cube3.corr") == pytest.approx(r, abs=1e-15)


def test_table_serialisation():
    t = cf.reference_table()
    rows = t.to_dict()
    assert len(rows) == len(t)
    assert {r["status"] for r in rows} == {"Exact", "PaperNumericOnly"}
    assert "cube3.E_pw2" in t.to_text()
    assert "cube3.E_pw2" in t and "nope" not in t


@pytest.mark.parametrize("n", [3, 4, 5])
def test_mean_cw_cube(n):
    assert cf.mean_cw_cube(n) == n / 2


def test_mean_cw_integral_forms_match_table():
    t = cf.reference_table()
    assert cf.mean_cw_simplex(3) == pytest.approx(math.sqrt(3) / 4, abs=1e-13)
    assert cf.mean_cw_crosspolytope(3) == pytest.approx(math.sqrt(3) / 2, abs=1e-13)
    assert cf.mean_cw_simplex(4) == pytest.approx(t.value("simplex4.E_cw"), abs=1e-13)
    assert cf.mean_cw_crosspolytope(4) == pytest.approx(t.value("crosspolytope4.E_cw"), abs=1e-13)


def test_mean_cw_domain():
    with pytest.raises(DomainError):
        cf.mean_cw_simplex(1)
    with pytest.raises(DomainError):
        cf.mean_cw_crosspolytope(2)


def test_expected_vertices():
    assert cf.expected_vertices("simplex", 4) == pytest.approx(4.122, abs=1e-3)
    assert cf.expected_vertices("crosspolytope", 4) == pytest.approx(5.192, abs=1e-3)
    assert cf.expected_vertices("cube", 4) == 8.0
    assert cf.expected_vertices("cube", 3) == 6.0
    for name in ("simplex", "crosspolytope"):
        assert cf.expected_vertices_integral(name, 4) == pytest.approx(cf.expected_vertices(name, 4), abs=1e-12)
    with pytest.raises(ConfigurationError):
        cf.expected_vertices("square", 2)


def test_mean_width():
    t = cf.reference_table()
    assert cf.mean_width(t, "cube3") == pytest.approx(1.5, abs=1e-15)


def test_gauss_rules_exact_on_polynomials():
    f = lambda x: x ** 7 - 3 * x ** 2
    exact = (2 ** 8) / 8 - 2 ** 3
    assert cf.gauss_legendre(f, 0, 2, 8) == pytest.approx(exact, abs=1e-12)
    assert cf.adaptive_gauss(np.sqrt, 0, 1) == pytest.approx(2 / 3, abs=1e-12)
    assert cf.composite_gauss(np.cos, 0, math.pi / 2, 4, 16) == pytest.approx(1.0, abs=1e-15)
