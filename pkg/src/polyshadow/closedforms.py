"""Exact constants for shadow moments, and the special functions behind them.

Everything here is self-contained: erf, the complete elliptic integral of the
second kind and 3F2 at unit argument are evaluated in this module without
scipy, to about 1e-12 absolute accuracy.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, DomainError
from .polytopes import Name, parse_name

SQRT_PI = math.sqrt(math.pi)


# --- elementary and special functions ---------------------------------------

def arcsec(x: float) -> float:
    if abs(x) < 1.0:
        raise DomainError(f"arcsec undefined for |x| < 1 (got {x})")
    return math.acos(1.0 / x)


def arccot(x: float) -> float:
    return math.atan2(1.0, x)


def _erf_series(x: float) -> float:
    # erf x = 2/sqrt(pi) exp(-x^2) sum_n 2^n x^(2n+1) / (2n+1)!!, all terms positive
    x2 = x * x
    term = x
    total = x
    n = 0
    while term > 1e-17 * total:
        n += 1
        term *= 2.0 * x2 / (2 * n + 1)
        total += term
    return 2.0 / SQRT_PI * math.exp(-x2) * total


def _erfc_cf(x: float) -> float:
    # erfc x = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))), x > 0
    tiny = 1e-300
    f = x
    c = x
    d = 0.0
    for k in range(1, 500):
        a = 0.5 * k
        d = x + a * d
        d = 1.0 / (d if d != 0 else tiny)
        c = x + a / c
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(-x * x) / SQRT_PI / f


def erf(x: float) -> float:
    """Error function, absolute error below 1e-15 on the real line."""
    if math.isnan(x):
        return x
    if x < 0:
        return -erf(-x)
    if x < 3.0:
        return _erf_series(x)
    if x > 27.0:
        return 1.0
    return 1.0 - _erfc_cf(x)


_erf_vec = np.vectorize(erf, otypes=[float])


@lru_cache(maxsize=None)
def _gl(n: int):
    return np.polynomial.legendre.leggauss(n)


def gauss_legendre(f, a: float, b: float, n: int = 64) -> float:
    x, w = _gl(n)
    half = 0.5 * (b - a)
    return float(half * np.dot(w, f(half * (x + 1.0) + a)))


def adaptive_gauss(f, a: float, b: float, tol: float = 1e-14, n: int = 20, depth: int = 30) -> float:
    """Adaptive bisection with an ``n``-point Gauss-Legendre rule; ``f`` is vectorized.

    The local tolerance is split between halves but never drops below the
    round-off level of the local estimate.
    """
    whole = gauss_legendre(f, a, b, n)

    def rec(a, b, whole, tol, depth):
        m = 0.5 * (a + b)
        left = gauss_legendre(f, a, m, n)
        right = gauss_legendre(f, m, b, n)
        both = left + right
        floor = 64 * np.finfo(float).eps * abs(both)
        if depth == 0 or abs(both - whole) <= max(tol, floor):
            return both
        return rec(a, m, left, 0.5 * tol, depth - 1) + rec(m, b, right, 0.5 * tol, depth - 1)

    return rec(a, b, whole, tol, depth)


def composite_gauss(f, a: float, b: float, panels: int, n: int = 64) -> float:
    edges = np.linspace(a, b, panels + 1)
    return sum(gauss_legendre(f, lo, hi, n) for lo, hi in zip(edges[:-1], edges[1:]))


def elliptic_E(xi: float) -> float:
    """Complete elliptic integral of the second kind, modulus ``xi`` in [0, 1]."""
    if not 0.0 <= xi <= 1.0:
        raise DomainError(f"elliptic_E needs 0 <= xi <= 1 (got {xi})")
    # 1 - xi^2 sin^2 t written without cancellation near xi = 1, t = pi/2
    kc2 = (1.0 - xi) * (1.0 + xi)
    return adaptive_gauss(lambda t: np.sqrt(np.cos(t) ** 2 + kc2 * np.sin(t) ** 2),
                          0.0, 0.5 * math.pi)


def _hyp3f2_partial(a, b, n_terms, start=(0, 1.0, 0.0)):
    k, term, total = start
    a1, a2, a3 = a
    b1, b2 = b
    while k < n_terms:
        total += term
        term *= (a1 + k) * (a2 + k) * (a3 + k) / ((b1 + k) * (b2 + k) * (k + 1))
        k += 1
    return k, term, total


def hyp3f2_unit(a1: float, a2: float, a3: float, b1: float, b2: float) -> float:
    """Generalized hypergeometric 3F2(a1, a2, a3; b1, b2; 1).

    Terms follow the ratio recurrence.  The partial sums converge like
    N^-s (s = b1 + b2 - a1 - a2 - a3) with an asymptotic series in 1/N, so
    partial sums at N0 * 2^j are combined by repeated Richardson elimination
    of N^-s, N^-(s+1), ...
    """
    a = (a1, a2, a3)
    b = (b1, b2)
    for bj in b:
        if bj <= 0 and float(bj).is_integer():
            raise DomainError("lower parameters must not be non-positive integers")
    for ai in a:
        if ai <= 0 and float(ai).is_integer():
            # terminating series
            return _hyp3f2_partial(a, b, int(-ai) + 1)[2]
    s = b1 + b2 - a1 - a2 - a3
    if s <= 0:
        raise DomainError("3F2 at unit argument diverges unless b1 + b2 - a1 - a2 - a3 > 0")

    n0, levels = 512, 9
    state = (0, 1.0, 0.0)
    sums = []
    for j in range(levels):
        state = _hyp3f2_partial(a, b, n0 << j, state)
        sums.append(state[2])
        if abs(state[1]) < 1e-17 * abs(state[2]) and s > 8:
            return state[2]
    table = sums
    for i in range(levels - 1):
        r = 2.0 ** (s + i)
        table = [(r * hi - lo) / (r - 1.0) for lo, hi in zip(table[:-1], table[1:])]
    return table[-1]


# --- integral formulas ------------------------------------------------------

TAIL = 8.0  # exp(-3 * 64) ~ 1e-84


def mean_cw_simplex(n: int) -> float:
    """Mean shadow area of the unit-edge regular n-simplex."""
    if n < 2:
        raise DomainError("need n >= 2")
    f = lambda x: np.exp(-3 * x * x) * ((1 + _erf_vec(x)) / 2) ** (n - 2)
    return n * (n + 1) / (8 * SQRT_PI) * composite_gauss(f, -TAIL, TAIL, 16)


def mean_cw_cube(n: int) -> float:
    if n < 2:
        raise DomainError("need n >= 2")
    return n / 2


def mean_cw_crosspolytope(n: int) -> float:
    if n < 3:
        raise DomainError("need n >= 3")
    f = lambda x: np.exp(-3 * x * x) * _erf_vec(x) ** (n - 3)
    return n * (n - 2) / SQRT_PI * composite_gauss(f, 0.0, TAIL, 8)


def expected_vertices_integral(name, dim: int = 4) -> float:
    """Expected vertex count of a 4D shadow from its Gaussian-integral form."""
    name = parse_name(name)
    if dim != 4:
        raise ConfigurationError("vertex-count integrals are tabulated for dim 4 only")
    if name is Name.SIMPLEX:
        f = lambda x: np.exp(-2 * x * x) * ((1 + _erf_vec(x)) / 2) ** 3
        return 20 * math.sqrt(2 / math.pi) * composite_gauss(f, -TAIL, TAIL, 16)
    if name is Name.CROSSPOLYTOPE:
        f = lambda x: np.exp(-2 * x * x) * _erf_vec(x) ** 2
        return 48 * math.sqrt(2 / math.pi) * composite_gauss(f, 0.0, TAIL, 8)
    if name is Name.CUBE:
        return 8.0
    raise ConfigurationError(f"no vertex-count formula for {name.value}")


def expected_vertices(name, dim: int = 4) -> float:
    name = parse_name(name)
    a3 = arcsec(3)
    if dim == 4:
        if name is Name.SIMPLEX:
            return 10 * (1 - 3 / (2 * math.pi) * a3)
        if name is Name.CROSSPOLYTOPE:
            return 24 * (1 - 2 / math.pi * a3)
        if name is Name.CUBE:
            return 8.0
    if dim == 3:
        p3 = 2 / math.pi * (3 * a3 - math.pi)
        if name is Name.SIMPLEX:
            return 3 * p3 + 4 * (1 - p3)
        if name is Name.CROSSPOLYTOPE:
            return 6 * p3 + 4 * (1 - p3)
        if name is Name.CUBE:
            return 6.0
    raise ConfigurationError(f"no vertex-count formula for {name.value} in dimension {dim}")


# cube pw^2 and cw*pw decompositions over the first octant:
# E = 32 (3 I + 6 J) / (4 pi) with the pairs below

def cube_I_pw2() -> float:
    f = lambda t, p: (1 - np.cos(t) ** 2 * np.sin(p) ** 2) * np.sin(p)
    return _octant_integral(f)


def cube_J_pw2() -> float:
    """J = int_0^{pi/2} E(sin phi) sin(phi)^2 dphi.

    E(sin phi) has a (cos phi)^2 log(cos phi) term at pi/2, so panels are
    graded geometrically toward that endpoint.
    """
    edges = [0.5 * math.pi * (1 - 2.0 ** -k) for k in range(40)] + [0.5 * math.pi]
    x, w = _gl(24)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        nodes = 0.5 * (hi - lo) * (x + 1) + lo
        vals = np.array([elliptic_E(min(math.sin(t), 1.0)) for t in nodes])
        total += 0.5 * (hi - lo) * float(np.dot(w, vals * np.sin(nodes) ** 2))
    return total


def cube_I_cwpw() -> float:
    # x * sqrt(1 - x^2) over the octant; the cw.pw expansion's diagonal term
    f = lambda t, p: (np.cos(t) * np.sin(p)) * np.sqrt(1 - (np.cos(t) * np.sin(p)) ** 2) * np.sin(p)
    return _octant_integral(f)


def cube_J_cwpw() -> float:
    # y * sqrt(1 - x^2): the off-diagonal term
    f = lambda t, p: (np.sin(t) * np.sin(p)) * np.sqrt(1 - (np.cos(t) * np.sin(p)) ** 2) * np.sin(p)
    return _octant_integral(f)


def _octant_integral(f, n: int = 96, panels: int = 4) -> float:
    x, w = _gl(n)
    edges = np.linspace(0.0, 0.5 * math.pi, panels + 1)
    nodes, weights = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        nodes.append(0.5 * (hi - lo) * (x + 1) + lo)
        weights.append(0.5 * (hi - lo) * w)
    t = np.concatenate(nodes)
    wt = np.concatenate(weights)
    tt, pp = np.meshgrid(t, t, indexing="ij")
    return float(np.sum(wt[:, None] * wt[None, :] * f(tt, pp)))


def cube_assembly(i_val: float, j_val: float) -> float:
    return 32 * (3 * i_val + 6 * j_val) / (4 * math.pi)


# --- reference table --------------------------------------------------------

class Status(str, enum.Enum):
    EXACT = "Exact"
    NUMERIC = "PaperNumericOnly"


@dataclass(frozen=True)
class Entry:
    key: str
    value: float
    formula: str
    status: Status
    printed_digits: str | None = None  # decimal string of a published rounding, if any


@dataclass(frozen=True)
class ReferenceTable:
    entries: dict[str, Entry]

    def __getitem__(self, key: str) -> Entry:
        return self.entries[key]

    def __contains__(self, key: str) -> bool:
        return key in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def value(self, key: str) -> float:
        return self.entries[key].value

    def to_dict(self) -> list[dict]:
        return [
            {"key": e.key, "formula": e.formula, "value": format(e.value, ".17g"),
             "status": e.status.value}
            for e in self.entries.values()
        ]

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        rows = self.to_dict()
        wk = max(len(r["key"]) for r in rows)
        wv = max(len(r["value"]) for r in rows)
        ws = max(len(r["status"]) for r in rows)
        return "\n".join(
            f"{r['key']:<{wk}}  {r['value']:>{wv}}  {r['status']:<{ws}}  {r['formula']}"
            for r in rows
        ) + "\n"


def _correlation(m):
    var_cw = m["cw2"] - m["cw"] ** 2
    var_pw = m["pw2"] - m["pw"] ** 2
    return (m["cwpw"] - m["cw"] * m["pw"]) / math.sqrt(var_cw * var_pw)


@lru_cache(maxsize=1)
def reference_table() -> ReferenceTable:
    """Every constant quoted for the 3D and 4D bodies, computed where closed."""
    pi = math.pi
    a3, a4 = arcsec(3), arcsec(4)
    r2, r3 = math.sqrt(2), math.sqrt(3)
    hyp = hyp3f2_unit(-0.5, 0.5, 1.5, 1.0, 2.0)
    E, N = Status.EXACT, Status.NUMERIC
    rows: list[tuple] = []

    def add(key, value, formula, status=E, digits=None):
        rows.append(Entry(key, float(value), formula, status, digits))

    add("simplex3.E_cw", mean_cw_simplex(3), "sqrt(3)/4", digits="0.433012701892219")
    add("simplex3.E_cw2", 1 / 8 + r2 / (4 * pi) - a3 / (8 * pi),
        "1/8 + sqrt(2)/(4 pi) - arcsec(3)/(8 pi)", digits="0.188561220515812")
    add("simplex3.E_pw", 1.5 * (pi - a3), "(3/2)(pi - arcsec(3))", digits="2.865949854373527")
    add("simplex3.E_pw2", 8.2170808733, "numeric", N, "8.2170808733")
    add("simplex3.E_cwpw", 1.2406348222, "numeric", N, "1.2406348222")

    add("cube3.E_cw", mean_cw_cube(3), "3/2", digits="1.5")
    add("cube3.E_cw2", 1 + 4 / pi, "1 + 4/pi", digits="2.273239544735162")
    add("cube3.E_pw", 1.5 * pi, "3 pi/2", digits="4.712388980384689")
    add("cube3.E_pw2", 8 + 6 * pi * hyp, "8 + 6 pi 3F2(-1/2,1/2,3/2;1,2;1)",
        digits="22.237117433439470")
    add("cube3.E_cwpw", 2 + 16 / pi, "2 + 16/pi", digits="7.092958178940650")

    add("crosspolytope3.E_cw", mean_cw_crosspolytope(3), "sqrt(3)/2", digits="0.866025403784438")
    add("crosspolytope3.E_cw2", 0.5 + r2 / pi - a3 / (2 * pi),
        "1/2 + sqrt(2)/pi - arcsec(3)/(2 pi)", digits="0.754244882063249")
    add("crosspolytope3.E_pw", 3 * a3, "3 arcsec(3)", digits="3.692878252022324")
    add("crosspolytope3.E_pw2", 13.6639421274, "numeric", N, "13.6639421274")
    add("crosspolytope3.E_cwpw", 3.2074623048, "numeric", N, "3.2074623048")

    p3 = 2 / pi * (3 * a3 - pi)
    p4 = 3 / pi * (pi - 2 * a3)
    add("simplex3.P3", p3, "(2/pi)(3 arcsec(3) - pi)", digits="0.3509593121")
    add("simplex3.P4", p4, "(3/pi)(pi - 2 arcsec(3))", digits="0.6490406878")
    add("crosspolytope3.P4", p4, "(3/pi)(pi - 2 arcsec(3))", digits="0.6490406878")
    add("crosspolytope3.P6", p3, "(2/pi)(3 arcsec(3) - pi)", digits="0.3509593121")
    add("cube3.P6", 1.0, "1 (almost surely)")
    add("simplex3.E_nverts", expected_vertices(Name.SIMPLEX, 3), "3 P3 + 4 P4")
    add("crosspolytope3.E_nverts", expected_vertices(Name.CROSSPOLYTOPE, 3), "4 P4 + 6 P6")
    add("cube3.E_nverts", 6.0, "6")

    printed_corr = {"simplex3": "-0.188", "cube3": "0.915", "crosspolytope3": "0.878"}
    by_key = {e.key: e.value for e in rows}
    for body, printed in printed_corr.items():
        if body == "cube3":
            m = {k: by_key[f"{body}.E_{k}"] for k in ("cw", "cw2", "pw", "pw2", "cwpw")}
            add(f"{body}.corr", _correlation(m), "from the five exact moments", digits=printed)
        else:
            add(f"{body}.corr", float(printed), "numeric", N, printed)

    add("simplex4.E_cw", mean_cw_simplex(4), "5 sqrt(3)/(12 pi)(pi - arcsec(4))",
        digits="0.418889720727840")
    add("simplex4.E_pw", 10 / (3 * pi) * (2 * pi - 3 * a3), "10/(3 pi)(2 pi - 3 arcsec(3))",
        digits="2.748401146360593")
    add("cube4.E_cw", mean_cw_cube(4), "2", digits="2")
    add("cube4.E_pw", 16 / 3, "16/3", digits="5.333333333333333")
    add("crosspolytope4.E_cw", mean_cw_crosspolytope(4), "4 sqrt(3)/9", digits="0.769800358919501")
    add("crosspolytope4.E_pw", 16 / pi * (pi - 2 * a3), "(16/pi)(pi - 2 arcsec(3))",
        digits="3.461550335020567")

    numeric4 = {
        "simplex4": {"E_cw2": "0.176", "E_pw2": "7.56", "E_cwpw": "1.15", "corr": "0.1",
                     "P3": "0.146", "P4": "0.585", "P5": "0.269"},
        "cube4": {"E_cw2": "4.04", "E_pw2": "28.4", "E_cwpw": "10.7", "corr": "0.9"},
        "crosspolytope4": {"E_cw2": "0.598", "E_pw2": "12.0", "E_cwpw": "2.67", "corr": "0.8",
                           "P4": "0.463", "P6": "0.478", "P8": "0.059"},
    }
    for body, vals in numeric4.items():
        for k, digits in vals.items():
            add(f"{body}.{k}", float(digits), "numeric", N, digits)
    add("cube4.P8", 1.0, "1 (almost surely)")
    add("simplex4.E_nverts", expected_vertices(Name.SIMPLEX, 4), "10(1 - 3 arcsec(3)/(2 pi))",
        digits="4.122")
    add("cube4.E_nverts", 8.0, "8")
    add("crosspolytope4.E_nverts", expected_vertices(Name.CROSSPOLYTOPE, 4),
        "24(1 - 2 arcsec(3)/pi)", digits="5.192")

    add("const.hyp3f2", hyp, "3F2(-1/2,1/2,3/2;1,2;1)")
    add("const.gamma", arccot(2 * r2), "arccot(2 sqrt(2))", digits="0.339")
    add("const.delta", arccot(r2), "arccot(sqrt(2))", digits="0.615")

    table = ReferenceTable({e.key: e for e in rows})
    _check_against_printed(table)
    return table


def _check_against_printed(table: ReferenceTable) -> None:
    """Computed exact values must agree with every printed digit."""
    for e in table.entries.values():
        if e.status is not Status.EXACT or e.printed_digits is None:
            continue
        digits = e.printed_digits
        places = len(digits.split(".")[1]) if "." in digits else 0
        if abs(e.value - float(digits)) > max(10.0 ** (-places), 1e-12 * abs(e.value)):
            raise AssertionError(f"{e.key}: computed {e.value!r} disagrees with {digits}")


def mean_width(table: ReferenceTable, body: str) -> float:
    """Mean width implied by the mean perimeter: E(pw) / pi."""
    return table.value(f"{body}.E_pw") / math.pi
