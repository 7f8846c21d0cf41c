import numpy as np
import pytest
import sympy

from bergtoep._calculus import (
    HExpr,
    MissingQError,
    QOperator,
    hyperbolic_ab,
    hyperbolic_kernel,
    parabolic_ab,
    parabolic_kernel,
    resolve_q,
)
from bergtoep.mindex import Weight

y, s = sympy.symbols("y s", real=True)
w = sympy.symbols("w")


def _sym_parabolic(lam, m, coeffs):
    c = 1 - w
    F = (c - sympy.I * y / 2) ** (-lam)
    for j in range(2 * m):
        F = F + y * sympy.diff(F, y) / (lam + j)
    return sum(ck * y ** k * sympy.diff(F, y, k) for k, ck in enumerate(coeffs))


def _sym_hyperbolic(lam, m, rows):
    G = (sympy.cosh(s) - w) ** (-lam)
    for j in range(2 * m):
        G = G + sympy.tanh(s) * sympy.diff(G, s) / (lam + j)
    if not rows:
        return G
    out = 0
    for k, row in enumerate(rows):
        a_k = sum(c * sympy.diff(sympy.tanh(s), s, j) for j, c in enumerate(row))
        out += a_k * sympy.tanh(s) ** k * sympy.diff(G, s, k)
    return out


SAMPLES_Y = np.array([-7.0, -1.3, 0.0, 0.4, 2.2, 9.0])
SAMPLES_S = np.array([-3.0, -0.6, 0.0, 0.25, 1.1, 2.7])
SAMPLES_W = np.array([0.0, 0.3 + 0.2j, -0.45j, 0.1 - 0.3j, -0.2, 0.49])


@pytest.mark.parametrize("lam, n", [(sympy.Rational(1, 2), 1), (sympy.Rational(7, 10), 2), (sympy.Rational(3, 2), 2), (sympy.Rational(2, 5), 3)])
@pytest.mark.parametrize("coeffs", [(1,), (1, sympy.Rational(1, 3)), (sympy.Rational(1, 2), -1, sympy.Rational(1, 4))])
def test_parabolic_matches_sympy(lam, n, coeffs):
    weight = Weight(float(lam), n)
    if len(coeffs) - 1 > 2 * weight.m:
        pytest.skip("order exceeds 2m")
    expr = _sym_parabolic(lam, weight.m, coeffs)
    f = sympy.lambdify((y, w), expr, "numpy")
    q = QOperator("parabolic", tuple(complex(c) for c in coeffs))
    got = parabolic_kernel(SAMPLES_Y, SAMPLES_W, weight, q)
    np.testing.assert_allclose(got, f(SAMPLES_Y, SAMPLES_W), rtol=1e-11, atol=1e-14)


@pytest.mark.parametrize("lam, n", [(sympy.Rational(1, 2), 1), (sympy.Rational(7, 10), 2), (sympy.Rational(2, 5), 3), (sympy.Rational(5, 2), 2)])
@pytest.mark.parametrize("rows", [(), ((1,), (0, 1)), ((sympy.Rational(1, 2), 0, 1), (0, 0, -1), (1,))])
def test_hyperbolic_matches_sympy(lam, n, rows):
    weight = Weight(float(lam), n)
    if rows and len(rows) - 1 > 2 * weight.m:
        pytest.skip("order exceeds 2m")
    expr = _sym_hyperbolic(lam, weight.m, rows)
    f = sympy.lambdify((s, w), expr, "numpy")
    q = QOperator("hyperbolic", tuple(tuple(complex(c) for c in row) for row in rows))
    got = hyperbolic_kernel(SAMPLES_S, SAMPLES_W, weight, q)
    np.testing.assert_allclose(got, f(SAMPLES_S, SAMPLES_W), rtol=1e-10, atol=1e-13)


def test_parabolic_ab_telescopes():
    for lam, n in ((0.3, 1), (0.7, 2), (0.5, 3), (1.3, 3)):
        g = parabolic_ab(Weight(lam, n))
        m = Weight(lam, n).m
        assert len(g) == 2 * m + 1
        np.testing.assert_allclose(g[:-1], 0.0, atol=1e-14)
        assert g[-1] == pytest.approx(1.0)


def test_hyperbolic_ab_identity():
    # one factor (I + N/r) on cosh^-l: (r - l)/r cosh^-l + l/r cosh^-(l+2)
    ss = np.linspace(-5, 5, 41)
    for l in (0.3, 1.7):
        for r in (0.5, 2.0):
            e = HExpr.power(0)
            got = (e + e.euler(l).scale(1.0 / r)).eval(ss, 0.0, l)
            want = (r - l) / r * np.cosh(ss) ** -l + l / r * np.cosh(ss) ** -(l + 2)
            np.testing.assert_allclose(got, want, rtol=1e-13, atol=1e-15)
    assert hyperbolic_ab(Weight(3.5, 2)).terms == {(0, 0, 0): 1.0}


def test_tanh_reduction():
    e = HExpr({(3, 0, 0): 1.0})
    assert all(q in (0, 1) for q, _, _ in e.terms)
    ss = np.linspace(-2, 2, 9)
    np.testing.assert_allclose(e.eval(ss, 0.0, 0.0), np.tanh(ss) ** 3, atol=1e-15)


def test_resolve_q():
    assert resolve_q("parabolic", Weight(2.5, 2), None).is_identity
    assert resolve_q("elliptic", Weight(0.5, 2), None).is_identity
    with pytest.raises(MissingQError):
        resolve_q("parabolic", Weight(0.5, 2), None)
    with pytest.raises(MissingQError):
        hyperbolic_kernel(0.0, 0.0, Weight(0.5, 1))
    with pytest.raises(ValueError):
        resolve_q("parabolic", Weight(0.7, 2), QOperator("parabolic", (1, 0, 0, 1)))
    with pytest.raises(ValueError):
        resolve_q("hyperbolic", Weight(0.7, 2), QOperator("parabolic", (1,)))
    with pytest.raises(ValueError):
        QOperator("elliptic", (1, 2))
    assert QOperator.identity("hyperbolic").is_identity and QOperator.identity("hyperbolic").order == 0
