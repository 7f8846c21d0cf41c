import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from bergtoep.bergman import (
    a_eigenvalue,
    ab_eigenvalue,
    b_eigenvalue,
    coherent_covariance_residual,
    gram_consistency_residual,
    kernel_eval,
    kernel_series,
    norm_sq,
    rep_diagonal,
)
from bergtoep.groups import GroupElement
from bergtoep.mindex import Weight, enumerate_basis


def _h_mpmath(r, lam):
    num = mpmath.mpf(1)
    for ri in r:
        num *= mpmath.factorial(ri)
    return float(num * mpmath.gamma(lam) / mpmath.gamma(lam + sum(r)))


def test_norm_sq_examples():
    assert norm_sq((0, 0), Weight(0.4, 2)) == 1.0
    assert norm_sq((2,), Weight(3.0, 1)) == pytest.approx(1 / 6, rel=1e-14)
    assert norm_sq((1, 2), Weight(1.5, 2)) == pytest.approx(2 / 13.125, rel=1e-14)


def test_norm_sq_disk_quadrature():
    # probability measure (lambda - 1)(1 - |z|^2)^(lambda - 2) dA / pi on the disk
    for lam in (2.5, 3.0, 4.7):
        for k in range(6):
            # u = |z|^2; the endpoint singularity goes into the algebraic weight
            val, _ = integrate.quad(lambda u: u ** k, 0, 1, weight="alg", wvar=(0, lam - 2))
            assert norm_sq((k,), Weight(lam, 1)) == pytest.approx((lam - 1) * val, rel=1e-10)


@settings(max_examples=100, deadline=None)
@given(
    st.integers(1, 3).flatmap(lambda n: st.tuples(st.lists(st.integers(0, 12), min_size=n, max_size=n), st.floats(0.05, 9.0)))
)
def test_norm_sq_matches_mpmath(args):
    r, lam = args
    try:
        w = Weight(lam, len(r))
    except ValueError:
        return
    assert norm_sq(r, w) == pytest.approx(_h_mpmath(r, lam), rel=1e-12)


def test_eigenvalue_examples():
    assert ab_eigenvalue(4, Weight(5.0, 2)) == 1.0
    assert ab_eigenvalue(3, Weight(1.5, 2)) == pytest.approx(6.6, rel=1e-14)
    assert ab_eigenvalue(1, Weight(0.3, 1)) == pytest.approx(23 / 3, rel=1e-14)
    w = Weight(0.5, 3)
    for k in range(5):
        assert ab_eigenvalue(k, w) == pytest.approx(a_eigenvalue(k, w) * b_eigenvalue(k, w), rel=1e-15)
    assert a_eigenvalue(0, w) == b_eigenvalue(0, w) == 1.0


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("lam", [0.3, 0.7, 1.5, 2.5])
def test_gram_identity(n, lam):
    try:
        w = Weight(lam, n)
    except ValueError:
        pytest.skip("excluded weight")
    if w.m == 0:
        pytest.skip("classical weight")
    for r in enumerate_basis(n, 10):
        assert gram_consistency_residual(r, w) <= 1e-10


def test_gram_examples():
    assert gram_consistency_residual((1, 2), Weight(1.5, 2)) <= 1e-12
    assert gram_consistency_residual((0,), Weight(0.5, 1)) == 0.0
    assert gram_consistency_residual((4,), Weight(0.5, 1)) <= 1e-12
    with pytest.raises(ValueError):
        gram_consistency_residual((1,), Weight(3.0, 1))


def test_kernel_examples():
    w = Weight(2.0, 1)
    assert kernel_eval(np.array([0.5]), np.array([0.0]), w) == pytest.approx(1.0)
    assert kernel_eval(np.array([0.5]), np.array([0.5]), w) == pytest.approx(16 / 9, rel=1e-14)


@pytest.mark.parametrize("lam", [0.7, 2.5])
def test_kernel_series_converges(lam):
    w = Weight(lam, 1)
    z, u = np.array([0.3]), np.array([0.4])
    value, tail = kernel_series(z, u, w, 60)
    assert abs(value - kernel_eval(z, u, w)) <= 1e-10
    assert tail <= 1e-10
    w2 = Weight(lam, 2)
    z2, u2 = np.array([0.3 + 0.1j, -0.2]), np.array([0.1, 0.4j])
    value2, tail2 = kernel_series(z2, u2, w2, 60)
    assert abs(value2 - kernel_eval(z2, u2, w2)) <= max(tail2, 1e-14)


def test_kernel_outside_ball_rejected():
    with pytest.raises(ValueError):
        kernel_eval(np.array([1.2]), np.array([0.0]), Weight(2.0, 1))


def test_rep_diagonal_examples():
    basis = enumerate_basis(1, 4)
    g = GroupElement("elliptic", (-1.0,), 0.0, 0.25)
    expected = [np.exp(1.5j * np.pi) * (-1.0) ** (-r[0]) for r in basis]
    np.testing.assert_allclose(rep_diagonal(g, basis, Weight(3.0, 1)), expected, atol=1e-14)
    g2 = GroupElement("elliptic", (1j, -1j), 0.0, 0.0)
    basis2 = enumerate_basis(2, 3)
    expected2 = [(1j) ** (-r[0]) * (-1j) ** (-r[1]) for r in basis2]
    np.testing.assert_allclose(rep_diagonal(g2, basis2, Weight(1.5, 2)), expected2, atol=1e-14)
    ident = GroupElement.identity("elliptic", 2)
    np.testing.assert_allclose(rep_diagonal(ident, basis2, Weight(0.4, 2)), 1.0)


def test_coherent_covariance():
    g = GroupElement.from_torus("elliptic", (1j,))
    assert coherent_covariance_residual(g, np.array([0.4]), Weight(3.0, 1), D=40) <= 1e-9
    g2 = GroupElement.from_torus("elliptic", (1j, -1.0))
    assert coherent_covariance_residual(g2, np.array([0.3, 0.2]), Weight(4.0, 2), D=30) <= 1e-8
    ident = GroupElement.identity("elliptic", 2)
    assert coherent_covariance_residual(ident, np.array([0.3, 0.2]), Weight(2.7, 2), D=30) <= 1e-12
    with pytest.raises(ValueError):
        coherent_covariance_residual(ident, np.array([0.3, 0.2]), Weight(0.7, 2), D=30)
