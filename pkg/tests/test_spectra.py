import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bergtoep._calculus import QOperator
from bergtoep.groups import orbit_grid
from bergtoep.mindex import Weight, enumerate_basis
from bergtoep.symbols import SymbolExpr
from bergtoep.spectra import (
    AliasingWarning,
    FourierTable,
    MultiplierError,
    fourier_elliptic_closed,
    fourier_elliptic_table,
    fourier_numeric,
    l1_estimate,
    l1_tail_bound,
    nu_elliptic,
    nu_numeric,
    phi_kernel,
    rr_star_apply,
    spectral_quotient,
    spectrum_routes,
    sqrt_rr_star_multiplier,
)
from bergtoep.bergman import norm_sq


def test_closed_form_examples():
    assert fourier_elliptic_closed((0, 0), Weight(0.4, 2)) == 1.0
    assert fourier_elliptic_closed((1,), Weight(2.0, 1)) == pytest.approx(1.0, rel=1e-15)
    assert fourier_elliptic_closed((1, 0), Weight(1.5, 2)) == pytest.approx(0.375, rel=1e-15)
    assert fourier_elliptic_closed((-1, 2), Weight(1.5, 2)) == 0.0


def test_kernel_point_values():
    t = np.array([[1.0, -1.0]])
    assert phi_kernel("elliptic", (t, None), Weight(0.7, 2))[0] == pytest.approx(1.0)
    assert phi_kernel("elliptic", (np.array([[1.0]]), None), Weight(2.0, 1))[0] == pytest.approx(4.0)


def test_hyperbolic_kernel_decay():
    w = Weight(2.5, 2)
    s = np.linspace(10, 30, 21)
    vals = np.abs(phi_kernel("hyperbolic", (np.ones((21, 1)), s), w))
    slope = np.polyfit(s, np.log(vals), 1)[0]
    assert slope == pytest.approx(-w.lam, abs=1e-3)


def test_fft_constant_and_example():
    grid = orbit_grid("elliptic", 1, 64)
    const = fourier_numeric(grid, np.ones(grid.shape), degree=5)
    np.testing.assert_allclose(const.coeffs, [1.0 if r == 0 else 0.0 for (r,) in const.lattice], atol=1e-15)
    tab = fourier_numeric(grid, phi_kernel("elliptic", grid, Weight(2.0, 1)), degree=5)
    assert abs(tab[(1,)] - 1.0) <= 1e-10


@pytest.mark.parametrize("n, M", [(1, 64), (2, 64), (3, 32)])
@pytest.mark.parametrize("lam", [0.3, 1.5, 4.5])
def test_fft_matches_closed_form(n, M, lam):
    w = Weight(lam, n)
    grid = orbit_grid("elliptic", n, M)
    lattice = enumerate_basis(n, 10)
    tab = fourier_numeric(grid, phi_kernel("elliptic", grid, w), lattice=lattice)
    closed = fourier_elliptic_table(w, 10)
    assert np.max(np.abs(tab.coeffs - closed.coeffs)) <= 1e-9


def test_aliasing_warning():
    grid = orbit_grid("elliptic", 2, 8)
    with pytest.warns(AliasingWarning):
        fourier_numeric(grid, np.ones(grid.shape), degree=4)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        fourier_numeric(grid, np.ones(grid.shape), lattice="full")


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 2), st.integers(0, 10 ** 6))
def test_fft_parseval_and_recovery(d, seed):
    rng = np.random.default_rng(seed)
    M = 16
    grid = orbit_grid("elliptic", d, M)
    lattice = rng.integers(-5, 6, size=(6, d))
    lattice = np.unique(lattice, axis=0)
    coef = rng.normal(size=len(lattice)) + 1j * rng.normal(size=len(lattice))
    theta = grid.torus_values()
    vals = np.zeros(grid.shape, dtype=complex)
    for r, c in zip(lattice, coef):
        vals += c * np.prod(theta ** r, axis=-1)
    tab = fourier_numeric(grid, vals, lattice=lattice)
    np.testing.assert_allclose(tab.coeffs, coef, atol=1e-12)
    full = fourier_numeric(grid, vals, lattice="full")
    assert full.energy() == pytest.approx(np.mean(np.abs(vals) ** 2), rel=1e-12)


def test_line_transform_gaussian():
    # int exp(-pi s^2) exp(-2 pi i xi s) ds = exp(-pi xi^2)
    grid = orbit_grid("hyperbolic", 1, 1, 4001, 40.0)
    vals = np.exp(-np.pi * grid.line_values() ** 2)
    tab = fourier_numeric(grid, vals)
    np.testing.assert_allclose(tab.coeffs[0], np.exp(-np.pi * tab.line_freqs ** 2), atol=1e-12)


def test_nu_elliptic_examples():
    w = Weight(0.7, 2)
    one = nu_elliptic(SymbolExpr.constant(2), w, 5)
    for r, c in zip(one.lattice, one.coeffs):
        r = tuple(int(v) for v in r)
        assert c == pytest.approx((2 * 2) ** (-sum(r)) / norm_sq(r, w), rel=1e-13)
        assert c == pytest.approx(fourier_elliptic_closed(r, w), rel=1e-13)
    tab = nu_elliptic(SymbolExpr.modulus_squared(1), Weight(3.0, 1), 4)
    assert tab[(0,)] == pytest.approx(1 / 3)
    assert len(tab.lattice) == 5 and (5,) not in [tuple(r) for r in tab.lattice]


@pytest.mark.parametrize("lam", [3.0, 0.5])
def test_quotient_modsq(lam):
    w = Weight(lam, 1)
    q = spectral_quotient(nu_elliptic(SymbolExpr.modulus_squared(1), w, 6), fourier_elliptic_table(w, 6))
    for (k,), v in q.items():
        assert v == pytest.approx((k + 1) / (lam + k), rel=1e-12)
    if lam == 0.5:
        assert q[(0,)] == pytest.approx(2.0)


def test_quotient_off_support_undefined():
    lat = np.array([[0], [1], [2]])
    den = FourierTable("elliptic", lat, [1.0, 0.0, 0.5])
    num = FourierTable("elliptic", lat, [2.0, 3.0, 1.0])
    q = spectral_quotient(num, den)
    assert q[(1,)] is None and q[(0,)] == 2.0 and q[(2,)] == 2.0
    with pytest.raises(ValueError):
        spectral_quotient(num, FourierTable("elliptic", lat[:2], [1.0, 1.0]))


def test_rr_star_and_sqrt():
    w = Weight(2.0, 1)
    f = FourierTable("elliptic", np.array([[0], [1]]), [1.0, 1.0])
    np.testing.assert_allclose(rr_star_apply(f, "elliptic", w).coeffs, [1.0, 1.0])
    delta = FourierTable("elliptic", np.array([[0]]), [1.0])
    assert rr_star_apply(delta, "elliptic", w).coeffs[0] == pytest.approx(1.0)
    root = sqrt_rr_star_multiplier("elliptic", w)
    assert root[(0,)] == pytest.approx(1.0)
    assert np.all(root.coeffs.real > 0)
    bad = FourierTable("elliptic", np.array([[0], [1]]), [1.0, -0.5])
    with pytest.raises(MultiplierError):
        sqrt_rr_star_multiplier("elliptic", w, bad)


def test_hyperbolic_multiplier_nonnegative():
    w = Weight(2.5, 2)
    grid = orbit_grid("hyperbolic", 2, 16)
    tab = fourier_numeric(grid, phi_kernel("hyperbolic", grid, w), degree=3)
    root = sqrt_rr_star_multiplier("hyperbolic", w, tab)
    assert np.all(root.coeffs >= 0)


@pytest.mark.parametrize("lam", [0.4, 0.9, 3.5])
def test_spectrum_routes_agree(lam):
    w = Weight(lam, 2)
    phi = SymbolExpr.monomial(2, (1, 0), (1, 0), p=1) + 2 * SymbolExpr.modulus_squared(2)
    rows = spectrum_routes(phi, w, 5)
    for r, diag, conv, on in rows:
        assert on
        assert abs(diag - conv) <= 1e-8 * abs(diag)
    closed = spectrum_routes(phi, w, 5, method="closed")
    for (_, diag, _, _), (_, none, conv, _) in zip(rows, closed):
        assert none is None
        assert abs(diag - conv) <= 1e-12 * abs(diag)


@pytest.mark.parametrize("kind", ["parabolic", "hyperbolic"])
def test_unit_symbol_quotient_n1(kind):
    # n = 1: no torus, the kernel is a function of the line coordinate only
    w = Weight(1.5, 1)
    grid = orbit_grid(kind, 1, 1)
    one = SymbolExpr.constant(1)
    nu = nu_numeric(one, grid, w, 60)
    den = fourier_numeric(grid, phi_kernel(kind, grid, w))
    q = spectral_quotient(nu, den)
    mags = np.abs(den.coeffs.ravel())
    # bins far below the peak are dominated by roundoff in both transforms
    strong = mags > 1e-6 * mags.max()
    vals = np.array([v for v, keep in zip(q.values(), strong) if keep])
    assert np.max(np.abs(vals - 1)) <= 1e-8


def test_measure_scale_invariance():
    w = Weight(2.5, 2)
    grid = orbit_grid("hyperbolic", 2, 16, 2001, 30.0)
    phi = SymbolExpr.modulus_squared(2)
    q1 = spectral_quotient(nu_numeric(phi, grid, w, 40, degree=2), fourier_numeric(grid, phi_kernel("hyperbolic", grid, w), degree=2))
    g3 = grid.scaled(3.0)
    q3 = spectral_quotient(nu_numeric(phi, g3, w, 40, degree=2), fourier_numeric(g3, phi_kernel("hyperbolic", g3, w), degree=2))
    assert q1.keys() == q3.keys()
    diffs = [abs(a - q3[k]) for k, a in q1.items() if a is not None]
    assert max(diffs) <= 1e-12


def test_l1_monotone_and_bounded():
    for kind, lam in (("hyperbolic", 2.5), ("parabolic", 3.5)):
        w = Weight(lam, 2)
        est = l1_estimate(kind, w, [5, 10, 20, 40], M=8)
        vals = [v for _, v in est]
        assert all(b >= a for a, b in zip(vals, vals[1:]))
        # tail beyond 20 is below the analytic bound
        assert vals[-1] - vals[-2] <= l1_tail_bound(kind, w, 20)
    with pytest.raises(ValueError):
        l1_estimate("elliptic", Weight(1.5, 2), [5])
    with pytest.raises(ValueError):
        l1_estimate("hyperbolic", Weight(1.5, 2), [10, 5])


def test_l1_hyperbolic_cauchy():
    w = Weight(2.5, 2)
    est = dict(l1_estimate("hyperbolic", w, [20, 40], M=8))
    assert (est[40] - est[20]) / est[40] <= 1e-6


def test_l1_continued_needs_q():
    w = Weight(0.5, 2)
    from bergtoep._calculus import MissingQError

    with pytest.raises(MissingQError):
        l1_estimate("parabolic", w, [5, 10])
    est = l1_estimate("parabolic", w, [5, 10], q=QOperator.identity("parabolic"), M=8)
    assert est[1][1] > est[0][1] > 0
    assert math.isinf(l1_tail_bound("parabolic", w, 1.0))
