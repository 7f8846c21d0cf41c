"""Named property suites behind ``bergtoep check``.

Each suite returns a list of :class:`CheckResult`. Residuals are the worst
case over the suite's cases; the pass test is ``residual <= tolerance``
unless stated otherwise. Everything is seeded, so reports are reproducible.
"""

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ._calculus import HExpr, QOperator, parabolic_kernel
from .bergman import ab_eigenvalue, gram_consistency_residual, norm_sq
from .groups import GroupElement, orbit_grid
from .mindex import MultiIndex, Weight, enumerate_basis
from .spectra import (
    fourier_elliptic_closed,
    fourier_numeric,
    l1_estimate,
    l1_tail_bound,
    nu_numeric,
    phi_kernel,
    spectral_quotient,
    spectrum_routes,
)
from .symbols import SymbolExpr, SymbolTerm
from .toeplitz import assemble, commutator_norm, entry_closed_form, entry_quadrature, intertwine_residual

__all__ = ["CheckResult", "SUITES", "run_suite", "run_all", "invariant_corpus", "random_symbol"]


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    residual: float
    tolerance: float
    detail: str = ""


def _result(suite, name, residual, tolerance, detail="", passed=None):
    residual = float(residual)
    if passed is None:
        passed = bool(residual <= tolerance)
    return CheckResult(suite, name, bool(passed), residual, float(tolerance), detail)


# symbol corpora


def _unit(n, k, power=1):
    e = [0] * n
    e[k] = power
    return tuple(e)


def invariant_corpus(n):
    """Ten separately radial symbols (every term has ``a == b``)."""
    zero = (0,) * n
    e1 = _unit(n, 0)
    en = _unit(n, n - 1)
    S = SymbolExpr
    return [
        S.constant(n),
        S.modulus_squared(n),
        S.defect(n, 1),
        S.defect(n, 2),
        S.monomial(n, e1, e1),
        S.monomial(n, e1, e1) + S.monomial(n, en, en, c=2.0) if n > 1 else S.monomial(n, _unit(n, 0, 2), _unit(n, 0, 2)),
        S([SymbolTerm(1.0, e, e, 1) for e in np.eye(n, dtype=int)], n),
        S.constant(n, 0.5) + S.monomial(n, _unit(n, 0, 2), _unit(n, 0, 2), c=2.0),
        S.monomial(n, en, en) + S.monomial(n, zero, zero, p=3, c=3.0),
        S.monomial(n, e1, e1, p=1, c=1 + 2j),
    ]


def random_symbol(n, rng, max_terms=3, max_degree=2, max_p=2):
    """Random element of the closed-form class with complex coefficients."""
    terms = []
    for _ in range(int(rng.integers(1, max_terms + 1))):
        a = rng.integers(0, max_degree + 1, size=n)
        b = rng.integers(0, max_degree + 1, size=n)
        c = complex(rng.normal(), rng.normal())
        terms.append(SymbolTerm(c, tuple(int(v) for v in a), tuple(int(v) for v in b), int(rng.integers(0, max_p + 1))))
    return SymbolExpr(terms, n)


def _valid_lambdas(n, candidates):
    out = []
    for lam in candidates:
        try:
            out.append(Weight(lam, n))
        except ValueError:
            pass
    return out


# suites


def suite_gram(seed):
    """Gram continuation identity and closed-form/quadrature agreement."""
    worst = 0.0
    count = 0
    for n in (1, 2, 3):
        for w in _valid_lambdas(n, (0.3, 0.7, 1.5, 2.5)):
            for r in enumerate_basis(n, 10):
                if w.m:
                    res = gram_consistency_residual(r, w)
                else:
                    res = abs(ab_eigenvalue(r.degree, w) * norm_sq(r, w.shifted()) - norm_sq(r, w)) / norm_sq(r, w)
                worst = max(worst, res)
                count += 1
    out = [_result("gram", "gram-identity", worst, 1e-10, f"{count} cases, n in 1..3, |r| <= 10")]

    rng = np.random.default_rng(seed)
    worst_diff = worst_est = 0.0
    for _ in range(20):
        n = int(rng.integers(1, 4))
        lam = n + float(rng.uniform(0.05, 5.0))
        w = Weight(lam, n)
        r = MultiIndex(rng.integers(0, 3, size=n))
        s = MultiIndex(rng.integers(0, 3, size=n))
        phi = random_symbol(n, rng, max_degree=1)
        # one term that couples r and s, so the entry is not trivially zero
        a = tuple(max(ri - si, 0) for ri, si in zip(r, s))
        b = tuple(max(si - ri, 0) for ri, si in zip(r, s))
        phi = phi + SymbolExpr.monomial(n, a, b, p=int(rng.integers(0, 2)), c=complex(rng.normal(), rng.normal()))
        exact = entry_closed_form(phi, r, s, w)
        approx, est = entry_quadrature(phi, r, s, w)
        worst_diff = max(worst_diff, abs(exact - approx))
        worst_est = max(worst_est, est)
    out.append(_result("gram", "closed-vs-quadrature", worst_diff, 1e-8, f"20 random cases; worst error estimate {worst_est:.3g}",
                       passed=worst_diff <= 1e-8 and worst_est <= 1e-8))
    return out


def suite_prop32(seed):
    """Intertwining ``pi(g) T_phi = T_{phi_g} pi(g)`` on truncations."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    cases = 0
    for i in range(50):
        n = (1, 2, 3)[i % 3]
        lam = (0.4, 1.7, n + 0.5, n + 3)[(i // 3) % 4]
        w = Weight(lam, n)
        D = int(rng.integers(1, 6)) if n < 3 else int(rng.integers(1, 5))
        phi = random_symbol(n, rng)
        g = GroupElement.random("elliptic", n, rng)
        worst = max(worst, intertwine_residual(phi, g, w, D))
        cases += 1
    return [_result("prop32", "intertwining", worst, 1e-11, f"{cases} random cases, D <= 5")]


def suite_commute(seed):
    """Invariant symbols commute; generic ones do not."""
    out = []
    for n in (1, 2):
        worst = 0.0
        for lam in (0.5, n + 1.0):
            w = Weight(lam, n)
            mats = [assemble(phi, w, 6) for phi in invariant_corpus(n)]
            for A, B in combinations(mats, 2):
                worst = max(worst, commutator_norm(A, B))
        out.append(_result("commute", f"invariant-pairs-n{n}", worst, 1e-12, "45 pairs x 2 weights, D = 6"))
    w = Weight(3.0, 1)
    pair = (SymbolExpr.monomial(1, (1,), (0,)) + SymbolExpr.monomial(1, (0,), (1,)), SymbolExpr.modulus_squared(1))
    norm = commutator_norm(assemble(pair[0], w, 6), assemble(pair[1], w, 6))
    out.append(_result("commute", "non-invariant-pair", norm, 1e-2, "z + conj(z) vs |z|^2, n=1, lambda=3; must exceed", passed=norm > 1e-2))
    rng = np.random.default_rng(seed)
    w = Weight(2.5, 2)
    big = 0
    for _ in range(20):
        A, B = random_symbol(2, rng), random_symbol(2, rng)
        big += commutator_norm(assemble(A, w, 4), assemble(B, w, 4)) > 1e-4
    out.append(_result("commute", "generic-non-commutation", big / 20, 0.9, "fraction of random pairs above 1e-4; must reach",
                       passed=big / 20 >= 0.9))
    return out


def _corpus_six(n):
    c = invariant_corpus(n)
    return [c[0], c[1], c[3], c[5], c[8], c[9]]


def suite_spectrum_cross(seed):
    """Diagonal route vs convolution route, and the phi = 1 quotient for all groups."""
    out = []
    worst = 0.0
    for n in (1, 2):
        for lam in (0.4, 0.9, 1.6, n + 0.5, n + 2):
            w = Weight(lam, n)
            for phi in _corpus_six(n):
                for _, diag, conv, _ in spectrum_routes(phi, w, 8):
                    worst = max(worst, abs(diag - conv) / abs(diag))
    out.append(_result("spectrum-cross", "diagonal-vs-convolution", worst, 1e-8, "6 symbols x 5 weights x n in {1,2}, |r| <= 8"))

    for kind in ("elliptic", "parabolic", "hyperbolic"):
        worst = 0.0
        for n in (1, 2):
            for lam in (n + 0.5, n + 2.0):
                w = Weight(lam, n)
                grid = orbit_grid(kind, n, 64)
                quot = _unit_quotient(kind, grid, w)
                vals = np.array([v for v in quot.values() if v is not None])
                worst = max(worst, float(np.max(np.abs(vals - 1))))
        out.append(_result("spectrum-cross", f"identity-quotient-{kind}", worst, 1e-8, "phi = 1, m = 0, n in {1,2}"))
    return out


def _unit_quotient(kind, grid, weight, degree=3):
    one = SymbolExpr.constant(weight.n)
    if kind == "elliptic":
        lattice = enumerate_basis(weight.n, 8)
        nu = nu_numeric(one, grid, weight, 8, lattice=lattice)
        den = fourier_numeric(grid, phi_kernel(kind, grid, weight), lattice=lattice)
    else:
        nu = nu_numeric(one, grid, weight, 60, degree=degree)
        den = fourier_numeric(grid, phi_kernel(kind, grid, weight), degree=degree)
    return spectral_quotient(nu, den)


def suite_kernels(seed):
    """Closed-form kernel identities and the elliptic Fourier coefficients."""
    out = []
    y = np.linspace(-40.0, 40.0, 4001)
    worst = 0.0
    for n, lam in ((1, 0.5), (2, 0.7), (2, 1.5), (2, 3.5), (3, 0.4), (3, 1.3)):
        w = Weight(lam, n)
        ab = parabolic_kernel(y, 0.0, w, QOperator.identity("parabolic"))
        target = (1 + y ** 2 / 4) ** (-(lam + 2 * w.m))
        worst = max(worst, float(np.max(np.abs(np.abs(ab) ** 2 - target))))
    out.append(_result("kernels", "parabolic-modulus", worst, 1e-12, "|A B D(q)|^2 = (1 + y^2/4)^-(lambda+2m) on [-40, 40]"))

    s = np.linspace(-40.0, 40.0, 4001)
    worst = 0.0
    for l in (0.3, 1.0, 2.5, 7.0):
        for r in (0.5, 1.7, 4.0):
            e = HExpr.power(0)
            lhs = (e + e.euler(l).scale(1.0 / r)).eval(s, 0.0, l)
            rhs = (r - l) / r * np.cosh(s) ** -l + l / r * np.cosh(s) ** -(l + 2)
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    out.append(_result("kernels", "cosh-identity", worst, 1e-12, "(I + N/r) cosh^-l on [-40, 40]"))

    worst = 0.0
    parseval = 0.0
    for n in (1, 2):
        # lambda = 2 is an excluded weight for n = 2
        for w in _valid_lambdas(n, (0.5, 2.0, 4.5)):
            grid = orbit_grid("elliptic", n, 64)
            vals = phi_kernel("elliptic", grid, w)
            lattice = enumerate_basis(n, 10)
            table = fourier_numeric(grid, vals, lattice=lattice)
            exact = np.array([fourier_elliptic_closed(r, w) for r in lattice])
            worst = max(worst, float(np.max(np.abs(table.coeffs - exact))))
            full = fourier_numeric(grid, vals, lattice="full")
            mean_sq = float(np.mean(np.abs(vals) ** 2))
            parseval = max(parseval, abs(full.energy() - mean_sq) / mean_sq)
    out.append(_result("kernels", "elliptic-fourier-closed", worst, 1e-9, "FFT vs closed form, |r| <= 10, M = 64"))
    out.append(_result("kernels", "parseval", parseval, 1e-8, "energy of the full table vs grid mean of |phi_E|^2"))

    worst = 0.0
    for kind in ("parabolic", "hyperbolic"):
        for n, lam in ((1, 1.5), (2, 4.0)):
            w = Weight(lam, n)
            grid = orbit_grid(kind, n, 64)
            table = fourier_numeric(grid, phi_kernel(kind, grid, w), degree=3)
            scale = np.max(np.abs(table.coeffs))
            mask = table.support_mask
            c = table.coeffs[mask]
            worst = max(worst, float(np.max(np.maximum(-c.real, 0) + np.abs(c.imag)) / scale))
    out.append(_result("kernels", "multiplier-positivity", worst, 1e-10,
                       "numeric P/H kernel coefficients: negative or imaginary part relative to max"))
    return out


def suite_l1(seed):
    """Integrability of the line kernels: monotone, Cauchy, and within the analytic tail bound."""
    out = []
    S_values = [5.0, 10.0, 20.0, 40.0]
    params = ((1, 1.5), (2, 3.5), (2, 1.5))
    for kind in ("hyperbolic", "parabolic"):
        worst_inc = 0.0
        worst_bound = 0.0
        worst_rate = 0.0
        monotone = True
        for n, lam in params:
            w = Weight(lam, n)
            est = l1_estimate(kind, w, S_values, q=QOperator.identity(kind))
            vals = [v for _, v in est]
            monotone &= all(b >= a for a, b in zip(vals, vals[1:]))
            inc = vals[3] - vals[2]
            worst_inc = max(worst_inc, inc / vals[3])
            worst_bound = max(worst_bound, inc / l1_tail_bound(kind, w, 20.0))
            if kind == "parabolic":
                # shell [S, 2S] scales like S^(1 - lambda - 2m)
                slope = math.log2(inc / (vals[2] - vals[1]))
                worst_rate = max(worst_rate, abs(slope - (1 - lam - 2 * w.m)))
        out.append(_result("l1", f"{kind}-monotone", 0.0 if monotone else 1.0, 0.0, "estimates non-decreasing in S"))
        out.append(_result("l1", f"{kind}-tail-vs-bound", worst_bound, 1.0, "increment S=20..40 over analytic tail bound at 20"))
        if kind == "hyperbolic":
            out.append(_result("l1", "hyperbolic-cauchy", worst_inc, 1e-6, "relative increment S=20..40"))
        else:
            out.append(_result("l1", "parabolic-rate", worst_rate, 0.1,
                               f"fitted shell exponent vs 1-lambda-2m; relative increment S=20..40 is {worst_inc:.3g}"))
    for kind in ("parabolic", "hyperbolic"):
        rel = []
        for lam in (1.5, 10.0):
            w = Weight(lam, 1)
            (_, a), (_, b) = l1_estimate(kind, w, [10.0, 20.0])
            rel.append((b - a) / b)
        out.append(_result("l1", f"{kind}-faster-for-large-lambda", rel[1] / rel[0], 1.0,
                           "relative tail at lambda=10 over lambda=1.5; must be below 1", passed=rel[1] < rel[0]))
    return out


def suite_measure_scale(seed):
    """Rescaling the invariant measure by 3 leaves every spectral quotient unchanged."""
    worst = 0.0
    n = 2
    cases = [
        ("elliptic", Weight(0.9, n), SymbolExpr.monomial(n, (1, 0), (1, 0)) + SymbolExpr.defect(n)),
        ("parabolic", Weight(3.5, n), SymbolExpr.modulus_squared(n)),
        ("hyperbolic", Weight(3.5, n), SymbolExpr.defect(n)),
    ]
    for kind, w, phi in cases:
        grid = orbit_grid(kind, n, 64)
        quots = []
        for g in (grid, grid.scaled(3.0)):
            if kind == "elliptic":
                lattice = enumerate_basis(n, 8)
                nu = nu_numeric(phi, g, w, 8, lattice=lattice)
                den = fourier_numeric(g, phi_kernel(kind, g, w), lattice=lattice)
            else:
                nu = nu_numeric(phi, g, w, 40, degree=2)
                den = fourier_numeric(g, phi_kernel(kind, g, w), degree=2)
            quots.append(spectral_quotient(nu, den))
        for key, v in quots[0].items():
            u = quots[1][key]
            if (v is None) != (u is None):
                worst = max(worst, math.inf)
            elif v is not None:
                worst = max(worst, abs(v - u))
    return [_result("measure-scale", "quotient-invariance", worst, 1e-12, "weights x3 on E(2), P(2), H(2) grids")]


SUITES = {
    "gram": suite_gram,
    "prop32": suite_prop32,
    "commute": suite_commute,
    "spectrum-cross": suite_spectrum_cross,
    "kernels": suite_kernels,
    "l1": suite_l1,
    "measure-scale": suite_measure_scale,
}


def run_suite(name, seed=42):
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or 'all'")
    return SUITES[name](seed)


def run_all(seed=42):
    results = []
    for name in SUITES:
        results.extend(run_suite(name, seed))
    return results
