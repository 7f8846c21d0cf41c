"""Weighted Bergman spaces on the unit ball for every weight ``lambda > 0``.

Monomials ``z**r`` are orthogonal with squared norm
``h_r = r! Gamma(lambda) / Gamma(lambda + |r|)``. For ``lambda <= n`` the
inner product is ``<A f, B g>`` at weight ``lambda + 2m``, where ``A`` and
``B`` are polynomials in the Euler operator and hence diagonal on monomials.
"""

import math

import numpy as np

from . import _backend
from .groups import act, cocycle
from .mindex import MultiIndex, Weight, enumerate_basis, log_pochhammer

__all__ = [
    "Weight",
    "log_norm_sq",
    "norm_sq",
    "norm_sq_array",
    "kernel_eval",
    "kernel_series",
    "a_eigenvalue",
    "b_eigenvalue",
    "ab_eigenvalue",
    "gram_consistency_residual",
    "rep_diagonal",
    "coherent_covariance_residual",
]


def log_norm_sq(r, weight):
    """``log(h_r)`` at the given weight."""
    r = MultiIndex(r)
    return r.factorial_log() - log_pochhammer(weight.lam, r.degree)


def norm_sq(r, weight):
    """Squared norm ``h_r = r! Gamma(lambda) / Gamma(lambda + |r|)`` of ``z**r``."""
    r = MultiIndex(r)
    if len(r) != weight.n:
        raise ValueError(f"multi-index length {len(r)} does not match n={weight.n}")
    return float(np.exp(log_norm_sq(r, weight)))


def norm_sq_array(basis, weight):
    return np.array([norm_sq(r, weight) for r in basis])


def _check_ball(z, name):
    z = np.asarray(z, dtype=np.complex128)
    if np.any(np.sum(np.abs(z) ** 2, axis=-1) >= 1.0):
        raise ValueError(f"{name} must lie in the open unit ball")
    return z


def kernel_eval(z, w, weight):
    """Reproducing kernel ``(1 - z . conj(w))^(-lambda)`` on the principal branch."""
    z = _check_ball(z, "z")
    w = _check_ball(w, "w")
    inner = np.sum(z * np.conj(w), axis=-1)
    return np.exp(-weight.lam * np.log(1.0 - inner))


def kernel_series(z, w, weight, D=60):
    """Degree-``D`` truncation ``sum_{|r|<=D} z^r conj(w)^r / h_r`` of the kernel.

    Returns ``(value, tail_bound)``; the bound is the geometric remainder of
    the degree-grouped series ``sum_k (lambda)_k / k! (z . conj w)^k``.
    """
    z = _check_ball(z, "z")
    w = _check_ball(w, "w")
    basis = enumerate_basis(weight.n, D)
    coeffs = np.array([np.prod(np.conj(w) ** np.array(r)) / norm_sq(r, weight) for r in basis])
    value = _backend.poly_eval(z.reshape(1, -1), np.array(basis), coeffs)[0]
    q = abs(np.sum(z * np.conj(w)))
    lead = np.exp(log_pochhammer(weight.lam, D + 1) - math.lgamma(D + 2)) * q ** (D + 1)
    ratio = q * max(1.0, (weight.lam + D + 1) / (D + 2))
    tail = lead / (1 - ratio) if ratio < 1 else float("inf")
    return complex(value), float(tail)


def a_eigenvalue(k, weight):
    """Eigenvalue of ``A_lambda`` on degree-``k`` monomials:
    ``prod_{j=m}^{2m-1} (lambda + j + k) / (lambda + j)``."""
    lam, m = weight.lam, weight.m
    out = 1.0
    for j in range(m, 2 * m):
        out *= (lam + j + k) / (lam + j)
    return out


def b_eigenvalue(k, weight):
    """Eigenvalue of ``B_lambda``: ``prod_{j=0}^{m-1} (lambda + j + k) / (lambda + j)``."""
    lam, m = weight.lam, weight.m
    out = 1.0
    for j in range(m):
        out *= (lam + j + k) / (lam + j)
    return out


def ab_eigenvalue(k, weight):
    """Eigenvalue of ``A_lambda B_lambda`` on degree ``k``; 1 when ``m = 0``."""
    return a_eigenvalue(k, weight) * b_eigenvalue(k, weight)


def gram_consistency_residual(r, weight):
    """Relative mismatch between ``<A z^r, B z^r>_{lambda+2m}`` and ``h_r(lambda)``."""
    r = MultiIndex(r)
    if weight.m < 1:
        raise ValueError("the Gram identity concerns continued weights (m >= 1)")
    k = r.degree
    shifted = weight.shifted()
    via_shift = a_eigenvalue(k, weight) * b_eigenvalue(k, weight) * norm_sq(r, shifted)
    direct = norm_sq(r, weight)
    return abs(via_shift - direct) / direct


def rep_diagonal(g, basis, weight):
    """Diagonal of ``pi_lambda(g)`` on monomials for a quasi-elliptic ``g``.

    ``pi(g) z^r = j(g^-1, .) (g^-1 . z)^r = exp(2 pi i lambda x) t^(-r) z^r``.
    """
    if g.kind != "elliptic":
        raise NotImplementedError("pi_lambda on the monomial basis is implemented for quasi-elliptic elements only")
    t = np.asarray(g.torus, dtype=np.complex128)
    phase = np.exp(2j * np.pi * weight.lam * g.cover_x)
    exps = np.asarray(basis, dtype=np.int64)
    return phase * np.prod(t[None, :] ** (-exps), axis=1)


_SAMPLE_GRID_SEED = 20240611


def _sample_grid(n, count=24, radius=0.7):
    rng = np.random.default_rng(_SAMPLE_GRID_SEED + n)
    pts = rng.normal(size=(count, n)) + 1j * rng.normal(size=(count, n))
    norms = np.linalg.norm(pts, axis=1)
    scale = radius * rng.random(count) ** (1.0 / (2 * n))
    return pts * (scale / norms)[:, None]


def coherent_covariance_residual(g, z, weight, D=60):
    """Sup over a fixed sample grid of ``|pi(g) K_z - conj(j(g, z)) K_{g.z}|``.

    Both sides are degree-``D`` monomial expansions; the left side applies
    the diagonal of ``pi(g)`` to the coefficients of ``K_z``.
    """
    if weight.lam <= weight.n:
        raise ValueError("covariance check uses the direct representation (lambda > n)")
    if g.kind != "elliptic":
        raise NotImplementedError("unsupported group: only quasi-elliptic elements act on the truncated basis")
    z = _check_ball(np.asarray(z, dtype=np.complex128).reshape(-1), "z")
    basis = enumerate_basis(weight.n, D)
    exps = np.array(basis)
    h = norm_sq_array(basis, weight)
    kz = np.prod(np.conj(z)[None, :] ** exps, axis=1) / h
    lhs_coeffs = rep_diagonal(g, basis, weight) * kz
    gz = act(g, z)
    rhs_coeffs = np.conj(cocycle(g, z, weight)) * np.prod(np.conj(gz)[None, :] ** exps, axis=1) / h
    pts = _sample_grid(weight.n)
    lhs = _backend.poly_eval(pts, exps, lhs_coeffs)
    rhs = _backend.poly_eval(pts, exps, rhs_coeffs)
    return float(np.max(np.abs(lhs - rhs)))
