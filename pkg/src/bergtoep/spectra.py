"""Fourier side of the restriction principle on the orbit ``H . z0``.

Conventions
-----------
* A function on the orbit is sampled on an :class:`~bergtoep.groups.OrbitGrid`
  with the cover phase removed (``f~ = e^(2 pi i lambda x) f``).
* Torus coefficient at ``r`` is the coefficient of ``t^r``; the line
  transform is ``int f(s) exp(-2 pi i xi s) ds`` on ``[-S, S]``.
* The support of a table is ``|coeff| > support_eps * max |coeff|``.
"""

import math
import warnings
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import _backend
from ._calculus import QOperator, hyperbolic_ab, hyperbolic_kernel, parabolic_kernel, resolve_q
from .bergman import log_norm_sq
from .groups import KINDS, OrbitGrid, base_point, d_lambda_reduced, orbit_grid
from .mindex import MultiIndex, enumerate_basis, log_pochhammer
from .symbols import is_elliptic_invariant
from .toeplitz import InvarianceError, assemble, entry_closed_form

__all__ = [
    "SUPPORT_EPS",
    "AliasingWarning",
    "MultiplierError",
    "FourierTable",
    "QOperator",
    "default_line_freqs",
    "phi_kernel",
    "fourier_elliptic_closed",
    "fourier_elliptic_table",
    "fourier_numeric",
    "nu_elliptic",
    "nu_samples",
    "nu_numeric",
    "spectral_quotient",
    "rr_star_apply",
    "sqrt_rr_star_multiplier",
    "spectrum_routes",
    "l1_estimate",
    "l1_tail_bound",
]

SUPPORT_EPS = 1e-12


class AliasingWarning(UserWarning):
    """Requested torus degree is at or above the Nyquist limit of the grid."""


class MultiplierError(ValueError):
    """A kernel multiplier that should be non-negative is negative or complex."""


def default_line_freqs(count=801, halfwidth=2.0):
    return np.linspace(-halfwidth, halfwidth, count)


@dataclass
class FourierTable:
    """Fourier coefficients on a torus lattice, optionally times a line-frequency grid.

    ``coeffs`` has shape ``(K,)`` without a line factor, ``(K, F)`` with one.
    """

    kind: str
    lattice: np.ndarray
    coeffs: np.ndarray
    line_freqs: np.ndarray = None
    support_eps: float = SUPPORT_EPS
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        lattice = np.asarray(self.lattice, dtype=np.int64)
        self.lattice = lattice.reshape(lattice.shape[0], -1) if lattice.ndim else lattice.reshape(1, 0)
        self.coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        want = (self.lattice.shape[0],) + (() if self.line_freqs is None else (len(self.line_freqs),))
        if self.coeffs.shape != want:
            raise ValueError(f"coefficient shape {self.coeffs.shape} does not match frequencies {want}")

    @property
    def support_mask(self):
        scale = np.max(np.abs(self.coeffs), initial=0.0)
        return np.abs(self.coeffs) > self.support_eps * scale

    def frequencies(self):
        """Flat list of frequency tuples, matching ``coeffs.ravel()``."""
        lat = [tuple(int(v) for v in r) for r in self.lattice]
        if self.line_freqs is None:
            return lat
        return [r + (float(xi),) for r in lat for xi in self.line_freqs]

    def index(self, r):
        r = tuple(r)
        for i, row in enumerate(self.lattice):
            if tuple(row) == r:
                return i
        raise KeyError(r)

    def __getitem__(self, r):
        return self.coeffs[self.index(r)]

    def with_coeffs(self, coeffs, **meta):
        return FourierTable(self.kind, self.lattice, coeffs, self.line_freqs, self.support_eps, {**self.meta, **meta})

    def same_frequencies(self, other):
        if not np.array_equal(self.lattice, other.lattice):
            return False
        if (self.line_freqs is None) != (other.line_freqs is None):
            return False
        return self.line_freqs is None or np.array_equal(self.line_freqs, other.line_freqs)

    def energy(self):
        return float(np.sum(np.abs(self.coeffs) ** 2))


# kernels


def _torus_average(torus):
    torus = np.asarray(torus, dtype=np.complex128)
    d = torus.shape[-1]
    if d == 0:
        return np.zeros(torus.shape[:-1], dtype=np.complex128)
    return torus.sum(axis=-1) / (2 * d)


def phi_kernel(kind, grid, weight, q=None):
    """Convolution kernel ``phi_H`` sampled on an orbit grid (or explicit points).

    ``grid`` is an :class:`OrbitGrid` or a pair ``(torus, line)`` of arrays
    with ``torus[..., d]`` unit numbers and ``line`` broadcastable to
    ``torus[..., 0]`` (``line`` is ignored for the elliptic kernel).

    For ``m >= 1`` the parabolic and hyperbolic kernels need ``q``; pass
    ``QOperator.identity(kind)`` to request ``Q = I`` explicitly.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    if isinstance(grid, OrbitGrid):
        if grid.kind != kind or grid.n != weight.n:
            raise ValueError("grid does not match kind/dimension")
        w = grid.torus_average()
        line = grid.line_values() if grid.has_line else None
    else:
        torus, line = grid
        w = _torus_average(torus)
    if kind == "elliptic":
        return np.exp(-weight.lam * np.log(1.0 - w))
    if kind == "parabolic":
        return parabolic_kernel(line, w, weight, q)
    return hyperbolic_kernel(line, w, weight, q)


def fourier_elliptic_closed(r, weight):
    """``(lambda)_|r| / (r! (2n)^|r|)``: coefficient of ``t^r`` in ``phi_E``; 0 off the cone."""
    r = tuple(int(v) for v in r)
    if len(r) != weight.n:
        raise ValueError("lattice vector length must equal n")
    if min(r) < 0:
        return 0.0
    r = MultiIndex(r)
    k = r.degree
    return math.exp(log_pochhammer(weight.lam, k) - r.factorial_log() - k * math.log(2 * weight.n))


def fourier_elliptic_table(weight, D, lattice=None):
    lattice = enumerate_basis(weight.n, D) if lattice is None else lattice
    coeffs = [fourier_elliptic_closed(r, weight) for r in lattice]
    return FourierTable("elliptic", np.array(lattice), coeffs, meta={"route": "closed"})


def _box_lattice(d, degree):
    rng = range(-degree, degree + 1)
    return np.array(list(product(rng, repeat=d)), dtype=np.int64).reshape(-1, d) if d else np.zeros((1, 0), np.int64)


def fourier_numeric(grid, values, degree=None, line_freqs=None, lattice=None):
    """Fourier table of grid samples.

    Torus directions use the FFT (exact for trigonometric polynomials below the
    Nyquist limit); the line direction uses the grid's midpoint rule for
    ``int f(s) exp(-2 pi i xi s) ds`` over ``line_freqs``. All coefficients
    carry the grid's node weights, including ``weight_scale``.

    Parameters
    ----------
    degree : int, optional
        Box ``|r_i| <= degree`` of lattice vectors; ignored if ``lattice`` given.
    lattice : array_like or "full", optional
        Explicit lattice vectors, or every FFT bin.
    """
    values = np.asarray(values, dtype=np.complex128)
    if values.shape != grid.shape:
        raise ValueError(f"samples of shape {values.shape} do not match grid {grid.shape}")
    d, M = grid.torus_dim, grid.M
    if d:
        spec = np.fft.fftn(values, axes=tuple(range(d))) * (grid.torus_weight ** d)
    else:
        spec = values
    full = isinstance(lattice, str) and lattice == "full"
    if full:
        freqs = np.fft.fftfreq(M, 1.0 / M).astype(np.int64)
        lattice = np.array(list(product(freqs, repeat=d)), dtype=np.int64).reshape(-1, d) if d else np.zeros((1, 0), np.int64)
    elif lattice is None:
        degree = (M - 1) // 2 if degree is None else int(degree)
        lattice = _box_lattice(d, degree)
    else:
        lattice = np.asarray(lattice, dtype=np.int64).reshape(-1, d)
    if d and not full and lattice.size and 2 * np.max(np.abs(lattice)) >= M:
        warnings.warn(
            f"torus degree {np.max(np.abs(lattice))} >= M/2 = {M / 2}; coefficients are aliased",
            AliasingWarning,
            stacklevel=2,
        )
    if d:
        idx = tuple((lattice % M).T)
        selected = spec[idx]
    else:
        selected = spec[None, ...]
    meta = {"grid": grid.as_dict()}
    if not grid.has_line:
        return FourierTable(grid.kind, lattice, selected * grid.weight_scale, meta=meta)
    xi = default_line_freqs() if line_freqs is None else np.asarray(line_freqs, dtype=np.float64)
    phase = np.exp(-2j * np.pi * np.outer(grid.line_nodes(), xi))
    coeffs = (selected @ phase) * (grid.line_weight * grid.weight_scale)
    return FourierTable(grid.kind, lattice, coeffs, xi, meta=meta)


# numerators


def nu_elliptic(phi, weight, D):
    """Closed-form table of ``nu_phi`` on the E(n) lattice ``|r| <= D``.

    Coefficient at ``r`` is ``(2n)^(-|r|) <phi e_r, e_r> / h_r``.
    """
    if not is_elliptic_invariant(phi):
        raise InvarianceError("nu_elliptic needs a quasi-elliptic invariant symbol")
    n = weight.n
    lattice = enumerate_basis(n, D)
    coeffs = [
        entry_closed_form(phi, r, r, weight) * math.exp(-log_norm_sq(r, weight) - r.degree * math.log(2 * n))
        for r in lattice
    ]
    return FourierTable("elliptic", np.array(lattice), coeffs, meta={"route": "closed"})


def nu_samples(phi, grid, weight, D):
    """``nu_phi`` on the orbit grid (cover phase removed), by coherent-state expansion.

    ``nu(h . z0) = D(h) <T_phi K_z0, K_{h.z0}>`` with both coherent states
    truncated at degree ``D`` and the closed-form matrix of ``T_phi``. For
    the continued weights of E(n) this is the continuation term by term.
    """
    kind = grid.kind
    if kind != "elliptic" and weight.lam <= weight.n:
        raise ValueError("the parabolic/hyperbolic numerator is computed for lambda > n only")
    T = assemble(phi, weight, D)
    basis = np.array(T.basis, dtype=np.int64)
    inv_sqrt_h = np.exp(-0.5 * np.array([log_norm_sq(r, weight) for r in T.basis]))
    z0 = base_point(kind, weight.n)
    v = np.prod(np.conj(z0)[None, :] ** basis, axis=1) * inv_sqrt_h
    coeffs = (T.entries @ v) * inv_sqrt_h
    pts = grid.orbit_points().reshape(-1, weight.n)
    vals = _backend.poly_eval(pts, basis, coeffs).reshape(grid.shape)
    if grid.has_line:
        vals = vals * d_lambda_reduced(kind, grid.line_values(), weight)
    return vals


def nu_numeric(phi, grid, weight, D, degree=None, line_freqs=None, lattice=None):
    """Fourier table of :func:`nu_samples`."""
    table = fourier_numeric(grid, nu_samples(phi, grid, weight, D), degree, line_freqs, lattice)
    table.meta["series_degree"] = D
    return table


# quotients and multipliers


def spectral_quotient(nu, denom):
    """``nu^ / phi^`` on the support of ``denom``; ``None`` off the support."""
    if not nu.same_frequencies(denom):
        raise ValueError("tables are on different frequency sets")
    mask = denom.support_mask.ravel()
    num = nu.coeffs.ravel()
    den = denom.coeffs.ravel()
    out = {}
    for key, on, a, b in zip(denom.frequencies(), mask, num, den):
        out[key] = complex(a / b) if on else None
    return out


def _kernel_table_like(table, kind, weight, q=None, grid=None):
    if kind == "elliptic" and grid is None:
        return FourierTable("elliptic", table.lattice, [fourier_elliptic_closed(r, weight) for r in table.lattice])
    if grid is None:
        M = max(16, 2 * int(np.max(np.abs(table.lattice), initial=0)) + 2)
        grid = orbit_grid(kind, weight.n, M)
    return fourier_numeric(grid, phi_kernel(kind, grid, weight, q), line_freqs=table.line_freqs, lattice=table.lattice)


def rr_star_apply(f, kind, weight, kernel=None, q=None):
    """``R R*`` on the Fourier side: multiply by the kernel's coefficients.

    ``kernel`` is a table of ``phi_H`` on the same frequencies; by default the
    closed form (E) or a numeric table on a default grid (P, H).
    """
    kernel = _kernel_table_like(f, kind, weight, q) if kernel is None else kernel
    if not kernel.same_frequencies(f):
        raise ValueError("kernel table is on different frequencies")
    return f.with_coeffs(f.coeffs * kernel.coeffs, applied="rr_star")


def sqrt_rr_star_multiplier(kind, weight, table=None, tol=1e-10):
    """``sqrt(phi^)`` on the support; zero off it.

    Raises :class:`MultiplierError` if a supported coefficient has real part
    below ``-tol * max`` or imaginary part above ``tol * max`` in modulus.
    """
    if table is None:
        if kind != "elliptic":
            raise ValueError("pass the numeric kernel table for parabolic/hyperbolic groups")
        table = fourier_elliptic_table(weight, 8)
    c = table.coeffs
    scale = np.max(np.abs(c), initial=0.0)
    mask = table.support_mask
    bad = mask & ((c.real < -tol * scale) | (np.abs(c.imag) > tol * scale))
    if np.any(bad):
        worst = np.max(np.abs(c[bad].imag) + np.maximum(-c[bad].real, 0)) / scale
        raise MultiplierError(
            f"{int(bad.sum())} supported multipliers are negative or complex (worst {worst:.3g} relative)"
        )
    root = np.where(mask, np.sqrt(np.maximum(c.real, 0.0)), 0.0)
    return table.with_coeffs(root, applied="sqrt_rr_star")


def spectrum_routes(phi, weight, D, M=64, method="both", series_degree=None):
    """Eigenvalues of an invariant ``T_phi`` on E(n) by both routes.

    Returns rows ``(r, diagonal, convolution, on_support)``. The convolution
    route samples ``nu_phi`` and ``phi_E`` on the torus grid and divides
    their FFT coefficients (``method="closed"`` uses the closed-form tables).
    """
    if not is_elliptic_invariant(phi):
        raise InvarianceError("spectrum comparison needs a quasi-elliptic invariant symbol")
    lattice = np.array(enumerate_basis(weight.n, D))
    diag = [entry_closed_form(phi, r, r, weight) for r in lattice] if method in ("both", "diagonal") else None
    conv = support = None
    if method in ("both", "convolution", "closed"):
        if method == "closed":
            nu = nu_elliptic(phi, weight, D)
            den = fourier_elliptic_table(weight, D)
        else:
            grid = orbit_grid("elliptic", weight.n, M)
            nu = nu_numeric(phi, grid, weight, series_degree or D, lattice=lattice)
            den = fourier_numeric(grid, phi_kernel("elliptic", grid, weight), lattice=lattice)
        quotient = spectral_quotient(nu, den)
        conv = [quotient[tuple(int(v) for v in r)] for r in lattice]
        support = list(den.support_mask)
    rows = []
    for i, r in enumerate(lattice):
        rows.append((
            tuple(int(v) for v in r),
            None if diag is None else diag[i],
            None if conv is None else conv[i],
            None if support is None else bool(support[i]),
        ))
    return rows


# integrability


def _legendre_panels(a, b, panel, order):
    if b <= a:
        return np.zeros(0), np.zeros(0)
    count = max(1, int(math.ceil((b - a) / panel)))
    edges = np.linspace(a, b, count + 1)
    x, w = np.polynomial.legendre.leggauss(order)
    half = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def l1_estimate(kind, weight, S_values, q=None, M=16, panel=0.5, order=16):
    """``int |phi_H|`` over ``T^d x [-S, S]`` for each ``S``.

    Torus: uniform ``M`` nodes per circle (normalized Haar); line: composite
    Gauss-Legendre on panels of width ``panel``. Increments over consecutive
    shells are accumulated, so the sequence is non-decreasing by construction.
    """
    if kind == "elliptic":
        raise ValueError("the elliptic orbit is compact; there is no line integral")
    S_values = [float(s) for s in S_values]
    if any(b <= a for a, b in zip(S_values, S_values[1:])) or (S_values and S_values[0] <= 0):
        raise ValueError("S_values must be positive and strictly increasing")
    q = resolve_q(kind, weight, q)
    d = weight.n - 1
    if d:
        circle = np.exp(2j * np.pi * np.arange(M) / M)
        torus = np.stack(np.meshgrid(*([circle] * d), indexing="ij"), axis=-1).reshape(-1, d)
    else:
        torus = np.zeros((1, 0), dtype=np.complex128)

    def shell(a, b):
        total = 0.0
        for lo, hi in ((a, b), (-b, -a)):
            s, ws = _legendre_panels(lo, hi, panel, order)
            if s.size:
                vals = phi_kernel(kind, (torus[:, None, :], s[None, :]), weight, q)
                total += float(np.sum(np.abs(vals).mean(axis=0) * ws))
        return total

    out = []
    acc = 0.0
    prev = 0.0
    for S in S_values:
        if prev == 0.0:
            s, ws = _legendre_panels(-S, S, panel, order)
            vals = phi_kernel(kind, (torus[:, None, :], s[None, :]), weight, q)
            acc = float(np.sum(np.abs(vals).mean(axis=0) * ws))
        else:
            acc += shell(prev, S)
        prev = S
        out.append((S, acc))
    return out


def l1_tail_bound(kind, weight, S):
    """Upper bound for ``int_{|line| > S} |phi_H|`` with ``Q = I``.

    Hyperbolic: every term of ``A B (cosh s - w)^(-lambda)`` is bounded by
    ``|c| 2^(lambda+j) cosh(s)^-(lambda+k+j)`` since ``|w| <= 1/2``, giving an
    exponential rate ``exp(-lambda S)``. Parabolic: ``|c - i y/2| >= (|y| - 1)/2``
    and ``|c| <= 3/2`` give the algebraic rate ``S^(1 - lambda - 2m)``.
    """
    lam, m = weight.lam, weight.m
    if kind == "hyperbolic":
        total = 0.0
        for (q, k, j), c in hyperbolic_ab(weight).terms.items():
            p = lam + k + j
            # cosh(s) >= e^s / 2 for s >= 0
            total += 2 * abs(c) * 2 ** (lam + j) * 2 ** p * math.exp(-p * S) / p
        return total
    if kind == "parabolic":
        if S <= 1:
            return float("inf")
        p = lam + 2 * m
        if p <= 1:
            return float("inf")
        return 2 * 1.5 ** (2 * m) * 2 ** p * (S - 1) ** (1 - p) / (p - 1)
    raise ValueError("no line factor for the elliptic orbit")
