"""Truncated Toeplitz matrices, continued in the weight.

Matrices are taken over the normalized monomials ``e_r = z^r / sqrt(h_r)``
with ``entries[i, j] = <phi e_{r_j}, e_{r_i}>``. For a symbol term
``c z^a conj(z)^b (1-|z|^2)^p`` the entry is non-zero only when
``s + a = r + b =: alpha`` and then equals

    c * alpha! * (lambda - n)_p / (lambda)_{p + |alpha|} / sqrt(h_r h_s),

a meromorphic function of ``lambda``. Evaluating it at ``lambda <= n`` is
the analytic continuation of the operator; no numerical continuation is
involved. Quadrature entries are available for ``lambda > n`` only.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_jacobi

from . import _backend
from .bergman import log_norm_sq, rep_diagonal
from .mindex import MAX_BASIS_SIZE, MultiIndex, enumerate_basis, gamma_ratio, log_pochhammer, pochhammer
from .symbols import SymbolExpr, is_elliptic_invariant

__all__ = [
    "OperatorMatrix",
    "QuadratureSpec",
    "InvarianceError",
    "entry_closed_form",
    "entry_quadrature",
    "assemble",
    "diagonal_spectrum",
    "commutator_norm",
    "torus_rep_matrix",
    "intertwine_residual",
]


class InvarianceError(ValueError):
    """A symbol required to be invariant is not."""


@dataclass
class OperatorMatrix:
    basis: list
    entries: np.ndarray
    weight: object
    symbol_hash: str = ""
    degree: int = field(default=None)

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=np.complex128)
        N = len(self.basis)
        if self.entries.shape != (N, N):
            raise ValueError(f"entries of shape {self.entries.shape} do not match basis length {N}")
        if self.degree is None:
            self.degree = max((sum(r) for r in self.basis), default=0)

    @property
    def shape(self):
        return self.entries.shape

    def spectral_radius(self):
        return float(np.max(np.abs(np.linalg.eigvals(self.entries)))) if len(self.basis) else 0.0

    def is_hermitian(self, tol=1e-12):
        return bool(np.max(np.abs(self.entries - self.entries.conj().T), initial=0.0) <= tol)

    def off_diagonal_max(self):
        off = self.entries - np.diag(np.diag(self.entries))
        return float(np.max(np.abs(off), initial=0.0))

    def _header(self):
        return {
            "basis": [list(r) for r in self.basis],
            "weight": self.weight.as_dict(),
            "degree": self.degree,
            "symbol_hash": self.symbol_hash,
        }

    def to_json(self):
        out = self._header()
        out["entries"] = [[[v.real, v.imag] for v in row] for row in self.entries]
        return out

    @classmethod
    def from_json(cls, data):
        from .mindex import Weight

        w = data["weight"]
        entries = np.array([[complex(re, im) for re, im in row] for row in data["entries"]])
        return cls(
            [MultiIndex(r) for r in data["basis"]],
            entries,
            Weight(w["lambda"], w["n"]),
            data.get("symbol_hash", ""),
            data.get("degree"),
        )

    def write_binary(self, path):
        """JSON header line, then little-endian float64 ``(re, im)`` pairs, row-major."""
        with open(path, "wb") as fh:
            fh.write(json.dumps(self._header(), sort_keys=True).encode() + b"\n")
            pairs = np.empty(self.entries.shape + (2,), dtype="<f8")
            pairs[..., 0] = self.entries.real
            pairs[..., 1] = self.entries.imag
            fh.write(pairs.tobytes(order="C"))

    @classmethod
    def read_binary(cls, path):
        from .mindex import Weight

        with open(path, "rb") as fh:
            header = json.loads(fh.readline())
            raw = np.frombuffer(fh.read(), dtype="<f8")
        N = len(header["basis"])
        pairs = raw.reshape(N, N, 2)
        w = header["weight"]
        return cls(
            [MultiIndex(r) for r in header["basis"]],
            pairs[..., 0] + 1j * pairs[..., 1],
            Weight(w["lambda"], w["n"]),
            header.get("symbol_hash", ""),
            header.get("degree"),
        )


def entry_closed_form(phi, r, s, weight):
    """``<phi e_s, e_r>`` at ``weight``, by the gamma-ratio formula (valid for all lambda)."""
    r = MultiIndex(r)
    s = MultiIndex(s)
    lam, n = weight.lam, weight.n
    if phi.n != n or len(r) != n or len(s) != n:
        raise ValueError("dimension mismatch between symbol, indices and weight")
    norm = 0.5 * (log_norm_sq(r, weight) + log_norm_sq(s, weight))
    total = 0j
    for t in phi.terms:
        alpha = s + t.a
        if alpha != r + t.b:
            continue
        logval = alpha.factorial_log() - log_pochhammer(lam, t.p + alpha.degree) - norm
        total += t.c * pochhammer(lam - n, t.p) * math.exp(logval)
    return total


def _tables(phi, weight, D):
    lam, n = weight.lam, weight.n
    amax = max(max(t.a) for t in phi.terms)
    adeg = phi.max_holomorphic_degree
    pmax = max(t.p for t in phi.terms)
    kfact = D + amax
    kpoch = D + adeg + pmax
    logfact = np.array([math.lgamma(k + 1.0) for k in range(kfact + 1)])
    logpoch = np.array([log_pochhammer(lam, k) for k in range(kpoch + 1)])
    shiftpoch = np.array([pochhammer(lam - n, p) for p in range(pmax + 1)])
    return logfact, logpoch, shiftpoch


def assemble(phi, weight, D, max_size=MAX_BASIS_SIZE):
    """Toeplitz matrix of ``phi`` over all monomials of degree ``<= D``.

    The entries are exact compressions (each entry is an inner product of two
    basis elements), so no enlargement of the internal basis is needed.
    """
    if phi.n != weight.n:
        raise ValueError("symbol dimension does not match weight dimension")
    basis = enumerate_basis(weight.n, D, max_size)
    exps = np.array(basis, dtype=np.int64)
    lognorm = np.array([0.5 * log_norm_sq(r, weight) for r in basis])
    logfact, logpoch, shiftpoch = _tables(phi, weight, D)
    entries = _backend.assemble_closed_form(
        exps,
        lognorm,
        np.array([t.a for t in phi.terms], dtype=np.int64),
        np.array([t.b for t in phi.terms], dtype=np.int64),
        np.array([t.p for t in phi.terms], dtype=np.int64),
        np.array([t.c for t in phi.terms], dtype=np.complex128),
        logfact,
        logpoch,
        shiftpoch,
    )
    return OperatorMatrix(basis, entries, weight, phi.digest(), D)


def diagonal_spectrum(phi, weight, D):
    """Eigenvalues ``r -> <phi e_r, e_r>`` of a separately radial symbol."""
    if not is_elliptic_invariant(phi):
        raise InvarianceError("diagonal spectrum needs a quasi-elliptic invariant symbol (a == b in every term)")
    return {r: entry_closed_form(phi, r, r, weight) for r in enumerate_basis(weight.n, D)}


def commutator_norm(A, B):
    """Frobenius norm of ``AB - BA``."""
    if A.weight != B.weight or list(A.basis) != list(B.basis):
        raise ValueError("matrices must share basis and weight")
    a, b = A.entries, B.entries
    return float(np.linalg.norm(a @ b - b @ a))


def torus_rep_matrix(g, weight, D):
    """``pi_lambda(g)`` on the truncation: diagonal ``exp(2 pi i lambda x) t^(-r)``."""
    if g.kind != "elliptic" or g.n != weight.n:
        raise ValueError("need a quasi-elliptic element of matching dimension")
    basis = enumerate_basis(weight.n, D)
    diag = rep_diagonal(g, basis, weight)
    label = "rep:" + json.dumps(g.to_json(), sort_keys=True)
    return OperatorMatrix(basis, np.diag(diag), weight, label, D)


def intertwine_residual(phi, g, weight, D):
    """Frobenius norm of ``pi(g) T_phi - T_{phi_g} pi(g)`` on the truncation."""
    pi = torus_rep_matrix(g, weight, D).entries
    T = assemble(phi, weight, D).entries
    Tg = assemble(phi.transformed(g), weight, D).entries
    return float(np.linalg.norm(pi @ T - Tg @ pi))


# quadrature route (lambda > n)


@dataclass(frozen=True)
class QuadratureSpec:
    """Node counts for the polar tensor rule and its doubling loop.

    ``None`` counts are chosen from the polynomial degree of the integrand.
    """

    radial: int = None
    simplex: int = None
    angular: int = None
    tol: float = 1e-9
    max_doublings: int = 4


def _gauss_jacobi_unit(q, alpha, beta):
    """Nodes/weights for ``int_0^1 f(u) (1-u)^alpha u^beta du``."""
    x, w = roots_jacobi(q, alpha, beta)
    return (1 + x) / 2, w / 2 ** (alpha + beta + 1)


def _simplex_rule(n, q):
    """Collapsed Gauss-Jacobi rule on ``{omega >= 0, sum omega = 1}`` (n-1 dims)."""
    if n == 1:
        return np.ones((1, 1)), np.ones(1)
    axes = [_gauss_jacobi_unit(q, n - 1 - j, 0.0) for j in range(1, n)]
    grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    wgrids = np.meshgrid(*[a[1] for a in axes], indexing="ij")
    xi = np.stack([g.ravel() for g in grids], axis=1)
    w = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    omega = np.empty((xi.shape[0], n))
    rest = np.ones(xi.shape[0])
    for j in range(n - 1):
        omega[:, j] = rest * xi[:, j]
        rest = rest * (1 - xi[:, j])
    omega[:, n - 1] = rest
    return omega, w


def _quad_once(integrand, weight, q_rad, q_simp, M):
    lam, n = weight.lam, weight.n
    u, wu = _gauss_jacobi_unit(q_rad, lam - n - 1, n - 1)
    omega, womega = _simplex_rule(n, q_simp)
    theta = 2 * np.pi * np.arange(M) / M
    phases = np.exp(1j * np.stack(np.meshgrid(*([theta] * n), indexing="ij"), axis=-1).reshape(-1, n))
    total = 0j
    for ui, wi in zip(u, wu):
        moduli = np.sqrt(ui * omega)  # (S, n)
        z = moduli[:, None, :] * phases[None, :, :]
        vals = integrand(z)  # (S, A)
        total += wi * np.sum(womega * vals.mean(axis=1))
    return total * gamma_ratio(lam, lam - n)


def entry_quadrature(phi, r, s, weight, spec=QuadratureSpec()):
    """``<phi e_s, e_r>`` by polar tensor quadrature, ``lambda > n`` only.

    Radial: Gauss-Jacobi in ``u = |z|^2`` with weight ``(1-u)^(lambda-n-1) u^(n-1)``;
    directions ``|z_k|^2 / |z|^2`` on the simplex by collapsed Gauss-Jacobi;
    phases by the uniform trapezoid rule. Node counts double until two
    successive values differ by less than ``spec.tol``.

    ``phi`` is a :class:`SymbolExpr` or any vectorized callable of ``z``.

    Returns
    -------
    value : complex
    error : float
        Difference between the last two doubling levels.
    """
    if weight.lam <= weight.n:
        raise ValueError("quadrature entries need lambda > n; use entry_closed_form for the continuation")
    r = MultiIndex(r)
    s = MultiIndex(s)
    rr = np.array(r)
    ss = np.array(s)
    scale = math.exp(-0.5 * (log_norm_sq(r, weight) + log_norm_sq(s, weight)))

    def integrand(z):
        mono = np.prod(z ** ss, axis=-1) * np.prod(np.conj(z) ** rr, axis=-1)
        return phi(z) * mono * scale

    if isinstance(phi, SymbolExpr):
        # polynomial degree in (u, omega) and trigonometric degree per angle
        deg = max(t.a.degree + t.b.degree + 2 * t.p for t in phi.terms) + r.degree + s.degree
        freq = max(max(ri + bi, si + ai) for t in phi.terms for ri, si, ai, bi in zip(r, s, t.a, t.b))
    else:
        deg = r.degree + s.degree + 4
        freq = max(max(r), max(s)) + 2
    q = spec.radial or (deg // 4 + 2)
    qs = spec.simplex or (deg // 4 + 2)
    M = spec.angular or (freq + 1)
    value = _quad_once(integrand, weight, q, qs, M)
    error = float("inf")
    for _ in range(spec.max_doublings):
        q, qs, M = 2 * q, 2 * qs, 2 * M
        refined = _quad_once(integrand, weight, q, qs, M)
        error = abs(refined - value)
        value = refined
        if error < spec.tol:
            break
    return complex(value), float(error)
