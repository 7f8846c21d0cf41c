"""Closed-form symbols ``sum c * z^a * conj(z)^b * (1 - |z|^2)^p``.

Every Toeplitz matrix entry of such a symbol is a gamma ratio that is
meromorphic in ``lambda``, which is what makes the continued operators
computable exactly.

Wire format::

    {"n": 2, "terms": [{"c": [1.0, 0.0], "a": [1, 0], "b": [1, 0], "p": 0}]}
"""

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .groups import KINDS, GroupElement, act_siegel, cayley, cayley_inv
from .mindex import MultiIndex

__all__ = ["SymbolTerm", "SymbolExpr", "is_elliptic_invariant", "invariance_residual", "sample_ball"]


@dataclass(frozen=True)
class SymbolTerm:
    c: complex
    a: MultiIndex
    b: MultiIndex
    p: int = 0

    def __post_init__(self):
        object.__setattr__(self, "c", complex(self.c))
        object.__setattr__(self, "a", MultiIndex(self.a))
        object.__setattr__(self, "b", MultiIndex(self.b))
        if len(self.a) != len(self.b):
            raise ValueError("holomorphic and antiholomorphic exponents must have equal length")
        if int(self.p) != self.p or self.p < 0:
            raise ValueError(f"radial power must be a non-negative integer, got {self.p}")
        object.__setattr__(self, "p", int(self.p))

    @property
    def key(self):
        return (tuple(self.a), tuple(self.b), self.p)


class SymbolExpr:
    """Finite sum of :class:`SymbolTerm` on the ball of dimension ``n``.

    Terms with equal ``(a, b, p)`` are merged and zero coefficients dropped;
    the zero symbol keeps a single zero constant term.
    """

    def __init__(self, terms, n=None):
        terms = list(terms)
        if not terms:
            raise ValueError("a symbol needs at least one term")
        if n is None:
            n = len(terms[0].a)
        for t in terms:
            if len(t.a) != n:
                raise ValueError(f"term exponents of length {len(t.a)} do not match n={n}")
        merged = {}
        for t in terms:
            merged[t.key] = merged.get(t.key, 0j) + t.c
        keep = sorted((k, c) for k, c in merged.items() if c != 0)
        if not keep:
            keep = [(((0,) * n, (0,) * n, 0), 0j)]
        self.n = n
        self.terms = tuple(SymbolTerm(c, a, b, p) for (a, b, p), c in keep)

    # construction helpers

    @classmethod
    def monomial(cls, n, a=None, b=None, p=0, c=1.0):
        zero = (0,) * n
        a = zero if a is None else a
        b = zero if b is None else b
        return cls([SymbolTerm(c, a, b, p)], n)

    @classmethod
    def constant(cls, n, c=1.0):
        return cls.monomial(n, c=c)

    @classmethod
    def modulus_squared(cls, n):
        """``|z|^2 = sum |z_k|^2``."""
        return cls([SymbolTerm(1.0, e, e, 0) for e in np.eye(n, dtype=int)], n)

    @classmethod
    def defect(cls, n, p=1):
        """``(1 - |z|^2)^p``."""
        return cls.monomial(n, p=p)

    # algebra

    def __add__(self, other):
        if not isinstance(other, SymbolExpr):
            other = SymbolExpr.constant(self.n, other)
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        return SymbolExpr(self.terms + other.terms, self.n)

    __radd__ = __add__

    def __mul__(self, scalar):
        if isinstance(scalar, SymbolExpr):
            return NotImplemented
        return SymbolExpr([SymbolTerm(scalar * t.c, t.a, t.b, t.p) for t in self.terms], self.n)

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + (-1.0) * other

    def __eq__(self, other):
        return isinstance(other, SymbolExpr) and self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, self.terms))

    def __repr__(self):
        parts = [f"({t.c:g})*z^{tuple(t.a)}*zbar^{tuple(t.b)}*(1-|z|^2)^{t.p}" for t in self.terms]
        return f"SymbolExpr(n={self.n}: " + " + ".join(parts) + ")"

    def canonical(self):
        return SymbolExpr(self.terms, self.n)

    def conj(self):
        """Pointwise complex conjugate: ``(a, b, p, c) -> (b, a, p, conj(c))``."""
        return SymbolExpr([SymbolTerm(np.conj(t.c), t.b, t.a, t.p) for t in self.terms], self.n)

    def is_real(self):
        return self.conj() == self

    def transformed(self, g):
        """``phi_g(z) = phi(g^-1 . z)`` for a quasi-elliptic ``g``.

        Under ``z -> conj(t) z`` a term picks up the phase ``t^(b - a)``,
        so the class is closed under the torus.
        """
        if g.kind != "elliptic":
            raise NotImplementedError("closed-form transformation is available for quasi-elliptic elements")
        t = np.asarray(g.torus, dtype=np.complex128)
        out = []
        for term in self.terms:
            phase = np.prod(t ** (np.array(term.b) - np.array(term.a)))
            out.append(SymbolTerm(term.c * phase, term.a, term.b, term.p))
        return SymbolExpr(out, self.n)

    @property
    def max_holomorphic_degree(self):
        return max(t.a.degree for t in self.terms)

    @property
    def max_antiholomorphic_degree(self):
        return max(t.b.degree for t in self.terms)

    # evaluation

    def __call__(self, z):
        return self.eval(z)

    def eval(self, z):
        """Value at ``z`` (vectorized over leading axes; last axis has length ``n``)."""
        z = np.asarray(z, dtype=np.complex128)
        if z.shape[-1] != self.n:
            raise ValueError(f"point dimension {z.shape[-1]} does not match symbol dimension {self.n}")
        zc = np.conj(z)
        defect = 1.0 - np.sum((z * zc).real, axis=-1)
        out = np.zeros(z.shape[:-1], dtype=np.complex128)
        for t in self.terms:
            val = np.full(z.shape[:-1], t.c, dtype=np.complex128)
            for k in range(self.n):
                if t.a[k]:
                    val = val * z[..., k] ** t.a[k]
                if t.b[k]:
                    val = val * zc[..., k] ** t.b[k]
            if t.p:
                val = val * defect ** t.p
            out += val
        return out

    # serialization

    def to_json(self):
        return {
            "n": self.n,
            "terms": [
                {"c": [t.c.real, t.c.imag], "a": list(t.a), "b": list(t.b), "p": t.p} for t in self.terms
            ],
        }

    @classmethod
    def from_json(cls, data):
        n = int(data["n"])
        terms = []
        for i, item in enumerate(data["terms"]):
            c = item.get("c", [1.0, 0.0])
            if isinstance(c, (int, float)):
                c = [c, 0.0]
            if len(c) != 2:
                raise ValueError(f"term {i}: coefficient must be [re, im]")
            terms.append(SymbolTerm(complex(c[0], c[1]), item.get("a", [0] * n), item.get("b", [0] * n), item.get("p", 0)))
        return cls(terms, n)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def digest(self):
        """SHA-256 of the canonical JSON form."""
        payload = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()


def is_elliptic_invariant(phi):
    """True iff every term has ``a == b`` (separately radial symbol)."""
    return all(t.a == t.b for t in phi.canonical().terms)


def sample_ball(n, count, rng, radius=0.9):
    """Uniform samples from the ball of the given radius by rejection."""
    out = np.empty((count, n), dtype=np.complex128)
    filled = 0
    while filled < count:
        cand = rng.uniform(-radius, radius, size=(2 * count, 2 * n))
        cand = cand[np.sum(cand ** 2, axis=1) < radius ** 2]
        take = min(count - filled, cand.shape[0])
        out[filled:filled + take] = cand[:take, :n] + 1j * cand[:take, n:]
        filled += take
    return out


def _pullback(h, z):
    """``h . z`` on the ball; parabolic/hyperbolic go through the Siegel domain."""
    if h.kind == "elliptic":
        return z * np.asarray(h.torus, dtype=np.complex128)
    return cayley_inv(act_siegel(h, cayley(z)))


def invariance_residual(phi, group, samples=1000, seed=0, line_scale=2.0):
    """Max over random ``(h, z)`` of ``|phi(h^-1 . z) - phi(z)|``."""
    if group not in KINDS:
        raise ValueError(f"unknown group {group!r}")
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    zs = sample_ball(phi.n, samples, rng)
    worst = 0.0
    for z in zs:
        h = GroupElement.random(group, phi.n, rng, line_scale=line_scale)
        moved = _pullback(h.inverse(), z)
        worst = max(worst, abs(phi.eval(moved) - phi.eval(z)))
    return float(worst)
