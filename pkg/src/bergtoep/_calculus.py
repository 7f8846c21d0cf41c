"""Exact action of ``A B`` and ``Q`` on the orbit kernels of P(n) and H(n).

On the orbit, ``A_lambda B_lambda = prod_{j=0}^{2m-1} (I + N / (lambda + j))``
with ``N = y d/dy`` (parabolic) or ``N = tanh(s) d/ds`` (hyperbolic).

Parabolic: with ``F_l = (c - i y / 2)^(-l)`` and ``c = 1 - w``,
``(I + N/r) F_l = (1 - l/r) F_l + (l c / r) F_{l+1}``, so the product
telescopes to ``c^(2m) F_{lambda+2m}``.

Hyperbolic: expressions are finite sums of
``tanh(s)^q sech(s)^k (cosh(s) - w)^(-(lambda + j))`` kept as a dict
``(q, k, j) -> coefficient``; ``k`` may be negative.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .mindex import pochhammer

__all__ = ["QOperator", "MissingQError", "HExpr", "parabolic_ab", "parabolic_kernel", "hyperbolic_ab", "hyperbolic_kernel"]


class MissingQError(ValueError):
    """A continued weight (m >= 1) needs an explicit Q operator."""


@dataclass(frozen=True)
class QOperator:
    """Polynomial differential operator on the orbit line.

    Parabolic: ``Q = sum_k coeffs[k] y^k d^k/dy^k``.
    Hyperbolic: ``Q = sum_k a_k(s) tanh(s)^k d^k/ds^k`` with
    ``a_k = sum_j coeffs[k][j] tanh^(j)(s)`` (``j``-th derivative of tanh).
    Elliptic: identity only.
    """

    kind: str
    coeffs: tuple = field(default=())

    def __post_init__(self):
        if self.kind == "elliptic" and self.coeffs:
            raise ValueError("the quasi-elliptic Q operator is the identity")
        if self.kind == "parabolic":
            object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        elif self.kind == "hyperbolic":
            object.__setattr__(self, "coeffs", tuple(tuple(complex(c) for c in row) for row in self.coeffs))
        elif self.kind != "elliptic":
            raise ValueError(f"unknown kind {self.kind!r}")

    @classmethod
    def identity(cls, kind):
        if kind == "parabolic":
            return cls(kind, (1.0,))
        if kind == "hyperbolic":
            # a_0 must be the constant 1, which is not a tanh derivative
            return cls(kind, ())
        return cls(kind)

    @property
    def order(self):
        return max(len(self.coeffs) - 1, 0)

    @property
    def is_identity(self):
        return not self.coeffs or (self.kind == "parabolic" and self.coeffs == (1.0,))


def resolve_q(kind, weight, q):
    """Default to the identity when ``m = 0``; refuse to guess otherwise."""
    if q is None:
        if weight.m == 0 or kind == "elliptic":
            return QOperator.identity(kind)
        raise MissingQError(
            f"weight lambda={weight.lam} has m={weight.m}; supply a QOperator "
            "(its coefficients are not determined in closed form)"
        )
    if q.kind != kind:
        raise ValueError(f"Q operator is for {q.kind}, kernel is {kind}")
    if q.order > 2 * weight.m:
        raise ValueError(f"Q has order {q.order} > 2m = {2 * weight.m}")
    return q


def parabolic_ab(weight):
    """Coefficients ``g_j`` with ``A B F_lambda = sum_j g_j c^j F_{lambda+j}``.

    Built factor by factor from ``(I + N/r) F_l = (1 - l/r) F_l + (l/r) c F_{l+1}``;
    the product telescopes to ``g = (0, ..., 0, 1)``.
    """
    lam = weight.lam
    g = [1.0]
    for j0 in range(2 * weight.m):
        r = lam + j0
        nxt = [0.0] * (len(g) + 1)
        for j, c in enumerate(g):
            l = lam + j
            nxt[j] += (1 - l / r) * c
            nxt[j + 1] += (l / r) * c
        g = nxt
    return g


def parabolic_kernel(y, w, weight, q=None):
    """``Q A B (1 - i y / 2 - w)^(-lambda)``, vectorized over ``y`` and ``w``."""
    q = resolve_q("parabolic", weight, q)
    lam = weight.lam
    y = np.asarray(y, dtype=np.float64)
    c = 1.0 - np.asarray(w, dtype=np.complex128)
    logu = np.log(c - 0.5j * y)
    out = np.zeros(np.broadcast(y, c).shape, dtype=np.complex128)
    for j, gj in enumerate(parabolic_ab(weight)):
        if gj == 0:
            continue
        l = lam + j
        for k, ck in enumerate(q.coeffs):
            if ck == 0:
                continue
            # y^k d^k/dy^k u^(-l) = (l)_k (i y / 2)^k u^(-l-k)
            out += gj * ck * pochhammer(l, k) * c ** j * (0.5j * y) ** k * np.exp(-(l + k) * logu)
    return out


class HExpr:
    """Finite sum of ``tanh^q sech^k (cosh s - w)^(-(lambda + j))``."""

    def __init__(self, terms=None):
        # tanh^2 = 1 - sech^2 keeps q in {0, 1}
        out = {}
        for (q, k, j), c in (terms or {}).items():
            stack = [((q, k, j), c)]
            while stack:
                (q, k, j), c = stack.pop()
                if q >= 2:
                    stack.append(((q - 2, k, j), c))
                    stack.append(((q - 2, k + 2, j), -c))
                else:
                    out[(q, k, j)] = out.get((q, k, j), 0) + c
        self.terms = {key: c for key, c in out.items() if c != 0}

    @classmethod
    def power(cls, j=0):
        return cls({(0, 0, j): 1.0})

    @classmethod
    def tanh_derivative(cls, order):
        """``d^order/ds^order tanh(s)`` (no ``u`` factor)."""
        expr = cls({(1, 0, 0): 1.0})
        for _ in range(order):
            expr = expr.ds(0.0)
        return expr

    def __add__(self, other):
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, 0) + c
        return HExpr(out)

    def scale(self, a):
        return HExpr({key: a * c for key, c in self.terms.items()})

    def mul_tanh(self, power=1):
        return HExpr({(q + power, k, j): c for (q, k, j), c in self.terms.items()})

    def times(self, other):
        """Product with a ``u``-free expression."""
        out = {}
        for (q1, k1, j1), c1 in self.terms.items():
            for (q2, k2, j2), c2 in other.terms.items():
                if j2:
                    raise ValueError("can only multiply by u-free factors")
                key = (q1 + q2, k1 + k2, j1)
                out[key] = out.get(key, 0) + c1 * c2
        return HExpr(out)

    def ds(self, lam):
        """``d/ds``, using tanh' = sech^2, sech' = -sech tanh, (u^-l)' = -l tanh sech^-1 u^-(l+1)."""
        out = {}

        def put(key, v):
            out[key] = out.get(key, 0) + v

        for (q, k, j), c in self.terms.items():
            l = lam + j
            if q:
                put((q - 1, k + 2, j), c * q)
            if k:
                put((q + 1, k, j), -c * k)
            if l:
                put((q + 1, k - 1, j + 1), -c * l)
        return HExpr(out)

    def euler(self, lam):
        """``N = tanh(s) d/ds``."""
        return self.ds(lam).mul_tanh()

    def eval(self, s, w, lam):
        s = np.asarray(s, dtype=np.float64)
        w = np.asarray(w, dtype=np.complex128)
        th = np.tanh(s)
        lcosh = np.logaddexp(s, -s) - math.log(2.0)
        logu = np.log(np.cosh(s) - w)
        out = np.zeros(np.broadcast(s, w).shape, dtype=np.complex128)
        for (q, k, j), c in self.terms.items():
            out += c * th ** q * np.exp(-k * lcosh - (lam + j) * logu)
        return out


def hyperbolic_ab(weight):
    """``A B (cosh s - w)^(-lambda)`` as an :class:`HExpr`."""
    lam = weight.lam
    expr = HExpr.power(0)
    for j in range(2 * weight.m):
        r = lam + j
        expr = expr + expr.euler(lam).scale(1.0 / r)
    return expr


def _apply_hq(expr, q, lam):
    if q.is_identity:
        return expr
    out = HExpr()
    deriv = expr
    for k, row in enumerate(q.coeffs):
        if k:
            deriv = deriv.ds(lam)
        a_k = HExpr()
        for j, c in enumerate(row):
            if c != 0:
                a_k = a_k + HExpr.tanh_derivative(j).scale(c)
        if a_k.terms:
            out = out + deriv.times(a_k).mul_tanh(k)
    return out


def hyperbolic_kernel(s, w, weight, q=None):
    """``Q A B (cosh s - w)^(-lambda)``, vectorized over ``s`` and ``w``."""
    q = resolve_q("hyperbolic", weight, q)
    expr = _apply_hq(hyperbolic_ab(weight), q, weight.lam)
    return expr.eval(s, w, weight.lam)
