"""Multi-index combinatorics and log-domain gamma kernels.

Every other module indexes monomials ``z**r`` by a :class:`MultiIndex` and
evaluates gamma ratios through :func:`log_gamma_ratio`, which stays accurate
when the individual gamma values over- or underflow.
"""

import math
from math import comb

import numpy as np

__all__ = [
    "MAX_BASIS_SIZE",
    "BasisOverflowError",
    "MultiIndex",
    "degree",
    "basis_size",
    "enumerate_basis",
    "log_gamma_ratio",
    "gamma_ratio",
    "pochhammer",
    "log_pochhammer",
    "log_factorial",
    "POLE_GUARD",
    "Weight",
]

MAX_BASIS_SIZE = 20000

# Stirling series is used once both arguments are shifted above this value.
_STIRLING_MIN = 12.0
# Bernoulli coefficients B_{2k} / (2k (2k-1)) of the log-gamma asymptotic series.
_STIRLING_COEFFS = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
)


class BasisOverflowError(OverflowError):
    """Raised when a truncated monomial basis would exceed the size limit."""


class MultiIndex(tuple):
    """Exponent vector ``r`` in N^n indexing the monomial ``z**r``.

    Behaves as an immutable tuple of non-negative ints; equality and hashing
    are entrywise.
    """

    __slots__ = ()

    def __new__(cls, exponents):
        exponents = tuple(exponents)
        values = tuple(int(e) for e in exponents)
        if not values:
            raise ValueError("multi-index must have length >= 1")
        for e, raw in zip(values, exponents):
            if e < 0 or e != raw:
                raise ValueError(f"multi-index entries must be non-negative integers, got {tuple(exponents)}")
        return super().__new__(cls, values)

    @property
    def n(self):
        return len(self)

    @property
    def degree(self):
        return sum(self)

    def factorial_log(self):
        """``log(r!)`` with ``r! = r_1! ... r_n!``."""
        return sum(math.lgamma(e + 1) for e in self)

    def __add__(self, other):
        if len(self) != len(other):
            raise ValueError("dimension mismatch")
        return MultiIndex(a + b for a, b in zip(self, other))

    def __repr__(self):
        return f"MultiIndex({tuple(self)})"


def degree(r):
    """Total degree ``|r| = sum(r)``."""
    return sum(MultiIndex(r))


def basis_size(n, D):
    """Number of multi-indices of length ``n`` with degree at most ``D``."""
    return comb(n + D, n)


def _compositions(n, k):
    # Graded lex within one degree: larger leading exponent first.
    if n == 1:
        yield (k,)
        return
    for first in range(k, -1, -1):
        for rest in _compositions(n - 1, k - first):
            yield (first,) + rest


def enumerate_basis(n, D, max_size=MAX_BASIS_SIZE):
    """All multi-indices of length ``n`` and degree ``<= D``.

    The order is graded lexicographic: by increasing degree, and within a
    degree lexicographically decreasing, so ``n=2, D=1`` gives
    ``[(0, 0), (1, 0), (0, 1)]``.

    Raises
    ------
    BasisOverflowError
        If ``C(n + D, n)`` exceeds ``max_size``.
    """
    if n < 1 or D < 0:
        raise ValueError(f"need n >= 1 and D >= 0, got n={n}, D={D}")
    size = basis_size(n, D)
    if size > max_size:
        raise BasisOverflowError(f"basis size C({n}+{D},{n}) = {size} exceeds limit {max_size}")
    return [MultiIndex(c) for k in range(D + 1) for c in _compositions(n, k)]


def _stirling_tail(x):
    inv = 1.0 / x
    inv2 = inv * inv
    acc = 0.0
    power = inv
    for coeff in _STIRLING_COEFFS:
        acc += coeff * power
        power *= inv2
    return acc


def log_gamma_ratio(a, b):
    """``log(Gamma(a) / Gamma(b))`` for ``a, b > 0``.

    Both arguments are shifted up by the recurrence ``Gamma(x+1) = x Gamma(x)``
    until they exceed a Stirling threshold; the difference of the two Stirling
    expansions is then formed with ``log1p`` so that nearby arguments do not
    cancel catastrophically.
    """
    a = float(a)
    b = float(b)
    if not (a > 0.0 and b > 0.0):
        raise ValueError(f"gamma_ratio needs positive arguments, got a={a}, b={b}")
    if a == b:
        return 0.0
    prod_a = 1.0
    prod_b = 1.0
    while a < _STIRLING_MIN:
        prod_a *= a
        a += 1.0
    while b < _STIRLING_MIN:
        prod_b *= b
        b += 1.0
    d = a - b
    main = (a - 0.5) * math.log1p(d / b) + d * math.log(b) - d
    return main + (_stirling_tail(a) - _stirling_tail(b)) + math.log(prod_b / prod_a)


def gamma_ratio(a, b):
    """``Gamma(a) / Gamma(b)`` computed in the log domain.

    Raises ``OverflowError`` when the ratio itself is not representable.
    """
    return math.exp(log_gamma_ratio(a, b))


def pochhammer(x, k):
    """Rising factorial ``(x)_k = x (x+1) ... (x+k-1)``; ``(x)_0 = 1``.

    Uses the plain product, so it is finite (and may be zero or negative)
    for every real ``x``.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    out = 1.0
    for j in range(k):
        out *= x + j
    return out


def log_pochhammer(x, k):
    """``log((x)_k)`` for ``x > 0``."""
    if k == 0:
        return 0.0
    return log_gamma_ratio(x + k, x)


def log_factorial(k):
    """Array of ``log(j!)`` for ``j = 0..k``."""
    return np.array([math.lgamma(j + 1.0) for j in range(k + 1)])


POLE_GUARD = 1e-9


class Weight:
    """Validated continuation parameter ``lambda`` on the ball of dimension ``n``.

    ``m`` is the smallest non-negative integer with ``lambda + 2m > n``; it is
    zero in the classical range ``lambda > n``.

    Parameters
    ----------
    lam : float
        Weight, positive and farther than ``pole_guard`` from ``{0, ..., n}``.
    n : int
        Ambient complex dimension.
    """

    __slots__ = ("lam", "n", "m")

    def __init__(self, lam, n, pole_guard=POLE_GUARD):
        lam = float(lam)
        n = int(n)
        if n < 1:
            raise ValueError(f"dimension n must be >= 1, got {n}")
        if not (lam > 0.0) or not math.isfinite(lam):
            raise ValueError(f"weight must be positive and finite, got {lam}")
        nearest = round(lam)
        if nearest <= n and abs(lam - nearest) <= pole_guard:
            raise ValueError(f"weight {lam} lies within {pole_guard:g} of the excluded point {nearest} (n={n})")
        m = 0 if lam > n else math.floor((n - lam) / 2) + 1
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)

    def __setattr__(self, name, value):
        raise AttributeError("Weight is immutable")

    def __eq__(self, other):
        return isinstance(other, Weight) and (self.lam, self.n) == (other.lam, other.n)

    def __hash__(self):
        return hash((self.lam, self.n))

    def __repr__(self):
        return f"Weight(lam={self.lam!r}, n={self.n}, m={self.m})"

    @property
    def classical(self):
        """True when ``lambda > n`` (the integral definitions apply)."""
        return self.m == 0

    def shifted(self):
        """The weight ``lambda + 2m`` used by the continued inner product."""
        return Weight(self.lam + 2 * self.m, self.n)

    def as_dict(self):
        return {"lambda": self.lam, "n": self.n, "m": self.m}
