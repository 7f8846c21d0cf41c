"""Quasi-elliptic, quasi-parabolic and quasi-hyperbolic subgroups of SU(n,1).

Elements live in the universal cover: a torus part, a line coordinate
(``y`` for parabolic, ``s`` for hyperbolic) and the cover coordinate ``x``
tied to the torus by ``exp(2 pi i (n+1) x) * prod(t) = 1``.

Ball actions are implemented from their explicit linear-fractional formulas;
the Cayley transform and the Siegel-domain actions are kept as an
independent route for tests.
"""

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "KINDS",
    "GroupElement",
    "base_point",
    "cayley",
    "cayley_inv",
    "act",
    "act_siegel",
    "cocycle",
    "d_lambda",
    "d_lambda_reduced",
    "chi_lambda",
    "chi_lambda_residual",
    "OrbitGrid",
    "orbit_grid",
]

KINDS = ("elliptic", "parabolic", "hyperbolic")
_TOL = 1e-12


def _check_kind(kind):
    if kind not in KINDS:
        raise ValueError(f"unknown group kind {kind!r}; expected one of {KINDS}")


@dataclass(frozen=True)
class GroupElement:
    """Element of the cover of E(n), P(n) or H(n).

    Attributes
    ----------
    kind : str
        ``"elliptic"``, ``"parabolic"`` or ``"hyperbolic"``.
    torus : tuple of complex
        Unit complex numbers; length ``n`` (elliptic) or ``n - 1``.
    line : float
        ``y`` (parabolic) or ``s`` (hyperbolic); always 0 for elliptic.
    cover_x : float
        Real cover coordinate ``x``.
    n : int
        Ambient dimension.
    """

    kind: str
    torus: tuple
    line: float = 0.0
    cover_x: float = 0.0
    n: int = field(default=None)

    def __post_init__(self):
        _check_kind(self.kind)
        torus = tuple(complex(t) for t in self.torus)
        object.__setattr__(self, "torus", torus)
        object.__setattr__(self, "line", float(self.line))
        object.__setattr__(self, "cover_x", float(self.cover_x))
        n = len(torus) if self.kind == "elliptic" else len(torus) + 1
        if self.n is not None and self.n != n:
            raise ValueError(f"torus length {len(torus)} does not match n={self.n} for {self.kind}")
        object.__setattr__(self, "n", n)
        if n < 1:
            raise ValueError("elliptic elements need a non-empty torus")
        if self.kind == "elliptic" and self.line != 0.0:
            raise ValueError("elliptic elements have no line coordinate")
        for t in torus:
            if abs(abs(t) - 1.0) > _TOL:
                raise ValueError(f"torus entry {t} is not unimodular")
        if abs(self.constraint_defect()) > _TOL:
            raise ValueError(
                f"cover constraint exp(2 pi i (n+1) x) prod(t) = 1 violated by {abs(self.constraint_defect()):.3e}"
            )

    def constraint_defect(self):
        """``exp(2 pi i (n+1) x) * prod(t) - 1``."""
        prod = complex(np.prod(self.torus)) if self.torus else 1.0
        return np.exp(2j * np.pi * (self.n + 1) * self.cover_x) * prod - 1.0

    @classmethod
    def from_torus(cls, kind, torus, line=0.0, branch=0):
        """Element whose cover coordinate is solved from the constraint.

        ``branch`` selects among the solutions ``x + branch / (n + 1)``.
        """
        torus = tuple(complex(t) for t in torus)
        n = len(torus) if kind == "elliptic" else len(torus) + 1
        prod = complex(np.prod(torus)) if torus else 1.0
        x = -np.angle(prod) / (2 * np.pi * (n + 1)) + branch / (n + 1)
        return cls(kind, torus, line, x)

    @classmethod
    def identity(cls, kind, n):
        d = n if kind == "elliptic" else n - 1
        return cls(kind, (1.0,) * d, 0.0, 0.0)

    @classmethod
    def random(cls, kind, n, rng, line_scale=2.0):
        """Random element: uniform torus, line coordinate uniform in ``[-line_scale, line_scale]``."""
        d = n if kind == "elliptic" else n - 1
        torus = np.exp(2j * np.pi * rng.random(d))
        line = 0.0 if kind == "elliptic" else float(rng.uniform(-line_scale, line_scale))
        return cls.from_torus(kind, torus, line, branch=int(rng.integers(0, n + 1)))

    def __matmul__(self, other):
        """Group product (torus multiplies, line and cover coordinates add)."""
        if (self.kind, self.n) != (other.kind, other.n):
            raise ValueError("cannot compose elements of different groups")
        torus = tuple(a * b for a, b in zip(self.torus, other.torus))
        return GroupElement(self.kind, torus, self.line + other.line, self.cover_x + other.cover_x)

    def inverse(self):
        return GroupElement(self.kind, tuple(1.0 / t for t in self.torus), -self.line, -self.cover_x)

    def to_json(self):
        return {
            "kind": self.kind,
            "torus": [[t.real, t.imag] for t in self.torus],
            "line": self.line,
            "cover_x": self.cover_x,
        }

    @classmethod
    def from_json(cls, data):
        torus = tuple(complex(re, im) for re, im in data.get("torus", []))
        return cls(data["kind"], torus, data.get("line", 0.0), data.get("cover_x", 0.0))


def base_point(kind, n):
    """Base point ``z0`` whose orbit carries the restriction principle."""
    _check_kind(kind)
    if kind == "elliptic":
        return np.full(n, (2 * n) ** -0.5, dtype=np.complex128)
    z0 = np.zeros(n, dtype=np.complex128)
    if n > 1:
        z0[:-1] = (2 * (n - 1)) ** -0.5
    return z0


def _as_points(z):
    z = np.asarray(z, dtype=np.complex128)
    return z


def cayley(z):
    """Ball -> Siegel domain ``Im(w_n) > |w'|^2``: ``z -> i/(1+z_n) (z', 1-z_n)``."""
    z = _as_points(z)
    zn = z[..., -1]
    if np.any(np.abs(1 + zn) == 0):
        raise ValueError("Cayley transform has a pole at z_n = -1")
    w = np.empty_like(z)
    w[..., :-1] = 1j * z[..., :-1] / (1 + zn)[..., None]
    w[..., -1] = 1j * (1 - zn) / (1 + zn)
    return w


def cayley_inv(w):
    """Siegel domain -> ball: ``w -> 1/(1 - i w_n) (-2i w', 1 + i w_n)``."""
    w = _as_points(w)
    wn = w[..., -1]
    den = 1 - 1j * wn
    if np.any(den == 0):
        raise ValueError("inverse Cayley transform has a pole at w_n = -i")
    z = np.empty_like(w)
    z[..., :-1] = -2j * w[..., :-1] / den[..., None]
    z[..., -1] = (1 + 1j * wn) / den
    return z


def act(g, z):
    """Ball action ``g . z`` (vectorized over leading axes of ``z``)."""
    z = _as_points(z)
    if z.shape[-1] != g.n:
        raise ValueError(f"point dimension {z.shape[-1]} does not match group dimension {g.n}")
    t = np.asarray(g.torus, dtype=np.complex128)
    if g.kind == "elliptic":
        return z * t
    out = np.empty_like(z)
    zn = z[..., -1]
    if g.kind == "parabolic":
        y = g.line
        den = -1j * y * zn + 2 - 1j * y
        out[..., :-1] = 2 * t * z[..., :-1] / den[..., None]
        out[..., -1] = ((2 + 1j * y) * zn + 1j * y) / den
    else:
        ch, sh = math.cosh(g.line), math.sinh(g.line)
        den = zn * sh + ch
        out[..., :-1] = t * z[..., :-1] / den[..., None]
        out[..., -1] = (zn * ch + sh) / den
    return out


def act_siegel(g, w):
    """Action on the Siegel domain: translation (parabolic) or dilation (hyperbolic).

    The hyperbolic dilation factor is ``r = exp(-s)`` so that the Cayley
    conjugate matches :func:`act`.
    """
    w = _as_points(w)
    t = np.asarray(g.torus, dtype=np.complex128)
    out = np.empty_like(w)
    if g.kind == "parabolic":
        out[..., :-1] = t * w[..., :-1]
        out[..., -1] = w[..., -1] + g.line
    elif g.kind == "hyperbolic":
        r = math.exp(-g.line)
        out[..., :-1] = r * t * w[..., :-1]
        out[..., -1] = r * r * w[..., -1]
    else:
        raise ValueError("the Siegel-domain action is only used for parabolic/hyperbolic elements")
    return out


def _principal_power(base, lam):
    # base has positive real part everywhere this is used
    return np.exp(-lam * np.log(base))


def cocycle(g, z, weight):
    """Lifted automorphy factor ``j_lambda(g, z) = (w^t z + d)^(-lambda)``.

    The scalar ``a`` of the matrix is ``exp(2 pi i x)`` in the cover, which
    contributes ``exp(-2 pi i lambda x)``.
    """
    z = _as_points(z)
    lam = weight.lam
    phase = np.exp(-2j * np.pi * lam * g.cover_x)
    if g.kind == "elliptic":
        return phase * np.ones(z.shape[:-1], dtype=np.complex128)
    zn = z[..., -1]
    if g.kind == "parabolic":
        y = g.line
        base = 1 - 0.5j * y - 0.5j * y * zn
    else:
        base = zn * math.sinh(g.line) + math.cosh(g.line)
    return phase * _principal_power(base, lam)


def d_lambda(g, weight):
    """``D_lambda(g) = j_lambda(g, z0)`` in closed form."""
    lam = weight.lam
    phase = np.exp(-2j * np.pi * lam * g.cover_x)
    return complex(phase * d_lambda_reduced(g.kind, g.line, weight))


def d_lambda_reduced(kind, line, weight):
    """``D_lambda`` without the cover phase, as a function of the line coordinate.

    elliptic: 1; parabolic: ``2^lam (2 - i y)^(-lam)``; hyperbolic: ``cosh(s)^(-lam)``.
    """
    lam = weight.lam
    line = np.asarray(line, dtype=np.float64)
    if kind == "elliptic":
        return np.ones_like(line, dtype=np.complex128)
    if kind == "parabolic":
        return 2.0 ** lam * _principal_power(2 - 1j * line, lam)
    return np.cosh(line) ** (-lam) + 0j


def chi_lambda(k, weight):
    """Character of the stabilizer lifted to the cover: ``exp(2 pi i lambda x)``."""
    return complex(np.exp(2j * np.pi * weight.lam * k.cover_x))


def chi_lambda_residual(h, k, weight):
    """``|j(hk, z0) - j(h, z0) chi(k)^(-1)|`` for ``k`` in the stabilizer of ``z0``."""
    z0 = base_point(k.kind, k.n)
    if np.max(np.abs(act(k, z0) - z0)) > _TOL:
        raise ValueError("k does not stabilize the base point")
    lhs = d_lambda(h @ k, weight)
    rhs = d_lambda(h, weight) / chi_lambda(k, weight)
    return abs(lhs - rhs)


@dataclass(frozen=True)
class OrbitGrid:
    """Product grid on ``H/H_z0 = T^d (x R)``.

    Torus circles carry ``M`` uniform nodes with weight ``1/M``; the line
    carries ``L`` midpoint nodes on ``[-S, S]`` with weight ``2S/L``. The
    optional ``weight_scale`` rescales the whole invariant measure.
    """

    kind: str
    n: int
    M: int
    L: int = 0
    S: float = 0.0
    weight_scale: float = 1.0

    @property
    def torus_dim(self):
        return self.n if self.kind == "elliptic" else self.n - 1

    @property
    def has_line(self):
        return self.kind != "elliptic"

    @property
    def shape(self):
        return (self.M,) * self.torus_dim + ((self.L,) if self.has_line else ())

    @property
    def size(self):
        return int(np.prod(self.shape)) if self.shape else 1

    def angles(self):
        return 2 * np.pi * np.arange(self.M) / self.M

    def line_nodes(self):
        h = 2 * self.S / self.L
        return -self.S + h * (np.arange(self.L) + 0.5)

    @property
    def torus_weight(self):
        return 1.0 / self.M

    @property
    def line_weight(self):
        return 2 * self.S / self.L

    def node_weight(self):
        """Weight of one grid node (all nodes carry the same weight)."""
        w = self.torus_weight ** self.torus_dim
        if self.has_line:
            w *= self.line_weight
        return w * self.weight_scale

    def torus_values(self):
        """Array of shape ``shape + (d,)`` of torus coordinates."""
        d = self.torus_dim
        circle = np.exp(1j * self.angles())
        axes = [circle] * d
        if self.has_line:
            axes.append(np.zeros(self.L))
        if not axes:
            return np.zeros(self.shape + (0,), dtype=np.complex128)
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack(mesh[:d], axis=-1) if d else np.zeros(self.shape + (0,), dtype=np.complex128)

    def line_values(self):
        """Array of shape ``shape`` holding the line coordinate."""
        if not self.has_line:
            raise ValueError("elliptic grids have no line factor")
        lines = self.line_nodes()
        return np.broadcast_to(lines, self.shape).copy()

    def torus_average(self):
        """``sum(t) / (2d)`` on the grid: the torus part of every orbit kernel."""
        d = self.torus_dim
        if d == 0:
            return np.zeros(self.shape, dtype=np.complex128)
        return self.torus_values().sum(axis=-1) / (2 * d)

    def orbit_points(self):
        """``h . z0`` for every grid node, shape ``shape + (n,)``."""
        z0 = base_point(self.kind, self.n)
        tv = self.torus_values()
        if self.kind == "elliptic":
            return tv * z0
        pts = np.empty(self.shape + (self.n,), dtype=np.complex128)
        line = self.line_values()
        zp = tv * z0[:-1]
        if self.kind == "parabolic":
            den = 2 - 1j * line
            pts[..., :-1] = 2 * zp / den[..., None]
            pts[..., -1] = 1j * line / den
        else:
            pts[..., :-1] = zp / np.cosh(line)[..., None]
            pts[..., -1] = np.tanh(line)
        return pts

    def scaled(self, factor):
        return OrbitGrid(self.kind, self.n, self.M, self.L, self.S, self.weight_scale * factor)

    def as_dict(self):
        out = {"kind": self.kind, "n": self.n, "M": self.M}
        if self.has_line:
            out.update({"L": self.L, "S": self.S})
        if self.weight_scale != 1.0:
            out["weight_scale"] = self.weight_scale
        return out


def orbit_grid(kind, n, torus_nodes, line_nodes=4001, line_halfwidth=40.0):
    """Product quadrature grid on the orbit ``M = H . z0``."""
    _check_kind(kind)
    if torus_nodes < 1:
        raise ValueError("need at least one torus node")
    if kind == "elliptic":
        return OrbitGrid(kind, n, int(torus_nodes))
    if line_nodes < 1 or line_halfwidth <= 0:
        raise ValueError("need line_nodes >= 1 and line_halfwidth > 0")
    return OrbitGrid(kind, n, int(torus_nodes), int(line_nodes), float(line_halfwidth))
