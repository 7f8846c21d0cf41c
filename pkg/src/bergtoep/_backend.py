"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
fallback. ``use_backend`` switches explicitly (tests compare both).
"""

import numpy as np

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_active = _compiled if _compiled is not None else _kernels_py


def available():
    """Names of the backends that can be selected."""
    return ["compiled", "python"] if _compiled is not None else ["python"]


def name():
    return "compiled" if _active is _compiled and _compiled is not None else "python"


def use_backend(which):
    """Select ``"compiled"`` or ``"python"``; returns the previous name."""
    global _active
    previous = name()
    if which == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available; rebuild the package")
        _active = _compiled
    elif which == "python":
        _active = _kernels_py
    else:
        raise ValueError(f"unknown backend {which!r}")
    return previous


def assemble_closed_form(basis, lognorm, term_a, term_b, term_p, term_c, logfact, logpoch, shiftpoch):
    return _active.assemble_closed_form(
        np.ascontiguousarray(basis, dtype=np.int64),
        np.ascontiguousarray(lognorm, dtype=np.float64),
        np.ascontiguousarray(term_a, dtype=np.int64),
        np.ascontiguousarray(term_b, dtype=np.int64),
        np.ascontiguousarray(term_p, dtype=np.int64),
        np.ascontiguousarray(term_c, dtype=np.complex128),
        np.ascontiguousarray(logfact, dtype=np.float64),
        np.ascontiguousarray(logpoch, dtype=np.float64),
        np.ascontiguousarray(shiftpoch, dtype=np.float64),
    )


def poly_eval(points, basis, coeffs):
    points = np.ascontiguousarray(points, dtype=np.complex128)
    basis = np.ascontiguousarray(basis, dtype=np.int64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    keep = coeffs != 0
    if not keep.all():
        basis = np.ascontiguousarray(basis[keep])
        coeffs = np.ascontiguousarray(coeffs[keep])
    if basis.shape[0] == 0:
        return np.zeros(points.shape[0], dtype=np.complex128)
    return _active.poly_eval(points, basis, coeffs)
