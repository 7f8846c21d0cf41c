"""Pure numpy fallback for the compiled kernels in ``_kernels.pyx``.

Both implementations take the same precomputed log tables so that they run
the same arithmetic; they agree to a few ulps, not bitwise.
"""

import numpy as np


def assemble_closed_form(basis, lognorm, term_a, term_b, term_p, term_c, logfact, logpoch, shiftpoch):
    """Normalized Toeplitz matrix of a closed-form symbol.

    Parameters
    ----------
    basis : (N, n) int64
        Multi-indices ``r_i``.
    lognorm : (N,) float64
        ``0.5 * log(h_r)`` per basis element.
    term_a, term_b : (T, n) int64
        Holomorphic / antiholomorphic exponents of each symbol term.
    term_p : (T,) int64
        Radial powers.
    term_c : (T,) complex128
        Coefficients.
    logfact : (K,) float64
        ``log(k!)``.
    logpoch : (K,) float64
        ``log((lambda)_k)``.
    shiftpoch : (P,) float64
        ``(lambda - n)_p`` (signed).

    Returns
    -------
    (N, N) complex128
        ``out[i, j] = <phi e_{r_j}, e_{r_i}>``.
    """
    basis = np.asarray(basis, dtype=np.int64)
    N = basis.shape[0]
    out = np.zeros((N, N), dtype=np.complex128)
    for t in range(term_a.shape[0]):
        rows = basis + term_b[t]  # r_i + b
        cols = basis + term_a[t]  # s_j + a
        match = np.all(rows[:, None, :] == cols[None, :, :], axis=2)
        ii, jj = np.nonzero(match)
        if ii.size == 0:
            continue
        alpha = cols[jj]
        logval = (
            logfact[alpha].sum(axis=1)
            - logpoch[term_p[t] + alpha.sum(axis=1)]
            - lognorm[ii]
            - lognorm[jj]
        )
        out[ii, jj] += term_c[t] * (shiftpoch[term_p[t]] * np.exp(logval))
    return out


def poly_eval(points, basis, coeffs):
    """Evaluate ``sum_r coeffs[r] * z**r`` at every row of ``points``.

    Parameters
    ----------
    points : (P, n) complex128
    basis : (N, n) int64
    coeffs : (N,) complex128

    Returns
    -------
    (P,) complex128
    """
    points = np.asarray(points, dtype=np.complex128)
    basis = np.asarray(basis, dtype=np.int64)
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    P, n = points.shape
    out = np.zeros(P, dtype=np.complex128)
    if basis.shape[0] == 0:
        return out
    maxdeg = int(basis.max())
    chunk = max(1, 2_000_000 // max(1, basis.shape[0]))
    for start in range(0, P, chunk):
        z = points[start:start + chunk]
        powers = np.ones((z.shape[0], n, maxdeg + 1), dtype=np.complex128)
        for e in range(1, maxdeg + 1):
            powers[:, :, e] = powers[:, :, e - 1] * z
        mono = np.ones((z.shape[0], basis.shape[0]), dtype=np.complex128)
        for k in range(n):
            mono *= powers[:, k, basis[:, k]]
        out[start:start + chunk] = mono @ coeffs
    return out
