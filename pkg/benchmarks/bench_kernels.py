"""Compiled vs pure-Python kernels.

Times closed-form Toeplitz assembly and monomial evaluation on both
backends and checks that they agree.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from bergtoep import _backend
from bergtoep.mindex import Weight, enumerate_basis
from bergtoep.symbols import SymbolExpr, SymbolTerm
from bergtoep.toeplitz import assemble


def _symbol(n, rng, terms=6):
    return SymbolExpr(
        [SymbolTerm(complex(*rng.normal(size=2)), rng.integers(0, 3, n), rng.integers(0, 3, n), int(rng.integers(0, 3))) for _ in range(terms)],
        n,
    )


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)

    rng = np.random.default_rng(0)
    cases = []
    for n, D in ((2, 12), (3, 8), (4, 6)):
        phi = _symbol(n, rng)
        w = Weight(0.7, n)
        cases.append((f"assemble n={n} D={D} (N={len(enumerate_basis(n, D))})", lambda phi=phi, w=w, D=D: assemble(phi, w, D).entries))
    for n, D, P in ((2, 40, 4096), (3, 20, 2048)):
        basis = np.array(enumerate_basis(n, D))
        coeffs = rng.normal(size=len(basis)) + 1j * rng.normal(size=len(basis))
        pts = (rng.normal(size=(P, n)) + 1j * rng.normal(size=(P, n))) * 0.2
        cases.append((f"poly_eval n={n} D={D} points={P}", lambda b=basis, c=coeffs, z=pts: _backend.poly_eval(z, b, c)))

    backends = _backend.available()
    print(f"backends: {', '.join(backends)} (default {_backend.name()})")
    print(f"{'case':<42}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}{'max diff':>12}")
    previous = _backend.name()
    try:
        for label, fn in cases:
            timings, outputs = [], []
            for b in backends:
                _backend.use_backend(b)
                t, out = _best(fn, args.repeat)
                timings.append(t)
                outputs.append(out)
            diff = max((float(np.max(np.abs(o - outputs[0]))) for o in outputs[1:]), default=0.0)
            speed = timings[-1] / timings[0] if len(timings) > 1 else 1.0
            print(f"{label:<42}" + "".join(f"{t * 1e3:>10.2f}ms" for t in timings) + f"{speed:>9.1f}x{diff:>12.1e}")
    finally:
        _backend.use_backend(previous)


if __name__ == "__main__":
    main()
