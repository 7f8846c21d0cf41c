"""Command line front end: ``bergtoep <command> [options]``.

Every report starts with a ``# {json}`` line holding the fully resolved
configuration. Exit codes: 0 success, 1 a checked property failed,
2 invalid configuration, 3 a numeric guard tripped.
"""

import argparse
import io
import json
import sys
import warnings

import numpy as np

from . import __version__
from ._calculus import MissingQError, QOperator
from .bergman import a_eigenvalue, b_eigenvalue, norm_sq
from .groups import KINDS, GroupElement, orbit_grid
from .mindex import BasisOverflowError, Weight, enumerate_basis
from .symbols import SymbolExpr

COMMANDS = ("gram", "toeplitz", "spectrum", "commutator", "intertwine", "kernel-fourier", "l1", "check")
DEFAULTS = {
    "degree": 6,
    "grid": 64,
    "line_nodes": 4001,
    "line_halfwidth": 40.0,
    "seed": 42,
    "format": "csv",
    "group": "elliptic",
    "method": "both",
    "suite": "all",
    "S_values": [5.0, 10.0, 20.0, 40.0],
    "series_degree": None,
    "multiplier": False,
    "q": None,
    "torus": None,
    "cover_x": None,
    "symbol": None,
    "symbol2": None,
    "output": None,
    "export_binary": None,
    "n": None,
    "lambda": None,
}


class ConfigError(ValueError):
    """Invalid run configuration (exit code 2)."""


class GuardError(RuntimeError):
    """A numeric guard tripped (exit code 3)."""


def _fmt(x):
    return "%.17g" % x


def _q_arg(text):
    return text if text == "identity" else json.loads(text)


def build_parser():
    p = argparse.ArgumentParser(prog="bergtoep", description="Toeplitz operators on continued weighted Bergman spaces.")
    p.add_argument("command_pos", nargs="?", choices=COMMANDS, metavar="command", help=" | ".join(COMMANDS))
    S = argparse.SUPPRESS
    p.add_argument("--command", dest="command", choices=COMMANDS, default=S)
    p.add_argument("--config", default=S, help="JSON file with any of the options below; flags win")
    p.add_argument("--n", type=int, default=S)
    p.add_argument("--lambda", dest="lambda", type=float, default=S)
    p.add_argument("--degree", "-D", type=int, default=S)
    p.add_argument("--symbol", default=S, help="symbol JSON file")
    p.add_argument("--symbol2", default=S, help="second symbol (commutator)")
    p.add_argument("--group", choices=KINDS, default=S)
    p.add_argument("--grid", type=int, default=S, help="torus nodes per circle (M)")
    p.add_argument("--line-nodes", dest="line_nodes", type=int, default=S, help="line nodes (L)")
    p.add_argument("--line-halfwidth", dest="line_halfwidth", type=float, default=S, help="line half-width (S)")
    p.add_argument("--S-values", dest="S_values", type=float, nargs="+", default=S)
    p.add_argument("--method", choices=("diagonal", "convolution", "closed", "both"), default=S)
    p.add_argument("--series-degree", dest="series_degree", type=int, default=S)
    p.add_argument("--multiplier", action="store_const", const=True, default=S,
                   help="kernel-fourier: append sqrt of each coefficient (exit 3 if any is negative)")
    p.add_argument("--q", type=_q_arg, default=S, help='"identity" or Q coefficients as JSON')
    p.add_argument("--torus", type=json.loads, default=S, help='torus element as JSON [[re, im], ...]')
    p.add_argument("--cover-x", dest="cover_x", type=float, default=S)
    p.add_argument("--suite", default=S)
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--format", choices=("csv", "json"), default=S)
    p.add_argument("--output", "-o", default=S)
    p.add_argument("--export-binary", dest="export_binary", default=S)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def parse_config(argv=None):
    """Merge defaults, the optional config file and explicit flags (in that order)."""
    args = vars(build_parser().parse_args(argv))
    pos = args.pop("command_pos", None)
    if pos is not None:
        args.setdefault("command", pos)
    cfg = dict(DEFAULTS)
    path = args.pop("config", None)
    if path is not None:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: {path} line {exc.lineno}: {exc.msg}") from None
        for key, value in data.items():
            key = key.replace("-", "_")
            if key not in DEFAULTS and key != "command":
                raise ConfigError(f"config: unknown field {key!r}")
            cfg[key] = value
    cfg.update(args)
    return validate(cfg)


def validate(cfg):
    cmd = cfg.get("command")
    if cmd not in COMMANDS:
        raise ConfigError(f"field 'command': expected one of {', '.join(COMMANDS)}, got {cmd!r}")
    if cmd != "check":
        for key in ("n", "lambda"):
            if cfg.get(key) is None:
                raise ConfigError(f"field {key!r}: required for {cmd}")
        try:
            w = Weight(float(cfg["lambda"]), int(cfg["n"]))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"field 'lambda': {exc}") from None
        cfg["m"] = w.m
    if cfg["degree"] is None or int(cfg["degree"]) < 0:
        raise ConfigError("field 'degree': must be a non-negative integer")
    if int(cfg["grid"]) < 1 or int(cfg["line_nodes"]) < 1 or float(cfg["line_halfwidth"]) <= 0:
        raise ConfigError("fields 'grid', 'line_nodes', 'line_halfwidth': must be positive")
    if cmd in ("toeplitz", "spectrum", "commutator", "intertwine") and cfg.get("symbol") is None:
        raise ConfigError(f"field 'symbol': required for {cmd}")
    if cmd == "commutator" and cfg.get("symbol2") is None:
        raise ConfigError("field 'symbol2': required for commutator")
    for key in ("symbol", "symbol2"):
        if cfg.get(key) is not None:
            try:
                SymbolExpr.load(cfg[key])
            except OSError as exc:
                raise ConfigError(f"field {key!r}: cannot read {cfg[key]}: {exc.strerror}") from None
            except (ValueError, KeyError, TypeError) as exc:
                raise ConfigError(f"field {key!r}: invalid symbol file: {exc}") from None
    if cfg["format"] not in ("csv", "json"):
        raise ConfigError("field 'format': expected csv or json")
    if cfg["group"] not in KINDS:
        raise ConfigError(f"field 'group': expected one of {', '.join(KINDS)}")
    return cfg


# helpers


def _weight(cfg):
    return Weight(float(cfg["lambda"]), int(cfg["n"]))


def _symbol(cfg, key="symbol"):
    phi = SymbolExpr.load(cfg[key])
    if phi.n != int(cfg["n"]):
        raise ConfigError(f"field {key!r}: symbol has n={phi.n}, config has n={cfg['n']}")
    return phi


def _q(cfg, kind):
    if cfg.get("q") is None:
        return None
    if cfg["q"] == "identity":
        return QOperator.identity(kind)
    return QOperator(kind, tuple(cfg["q"]))


def _grid(cfg):
    return orbit_grid(cfg["group"], int(cfg["n"]), int(cfg["grid"]), int(cfg["line_nodes"]), float(cfg["line_halfwidth"]))


class Report:
    def __init__(self, cfg):
        self.cfg = cfg
        self.columns = None
        self.rows = []
        self.extra = {}

    def provenance(self):
        # destination paths do not affect the numbers; leaving them out keeps reruns byte-identical
        return {k: v for k, v in self.cfg.items() if k not in ("output", "export_binary")}

    def table(self, columns, rows):
        self.columns = list(columns)
        self.rows = rows

    def render(self):
        header = "# " + json.dumps(self.provenance(), sort_keys=True, default=str)
        if self.cfg["format"] == "json":
            body = {"config": self.provenance(), **self.extra}
            if self.columns is not None:
                body["columns"] = self.columns
                body["rows"] = [[_json_cell(v) for v in row] for row in self.rows]
            return json.dumps(body, sort_keys=True, default=str, indent=1) + "\n"
        out = io.StringIO()
        out.write(header + "\n")
        for key in sorted(self.extra):
            if not isinstance(self.extra[key], (dict, list)):
                out.write(f"# {key}={_csv_cell(self.extra[key])}\n")
        if self.columns is not None:
            out.write(",".join(self.columns) + "\n")
            for row in self.rows:
                out.write(",".join(_csv_cell(v) for v in row) + "\n")
        return out.getvalue()


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _fmt(float(v))
    return str(v)


def _json_cell(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def _split(z):
    if z is None:
        return None, None
    z = complex(z)
    return z.real, z.imag


# commands


def cmd_gram(cfg, rep):
    from .bergman import gram_consistency_residual

    w = _weight(cfg)
    n = w.n
    rows = []
    for r in enumerate_basis(n, int(cfg["degree"])):
        k = r.degree
        res = gram_consistency_residual(r, w) if w.m else 0.0
        rows.append(list(r) + [norm_sq(r, w), a_eigenvalue(k, w), b_eigenvalue(k, w), norm_sq(r, w.shifted()), res])
    cols = [f"r{i + 1}" for i in range(n)] + ["h_lambda", "a_eig", "b_eig", "h_shifted", "rel_residual"]
    rep.table(cols, rows)
    return 0


def cmd_toeplitz(cfg, rep):
    from .toeplitz import assemble

    w = _weight(cfg)
    T = assemble(_symbol(cfg), w, int(cfg["degree"]))
    rep.extra["spectral_radius"] = T.spectral_radius()
    rep.extra["symbol_hash"] = T.symbol_hash
    if cfg.get("export_binary"):
        T.write_binary(cfg["export_binary"])
    if cfg["format"] == "json":
        rep.extra["matrix"] = T.to_json()
        return 0
    n = w.n
    cols = [f"r{i + 1}" for i in range(n)] + [f"s{i + 1}" for i in range(n)] + ["re", "im"]
    rows = []
    for i, r in enumerate(T.basis):
        for j, s in enumerate(T.basis):
            v = T.entries[i, j]
            rows.append(list(r) + list(s) + [v.real, v.imag])
    rep.table(cols, rows)
    return 0


def cmd_spectrum(cfg, rep):
    from .spectra import fourier_numeric, nu_numeric, phi_kernel, spectral_quotient, spectrum_routes

    w = _weight(cfg)
    phi = _symbol(cfg)
    kind = cfg["group"]
    D = int(cfg["degree"])
    if kind == "elliptic":
        method = cfg["method"]
        rows = []
        for r, diag, conv, on in spectrum_routes(phi, w, D, M=int(cfg["grid"]), method=method,
                                                 series_degree=cfg.get("series_degree")):
            dre, dim = _split(diag)
            cre, cim = _split(conv)
            diff = abs(diag - conv) if diag is not None and conv is not None else None
            rows.append(list(r) + [dre, dim, cre, cim, diff, on])
        cols = [f"r{i + 1}" for i in range(w.n)]
    else:
        # the diagonal route only exists on the compact torus; report the quotient table
        grid = _grid(cfg)
        q = _q(cfg, kind)
        nu = nu_numeric(phi, grid, w, int(cfg.get("series_degree") or 60), degree=D)
        den = fourier_numeric(grid, phi_kernel(kind, grid, w, q), degree=D)
        quotient = spectral_quotient(nu, den)
        mask = den.support_mask.ravel()
        rows = []
        for key, on in zip(den.frequencies(), mask):
            cre, cim = _split(quotient[key])
            rows.append(list(key) + [None, None, cre, cim, None, bool(on)])
        cols = [f"r{i + 1}" for i in range(grid.torus_dim)] + ["xi"]
    cols += ["eig_diagonal_re", "eig_diagonal_im", "eig_convolution_re", "eig_convolution_im", "abs_diff", "on_support"]
    rep.table(cols, rows)
    return 0


def cmd_commutator(cfg, rep):
    from .toeplitz import assemble, commutator_norm

    w = _weight(cfg)
    D = int(cfg["degree"])
    A = assemble(_symbol(cfg), w, D)
    B = assemble(_symbol(cfg, "symbol2"), w, D)
    rep.table(["commutator_frobenius"], [[commutator_norm(A, B)]])
    return 0


def cmd_intertwine(cfg, rep):
    from .toeplitz import intertwine_residual

    w = _weight(cfg)
    n = w.n
    if cfg.get("torus") is not None:
        torus = [complex(*t) if isinstance(t, (list, tuple)) else complex(t) for t in cfg["torus"]]
        if len(torus) != n:
            raise ConfigError(f"field 'torus': expected {n} entries")
        if cfg.get("cover_x") is not None:
            g = GroupElement("elliptic", tuple(torus), None, float(cfg["cover_x"]))
        else:
            g = GroupElement.from_torus("elliptic", torus)
    else:
        g = GroupElement.random("elliptic", n, np.random.default_rng(int(cfg["seed"])))
    rep.extra["element"] = g.to_json()
    res = intertwine_residual(_symbol(cfg), g, w, int(cfg["degree"]))
    rep.table(["intertwine_residual"], [[res]])
    return 0


def cmd_kernel_fourier(cfg, rep):
    from .spectra import AliasingWarning, fourier_elliptic_closed, fourier_numeric, phi_kernel, sqrt_rr_star_multiplier

    w = _weight(cfg)
    kind = cfg["group"]
    grid = _grid(cfg)
    D = int(cfg["degree"])
    values = phi_kernel(kind, grid, w, _q(cfg, kind))
    with warnings.catch_warnings():
        warnings.simplefilter("error", AliasingWarning)
        try:
            if kind == "elliptic":
                lattice = enumerate_basis(w.n, D)
                table = fourier_numeric(grid, values, lattice=lattice)
            else:
                table = fourier_numeric(grid, values, degree=D)
        except AliasingWarning as exc:
            raise GuardError(str(exc)) from None
    mask = table.support_mask.ravel()
    rows = []
    if kind == "elliptic":
        for r, c, on in zip(table.lattice, table.coeffs, mask):
            closed = fourier_elliptic_closed(r, w)
            rows.append([int(v) for v in r] + [c.real, c.imag, closed, abs(c - closed), bool(on)])
        cols = [f"r{i + 1}" for i in range(w.n)] + ["re", "im", "closed_form", "abs_diff", "on_support"]
    else:
        for key, c, on in zip(table.frequencies(), table.coeffs.ravel(), mask):
            rows.append(list(key) + [c.real, c.imag, bool(on)])
        cols = [f"r{i + 1}" for i in range(grid.torus_dim)] + ["xi", "re", "im", "on_support"]
    if cfg.get("multiplier"):
        # raises MultiplierError (exit 3) on negative or complex supported coefficients
        root = sqrt_rr_star_multiplier(kind, w, table).coeffs.ravel()
        rows = [row + [float(v.real)] for row, v in zip(rows, root)]
        cols.append("sqrt_multiplier")
    rep.table(cols, rows)
    return 0


def cmd_l1(cfg, rep):
    from .spectra import l1_estimate, l1_tail_bound

    w = _weight(cfg)
    kind = cfg["group"]
    q = _q(cfg, kind)
    est = l1_estimate(kind, w, cfg["S_values"], q=q, M=min(int(cfg["grid"]), 64))
    rows = []
    prev = None
    for S, v in est:
        inc = None if prev is None else v - prev
        bound = l1_tail_bound(kind, w, S) if q is None or q.is_identity else None
        rows.append([S, v, inc, bound])
        prev = v
    rep.table(["S", "integral", "increment", "tail_bound"], rows)
    return 0


def cmd_check(cfg, rep):
    from .checks import SUITES, run_all, run_suite

    suite = cfg["suite"]
    if suite != "all" and suite not in SUITES:
        raise ConfigError(f"field 'suite': expected all or one of {', '.join(SUITES)}")
    results = run_all(int(cfg["seed"])) if suite == "all" else run_suite(suite, int(cfg["seed"]))
    rows = [[r.suite, r.name, "pass" if r.passed else "fail", r.residual, r.tolerance, r.detail] for r in results]
    rep.table(["suite", "property", "status", "residual", "tolerance", "detail"], rows)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.suite}/{r.name}: residual {r.residual:.3e} (tol {r.tolerance:.1e})", file=sys.stderr)
    return 0 if all(r.passed for r in results) else 1


HANDLERS = {
    "gram": cmd_gram,
    "toeplitz": cmd_toeplitz,
    "spectrum": cmd_spectrum,
    "commutator": cmd_commutator,
    "intertwine": cmd_intertwine,
    "kernel-fourier": cmd_kernel_fourier,
    "l1": cmd_l1,
    "check": cmd_check,
}


def run(cfg):
    """Execute a validated config; returns ``(exit_code, report_text)``."""
    from .spectra import MultiplierError

    rep = Report(cfg)
    try:
        code = HANDLERS[cfg["command"]](cfg, rep)
    except (GuardError, MultiplierError, BasisOverflowError, OverflowError, FloatingPointError) as exc:
        raise GuardError(str(exc)) from None
    except MissingQError as exc:
        raise ConfigError(f"field 'q': {exc}") from None
    except ConfigError:
        raise
    except ValueError as exc:
        # remaining library validation (non-invariant symbol, Q order, lambda range)
        raise ConfigError(str(exc)) from None
    return code, rep.render()


def main(argv=None):
    try:
        cfg = parse_config(argv)
        code, text = run(cfg)
    except ConfigError as exc:
        print(f"bergtoep: config error: {exc}", file=sys.stderr)
        return 2
    except GuardError as exc:
        print(f"bergtoep: numeric guard: {exc}", file=sys.stderr)
        return 3
    if cfg.get("output"):
        with open(cfg["output"], "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
