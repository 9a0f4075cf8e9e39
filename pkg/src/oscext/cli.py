"""Command-line front end: ``oscext {spectrum,scan-theta,g,verify}``.

Exit codes: 0 success, 2 usage or parameter error, 3 numerical failure
(including failed invariants under ``verify``).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from . import extensions as E
from . import series as S
from . import spectrum as SP
from .errors import OscillatorError

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    extension: Optional[E.Extension] = None
    window: tuple = SP.DEFAULT_WINDOW
    tol: Optional[float] = None
    output_format: str = "json"
    output_path: Optional[str] = None
    threads: int = 1
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        lo, hi = self.window
        if not lo < hi:
            raise UsageError(f"window needs lo < hi (got lo={lo}, hi={hi})")
        if self.tol is not None and not self.tol > 0:
            raise UsageError("tol must be positive")
        if self.threads < 1:
            raise UsageError("threads must be >= 1")


# --- formatting ---------------------------------------------------------------------


def fmt(x):
    """Floats at 12 significant digits; non-finite values as strings."""
    if x is None or isinstance(x, (bool, str, int)):
        return x
    x = float(x)
    if not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return float(f"{x:.12g}")


def _fmt_tree(obj):
    if isinstance(obj, dict):
        return {k: _fmt_tree(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_fmt_tree(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def render(command: str, params: dict, rows: list, residuals: dict, fmt_name: str) -> str:
    if fmt_name == "json":
        doc = {
            "command": command,
            "params": _fmt_tree(params),
            "results": _fmt_tree(rows),
            "residuals": _fmt_tree(residuals),
            "version": __version__,
        }
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    cols = list(rows[0].keys()) if rows else []
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow(["" if r[c] is None else (f"{r[c]:.12g}" if isinstance(r[c], float) else r[c]) for c in cols])
    return buf.getvalue()


# --- commands -----------------------------------------------------------------------


def cmd_spectrum(cfg: RunConfig):
    lo, hi = cfg.window
    tol = cfg.tol if cfg.tol is not None else 1e-9
    res = SP.eigenvalues_in(cfg.extension, lo, hi, max_count=cfg.extra.get("max_count"), tol=tol)
    rows = [
        {
            "lam": r.lam,
            "residual": r.residual,
            "bracket_lo": r.bracket[0],
            "bracket_hi": r.bracket[1],
            "method": r.method,
            "multiplicity": r.multiplicity,
            "channel": r.channel,
        }
        for r in res
    ]
    params = {"extension": E.to_text(cfg.extension), "lo": lo, "hi": hi, "tol": tol}
    return params, rows, {"max_secular_residual": max((r.residual for r in res), default=0.0)}


def _map(fn, items, threads: int):
    if threads == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))  # map keeps input order


def cmd_scan_theta(cfg: RunConfig):
    lo, hi = cfg.window
    count = cfg.extra.get("count", 33)
    if not (0.0 <= lo and hi < math.pi):
        raise UsageError("theta grid must lie in [0, pi)")
    thetas = np.linspace(lo, hi, count)
    tol = cfg.tol if cfg.tol is not None else 1e-9
    res = _map(lambda th: SP.negative_eigenvalue(float(th), tol=tol), thetas, cfg.threads)
    rows = [
        {
            "theta": float(th),
            "lam": None if r is None else r.lam,
            "method": None if r is None else r.method,
            "residual": None if r is None else r.residual,
        }
        for th, r in zip(thetas, res)
    ]
    defined = [r.lam for r in res if r is not None]
    monotone = all(a > b for a, b in zip(defined, defined[1:]))
    params = {"theta_lo": lo, "theta_hi": hi, "count": count, "tol": tol, "threshold": math.pi - S.alpha_B()}
    residuals = {
        "max_residual": max((r.residual for r in res if r is not None), default=0.0),
        "strictly_decreasing": monotone,
    }
    return params, rows, residuals


def cmd_g(cfg: RunConfig):
    omegas = cfg.extra.get("omegas") or [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0]
    for w in omegas:
        if not 0.0 <= w <= S.OMEGA_MAX:
            raise UsageError(f"omega={w} outside [0, {S.OMEGA_MAX}]")
    gs = _map(S.eval_G, omegas, cfg.threads)
    aA, aB = S.alpha_A(), S.alpha_B()
    rows = [{"omega": w, "G": g, "alpha_A": aA, "alpha_B": aB} for w, g in zip(omegas, gs)]
    from scipy import integrate

    lo = integrate.quad(lambda s: math.cosh(s * s / 2) ** -2, 0, 12, epsabs=1e-14, limit=200)[0]
    hi = integrate.quad(lambda s: math.cosh(s * s / 3) ** -2, 0, 12, epsabs=1e-14, limit=200)[0]
    g0 = S.eval_G(0.0)
    order = np.argsort(omegas)
    sorted_g = [gs[i] for i in order]
    residuals = {
        "G0_within_cosh_bounds": lo < g0 < hi,
        "G_decreasing": all(a > b for a, b in zip(sorted_g, sorted_g[1:])),
    }
    return {"omegas": list(omegas)}, rows, residuals


def cmd_verify(cfg: RunConfig):
    from .verification import run_checks

    res = run_checks(cfg.extra.get("only"), cfg.tol)
    rows = [
        {
            "module": r.module,
            "name": r.name,
            "residual": r.residual,
            "threshold": r.threshold,
            "passed": r.passed,
            "error": r.error,
        }
        for r in res
    ]
    failed = [f"{r.module}.{r.name}" for r in res if not r.passed]
    params = {"only": cfg.extra.get("only"), "tol": cfg.tol}
    return params, rows, {"n_checks": len(res), "n_failed": len(failed), "failed": failed}


COMMANDS = {"spectrum": cmd_spectrum, "scan-theta": cmd_scan_theta, "g": cmd_g, "verify": cmd_verify}


# --- argument parsing ---------------------------------------------------------------


def _float_list(text: str):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    default_threads = os.environ.get("OSC_THREADS", "1")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="solver tolerance (verify: threshold floor)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None, metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--threads", type=int, default=None, help=f"worker threads (env OSC_THREADS, now {default_threads})")

    p = argparse.ArgumentParser(prog="oscext", description="Selfadjoint extensions of the restricted harmonic oscillator.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", parents=[common], help="eigenvalues of one extension in a window")
    sp.add_argument("--family", required=True, choices=("halfline-plus", "halfline-minus", "btheta", "ck"))
    sp.add_argument("--theta", type=float)
    sp.add_argument("--phi", type=float)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--beta1", type=float, default=0.0)
    sp.add_argument("--beta2", type=float, default=0.0)
    sp.add_argument("--lo", type=float, default=SP.DEFAULT_WINDOW[0])
    sp.add_argument("--hi", type=float, default=SP.DEFAULT_WINDOW[1])
    sp.add_argument("--max-count", type=int, default=None)

    st = sub.add_parser("scan-theta", parents=[common], help="negative eigenvalue of BTheta along a theta grid")
    st.add_argument("--lo", type=float, default=1.5, help="first theta")
    st.add_argument("--hi", type=float, default=3.1, help="last theta (< pi)")
    st.add_argument("--count", type=int, default=33)

    g = sub.add_parser("g", parents=[common], help="table of G(omega), alpha_A, alpha_B")
    g.add_argument("--omegas", type=_float_list, default=None, help="comma-separated omega values")

    v = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    v.add_argument("--only", default=None, metavar="MODULE")
    return p


def _config(args) -> RunConfig:
    threads = args.threads
    if threads is None:
        try:
            threads = int(os.environ.get("OSC_THREADS", "1"))
        except ValueError:
            raise UsageError("OSC_THREADS must be an integer")
    kw = dict(command=args.command, tol=args.tol, output_format=args.format, output_path=args.out, threads=threads)
    if args.command == "spectrum":
        try:
            ext = E.from_params(
                args.family, theta=args.theta, phi=args.phi, alpha=args.alpha, beta1=args.beta1, beta2=args.beta2
            )
        except ValueError as exc:
            raise UsageError(str(exc))
        return RunConfig(extension=ext, window=(args.lo, args.hi), extra={"max_count": args.max_count}, **kw)
    if args.command == "scan-theta":
        if args.count < 2:
            raise UsageError("count must be >= 2")
        return RunConfig(window=(args.lo, args.hi), extra={"count": args.count}, **kw)
    if args.command == "g":
        return RunConfig(extra={"omegas": args.omegas}, **kw)
    from .verification import MODULES

    if args.only is not None and args.only not in MODULES:
        raise UsageError(f"--only must be one of {', '.join(MODULES)}")
    return RunConfig(extra={"only": args.only}, **kw)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on parse errors
    try:
        cfg = _config(args)
        params, rows, residuals = COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"oscext: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OscillatorError, ArithmeticError) as exc:
        print(f"oscext: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = render(cfg.command, params, rows, residuals, cfg.output_format)
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if cfg.command == "verify" and residuals["n_failed"]:
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
