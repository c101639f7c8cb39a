"""``fraccd`` command line: batch runs with JSON-lines on stdout and CSV/JSON files.

Exit codes: 0 when every check of the command passed, 2 when a result is
numerically inconclusive (or a check did not pass), 1 on usage or parameter
errors.  Files are written only after the whole computation succeeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from datetime import datetime, timezone
from typing import Any, Sequence

from . import __version__
from .cd_analysis import (
    BallPoint,
    IdentityCheck,
    Verdict,
    ball_counterexample,
    c0_constant,
    cd_check,
    lemma_grid_violations,
    select_witness,
    sweep_eps,
    verify_dimension_reduction,
    verify_scaling,
)
from .errors import FracCDError
from .gamma_ops import (
    CDParams,
    FracParams,
    b_alpha,
    b_alpha_quadrature,
    c_alpha_n,
    c_alpha_n_quadrature,
    frac_laplacian,
    gamma,
    gamma2,
    gamma2_region_decomposition,
    gamma2_truncated,
)
from .profiles import (
    CounterexampleSpec,
    ProfileFunction,
    bump_profile,
    constant_profile,
    gaussian_profile,
    make_eta_N,
    make_u_eps,
    make_v_N_eps,
)
from .quadrature import OperatorValue, QuadratureConfig

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2
PROFILES = ("const", "gaussian", "bump", "u_eps", "v_N_eps", "eta_N")
OPS = ("L", "gamma", "gamma2", "L_M", "gamma2_M")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 by default; usage errors are 1 here
        raise UsageError(message)


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--beta", type=float, default=1.0)
    common.add_argument("--eps", type=float, default=None)
    common.add_argument("--N", type=float, default=None, help="cutoff parameter of v_N_eps")
    common.add_argument("--M", type=float, default=None, help="truncation radius")
    common.add_argument("--kappa", type=float, default=0.0)
    common.add_argument("--Ndim", type=float, default=None)
    common.add_argument("--R", type=float, default=10.0)
    common.add_argument("--mu", type=float, default=0.01)
    common.add_argument("--x", type=float, default=0.0)
    common.add_argument("--out", default=None, help="output prefix for <out>.csv and <out>.json")
    common.add_argument("--rel-tol", type=float, default=None)
    common.add_argument("--hmax", type=float, default=None, help="tail cutoff of the quadrature")
    common.add_argument("--preset", choices=("default", "paper"), default="default")

    parser = _Parser(prog="fraccd", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"fraccd {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", parents=[common], help="one operator value")
    p.add_argument("--op", choices=OPS, required=True)
    p.add_argument("--profile", choices=PROFILES, required=True)

    p = sub.add_parser("sweep", parents=[common], help="eps sweep of u_eps at 0")
    p.add_argument("--eps-list", type=_floats, default=[0.1, 0.05, 0.025, 0.0125])
    p.add_argument("--no-decompose", action="store_true")

    sub.add_parser("decompose", parents=[common], help="region decomposition of Gamma_2(u_eps)(0)")

    p = sub.add_parser("cd-check", parents=[common], help="CD(kappa, N) verdict at one point")
    p.add_argument("--profile", choices=PROFILES, default="v_N_eps")

    p = sub.add_parser("verify", parents=[common], help="identity checks")
    p.add_argument("--what", choices=("scaling", "reduction", "lemmas"), required=True)
    p.add_argument("--profile", choices=PROFILES, default=None)
    p.add_argument("--lam", type=_floats, default=[0.5, 2.0, 10.0])
    p.add_argument("--grid", type=int, default=200)

    sub.add_parser("ball", parents=[common], help="CD failure on the ball B_R(0)")
    return parser


# ---------------------------------------------------------------- helpers

def _cfg(args) -> QuadratureConfig:
    kw = {}
    if args.rel_tol is not None:
        kw["rel_tol"] = args.rel_tol
    if args.hmax is not None:
        kw["tail_cutoff"] = args.hmax
    return QuadratureConfig(**kw)


def _spec(args, eps_default: float | None = 0.1) -> CounterexampleSpec:
    eps = args.eps if args.eps is not None else eps_default
    if eps is None:
        raise UsageError("--eps is required")
    N = args.N if args.N is not None else 32.0
    spec = CounterexampleSpec(args.beta, eps, cutoff_N=N)
    if args.preset == "paper":
        spec.check_strict()
    return spec


def _profile(args, name: str) -> ProfileFunction:
    if name == "const":
        return constant_profile(1.0)
    if name == "gaussian":
        return gaussian_profile()
    if name == "bump":
        return bump_profile(1.0)
    if name == "eta_N":
        return make_eta_N(args.N if args.N is not None else 32.0)
    spec = _spec(args)
    return make_u_eps(spec) if name == "u_eps" else make_v_N_eps(spec)


def _clean(obj: Any) -> Any:
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, Verdict):
        return obj.value
    return obj


def _emit(record: dict) -> None:
    sys.stdout.write(json.dumps(_clean(record), sort_keys=False) + "\n")


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "" if math.isnan(v) else format(v, ".12g")
    if isinstance(v, Verdict):
        return v.value
    return str(v)


def _atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".fraccd-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def manifest(command: str, args) -> dict:
    keys = ("beta", "eps", "N", "M", "kappa", "Ndim", "R", "mu", "x", "rel_tol", "hmax", "preset",
            "op", "profile", "what", "lam", "grid", "eps_list")
    params = {k: getattr(args, k) for k in keys if hasattr(args, k)}
    return {"command": command, "parameters": _clean(params), "tool_version": __version__,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds")}


def write_outputs(out: str, command: str, args, columns, rows, records, summary) -> None:
    body = csv_text(columns, rows)
    doc = {"manifest": manifest(command, args), "columns": list(columns),
           "rows": _clean(records), "summary": _clean(summary)}
    _atomic_write(out + ".csv", body)
    _atomic_write(out + ".json", json.dumps(doc, indent=2) + "\n")


def _finish(args, command, columns, rows, records, summary, ok: bool) -> int:
    for r in records:
        _emit(r)
    _emit({"summary": summary})
    out = args.out if args.out is not None else command
    write_outputs(out, command, args, columns, rows, records, summary)
    return EXIT_OK if ok else EXIT_INCONCLUSIVE


# ---------------------------------------------------------------- commands

def cmd_eval(args) -> int:
    p = FracParams(args.beta, 1)
    cfg = _cfg(args)
    u = _profile(args, args.profile)
    if args.op in ("L_M", "gamma2_M") and args.M is None:
        raise UsageError(f"--op {args.op} needs --M")
    if args.op == "L":
        val = frac_laplacian(u, args.x, p, cfg)
    elif args.op == "L_M":
        val = frac_laplacian(u, args.x, p, cfg, M=args.M)
    elif args.op == "gamma":
        val = gamma(u, args.x, p, cfg)
    elif args.op == "gamma2":
        val = gamma2(u, args.x, p, cfg)
    else:
        val = gamma2_truncated(u, args.x, args.M, p, cfg)
    rec = {"op": args.op, "profile": args.profile, "x": args.x, **val.to_dict()}
    _emit(rec)
    if args.out is not None:
        cols = ("op", "profile", "x", "value", "quad_error", "tail_bound", "evaluations", "converged")
        write_outputs(args.out, "eval", args, cols, [[rec[c] for c in cols]], [rec], {"converged": val.converged})
    return EXIT_OK if val.converged else EXIT_INCONCLUSIVE


def cmd_sweep(args) -> int:
    eps_list = [args.eps] if args.eps is not None else args.eps_list
    rows = sweep_eps(args.beta, eps_list, _cfg(args), decompose=not args.no_decompose)
    c0 = c0_constant(args.beta)
    records = []
    ok = True
    for r in rows:
        passed = r.eps_L >= c0 - r.unc_L and r.L_val.converged and r.Gamma2_val.converged
        ok &= passed
        records.append({**dict(zip(r.COLUMNS, r.as_tuple())), "c0_bound_holds": passed})
    summary = {"C0": c0, "all_c0_bounds_hold": ok,
               "eps_gamma2_ratio": max(r.eps_gamma2 for r in rows) / min(r.eps_gamma2 for r in rows)}
    return _finish(args, "sweep", rows[0].COLUMNS, [r.as_tuple() for r in rows], records, summary, ok)


def cmd_decompose(args) -> int:
    p = FracParams(args.beta, 1)
    cfg = _cfg(args)
    u = make_u_eps(_spec(args, 0.0125))
    dec = gamma2_region_decomposition(u, p, cfg)
    g2 = gamma2(u, 0.0, p, cfg)
    parts = dec.parts()
    cols = ("region", "value", "quad_error", "tail_bound")
    rows = [(k, v.value, v.quad_error, v.tail_bound) for k, v in parts.items()]
    tot = dec.total
    rows.append(("total", tot.value, tot.quad_error, tot.tail_bound))
    rows.append(("gamma2", g2.value, g2.quad_error, g2.tail_bound))
    ab = sum(parts[k].value for k in ("a_plus", "a_minus", "b_plus", "b_minus"))
    c = parts["c_plus"].value + parts["c_minus"].value
    sums = abs(tot.value - g2.value) <= tot.uncertainty + g2.uncertainty + 1e-12 * abs(g2.value)
    summary = {"eps": u.descriptor["parameters"]["eps"], "c_share": dec.c_share,
               "a_b_below_c": ab < c, "partition_matches_gamma2": sums}
    records = [dict(zip(cols, r)) for r in rows]
    return _finish(args, "decompose", cols, rows, records, summary, ab < c and sums)


def _report_row(rep) -> tuple:
    g = rep.Gamma_val.value if rep.Gamma_val is not None else None
    return (rep.x, rep.L_val.value, g, rep.Gamma2_val.value, rep.deficit, rep.uncertainty,
            rep.N_star, rep.verdict)


REPORT_COLUMNS = ("x", "L", "Gamma", "Gamma2", "deficit", "uncertainty", "N_star", "verdict")


def cmd_cd_check(args) -> int:
    cfg = _cfg(args)
    n_dim = args.Ndim if args.Ndim is not None else 1.0 / args.mu
    cd = CDParams(args.kappa, n_dim)
    p = FracParams(args.beta, 1)
    witness = None
    if args.profile == "v_N_eps" and (args.N is None or args.eps is None):
        witness = select_witness(args.beta, n_dim, cfg, N=args.N, eps=args.eps)
        u = witness.profile
    else:
        u = _profile(args, args.profile)
    if witness is not None and args.x == 0.0 and args.kappa == 0.0:
        rep = witness.report
    else:
        rep = cd_check(u, args.x, cd, p, cfg)
    rec = rep.to_dict()
    rec["profile"] = u.descriptor
    summary = {"verdict": rep.verdict.value, "N_star": rep.N_star}
    ok = rep.verdict is not Verdict.INCONCLUSIVE and rep.L_val.converged and rep.Gamma2_val.converged
    return _finish(args, "cd-check", REPORT_COLUMNS, [_report_row(rep)], [rec], summary, ok)


IDENTITY_COLUMNS = ("case", "name", "expected", "observed", "deviation", "tolerance", "passed")


def _identity_row(case, c: IdentityCheck) -> tuple:
    return (case, c.name, c.expected, c.observed, c.deviation, c.tolerance, c.passed)


def cmd_verify(args) -> int:
    cfg = _cfg(args)
    if args.what == "lemmas":
        counts = lemma_grid_violations(args.grid)
        cols = ("regime", "violations")
        rows = list(counts.items())
        total = sum(counts.values())
        return _finish(args, "verify", cols, rows, [dict(zip(cols, r)) for r in rows],
                       {"grid": args.grid, "violations": total}, total == 0)
    rows = []
    if args.what == "scaling":
        if args.profile is None and args.eps is None:
            args.eps = 0.05
        if args.profile is None and args.N is None:
            args.N = 8.0
        u = _profile(args, args.profile or "v_N_eps")
        p = FracParams(args.beta, 1)
        for lam in args.lam:
            rows += [_identity_row(lam, c) for c in verify_scaling(u, lam, p, cfg)]
    else:
        u = _profile(args, args.profile or "bump")
        rows.append(_identity_row(args.beta, verify_dimension_reduction(u, args.beta, cfg)))
        for alpha in (0.75, 1.25, 1.5):
            rows.append(_identity_row(alpha, IdentityCheck(
                "B_alpha", b_alpha(alpha), b_alpha_quadrature(alpha, cfg).value, 1e-8)))
            rows.append(_identity_row(alpha + 0.5, IdentityCheck(
                "C_alpha_2", c_alpha_n(alpha + 0.5, 2), c_alpha_n_quadrature(alpha + 0.5, 2, cfg).value, 1e-8)))
    ok = all(r[-1] for r in rows)
    return _finish(args, "verify", IDENTITY_COLUMNS, rows,
                   [dict(zip(IDENTITY_COLUMNS, r)) for r in rows], {"what": args.what, "all_passed": ok}, ok)


def cmd_ball(args) -> int:
    rep = ball_counterexample(args.R, args.mu, args.beta, _cfg(args), N=args.N, eps=args.eps)
    cols = BallPoint.COLUMNS
    rows = [pt.as_tuple() for pt in rep.points]
    summary = {"verdict": rep.verdict.value, "R": rep.R, "mu": rep.mu, "rho": rep.rho, "M": rep.M,
               "max_drift": rep.max_drift, "witness": rep.witness.to_dict(),
               "profile": rep.lifted_descriptor}
    ok = rep.verdict is Verdict.VIOLATED and rep.max_drift < 1e-4
    return _finish(args, "ball", cols, rows, [dict(zip(cols, r)) for r in rows], summary, ok)


COMMANDS = {"eval": cmd_eval, "sweep": cmd_sweep, "decompose": cmd_decompose,
            "cd-check": cmd_cd_check, "verify": cmd_verify, "ball": cmd_ball}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"fraccd: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (FracCDError, ValueError) as exc:
        print(f"fraccd: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
