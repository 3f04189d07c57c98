"""Command-line interface.

Exit codes: 0 on success, 1 on usage or parameter errors, 2 when a
validation finds a soundness violation (or a spline fails certification).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import __version__
from .analysis_constants import constants_table
from .bound_engine import (
    ExchangeablePairInputs,
    MvnTarget,
    SingularityProfile,
    _num,
    bound_beta_universal,
    bound_mvn,
    bound_profile,
    exchangeable_pair_bounds,
)
from .experiments import (
    CLT_DISTS,
    UrnSpec,
    nazarov_probe,
    reports_to_csv,
    validate_clt,
    validate_mvn_discretization,
    validate_urn,
)
from .spline_kernel import BaseSpline, _build_pp, certify_membership
from .targets import BetaTarget, target_from_config, target_profile

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2
PROFILES = {"bounded": "Bounded", "log": "Log", "power": "Power", "logpower": "LogPower"}
TARGETS = ("beta", "vg", "normal", "exponential", "uniform")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _common(p, fmt=("json", "text")):
    p.add_argument("--format", choices=fmt, default=fmt[0], help="output format (default: %(default)s)")
    p.add_argument("--out", metavar="FILE", help="write output to FILE instead of stdout")
    p.add_argument("--seed", type=int, default=0, help="random seed (default: %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kolmbound", description="Kolmogorov-distance bounds from smooth Wasserstein distances.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    top = parser.add_subparsers(dest="group", metavar="{spline,constants,bound,validate}", parser_class=_Parser)
    top.required = True

    # spline
    sp = top.add_parser("spline", help="build or certify the base spline h_m").add_subparsers(
        dest="cmd", metavar="{build,verify}", parser_class=_Parser
    )
    sp.required = True
    p = sp.add_parser("build", help="emit the piecewise polynomial of h_m as JSON")
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--format", choices=("json",), default="json")
    p.add_argument("--out", metavar="FILE")
    p = sp.add_parser("verify", help="certify that h_m belongs to the smoothed-indicator class")
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    _common(p)

    # constants
    cp = top.add_parser("constants", help="derivative-norm constants").add_subparsers(
        dest="cmd", metavar="{dump}", parser_class=_Parser
    )
    cp.required = True
    p = cp.add_parser("dump", help="print M_m, N_m, M'_m, N'_m for m = 1..M")
    p.add_argument("--m", type=_positive_int, default=8, help="largest m (default: %(default)s)")
    _common(p, ("json", "csv", "text"))

    # bound
    bp = top.add_parser("bound", help="evaluate a Kolmogorov bound").add_subparsers(
        dest="cmd", metavar="{compute,target,mvn,pair}", parser_class=_Parser
    )
    bp.required = True
    p = bp.add_parser("compute", help="bound for an explicit singularity profile")
    p.add_argument("--profile", choices=tuple(PROFILES), required=True)
    p.add_argument("--A", type=float, required=True, help="envelope constant")
    p.add_argument("--c", type=float, help="log scale (log, logpower)")
    p.add_argument("--a", type=float, default=0.0, help="power exponent (power, logpower)")
    p.add_argument("--b", type=float, default=0.0, help="log exponent (logpower)")
    p.add_argument("--eps", type=float, default=math.inf, help="envelope radius (default: inf)")
    p.add_argument("--B", type=float, default=0.0, help="density bound away from the singularities")
    p.add_argument("--singularities", type=_positive_int, default=1, help="number of singular points")
    _bound_flags(p)
    p = bp.add_parser("target", help="bound for a named target distribution")
    p.add_argument("--target", choices=TARGETS, required=True)
    p.add_argument("--alpha", type=float, help="beta shape alpha")
    p.add_argument("--beta", type=float, help="beta shape beta")
    p.add_argument("--r", type=float, help="variance-gamma shape r")
    p.add_argument("--theta", type=float, default=0.0, help="variance-gamma skew theta")
    p.add_argument("--sigma", type=float, default=1.0, help="scale (normal, variance-gamma)")
    p.add_argument("--mu", type=float, default=0.0, help="location (normal, variance-gamma)")
    p.add_argument("--lam", type=float, default=1.0, help="exponential rate")
    p.add_argument("--lo", type=float, default=0.0, help="uniform left end")
    p.add_argument("--hi", type=float, default=1.0, help="uniform right end")
    _bound_flags(p)
    p = bp.add_parser("mvn", help="bound for a multivariate normal target")
    p.add_argument("--dim", type=_positive_int, required=True)
    p.add_argument("--sigma", type=float, default=1.0, help="standard-deviation floor")
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--dm", type=float, required=True, help="d_m distance input")
    _common(p)
    p = bp.add_parser("pair", help="bounds from exchangeable-pair quantities")
    p.add_argument("--A", type=float, required=True)
    p.add_argument("--B", type=float, required=True)
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--dim", type=_positive_int, required=True)
    p.add_argument("--sigma", type=float, required=True, help="standard-deviation floor of the target")
    p.add_argument("--sigma-star", type=float, required=True)
    p.add_argument("--sigma-norm", type=float, required=True, help="sup norm of the covariance matrix")
    _common(p)

    # validate
    vp = top.add_parser("validate", help="check bounds against exact distances").add_subparsers(
        dest="cmd", metavar="{urn,clt,nazarov,mvn-disc}", parser_class=_Parser
    )
    vp.required = True
    p = vp.add_parser("urn", help="Polya urn proportion against its beta limit")
    p.add_argument("--alpha", type=_positive_int, required=True, help="initial white balls")
    p.add_argument("--beta", type=_positive_int, required=True, help="initial black balls")
    p.add_argument("--t", type=_positive_int, default=1, help="balls added per draw (default: %(default)s)")
    p.add_argument("--n", type=_positive_int, nargs="+", required=True, help="numbers of draws")
    p.add_argument("--m", type=_positive_int, default=1)
    _common(p, ("json", "csv", "text"))
    p = vp.add_parser("clt", help="normalised sums against the standard normal")
    p.add_argument("--dist", choices=CLT_DISTS, default="rademacher")
    p.add_argument("--n", type=_positive_int, nargs="+", required=True, help="numbers of summands")
    p.add_argument("--m", type=_positive_int, default=1)
    p.add_argument("--n-mc", type=int, default=100_000, help="Monte Carlo sample size (default: %(default)s)")
    _common(p, ("json", "csv", "text"))
    p = vp.add_parser("nazarov", help="probe the normal box-increment inequality")
    p.add_argument("--dim", type=_positive_int, required=True)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--grid", type=_positive_int, default=10_000, help="number of (z, alpha) points")
    _common(p)
    p = vp.add_parser("mvn-disc", help="lattice rounding of a standard normal vector")
    p.add_argument("--dim", type=_positive_int, required=True)
    p.add_argument("--h", type=float, nargs="+", required=True, help="lattice steps")
    p.add_argument("--m", type=_positive_int, default=1)
    _common(p, ("json", "csv", "text"))
    return parser


def _bound_flags(p):
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--dm", type=float, required=True, help="d_m distance input")
    p.add_argument("--strict", action=argparse.BooleanOptionalAction, default=True, help="use the gated formula")
    _common(p)


# ---------------------------------------------------------------------------
# rendering


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _text_bound(r) -> str:
    d = r.to_json_dict()
    return "".join(f"{k}: {v}\n" for k, v in d.items())


def _render_bounds(results, fmt) -> str:
    if fmt == "text":
        return "\n".join(_text_bound(r) for r in results)
    if len(results) == 1:
        return _json(results[0].to_json_dict())
    return _json([r.to_json_dict() for r in results])


def _render_reports(reports, fmt) -> str:
    if fmt == "csv":
        return reports_to_csv(reports)
    if fmt == "text":
        lines = []
        for r in reports:
            lines.append(
                f"{r.experiment} {r.params_str()} n={r.n} dK={_num(r.exact_dK.value)} "
                f"bound={_num(r.bound.bound_value)} valid={r.bound.validity_ok} holds={r.inequality_holds}"
            )
        return "\n".join(lines) + "\n"
    return _json([r.to_json_dict() for r in reports])


# ---------------------------------------------------------------------------
# handlers; each returns (text, exit code)


def _spline_build(args):
    return BaseSpline(args.m, _build_pp(args.m)).to_json() + "\n", EXIT_OK


def _spline_verify(args):
    if not args.tol > 0:
        raise ValueError("--tol must be positive")
    rep = certify_membership(BaseSpline(args.m, _build_pp(args.m)), args.tol)
    code = EXIT_OK if rep.passed else EXIT_VIOLATION
    if args.format == "text":
        return f"h_{args.m}: {rep.summary()}\n", code
    data = {
        "m": rep.m,
        "tol": _num(rep.tol),
        "continuity_residual": _num(rep.continuity_residual),
        "range_violation": _num(rep.range_violation),
        "symmetry_residual": _num(rep.symmetry_residual),
        "monotonicity_violation": _num(rep.monotonicity_violation),
        "top_derivative_residual": _num(rep.top_derivative_residual),
        "passed": rep.passed,
    }
    return _json(data), code


def _constants_dump(args):
    rows = [constants_table(m).to_dict() for m in range(1, args.m + 1)]
    keys = list(rows[0])
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(keys)
        for r in rows:
            w.writerow([r["m"]] + [_num(r[k]) for k in keys[1:]])
        return buf.getvalue(), EXIT_OK
    if args.format == "text":
        out = ["  ".join(f"{k:>22}" for k in keys)]
        out += ["  ".join(f"{r[k]:>22.17g}" for k in keys) for r in rows]
        return "\n".join(out) + "\n", EXIT_OK
    return _json([{k: (r[k] if k == "m" else _num(r[k])) for k in keys} for r in rows]), EXIT_OK


def _bound_compute(args):
    prof = SingularityProfile(
        PROFILES[args.profile], args.A, c=args.c, a=args.a, b=args.b, epsilon=args.eps,
        n_singularities=args.singularities, B_offset=args.B,
    )
    return _render_bounds([bound_profile(prof, args.m, args.dm, args.strict)], args.format), EXIT_OK


def _target_cfg(args) -> dict:
    if args.target == "beta":
        if args.alpha is None or args.beta is None:
            raise ValueError("--alpha and --beta are required for a beta target")
        return {"kind": "beta", "params": {"alpha": args.alpha, "beta": args.beta}}
    if args.target == "vg":
        if args.r is None:
            raise ValueError("--r is required for a variance-gamma target")
        return {"kind": "vg", "params": {"r": args.r, "theta": args.theta, "sigma": args.sigma, "mu": args.mu}}
    if args.target == "normal":
        return {"kind": "normal", "params": {"mu": args.mu, "sigma": args.sigma}}
    if args.target == "exponential":
        return {"kind": "exponential", "params": {"lam": args.lam}}
    return {"kind": "uniform", "params": {"a": args.lo, "b": args.hi}}


def _bound_target(args):
    t = target_from_config(_target_cfg(args))
    results = [bound_profile(target_profile(t), args.m, args.dm, args.strict)]
    if isinstance(t, BetaTarget):
        results.append(bound_beta_universal(t.alpha_p, t.beta_p, args.m, args.dm))
    return _render_bounds(results, args.format), EXIT_OK


def _bound_mvn(args):
    loose, strict = bound_mvn(MvnTarget.isotropic(args.dim, args.sigma), args.m, args.dm)
    return _render_bounds([strict, loose], args.format), EXIT_OK


def _bound_pair(args):
    inp = ExchangeablePairInputs(args.A, args.B, args.C, args.dim, args.sigma, args.sigma_star, args.sigma_norm)
    return _render_bounds(list(exchangeable_pair_bounds(inp)), args.format), EXIT_OK


def _finish(reports, fmt):
    code = EXIT_VIOLATION if any(r.soundness_violation for r in reports) else EXIT_OK
    return _render_reports(reports, fmt), code


def _validate_urn(args):
    reports = [validate_urn(UrnSpec(args.alpha, args.beta, args.t, n), args.m) for n in args.n]
    return _finish(reports, args.format)


def _validate_clt(args):
    reports = [validate_clt(args.dist, n, args.m, n_mc=args.n_mc, seed=args.seed) for n in args.n]
    return _finish(reports, args.format)


def _validate_nazarov(args):
    res = nazarov_probe(args.dim, args.sigma, args.grid, args.seed)
    code = EXIT_OK if res.passed else EXIT_VIOLATION
    if args.format == "text":
        return f"dim={res.dim} points={res.n_points} max_violation={_num(res.max_violation)}\n", code
    data = {
        "dim": res.dim,
        "n_points": res.n_points,
        "max_violation": _num(res.max_violation),
        "worst_z": [_num(v) for v in res.worst_z],
        "worst_alpha": _num(res.worst_alpha),
        "passed": res.passed,
    }
    return _json(data), code


def _validate_mvn(args):
    reports = [validate_mvn_discretization(args.dim, h, args.m, args.seed) for h in args.h]
    return _finish(reports, args.format)


HANDLERS = {
    ("spline", "build"): _spline_build,
    ("spline", "verify"): _spline_verify,
    ("constants", "dump"): _constants_dump,
    ("bound", "compute"): _bound_compute,
    ("bound", "target"): _bound_target,
    ("bound", "mvn"): _bound_mvn,
    ("bound", "pair"): _bound_pair,
    ("validate", "urn"): _validate_urn,
    ("validate", "clt"): _validate_clt,
    ("validate", "nazarov"): _validate_nazarov,
    ("validate", "mvn-disc"): _validate_mvn,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return EXIT_OK if not exc.code else EXIT_USAGE
    try:
        text, code = HANDLERS[(args.group, args.cmd)](args)
    except (ValueError, OverflowError) as exc:
        print(f"kolmbound: error: {exc}", file=stderr)
        return EXIT_USAGE
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def main():
    sys.exit(run())
