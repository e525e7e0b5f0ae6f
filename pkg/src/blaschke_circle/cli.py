"""Command-line front end.

Exit codes: 0 success, 1 validation or I/O error, 2 no convergence,
3 parameters outside the multimodal locus.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .combinatorics import (
    CombinatorialModel,
    model_from_dict,
    model_to_dict,
    orbifold_report,
    validate_model,
)
from .core import KappaVector, ParameterPoint
from .critical import (
    compute_type,
    find_critical_points,
    gap_vector,
    riemann_hurwitz_report,
    target_from_profile,
)
from .errors import (
    BlaschkeError,
    DegenerateCritical,
    DomainError,
    GapViolation,
    NotConverged,
    NotMultimodal,
)
from .thurston import IterationResult, fixed_point_residual, iterate_to_fixed_point
from .tracer import export_geometry, export_lift, lift_samples, verify_decomposition
from .verification import run_verification

log = logging.getLogger("blaschke_circle")

EXIT_OK, EXIT_INVALID, EXIT_NOT_CONVERGED, EXIT_OUTSIDE = 0, 1, 2, 3

PRESETS = {
    # converged fixed point of the bundled model; its first gap is exactly 1
    "four-modal": ((7, 3, 3), 0.6968969140072786, 1.3191426250023166,
                  [(1.333094356671647, 0.6020694510027442)]),
    # the same map rounded to five digits (the first gap drops just below 1)
    "four-modal-rounded": ((7, 3, 3), 0.69690, 1.31911, [(1.33310, 0.60207)]),
    "three-pole": ((8, 3, 2, 2), 0.0, 1.2, [(1.2, 1.0 / 3.0), (1.1, 0.75)]),
    "unimodal": ((2, 1), 0.0, 2.0, []),
}


class UsageError(Exception):
    pass


def _num(x):
    """Round-trip-exact JSON number (17 significant digits)."""
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_num(v) for v in x]
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return int(x)
    x = float(x)
    if not math.isfinite(x):
        return str(x)
    return float(f"{x:.17g}")


def _mu_dict(mu: ParameterPoint) -> dict:
    return {"eta0": _num(mu.eta0), "a1": _num(mu.a1), "poles": [_num(p) for p in mu.poles]}


def mu_from_dict(doc: dict) -> ParameterPoint:
    return ParameterPoint(doc["eta0"], doc["a1"], tuple(tuple(p) for p in doc.get("poles", ())))


def _write(text: str, output: Optional[str]):
    if output is None or output == "-":
        sys.stdout.write(text)
        return
    try:
        Path(output).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {output}: {exc}") from exc


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def load_model_document(path: Optional[str]) -> tuple[CombinatorialModel, dict]:
    """Parse a model document; ``None`` loads the bundled four-modal model."""
    try:
        if path is None:
            text = resources.files("blaschke_circle").joinpath("data/four_modal.json").read_text()
        else:
            text = Path(path).read_text()
        doc = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read model: {exc}") from exc
    if not isinstance(doc, dict):
        raise UsageError("model document must be a JSON object")
    solver = doc.get("solver", {}) or {}
    unknown = set(solver) - {"tol", "max_iter", "jacobian", "seed_radii"}
    if unknown:
        raise UsageError(f"unknown solver fields: {sorted(unknown)}")
    try:
        model = model_from_dict(doc)
    except (DomainError, TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    problems = validate_model(model)
    if problems:
        raise UsageError("invalid model: " + "; ".join(str(p) for p in problems))
    return model, solver


def result_document(model: CombinatorialModel, res: IterationResult) -> dict:
    profile = res.profile
    return {
        "converged": res.converged,
        "iterations": res.iterations,
        "residual": _num(res.residual),
        "x": _num(res.x),
        "mu": _mu_dict(res.mu),
        "kappa": list(res.kappa.as_tuple()),
        "critical_points": _num(profile.normalized_points()),
        "critical_values": _num(res.critical_values),
        "M_estimate": _num(res.M_estimate),
        "residual_history": _num(res.residual_history),
        "step_history": _num(res.step_history),
        "model": model_to_dict(model),
    }


def residual_from_document(doc: dict) -> float:
    """Recompute the fixed-point residual recorded in a result document."""
    model = model_from_dict(doc["model"])
    mu = mu_from_dict(doc["mu"])
    return fixed_point_residual(doc["x"], mu, model, kappa=KappaVector.from_sequence(doc["kappa"]))


def cmd_solve(args) -> int:
    model, solver = load_model_document(args.model)
    tol = args.tol if args.tol is not None else solver.get("tol", 1e-10)
    max_iter = args.max_iter if args.max_iter is not None else solver.get("max_iter", 500)
    jac = args.jacobian or solver.get("jacobian", "analytic")
    try:
        res = iterate_to_fixed_point(model, x0=args.x0, tol=tol, max_iter=max_iter, jacobian=jac,
                                     seed_radii=solver.get("seed_radii"))
        code = EXIT_OK
    except NotConverged as exc:
        res = exc.result
        print(f"not converged: {exc}", file=sys.stderr)
        code = EXIT_NOT_CONVERGED
    _write(_dump(result_document(model, res)), args.output)
    return code


def _params(args) -> tuple[ParameterPoint, KappaVector]:
    if args.preset:
        kap, eta0, a1, poles = PRESETS[args.preset]
    else:
        if args.kappa is None or args.a1 is None:
            raise UsageError("give --preset or both --kappa and --a1")
        kap, eta0, a1, poles = args.kappa, args.eta0, args.a1, args.pole or []
    kappa = KappaVector.from_sequence(kap)
    mu = ParameterPoint(eta0, a1, tuple(tuple(p) for p in poles))
    mu.check(kappa)
    return mu, kappa


def cmd_eval(args) -> int:
    mu, kappa = _params(args)
    profile = find_critical_points(mu, kappa)
    target = target_from_profile(profile, kappa)
    try:
        gaps = _num(gap_vector(profile, kappa))
    except GapViolation as exc:
        gaps = str(exc)
    rh = riemann_hurwitz_report(mu, kappa)
    doc = {
        "mu": _mu_dict(mu),
        "kappa": list(kappa.as_tuple()),
        "degree": kappa.d,
        "critical_points": _num(profile.points),
        "labels": list(profile.labels),
        "critical_values": _num(profile.values),
        "normalized_values": _num(target.v),
        "type": list(compute_type(target.v)),
        "pairing": [j + 1 for j in profile.pairing],
        "gaps": gaps,
        "riemann_hurwitz": {
            "sphere_defect_total": rh.sphere_defect_total,
            "off_circle_budget": rh.off_circle_budget,
            "residual": rh.residual,
            "observed_circle_count": rh.observed_circle_count,
            "balanced": rh.balanced,
        },
    }
    _write(_dump(doc), args.output)
    return EXIT_OK


def cmd_trace(args) -> int:
    mu, kappa = _params(args)
    profile = find_critical_points(mu, kappa)
    report = verify_decomposition(mu, kappa, profile)
    if args.format == "json":
        doc = {
            "curves": len(report.curves),
            "ok": report.ok,
            "circle_crossings": report.circle_crossings,
            "max_crossing_error": _num(report.max_crossing_error),
            "min_pairwise_distance": _num(report.min_pairwise_distance),
            "enclosure_ok": report.enclosure_ok,
            "census": {
                "total": report.census_total,
                "expected": report.census_expected,
                "on_circle": report.census_on_circle,
                "signed_on_circle": report.census_signed_circle,
                "per_curve": {str(k): v for k, v in report.census_per_curve.items()},
            },
        }
        _write(_dump(doc), args.output)
    else:
        _write(export_geometry(report.curves, profile, args.format, mu=mu), args.output)
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_plot_lift(args) -> int:
    mu, kappa = _params(args)
    profile = find_critical_points(mu, kappa)
    t, g = lift_samples(mu, kappa, profile, n=args.samples)
    fmt = "csv" if args.format == "json" else args.format
    _write(export_lift(t, g, fmt, profile), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    summary = run_verification(seed=args.seed, samples=args.samples, trace=not args.no_trace)
    _write(_dump(summary.as_dict()), args.output)
    return EXIT_OK if summary.ok else EXIT_INVALID


def cmd_check(args) -> int:
    model, _ = load_model_document(args.model)
    orb = orbifold_report(model)
    doc = {
        "valid": True,
        "orbifold_euler_characteristic": str(orb.euler_characteristic),
        "hyperbolic": orb.hyperbolic,
    }
    _write(_dump(doc), args.output)
    return EXIT_OK


def _add_params(p):
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--kappa", type=int, nargs="+", help="k0 k1 ... km")
    p.add_argument("--eta0", type=float, default=0.0)
    p.add_argument("--a1", type=float)
    p.add_argument("--pole", type=float, nargs=2, action="append", metavar=("R", "ETA"),
                   help="radius and angle (turns) of a further pole; repeat for each")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blaschke-circle", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="realize a combinatorial model by Thurston iteration")
    p.add_argument("--model", help="model document (default: bundled four_modal.json)")
    p.add_argument("--output")
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--x0", type=float, nargs="+")
    p.add_argument("--jacobian", choices=("analytic", "fd"))
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="validate a model and report its orbifold characteristic")
    p.add_argument("--model")
    p.add_argument("--output")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("eval", help="critical profile, type, gaps and Riemann-Hurwitz count of one map")
    _add_params(p)
    p.add_argument("--output")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("trace", help="trace the curves of B^-1(S^1)")
    _add_params(p)
    p.add_argument("--output")
    p.add_argument("--format", choices=("csv", "svg", "json"), default="svg")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("plot-lift", help="sample the normalized lift")
    _add_params(p)
    p.add_argument("--output")
    p.add_argument("--format", choices=("csv", "svg", "json"), default="csv")
    p.add_argument("--samples", type=int, default=1001)
    p.set_defaults(func=cmd_plot_lift)

    p = sub.add_parser("verify", help="randomized property checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--no-trace", action="store_true")
    p.add_argument("--output")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NotMultimodal, DegenerateCritical) as exc:
        print(f"outside the multimodal locus: {exc}", file=sys.stderr)
        return EXIT_OUTSIDE
    except DomainError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except BlaschkeError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
