"""Command-line front end.

Subcommands ``dist``, ``approx``, ``ortho``, ``certify``, ``holder`` and
``selftest``.  Reports are JSON, written to stdout or to ``--report PATH``.

Exit codes: 0 ok, 2 malformed input, 3 dimension mismatch, 4 solver did not
converge (the report is still written), 5 certificate or inequality check
failed.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from .approx import best_approximation, bj_orthogonality, dual_distance
from .linalg import DependentBasisWarning, SubspaceBasis, in_span
from .oracle import OracleConfig, OracleLimitError, brute_force_distance, brute_force_sphere_max, holder_check
from .problem import ProblemError, ProblemFile, content_digest
from .selftest import run_all
from .space import DimensionError, SpaceSpec, conjugate_exponent, dual_spec, norm

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DIMENSION = 3
EXIT_CONVERGENCE = 4
EXIT_CERTIFY = 5

DEFAULT_TOL = 1e-9
DEFAULT_SEED = 0
ORACLE_RTOL = 1e-4
GAP_RTOL = 1e-7


class InputError(ValueError):
    """Bad command-line input; maps to exit code 2."""


def _floats(v) -> list[float]:
    return [float(t) for t in np.asarray(v, float).ravel()]


def _vector(text: str) -> np.ndarray:
    try:
        vals = [float(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc
    if not vals or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected finite numbers, got {text!r}")
    return np.array(vals)


def _timestamp() -> str:
    return _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0).isoformat()


def _emit(report: dict, path: str | None) -> None:
    text = json.dumps(report, indent=2, allow_nan=False) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _settings(args, problem: ProblemFile) -> tuple[float, int]:
    tol = args.tol if args.tol is not None else (problem.tolerance or DEFAULT_TOL)
    seed = args.seed if args.seed is not None else (problem.seed if problem.seed is not None else DEFAULT_SEED)
    return tol, seed


def _certificate_dict(cert) -> dict:
    return {
        "z": _floats(cert.z),
        "dual_norm": float(cert.dual_norm),
        "pairing": float(cert.pairing),
        "kernel_residual": float(cert.kernel_residual),
        "degenerate": bool(cert.degenerate),
    }


def _oracle(problem: ProblemFile, Yb: SubspaceBasis, value: float, seed: int) -> tuple[dict, list[str]]:
    cfg = OracleConfig(seed=seed)
    try:
        primal = brute_force_distance(problem.x0, Yb, problem.space, cfg)
        dual = brute_force_sphere_max(problem.x0, Yb.kernel(), dual_spec(problem.space), cfg)
    except OracleLimitError as exc:
        return {"primal": None, "dual": None, "agree": None, "error": str(exc)}, [f"oracle skipped: {exc}"]
    band = ORACLE_RTOL * (1.0 + value)
    agree = abs(primal - value) <= band and abs(dual - value) <= band
    notes = [] if agree else ["oracle disagrees with solver"]
    return {"primal": primal, "dual": dual, "agree": bool(agree)}, notes


def _solve(command: str, args) -> tuple[dict, int]:
    problem = ProblemFile.load(args.problem)
    tol, seed = _settings(args, problem)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DependentBasisWarning)
        Yb = SubspaceBasis(problem.basis, problem.space.dim)
    notes = list(Yb.warnings)
    if command == "dist":
        value, cert, converged = dual_distance(problem.x0, Yb, problem.space, seed)
        best, gap, unique = None, None, None
        if cert.degenerate and value == 0.0 and Yb.rank and in_span(problem.x0, Yb.vectors):
            notes.append("degenerate: x0 in Y")
        if not converged:
            notes.append("not converged")
    else:
        res = best_approximation(problem.x0, Yb, problem.space, seed)
        value, cert, converged = res.distance, res.certificate, res.converged
        best, gap, unique = _floats(res.best_approx), float(res.duality_gap), res.unique
        notes.extend(w for w in res.warnings if w not in notes)
    oracle = None
    if args.oracle:
        oracle, extra = _oracle(problem, Yb, value, seed)
        notes.extend(extra)
    embedded = problem.to_dict()
    embedded["tolerance"], embedded["seed"] = tol, seed
    report = {
        "command": command,
        "input_digest": content_digest(embedded),
        "distance": float(value),
        "best_approx": best,
        "certificate": _certificate_dict(cert),
        "duality_gap": gap,
        "unique": unique,
        "converged": bool(converged),
        "oracle": oracle,
        "warnings": notes,
        "problem": embedded,
        "timestamp": _timestamp(),
    }
    return report, EXIT_OK if converged else EXIT_CONVERGENCE


def cmd_dist(args) -> int:
    report, code = _solve("dist", args)
    _emit(report, args.report)
    return code


def cmd_approx(args) -> int:
    report, code = _solve("approx", args)
    _emit(report, args.report)
    return code


def _space_from_args(args, dim: int) -> SpaceSpec:
    if args.space is not None:
        try:
            return SpaceSpec.from_dict(json.loads(args.space))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad --space: {exc}") from exc
    if args.p is None:
        raise InputError("give --p or --space")
    try:
        return SpaceSpec.plain(args.p, dim)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def cmd_ortho(args) -> int:
    spec = _space_from_args(args, args.x.size)
    if args.y.size != args.x.size:
        raise DimensionError(f"x has length {args.x.size}, y has length {args.y.size}")
    if not np.any(args.x):
        raise InputError("x must be nonzero")
    tol = args.tol if args.tol is not None else DEFAULT_TOL
    res = bj_orthogonality(args.x, args.y, spec, tol)
    inputs = {"space": spec.to_dict(), "x": _floats(args.x), "y": _floats(args.y), "tolerance": tol}
    report = {
        "command": "ortho",
        "input_digest": content_digest(inputs),
        "orthogonal": bool(res.orthogonal),
        "lam": float(res.lam),
        "min_value": float(res.min_value),
        "norm_x": float(res.norm_x),
        "problem": inputs,
        "timestamp": _timestamp(),
    }
    _emit(report, args.report)
    return EXIT_OK


def cmd_holder(args) -> int:
    u, v, p = args.u, args.v, args.p
    if u.size != v.size:
        raise DimensionError(f"u has length {u.size}, v has length {v.size}")
    if u.size < 2 or not np.any(u) or not np.any(v):
        raise InputError("u and v must be nonzero with length >= 2")
    if not 1.0 < p < math.inf:
        raise InputError("p must lie in (1, inf)")
    holds = holder_check(u, v, p)
    q = conjugate_exponent(p)
    inputs = {"u": _floats(u), "v": _floats(v), "p": p}
    report = {
        "command": "holder",
        "input_digest": content_digest(inputs),
        "holds": bool(holds),
        "lhs": float(np.sum(np.abs(u * v))),
        "rhs": float(norm(SpaceSpec.plain(p, u.size), u) * norm(SpaceSpec.plain(q, v.size), v)),
        "problem": inputs,
        "timestamp": _timestamp(),
    }
    _emit(report, args.report)
    return EXIT_OK if holds else EXIT_CERTIFY


def certify_report(report: dict, tol: float = DEFAULT_TOL) -> dict[str, bool]:
    """Recheck a dist/approx report against its embedded problem.

    Returns the individual checks; all must hold for the report to be valid.
    """
    if not isinstance(report, dict) or report.get("command") not in ("dist", "approx"):
        raise ProblemError("not a dist/approx report")
    try:
        embedded = report["problem"]
        problem = ProblemFile.from_dict(embedded)
        c = report["certificate"]
        z = np.array(c["z"], float)
        distance = float(report["distance"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DimensionError):
            raise
        raise ProblemError(f"malformed report: {exc}") from exc
    spec, x0 = problem.space, problem.x0
    if z.shape != x0.shape:
        raise DimensionError("certificate z does not match the space dimension")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DependentBasisWarning)
        Yb = SubspaceBasis(problem.basis, spec.dim)
    dspec = dual_spec(spec)
    scale = 1.0 + abs(distance)
    checks = {"digest": report.get("input_digest") == content_digest(embedded)}
    rows = Yb.vectors
    kres = float(np.max(np.abs(rows @ z) / np.linalg.norm(rows, axis=1))) if Yb.rank else 0.0
    checks["z_in_kernel"] = kres <= max(tol, 1e-9) * (1.0 + float(np.max(np.abs(z), initial=0.0)))
    dn = norm(dspec, z)
    checks["dual_norm"] = abs(dn - float(c["dual_norm"])) <= tol * (1.0 + dn)
    degenerate = bool(c.get("degenerate", False))
    checks["unit_dual_norm"] = abs(dn - 1.0) <= tol or (degenerate and distance == 0.0)
    pairing = float(x0 @ z)
    checks["pairing"] = abs(pairing - float(c["pairing"])) <= tol * (1.0 + abs(pairing))
    lower = abs(pairing) / dn if dn > 0 else 0.0
    if report["command"] == "dist":
        checks["attains_distance"] = abs(lower - distance) <= max(tol, GAP_RTOL) * scale
    else:
        y = np.array(report["best_approx"], float)
        checks["best_approx_in_span"] = (in_span(y, rows) if Yb.rank else not np.any(y))
        primal = norm(spec, x0 - y)
        checks["primal_value"] = abs(primal - distance) <= tol * scale
        gap = primal - lower
        checks["duality_gap"] = abs(gap - float(report["duality_gap"])) <= max(tol, 1e-12) * scale
        checks["weak_duality"] = gap >= -GAP_RTOL * scale
        if report.get("converged"):
            checks["strong_duality"] = abs(gap) <= GAP_RTOL * scale
    return {k: bool(v) for k, v in checks.items()}


def cmd_certify(args) -> int:
    try:
        report = json.loads(Path(args.report_in).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ProblemError(f"cannot read report {args.report_in}: {exc}") from exc
    tol = args.tol if args.tol is not None else DEFAULT_TOL
    checks = certify_report(report, tol)
    valid = all(checks.values())
    out = {
        "command": "certify",
        "input_digest": report.get("input_digest"),
        "valid": valid,
        "checks": checks,
        "timestamp": _timestamp(),
    }
    _emit(out, args.report)
    return EXIT_OK if valid else EXIT_CERTIFY


def cmd_selftest(args) -> int:
    only = None
    if args.only:
        try:
            only = {int(t) for t in args.only.split(",")}
        except ValueError as exc:
            raise InputError(f"bad --only: {args.only!r}") from exc
    results = run_all(only, echo=lambda c: print(c.line(), flush=True))
    passed = sum(c.passed for c in results)
    print(f"{passed}/{len(results)} criteria passed")
    return EXIT_OK if passed == len(results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bjapprox", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_oracle=False):
        p.add_argument("--tol", type=float, default=None, help=f"check tolerance (default {DEFAULT_TOL:g})")
        p.add_argument("--seed", type=int, default=None, help=f"random seed (default {DEFAULT_SEED})")
        p.add_argument("--report", default=None, help="write the JSON report here instead of stdout")
        if with_oracle:
            p.add_argument("--oracle", action="store_true", help="also run the brute-force oracles")

    p = sub.add_parser("dist", help="distance from x0 to span(basis) with a dual certificate")
    p.add_argument("problem")
    common(p, True)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("approx", help="a best approximation with certificate and uniqueness flag")
    p.add_argument("problem")
    common(p, True)
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("ortho", help="Birkhoff-James orthogonality of x to y")
    p.add_argument("--x", type=_vector, required=True, help="comma-separated, e.g. --x=1,-1")
    p.add_argument("--y", type=_vector, required=True)
    p.add_argument("--p", type=str, default=None, help="exponent of a plain l_p space ('inf' allowed)")
    p.add_argument("--space", default=None, help="space as JSON (overrides --p)")
    common(p)
    p.set_defaults(func=cmd_ortho)

    p = sub.add_parser("certify", help="recheck the certificate in a dist/approx report")
    p.add_argument("report_in", metavar="REPORT")
    common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("holder", help="Hölder's inequality through the mixed-norm inequality")
    p.add_argument("--u", type=_vector, required=True)
    p.add_argument("--v", type=_vector, required=True)
    p.add_argument("--p", type=float, required=True)
    common(p)
    p.set_defaults(func=cmd_holder)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("--only", default=None, help="comma-separated criterion numbers")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DimensionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except (ProblemError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
