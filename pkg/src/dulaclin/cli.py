"""Batch front-end: linearize series, run Koenigs grids, verify domains,
and emit decay-comparison reports.

Every report embeds the tool version, a hash of the effective configuration,
and the seed, so identical invocations produce byte-identical files.
Exit codes: 0 ok, 2 not hyperbolic, 3 parse error, 4 unconverged grid points,
5 violations above tolerance, 1 other errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .domains import (
    AsymptoticProfile,
    QuadRegion,
    check_invariance,
    find_invariant_cut,
    region_from_json,
)
from .dynamics import (
    AnalyticMap,
    decay_slope,
    koenigs_limit,
    parse_grid,
    solve_homological_numeric,
)
from .errors import (
    DulaclinError,
    NotConverged,
    NotHyperbolic,
    ParseError,
    ExponentNotInSemigroup,
)
from .linearize import linearize_by_picard, linearize_level_by_level, partial_sums
from .series import (
    ExpPolySeries,
    conjugacy_residual,
    parse_series,
    serialize_series,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_HYPERBOLIC = 2
EXIT_PARSE = 3
EXIT_NOT_CONVERGED = 4
EXIT_VIOLATIONS = 5


def _num(text: str) -> float:
    """Numeric flag value: decimal or exact rational p/q."""
    return float(Fraction(text)) if "/" in text else float(text)


def _rat(text: str) -> Fraction:
    return Fraction(text)


def _cnum(text: str) -> complex:
    """Complex literal a, bi, or a+bi / a-bi with decimal or rational parts."""
    t = text.strip().replace(" ", "")
    if t.endswith("i") or t.endswith("j"):
        body = t[:-1]
        for cut in range(len(body) - 1, 0, -1):
            if body[cut] in "+-" and body[cut - 1] not in "eE/":
                return complex(_num(body[:cut]), _num(body[cut:] or "1"))
        sign_only = body in ("", "+", "-")
        return complex(0.0, _num(body + "1") if sign_only else _num(body))
    return complex(_num(t), 0.0)


def _config_hash(args: argparse.Namespace) -> str:
    # the output path does not affect any computed value
    payload = {k: repr(v) for k, v in sorted(vars(args).items())
               if k not in ("func", "output")}
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


def _header_lines(args) -> list:
    return [
        f"# tool=dulaclin {__version__}",
        f"# config_hash={_config_hash(args)}",
        f"# seed={getattr(args, 'seed', 0)}",
    ]


def _write_text(path: str, text: str):
    Path(path).write_text(text)


def _profile(args) -> AsymptoticProfile:
    return AsymptoticProfile(args.beta, args.eps, args.k, args.cut)


def _load_map(args, profile) -> AnalyticMap:
    if getattr(args, "expr", None):
        return AnalyticMap.from_expression(args.expr, profile)
    series = parse_series(Path(args.input).read_text())
    return AnalyticMap.from_series(series, profile)


def _round_series(series: ExpPolySeries, quantum: float = 1e-9) -> ExpPolySeries:
    terms = {}
    for m, b in series.terms:
        terms[m] = [complex(round(c.real / quantum) * quantum,
                            round(c.imag / quantum) * quantum) for c in b.coeffs]
    return ExpPolySeries(series.trunc, series.gens, terms)


def cmd_linearize(args) -> int:
    try:
        f = parse_series(Path(args.input).read_text())
    except (ParseError, ExponentNotInSemigroup) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if args.order is not None and args.order < f.trunc:
        f = f.with_trunc(args.order)
    try:
        level = linearize_level_by_level(f)
    except NotHyperbolic as exc:
        print(f"not hyperbolic: {exc}", file=sys.stderr)
        return EXIT_NOT_HYPERBOLIC
    residual = conjugacy_residual(level.phi, f, level.beta)
    scale = max(1.0, f.max_abs_coeff(), level.phi.max_abs_coeff())
    max_resid = residual.max_abs_coeff() / scale
    out = args.output
    report = {
        "tool": f"dulaclin {__version__}",
        "config_hash": _config_hash(args),
        "seed": args.seed,
        "max_residual_coeff_rel": max_resid,
        "tolerance": args.tol,
        "levels": [f"{v.numerator}/{v.denominator}" for v in level.levels_solved],
    }
    _write_text(f"{out}.phi.json", json.dumps(level.to_json(), indent=1))
    if args.cross_check:
        picard = linearize_by_picard(f)
        diff = 0.0
        for m in set(level.phi.support()) | set(picard.phi.support()):
            a, b = level.phi.block(m), picard.phi.block(m)
            for d in range(max(a.degree, b.degree) + 1):
                x, y = a.coeff(d), b.coeff(d)
                diff = max(diff, abs(x - y) / max(1.0, abs(x), abs(y)))
        ra = serialize_series(_round_series(level.phi))
        rb = serialize_series(_round_series(picard.phi))
        report["cross_check"] = {
            "max_rel_coeff_diff": diff,
            "rounded_bytes_equal": ra == rb,
            "rounding_quantum": 1e-9,
        }
        _write_text(f"{out}.phi.picard.json", json.dumps(picard.to_json(), indent=1))
    _write_text(f"{out}.report.json", json.dumps(report, indent=1, sort_keys=True))
    print(f"max relative residual coefficient: {max_resid:.3e}")
    return EXIT_OK if max_resid <= args.tol else EXIT_VIOLATIONS


def cmd_koenigs(args) -> int:
    profile = _profile(args)
    try:
        f = _load_map(args, profile)
    except (ParseError, ExponentNotInSemigroup) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    region = (region_from_json(json.loads(Path(args.region).read_text()))
              if args.region else None)
    grid = parse_grid(args.grid)
    beta = complex(profile.beta)
    rows = []
    failures = 0
    max_resid = 0.0
    for z in grid:
        try:
            kr = koenigs_limit(f, z, args.tol)
            kr2 = koenigs_limit(f, f(z), args.tol)
            resid = abs(kr2.value - kr.value - beta)
            max_resid = max(max_resid, resid)
            phi = kr.value
            row = (z.real, z.imag, phi.real, phi.imag, kr.n_used, kr.tail_bound, resid)
        except NotConverged as exc:
            failures += 1
            if not args.allow_partial:
                print(f"not converged at {z}: {exc}", file=sys.stderr)
                return EXIT_NOT_CONVERGED
            part = exc.partial
            row = (z.real, z.imag,
                   part.value.real if part else math.nan,
                   part.value.imag if part else math.nan,
                   part.n_used if part else 0, math.inf, math.nan)
        inside = region.contains(z) if region else (z.real >= profile.R)
        rows.append(row + (int(inside),))
    lines = _header_lines(args)
    lines.append("re_zeta,im_zeta,re_phi,im_phi,n_used,tail_bound,residual,in_region")
    for r in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in r))
    lines.append(f"# summary max_residual={max_resid!r} n_points={len(grid)} n_failed={failures}")
    _write_text(args.output, "\n".join(lines) + "\n")
    print(f"max |phi(f(z)) - phi(z) - beta| = {max_resid:.3e} over {len(grid)} points"
          f" ({failures} unconverged)")
    return EXIT_OK


def cmd_verify_domain(args) -> int:
    profile = _profile(args)
    try:
        f = _load_map(args, profile)
    except (ParseError, ExponentNotInSemigroup) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if args.region:
        region = region_from_json(json.loads(Path(args.region).read_text()))
    else:
        region = QuadRegion(args.quad_c)
    if args.search:
        R, report = find_invariant_cut(f, region, profile,
                                       n_samples=args.samples, seed=args.seed)
    else:
        R = max(profile.R, region.cut)
        report = check_invariance(f, region, profile,
                                  n_samples=args.samples, seed=args.seed)
    lines = _header_lines(args)
    lines.append(f"# R={report.R!r} worst_bound_margin={report.worst_bound_margin!r}")
    lines.append("re,im,bound_margin,rect_ok,region_ok")
    for x, y, margin, rect_ok, region_ok in report.rows:
        lines.append(f"{x!r},{y!r},{margin!r},{int(rect_ok)},{int(region_ok)}")
    _write_text(args.output, "\n".join(lines) + "\n")
    print(f"R = {report.R}: {report.n_violations} violations over {report.n_samples} samples")
    return EXIT_OK if report.passed else EXIT_VIOLATIONS


def cmd_compare(args) -> int:
    try:
        fhat = parse_series(Path(args.input).read_text())
    except (ParseError, ExponentNotInSemigroup) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    profile = _profile(args)
    try:
        result = linearize_level_by_level(fhat)
    except NotHyperbolic as exc:
        print(f"not hyperbolic: {exc}", file=sys.stderr)
        return EXIT_NOT_HYPERBOLIC
    f = (AnalyticMap.from_expression(args.expr, profile) if args.expr
         else AnalyticMap.from_series(fhat, profile))
    grid = parse_grid(args.grid)
    levels = [m for m, _ in result.phi.terms if m > 0]
    lines = _header_lines(args)
    lines.append("n,exponent,slope,bound,passed,n_points,exact")
    ok = True
    for n in sorted(int(n) for n in args.levels.split(",")):
        phi_n = partial_sums(result.phi, n)
        # the residual of the n-th partial sum decays at the rate of the
        # first missing level; a complete partial sum leaves only noise
        exponent = levels[n] if n < len(levels) else None
        fit = decay_slope(f, phi_n, grid, tol=args.tol, exponent=exponent)
        passed = fit.passed if fit.passed is not None else True
        ok = ok and passed
        shown_exp = "" if exponent is None else str(exponent)
        bound = "" if exponent is None else repr(-float(exponent))
        lines.append(
            f"{n},{shown_exp},{'' if fit.slope is None else repr(fit.slope)},"
            f"{bound},{int(passed)},{fit.n_used},{int(fit.exact)}")
        shown = "exact" if fit.exact else f"slope {fit.slope:.4f}"
        print(f"n={n}: {shown} (next level exponent {shown_exp or 'none'}) "
              f"{'PASS' if passed else 'FAIL'}")
    _write_text(args.output, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_VIOLATIONS


def cmd_solve_homological(args) -> int:
    profile = _profile(args)
    try:
        f = _load_map(args, profile)
        h = AnalyticMap.from_expression(args.h_expr, profile)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    grid = parse_grid(args.grid)
    rows = []
    for z in grid:
        try:
            psi = solve_homological_numeric(f, h.evaluator, args.alpha, z, args.tol)
        except NotConverged as exc:
            print(f"not converged at {z}: {exc}", file=sys.stderr)
            return EXIT_NOT_CONVERGED
        znext = f(z)
        psi_next = solve_homological_numeric(f, h.evaluator, args.alpha, znext,
                                             args.tol, _verify=False)
        resid = abs(psi_next - psi - h.evaluator(z))
        rows.append({"zeta": [z.real, z.imag], "psi": [psi.real, psi.imag],
                     "residual": resid})
    payload = {
        "tool": f"dulaclin {__version__}",
        "config_hash": _config_hash(args),
        "seed": args.seed,
        "alpha": args.alpha,
        "rows": rows,
    }
    _write_text(args.output, json.dumps(payload, indent=1, sort_keys=True))
    worst = max(r["residual"] for r in rows)
    print(f"max homological residual {worst:.3e} over {len(rows)} points")
    return EXIT_OK if worst <= 10 * args.tol else EXIT_VIOLATIONS


def _add_profile_flags(p):
    p.add_argument("--beta", type=_cnum, default=1 + 0j, help="drift constant a+bi")
    p.add_argument("--eps", type=_num, default=1.0)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--cut", type=_num, default=8.0, help="real-part cut R")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dulaclin", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("linearize", help="formal linearization of a series file")
    p.add_argument("--input", required=True)
    p.add_argument("--order", type=_rat, default=None)
    p.add_argument("--tol", type=_num, default=1e-9)
    p.add_argument("--cross-check", action="store_true")
    p.add_argument("--output", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_linearize)

    p = sub.add_parser("koenigs", help="numeric linearization over a grid")
    p.add_argument("--expr")
    p.add_argument("--input")
    _add_profile_flags(p)
    p.add_argument("--grid", required=True)
    p.add_argument("--tol", type=_num, default=1e-9)
    p.add_argument("--region", help="region JSON file for the in_region flag")
    p.add_argument("--allow-partial", action="store_true")
    p.add_argument("--output", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_koenigs)

    p = sub.add_parser("verify-domain", help="sampled invariance verification")
    p.add_argument("--expr")
    p.add_argument("--input")
    _add_profile_flags(p)
    p.add_argument("--region", help="region JSON file; default quadratic domain")
    p.add_argument("--quad-c", type=_num, default=2.0)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--search", action="store_true",
                   help="raise R geometrically until the checks pass")
    p.add_argument("--output", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify_domain)

    p = sub.add_parser("compare", help="decay slopes of numeric minus partial sums")
    p.add_argument("--input", required=True, help="series JSON for the germ")
    p.add_argument("--expr", help="optional expression overriding the evaluator")
    _add_profile_flags(p)
    p.add_argument("--grid", required=True)
    p.add_argument("--levels", default="0,1", help="comma list of partial-sum levels")
    p.add_argument("--tol", type=_num, default=1e-9)
    p.add_argument("--output", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("solve-homological", help="orbit sum for psi o f - psi = h")
    p.add_argument("--expr", required=True, help="the map f")
    p.add_argument("--h-expr", required=True, help="the right-hand side h")
    p.add_argument("--alpha", type=_num, required=True)
    _add_profile_flags(p)
    p.add_argument("--grid", required=True)
    p.add_argument("--tol", type=_num, default=1e-10)
    p.add_argument("--output", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_solve_homological)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NotHyperbolic as exc:
        print(f"not hyperbolic: {exc}", file=sys.stderr)
        return EXIT_NOT_HYPERBOLIC
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NotConverged as exc:
        print(f"not converged: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except DulaclinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
