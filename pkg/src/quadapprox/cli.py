"""Command line entry point: ``quadapprox <command> ...``.

Exit codes: 0 certified (or plain success), 2 certified with the weakened
constant, 1 failure, 64 bad input, 70 internal contract violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .arith import DEFAULT_PRECISION, MIN_PRECISION, RealEnclosure, fraction_to_decimal, parse_rational
from .errors import FormError, InputError, IsotropyIndeterminate, QuadApproxError
from .forms import QuadraticForm, load_gram
from .pipeline import (
    CERTIFIED,
    CERTIFIED_SLACK,
    CERTIFIED_WEAK,
    Budgets,
    VerifyStatus,
    approximate,
    approximate_independent,
    dumps,
    verify_certificate,
    _error_value,
)
from .transforms import DEFAULT_SURFACE_TOL, SurfacePoint
from .zeros import DEFAULT_BUDGET, cassels_bound, independent_zeros, isotropy, lift_isotropy, small_zero

EXIT_OK, EXIT_FAIL, EXIT_WEAK, EXIT_INPUT, EXIT_CONTRACT = 0, 1, 2, 64, 70

SWEEP_COLUMNS = ["T", "case", "q", "err_mid", "product", "kappa_f", "verdict", "error"]

SWEEP_HELP = """CSV columns:
  T        the bound T (exact rational)
  case     Fall1, Fall2 or Direct
  q        denominator of the returned point
  err_mid  midpoint of f(alpha - r)
  product  upper end of f(alpha - r) * q * T
  kappa_f  upper end of the constant kappa_f
  verdict  certificate verdict
  error    error message when the row failed, else empty
"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2; we reserve 2 for weakened certificates
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_INPUT)


# parsing helpers ------------------------------------------------------------------

def split_top_level(text: str) -> list[str]:
    """Split on commas outside parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def parse_alpha(alpha: Optional[str], alpha_expr: Optional[str]) -> SurfacePoint:
    if (alpha is None) == (alpha_expr is None):
        raise InputError("give exactly one of --alpha and --alpha-expr")
    try:
        if alpha is not None:
            return SurfacePoint.rational([parse_rational(x) for x in split_top_level(alpha)])
        return SurfacePoint.from_exprs(split_top_level(alpha_expr))
    except (ValueError, ZeroDivisionError, SyntaxError) as exc:
        raise InputError(f"cannot parse alpha: {exc}") from exc


def parse_T(text: str) -> Fraction:
    try:
        T = parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse T {text!r}") from exc
    if T < 1:
        raise InputError("T must be at least 1")
    return T


def _progression(spec: str, geometric: bool) -> list[Fraction]:
    try:
        start, stop, step = (parse_rational(x) for x in spec.split(":"))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"range must be start:stop:step, got {spec!r}") from exc
    if (geometric and step <= 1) or (not geometric and step <= 0):
        raise InputError("range step must make the progression increase")
    out, x = [], start
    while x <= stop:
        out.append(x)
        x = x * step if geometric else x + step
    return out


def parse_T_range(args) -> list[Fraction]:
    given = [a for a in (args.T_list, args.T_geom, args.T_arith) if a is not None]
    if len(given) != 1:
        raise InputError("give exactly one of --T-list, --T-geom, --T-arith")
    if args.T_list is not None:
        return [parse_T(x) for x in split_top_level(args.T_list)]
    values = _progression(args.T_geom, True) if args.T_geom is not None else _progression(args.T_arith, False)
    for T in values:
        if T < 1:
            raise InputError("T must be at least 1")
    return values


def read_form(path: str, definite: bool = True):
    try:
        gram = load_gram(path)
    except OSError as exc:
        raise InputError(f"cannot read form file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormError(f"form file is not valid JSON: {exc}") from exc
    return QuadraticForm(gram) if definite else gram


def _budgets(args) -> Budgets:
    return Budgets(max_points=args.max_points, zero_budget=args.budget)


def _surface_tol(args) -> Fraction:
    return parse_rational(args.surface_tol) if args.surface_tol else DEFAULT_SURFACE_TOL


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _error_object(exc: BaseException) -> dict:
    out = {"error": type(exc).__name__, "reason": str(exc),
           "exit_code": getattr(exc, "exit_code", EXIT_FAIL)}
    if isinstance(exc, IsotropyIndeterminate) and exc.bound is not None:
        out["bound"] = str(exc.bound)
    return out


def _verdict_exit(verdict: str) -> int:
    if verdict in (CERTIFIED, CERTIFIED_SLACK):
        return EXIT_OK
    if verdict == CERTIFIED_WEAK:
        return EXIT_WEAK
    return EXIT_FAIL


# commands ---------------------------------------------------------------------------

def run_approx(args) -> int:
    form = read_form(args.form)
    alpha = parse_alpha(args.alpha, args.alpha_expr)
    cert = approximate(form, alpha, parse_T(args.T), args.precision, lll_only=args.lll_only,
                       reduce_gcd=args.reduce_gcd, surface_tol=_surface_tol(args), budgets=_budgets(args))
    _emit(cert.dumps(), args.output)
    return _verdict_exit(cert.verdict)


def run_independent(args) -> int:
    form = read_form(args.form)
    alpha = parse_alpha(args.alpha, args.alpha_expr)
    res = approximate_independent(form, alpha, parse_T(args.T), args.precision,
                                  surface_tol=_surface_tol(args), budgets=_budgets(args))
    _emit(dumps(res.to_json()), args.output)
    codes = [_verdict_exit(c.verdict) for c in res.certificates]
    return max(codes) if EXIT_FAIL not in codes else EXIT_FAIL


def run_zeros(args) -> int:
    gram = read_form(args.form, definite=False)
    if args.k is None:
        z = small_zero(gram, args.budget)
        out = {"zero": list(z.vector), "height": z.height, "cassels_bound": str(cassels_bound(gram))}
    else:
        res = independent_zeros(gram, args.k, budget=args.budget)
        out = res.to_json()
        out["cassels_bound"] = str(cassels_bound(gram))
        if out["determinant"] is not None:
            out["determinant"] = str(out["determinant"])
    _emit(dumps(out), args.output)
    return EXIT_OK


def run_isotropy(args) -> int:
    gram = read_form(args.form, definite=False)
    res = lift_isotropy(gram, args.budget) if args.lift else isotropy(gram, args.budget)
    out = res.to_json()
    out["bound"] = str(out["bound"])
    _emit(dumps(out), args.output)
    return EXIT_OK


def _sweep_row(job) -> list[str]:
    form, alpha, T, precision, surface_tol, budgets = job
    row = {"T": str(T.numerator) if T.denominator == 1 else f"{T.numerator}/{T.denominator}"}
    try:
        cert = approximate(form, alpha, T, precision, surface_tol=surface_tol, budgets=budgets)
        err = _error_value(form, alpha, cert.g, cert.data["precision"])
        mid = err.mid if isinstance(err, RealEnclosure) else Fraction(err)
        row.update(
            case=cert.case,
            q=str(cert.q),
            err_mid=fraction_to_decimal(mid, 17, "up"),
            product=cert.data["lhs"]["enclosure"][1],
            kappa_f=cert.data["kappa_f"][1],
            verdict=cert.verdict,
            error="",
        )
    except QuadApproxError as exc:
        row.update(case="", q="", err_mid="", product="", kappa_f="", verdict="failed",
                   error=f"{type(exc).__name__}: {exc}")
    return [row[c] for c in SWEEP_COLUMNS]


def run_sweep(args) -> int:
    form = read_form(args.form)
    alpha = parse_alpha(args.alpha, args.alpha_expr)
    Ts = parse_T_range(args)
    jobs = [(form, alpha, T, args.precision, _surface_tol(args), _budgets(args)) for T in Ts]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_row, jobs))
    else:
        rows = [_sweep_row(j) for j in jobs]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    writer.writerows(rows)
    _emit(buf.getvalue(), args.output)
    return EXIT_FAIL if any(r[-1] for r in rows) else EXIT_OK


def run_verify(args) -> int:
    try:
        data = json.loads(Path(args.cert).read_text())
    except OSError as exc:
        raise InputError(f"cannot read certificate: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"certificate is not valid JSON: {exc}") from exc
    certs = data["certificates"] if isinstance(data, dict) and "certificates" in data else [data]
    form = read_form(args.form) if args.form else None
    alpha = parse_alpha(args.alpha, args.alpha_expr) if (args.alpha or args.alpha_expr) else None
    results = []
    for c in certs:
        reasons: list[str] = []
        status = verify_certificate(c, form, alpha, reasons)
        results.append({"status": status.value, "reasons": reasons})
    worst = "valid"
    for r in results:
        if r["status"] == VerifyStatus.INVALID.value:
            worst = "invalid"
        elif r["status"] == VerifyStatus.INDETERMINATE.value and worst == "valid":
            worst = "indeterminate"
    out = {"status": worst, "results": results}
    _emit(dumps(out), args.output)
    return EXIT_OK if worst == "valid" else EXIT_FAIL


# parser --------------------------------------------------------------------------------

def _precision(text: str) -> int:
    p = int(text)
    if p < MIN_PRECISION:
        raise argparse.ArgumentTypeError(f"precision must be at least {MIN_PRECISION}")
    return p


def _add_common(p: argparse.ArgumentParser, point: bool = True) -> None:
    p.add_argument("--form", required=True, help="form JSON file {\"n\": .., \"gram\": [[..]]}")
    if point:
        p.add_argument("--alpha", help="comma separated coordinates, p/q or decimals (taken exactly)")
        p.add_argument("--alpha-expr", help="comma separated expressions with sqrt, pi, + - * / **")
        p.add_argument("--precision", type=_precision, default=DEFAULT_PRECISION, help="working bits")
        p.add_argument("--surface-tol", help="tolerance on |f(alpha) - 1| (default 2^-40)")
        p.add_argument("--max-points", type=int, default=Budgets().max_points,
                       help="lattice enumeration budget")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="zero search evaluation budget")
    p.add_argument("-o", "--output", help="write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quadapprox", description="Rational approximation on quadrics with certificates.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("approx", help="one certified rational point")
    _add_common(p)
    p.add_argument("--T", required=True, help="denominator bound T >= 1")
    p.add_argument("--lll-only", action="store_true", help="skip exact minima; weakened constant")
    p.add_argument("--reduce-gcd", action="store_true", help="divide the point by its gcd")
    p.set_defaults(func=run_approx)

    p = sub.add_parser("independent", help="n + 1 independent certified points")
    _add_common(p)
    p.add_argument("--T", required=True)
    p.set_defaults(func=run_independent)

    p = sub.add_parser("zeros", help="small zero or independent zeros of an integral form")
    _add_common(p, point=False)
    p.add_argument("--k", type=int, help="number of independent zeros")
    p.set_defaults(func=run_zeros)

    p = sub.add_parser("isotropy", help="decide isotropy up to the Cassels bound")
    _add_common(p, point=False)
    p.add_argument("--lift", action="store_true", help="test f(x) - y^2 instead of the form itself")
    p.set_defaults(func=run_isotropy)

    p = sub.add_parser("sweep", help="CSV over a range of T", epilog=SWEEP_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_common(p)
    p.add_argument("--T-list", help="comma separated values")
    p.add_argument("--T-geom", help="start:stop:ratio")
    p.add_argument("--T-arith", help="start:stop:step")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.set_defaults(func=run_sweep)

    p = sub.add_parser("verify", help="re-check a certificate file")
    p.add_argument("--cert", required=True)
    p.add_argument("--form")
    p.add_argument("--alpha")
    p.add_argument("--alpha-expr")
    p.add_argument("-o", "--output")
    p.set_defaults(func=run_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except QuadApproxError as exc:
        sys.stdout.write(dumps(_error_object(exc)))
        return exc.exit_code
    except (ValueError, KeyError) as exc:
        sys.stdout.write(dumps({"error": type(exc).__name__, "reason": str(exc), "exit_code": EXIT_INPUT}))
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
