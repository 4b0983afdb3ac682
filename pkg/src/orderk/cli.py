"""Command-line interface for orderk.

    orderk pmf -k 6 -l 2 --x-max 42 --backend exact
    orderk mode -k 5 -l 3
    orderk scan -k 2..6 -l 1..5 --jobs 8
    orderk verify identities -k 3 -l 2
    orderk verify positivity -k 4 -l 3
    orderk verify family -k 2 -p 1/2
    orderk verify limit -k 3 -l 1 -r 100,1000,10000

Exit status: 0 when everything checked holds, 1 on usage or internal
errors, 2 when a scan or verify run finds a mathematical violation.
"""

from __future__ import annotations

import functools
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any

import click

from . import __version__
from .family import (
    GeomOrderKParams,
    fib_order_k,
    geom_order_k_multinomial,
    geom_order_k_table,
    limit_horizon,
    negbin_order_k_convolution,
    negbin_order_k_multinomial,
    poisson_limit_check,
)
from .identities import (
    IdentityReport,
    check_delta_recurrence,
    check_pmf_recurrence,
    check_positivity_range,
    check_proof_identities,
    check_sign_pattern,
)
from .modes import mode_set, scan, summarize
from .output import (
    csv_text,
    dump_json,
    identity_to_dict,
    limit_to_dict,
    mode_to_dict,
    params_to_dict,
    pmf_rows,
    record,
)
from .params import NotApplicableError, Params, format_rational, parse_rational
from .pmf import pmf_table

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2

FORMATS = click.Choice(["text", "csv", "json"])


class RationalType(click.ParamType):
    name = "rational"

    def convert(self, value, param, ctx):
        if isinstance(value, Fraction):
            return value
        try:
            return parse_rational(value)
        except ValueError as exc:
            self.fail(str(exc), param, ctx)


class IntRangeType(click.ParamType):
    """``a..b`` (inclusive) or a single integer."""

    name = "range"

    def convert(self, value, param, ctx):
        if isinstance(value, range):
            return value
        text = str(value).strip()
        try:
            if ".." in text:
                lo, hi = (int(part) for part in text.split("..", 1))
            else:
                lo = hi = int(text)
        except ValueError:
            self.fail(f"expected a..b or an integer, got {value!r}", param, ctx)
        if lo > hi:
            self.fail(f"empty range {value!r}", param, ctx)
        return range(lo, hi + 1)


class IntListType(click.ParamType):
    name = "list"

    def convert(self, value, param, ctx):
        if isinstance(value, list):
            return value
        try:
            return [int(part) for part in str(value).split(",") if part.strip()]
        except ValueError:
            self.fail(f"expected comma-separated integers, got {value!r}", param, ctx)


RATIONAL = RationalType()
INT_RANGE = IntRangeType()
INT_LIST = IntListType()


def output_options(func):
    @click.option("--format", "fmt", type=FORMATS, default="text", show_default=True)
    @click.option("--quiet", is_flag=True, help="Suppress the text header line.")
    @click.option("--out", "out", type=click.Path(dir_okay=False, path_type=Path), default=None,
                  help="Write to PATH instead of stdout.")
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        return func(*args, **kwargs)

    return wrapper


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        out.write_text(text, encoding="utf-8", newline="\n")


def _header(command: str, args: dict[str, Any]) -> str:
    parts = " ".join(f"{key}={value}" for key, value in args.items())
    return f"# orderk {__version__} {command} {parts}\n"


def _arg_token(value: Any) -> Any:
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, range):
        return f"{value.start}..{value.stop - 1}"
    if isinstance(value, list):
        return ",".join(str(v) for v in value)
    return value


def _finish(ctx: click.Context, command: str, args: dict[str, Any], fmt: str, quiet: bool,
            out: Path | None, *, json_obj, csv_out: str, text: str) -> None:
    args = {key: _arg_token(value) for key, value in args.items()}
    if fmt == "json":
        _emit(dump_json(json_obj(args)), out)
    elif fmt == "csv":
        _emit(csv_out, out)
    else:
        _emit(("" if quiet else _header(command, args)) + text, out)


@click.group()
@click.version_option(__version__, prog_name="orderk")
def cli() -> None:
    """Poisson, geometric and negative binomial distributions of order k."""


# ----------------------------------------------------------------------------
# pmf


@cli.command("pmf")
@click.option("-k", "k", type=click.IntRange(min=1), required=True, help="Order k.")
@click.option("-l", "--lambda", "lam", type=RATIONAL, required=True, help="Rate as p/q or a decimal.")
@click.option("--x-max", type=click.IntRange(min=0), required=True)
@click.option("--backend", type=click.Choice(["exact", "float"]), default="exact", show_default=True)
@output_options
@click.pass_context
def cmd_pmf(ctx, k, lam, x_max, backend, fmt, quiet, out):
    """Tabulate Q_x = exp(k*lam) P_x and P_x for x = 0..X."""
    params = Params(k, lam if backend == "exact" else float(lam))
    table = pmf_table(params, x_max, backend)
    rows = pmf_rows(table)
    args = {"k": k, "lambda": lam, "x_max": x_max, "backend": backend}
    payload = {
        "kind": "pmf",
        "backend": backend,
        "log_factor": table.log_factor,
        "precision_warning": table.precision_warning,
        "rows": rows,
    }
    text = "".join(f"{r['x']:>6}  {r['p']:<18} {r['delta_sign']}  {r['q']}\n" for r in rows)
    text = f"{'x':>6}  {'P_x':<18} d  Q_x\n" + text
    if table.precision_warning:
        text += f"# warning: {table.precision_warning}\n"
    _finish(
        ctx, "pmf", args, fmt, quiet, out,
        json_obj=lambda a: record("pmf", a, params_to_dict(Params(k, lam)), payload),
        csv_out=csv_text(["x", "q", "p", "delta_sign"], ([r["x"], r["q"], r["p"], r["delta_sign"]] for r in rows)),
        text=text,
    )


# ----------------------------------------------------------------------------
# mode / scan


def _modes_token(modes) -> str:
    return ";".join(str(m) for m in modes)


def _mode_line(d: dict[str, Any]) -> str:
    line = (
        f"k={d['k']} lambda={d['lambda']} modes=[{', '.join(map(str, d['modes']))}] "
        f"window=[{d['window_lower']}, {d['window_upper']}] luo={d['luo_lower']:.6f} "
        f"conjecture={d['conjecture'] if d['conjecture'] is not None else '-'} verdict={d['verdict']}"
    )
    w = d["witness"]
    if w is not None:
        line += f" witness=P_{w['x']}{w['relation']}P_{w['x_prime']}"
    if d["near_tie"]:
        line += " near_tie"
    return line + "\n"


_MODE_CSV_HEADER = [
    "k", "lambda", "modes", "window_lower", "window_upper", "luo_lower",
    "conjecture", "verdict", "witness_x", "witness_x_prime", "backend", "near_tie",
]


def _mode_csv_row(d: dict[str, Any]) -> list[Any]:
    w = d["witness"] or {}
    return [
        d["k"], d["lambda"], _modes_token(d["modes"]), d["window_lower"], d["window_upper"],
        repr(d["luo_lower"]), d["conjecture"], d["verdict"], w.get("x"), w.get("x_prime"),
        d["backend"], int(d["near_tie"]),
    ]


@cli.command("mode")
@click.option("-k", "k", type=click.IntRange(min=1), required=True)
@click.option("-l", "--lambda", "lam", type=RATIONAL, required=True)
@click.option("--backend", type=click.Choice(["exact", "float"]), default="exact", show_default=True)
@output_options
@click.pass_context
def cmd_mode(ctx, k, lam, backend, fmt, quiet, out):
    """Mode set, bounds and conjecture verdict for one (k, lambda)."""
    params = Params(k, lam if backend == "exact" else float(lam))
    d = mode_to_dict(mode_set(params, backend))
    _finish(
        ctx, "mode", {"k": k, "lambda": lam, "backend": backend}, fmt, quiet, out,
        json_obj=lambda a: record("mode", a, params_to_dict(params), {"kind": "mode", **d}),
        csv_out=csv_text(_MODE_CSV_HEADER, [_mode_csv_row(d)]),
        text=_mode_line(d),
    )


@cli.command("scan")
@click.option("-k", "k_range", type=INT_RANGE, required=True, help="Orders, e.g. 2..6.")
@click.option("-l", "--lambda", "lam_range", type=INT_RANGE, required=True, help="Integer rates, e.g. 1..20.")
@click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True)
@output_options
@click.pass_context
def cmd_scan(ctx, k_range, lam_range, jobs, fmt, quiet, out):
    """Exact mode reports over a grid; exit 2 if the conjecture fails anywhere."""
    if k_range.start < 1 or lam_range.start < 1:
        raise click.BadParameter("k and lambda ranges must be positive")
    reports = list(scan(k_range, lam_range, jobs=jobs))
    summary = summarize(reports)
    dicts = [mode_to_dict(r) for r in reports]
    failures = [mode_to_dict(r) for r in summary.failures]
    hits = [[r.params.k, params_to_dict(r.params)["lambda"]] for r in summary.upper_bound_hits]

    text = "".join(_mode_line(d) for d in dicts)
    text += f"# points={summary.points} failures={len(failures)}\n"
    for d in failures:
        w = d["witness"]
        text += f"# violation k={d['k']} lambda={d['lambda']} witness=({w['x']}, {w['x_prime']})\n"
    for k, lam in hits:
        text += f"# mode at upper bound k={k} lambda={lam}\n"

    _finish(
        ctx, "scan", {"k": k_range, "lambda": lam_range}, fmt, quiet, out,
        json_obj=lambda a: record(
            "scan", a, {},
            {"kind": "scan", "reports": dicts,
             "summary": {"points": summary.points, "failures": failures, "upper_bound_hits": hits}},
        ),
        csv_out=csv_text(_MODE_CSV_HEADER, (_mode_csv_row(d) for d in dicts)),
        text=text,
    )
    ctx.exit(EXIT_VIOLATION if failures else EXIT_OK)


# ----------------------------------------------------------------------------
# verify


@cli.group("verify")
def verify() -> None:
    """Exact checks of recurrences, identities and family properties."""


_ID_CSV_HEADER = ["id", "k", "param", "x", "lhs", "rhs", "relation", "passed"]


def _id_csv_row(d: dict[str, Any]) -> list[Any]:
    x = d["x"]
    if isinstance(x, list):
        x = f"{x[0]}..{x[1]}"
    param = d.get("lambda", d.get("p"))
    return [d["id"], d["k"], param, x, d["lhs"], d["rhs"], d["relation"], int(d["passed"])]


def _id_line(d: dict[str, Any]) -> str:
    x = d["x"]
    where = "" if x is None else (f" x={x[0]}..{x[1]}" if isinstance(x, list) else f" x={x}")
    status = "pass" if d["passed"] else "FAIL"
    note = f"  ({d['note']})" if d["note"] else ""
    return f"{status}  {d['id']}{where}{note}\n"


def _finish_reports(ctx, kind: str, args: dict[str, Any], params: dict[str, Any],
                    reports: list[IdentityReport], fmt, quiet, out) -> None:
    dicts = [identity_to_dict(r) for r in reports]
    all_passed = all(d["passed"] for d in dicts)
    failed = sum(not d["passed"] for d in dicts)
    text = "".join(_id_line(d) for d in dicts) + f"# checks={len(dicts)} failed={failed}\n"
    _finish(
        ctx, f"verify {kind}", args, fmt, quiet, out,
        json_obj=lambda a: record(f"verify {kind}", a, params,
                                  {"kind": kind, "reports": dicts, "all_passed": all_passed}),
        csv_out=csv_text(_ID_CSV_HEADER, (_id_csv_row(d) for d in dicts)),
        text=text,
    )
    ctx.exit(EXIT_OK if all_passed else EXIT_VIOLATION)


def identity_suite(params: Params, x_max: int, *, include_printed: bool = True) -> list[IdentityReport]:
    """Every exact check that applies at ``params``, in a fixed order."""
    table = pmf_table(params, x_max + 2)
    reports: list[IdentityReport] = []
    for x in range(x_max + 1):
        reports.append(check_pmf_recurrence(params, x, table=table))
        reports.append(check_delta_recurrence(params, x, table=table))
    lam = params.lam
    if lam > 1:
        reports.append(check_positivity_range(params))
    if params.is_integer_rate():
        if params.k in (2, 3):
            reports.extend(check_proof_identities(params.k, int(lam), include_printed=include_printed))
        if 2 <= params.k <= 5:
            reports.extend(check_sign_pattern(params.k, int(lam)))
    return reports


@verify.command("identities")
@click.option("-k", "k", type=click.IntRange(min=1), required=True)
@click.option("-l", "--lambda", "lam", type=RATIONAL, required=True)
@click.option("--x-max", type=click.IntRange(min=0), default=None,
              help="Largest x for the general recurrences (default: floor of the mean + 10).")
@click.option("--skip-printed", is_flag=True,
              help="Leave out the two reduction identities in their misprinted form.")
@output_options
@click.pass_context
def cmd_verify_identities(ctx, k, lam, x_max, skip_printed, fmt, quiet, out):
    """Recurrences, proof identities and sign patterns at (k, lambda)."""
    params = Params(k, lam)
    if x_max is None:
        x_max = int(lam * params.triangular) + 10
    reports = identity_suite(params, x_max, include_printed=not skip_printed)
    args = {"k": k, "lambda": lam, "x_max": x_max, "skip_printed": skip_printed}
    _finish_reports(ctx, "identities", args, params_to_dict(params), reports, fmt, quiet, out)


@verify.command("positivity")
@click.option("-k", "k", type=click.IntRange(min=1), required=True)
@click.option("-l", "--lambda", "lam", type=RATIONAL, required=True)
@output_options
@click.pass_context
def cmd_verify_positivity(ctx, k, lam, fmt, quiet, out):
    """Delta_x > 0 on the increasing range (needs lambda > 1)."""
    params = Params(k, lam)
    report = check_positivity_range(params)
    _finish_reports(ctx, "positivity", {"k": k, "lambda": lam}, params_to_dict(params), [report], fmt, quiet, out)


def family_suite(k: int, p: Fraction, r_max: int, n_max: int, y_extra: int) -> list[IdentityReport]:
    params = GeomOrderKParams(k, p)
    half = GeomOrderKParams(k, Fraction(1, 2))
    reports: list[IdentityReport] = []
    half_table = geom_order_k_table(half, n_max)
    for n in range(k, n_max + 1):
        rhs = Fraction(fib_order_k(k, n - k + 1), 2**n)
        reports.append(IdentityReport("fibonacci-half", half, n, half_table[n], rhs))
    geom = geom_order_k_table(params, n_max)
    for n in range(k, min(n_max, k + y_extra) + 1):
        reports.append(IdentityReport("geometric-multinomial", params, n, geom[n],
                                      geom_order_k_multinomial(params, n)))
    for r in range(1, r_max + 1):
        conv = negbin_order_k_convolution(params, r, k * r + y_extra)
        for y in range(k * r, k * r + y_extra + 1):
            reports.append(IdentityReport(f"negbin-r{r}", params, y, conv[y],
                                          negbin_order_k_multinomial(params, r, y)))
    return reports


@verify.command("family")
@click.option("-k", "k", type=click.IntRange(min=1), required=True)
@click.option("-p", "p", type=RATIONAL, default="1/2", show_default=True, help="Success probability.")
@click.option("--r-max", type=click.IntRange(min=1), default=3, show_default=True)
@click.option("--n-max", type=click.IntRange(min=1), default=40, show_default=True)
@click.option("--y-extra", type=click.IntRange(min=0), default=20, show_default=True,
              help="Check P(Y = y) for k*r <= y <= k*r + Y_EXTRA.")
@output_options
@click.pass_context
def cmd_verify_family(ctx, k, p, r_max, n_max, y_extra, fmt, quiet, out):
    """Fibonacci identity at p=1/2 and convolution vs multinomial forms."""
    if not 0 < p < 1:
        raise click.BadParameter("p must lie strictly between 0 and 1", param_hint="-p")
    reports = family_suite(k, p, r_max, n_max, y_extra)
    args = {"k": k, "p": p, "r_max": r_max, "n_max": n_max, "y_extra": y_extra}
    _finish_reports(ctx, "family", args, {"k": k, "p": format_rational(p)}, reports, fmt, quiet, out)


@verify.command("limit")
@click.option("-k", "k", type=click.IntRange(min=1), required=True)
@click.option("-l", "--lambda", "lam", type=RATIONAL, required=True)
@click.option("-r", "r_values", type=INT_LIST, default="100,1000,10000", show_default=True)
@output_options
@click.pass_context
def cmd_verify_limit(ctx, k, lam, r_values, fmt, quiet, out):
    """Sup distance of Y_{k,r} - k*r from the order-k Poisson pmf; exit 2 unless it decreases."""
    rows, skipped = poisson_limit_check(k, lam, r_values)
    distances = [row.distance for row in rows]
    decreasing = all(a > b for a, b in zip(distances, distances[1:]))
    horizon = limit_horizon(k, lam)
    dicts = [limit_to_dict(row) for row in rows]
    text = f"{'r':>10}  {'q':<14} {'sup_distance':<24} argmax\n"
    text += "".join(f"{d['r']:>10}  {d['q']:<14} {d['distance']!r:<24} {d['argmax']}\n" for d in dicts)
    for r in skipped:
        text += f"# skipped r={r}: lambda/r is not in (0, 1)\n"
    text += f"# horizon={horizon} strictly_decreasing={'yes' if decreasing else 'no'}\n"
    payload = {"kind": "limit", "horizon": horizon, "rows": dicts, "skipped": skipped,
               "strictly_decreasing": decreasing}
    params = Params(k, lam)
    _finish(
        ctx, "verify limit", {"k": k, "lambda": lam, "r": r_values}, fmt, quiet, out,
        json_obj=lambda a: record("verify limit", a, params_to_dict(params), payload),
        csv_out=csv_text(["r", "q", "distance", "argmax"],
                         ([d["r"], d["q"], repr(d["distance"]), d["argmax"]] for d in dicts)),
        text=text,
    )
    ctx.exit(EXIT_OK if decreasing else EXIT_VIOLATION)


def main(argv: list[str] | None = None) -> int:
    """Entry point; maps click's usage errors to exit status 1."""
    try:
        rv = cli.main(args=argv, prog_name="orderk", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return EXIT_ERROR
    except click.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_ERROR
    except (ValueError, NotApplicableError) as exc:
        click.echo(f"Error: {exc}", err=True)
        return EXIT_ERROR
    return rv if isinstance(rv, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
