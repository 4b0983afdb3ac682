"""Serialization of reports to JSON-ready dicts, CSV rows and text lines.

Exact rationals are always written as ``"n/d"`` strings so that records
round-trip without loss.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Iterable, Mapping, Sequence
from fractions import Fraction
from importlib import resources
from typing import Any

from .family import GeomOrderKParams, LimitRow
from .identities import IdentityReport
from .modes import ModeReport
from .params import Params, format_rational
from .pmf import ScaledPmfTable
from .scaled import ScaledFloat, format_decimal

FORMAT_VERSION = "orderk-output/1"
PROB_DIGITS = 10

__all__ = [
    "FORMAT_VERSION",
    "csv_text",
    "dump_json",
    "identity_to_dict",
    "limit_to_dict",
    "load_schema",
    "mode_to_dict",
    "params_to_dict",
    "pmf_rows",
    "record",
    "scalar_token",
]


def number_token(value: Fraction | float) -> str | float:
    if isinstance(value, Fraction):
        return format_rational(value)
    return value


def scalar_token(value: Fraction | ScaledFloat) -> str:
    if isinstance(value, Fraction):
        return format_rational(value)
    return format_decimal(value.log10(), 17)


def params_to_dict(params: Params | GeomOrderKParams) -> dict[str, Any]:
    if isinstance(params, Params):
        return {"k": params.k, "lambda": number_token(params.lam)}
    return {"k": params.k, "p": format_rational(params.p)}


def _sign_token(sign: int) -> str:
    return {1: "+", 0: "0", -1: "-"}[sign]


def pmf_rows(table: ScaledPmfTable) -> list[dict[str, Any]]:
    rows = []
    for x in range(len(table)):
        log10_p = table.log_prob(x) / math.log(10.0)
        rows.append(
            {
                "x": x,
                "q": scalar_token(table[x]),
                "p": format_decimal(log10_p, PROB_DIGITS),
                "delta_sign": _sign_token(table.delta_sign(x)),
            }
        )
    return rows


def mode_to_dict(report: ModeReport) -> dict[str, Any]:
    witness = None
    if report.witness is not None:
        w = report.witness
        witness = {"x": w.x, "x_prime": w.x_prime, "relation": w.relation}
    return {
        **params_to_dict(report.params),
        "modes": list(report.modes),
        "window_lower": report.window_lower,
        "window_upper": report.window_upper,
        "luo_lower": report.luo_lower,
        "conjecture": report.conjecture,
        "verdict": report.verdict.value,
        "witness": witness,
        "backend": report.backend,
        "near_tie": report.near_tie,
        "at_upper_bound": report.at_upper_bound,
    }


def identity_to_dict(report: IdentityReport) -> dict[str, Any]:
    x = list(report.x) if isinstance(report.x, tuple) else report.x
    return {
        "id": report.identity_id,
        **params_to_dict(report.params),
        "x": x,
        "lhs": format_rational(report.lhs),
        "rhs": format_rational(report.rhs),
        "relation": report.relation,
        "passed": report.passed,
        "note": report.note,
    }


def limit_to_dict(row: LimitRow) -> dict[str, Any]:
    return {
        "r": row.r,
        "q": number_token(row.q),
        "distance": row.distance,
        "argmax": row.argmax,
    }


def record(command: str, args: Mapping[str, Any], params: Mapping[str, Any], payload: Any) -> dict[str, Any]:
    return {
        "format_version": FORMAT_VERSION,
        "command": {"name": command, "args": dict(args)},
        "params": dict(params),
        "payload": payload,
    }


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else v for v in row])
    return buf.getvalue()


def load_schema() -> dict[str, Any]:
    text = resources.files("orderk").joinpath("schema/output-v1.schema.json").read_text()
    return json.loads(text)
