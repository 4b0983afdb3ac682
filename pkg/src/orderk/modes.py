"""Modes of the Poisson distribution of order k.

Every mode lies in the integer window
``[floor(lam*T) - T + 1 - [k == 1], floor(lam*T)]`` with ``T = k(k+1)/2``,
so an argmax over ``0..floor(lam*T)`` is complete.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .params import NotApplicableError, Params
from .pmf import Backend, ScaledPmfTable, pmf_table

__all__ = [
    "NEAR_TIE_RTOL",
    "ModeReport",
    "ScanSummary",
    "Verdict",
    "Witness",
    "conjectured_mode",
    "floor_mean",
    "luo_lower_bound",
    "mode_set",
    "mode_window",
    "scan",
    "summarize",
    "verify_conjecture",
]

NEAR_TIE_RTOL = 1e-12


class Verdict(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    NOT_APPLICABLE = "not_applicable"


@dataclass(frozen=True)
class Witness:
    """A pair with ``P_x > P_x_prime`` (or ``==`` for a shared maximum)."""

    x: int
    x_prime: int
    relation: str = ">"


@dataclass(frozen=True)
class ModeReport:
    params: Params
    modes: tuple[int, ...]
    window_lower: int
    window_upper: int
    luo_lower: float
    conjecture: int | None
    verdict: Verdict
    witness: Witness | None
    backend: Backend
    near_tie: bool = False

    @property
    def in_window(self) -> bool:
        return self.window_lower <= self.modes[0] and self.modes[-1] <= self.window_upper

    @property
    def at_upper_bound(self) -> bool:
        """True when a mode sits on the window's upper end."""
        return self.modes[-1] == self.window_upper


def floor_mean(params: Params) -> int:
    """``floor(lam * k(k+1)/2)``, by integer division for rational rates."""
    lam = params.lam
    t = params.triangular
    if isinstance(lam, Fraction):
        return (lam.numerator * t) // lam.denominator
    return math.floor(lam * t)


def mode_window(params: Params) -> tuple[int, int]:
    top = floor_mean(params)
    lower = top - params.triangular + 1 - (1 if params.k == 1 else 0)
    return lower, top


def luo_lower_bound(params: Params) -> float:
    """Luo's bound ``k*lam*(k!)**(1/k) - k(k+1)/2``."""
    k = params.k
    root = math.exp(math.lgamma(k + 1) / k)
    return k * params.lam_float * root - params.triangular


def conjectured_mode(k: int, lam: int | Fraction) -> int:
    """Predicted mode ``lam*k(k+1)/2 - floor(k/2)`` for integer ``lam``."""
    if k < 2:
        raise NotApplicableError(f"the prediction needs k >= 2, got k={k}")
    if isinstance(lam, float) or Fraction(lam).denominator != 1 or lam <= 0:
        raise NotApplicableError(f"the prediction needs a positive integer rate, got {lam}")
    return int(lam) * k * (k + 1) // 2 - k // 2


def _argmax(table: ScaledPmfTable, upper: int) -> tuple[tuple[int, ...], bool]:
    values = table.q[: upper + 1]
    top = max(values)
    if table.backend == "exact":
        return tuple(x for x, v in enumerate(values) if v == top), False
    modes = tuple(x for x, v in enumerate(values) if top.signed_gap(v) <= NEAR_TIE_RTOL)
    return modes, len(modes) > 1


def _judge(table: ScaledPmfTable, modes: tuple[int, ...], predicted: int) -> tuple[Verdict, Witness | None]:
    if modes == (predicted,):
        return Verdict.HOLDS, None
    if predicted not in modes:
        # Prefer a neighbour of the predicted mode: it shows the sign of Δ directly.
        for x in (predicted + 1, predicted - 1):
            if x >= 0 and table[x] > table[predicted]:
                return Verdict.FAILS, Witness(x, predicted, ">")
        return Verdict.FAILS, Witness(modes[0], predicted, ">")
    other = next(x for x in modes if x != predicted)
    return Verdict.FAILS, Witness(other, predicted, "=")


def mode_set(params: Params, backend: Backend = "exact", *, table: ScaledPmfTable | None = None) -> ModeReport:
    """All maximisers of the pmf, with bounds and the conjecture verdict.

    On the float backend, values within a relative ``NEAR_TIE_RTOL`` of the
    maximum are all reported and ``near_tie`` is raised; the verdict is
    then not applicable, since only exact comparisons decide it.
    """
    lower, upper = mode_window(params)
    if table is None:
        table = pmf_table(params, upper, backend)
    elif table.upper < upper:
        table = table.extend(upper)
    backend = table.backend
    modes, near_tie = _argmax(table, upper)

    conjecture = None
    verdict, witness = Verdict.NOT_APPLICABLE, None
    lam = params.lam
    if params.k >= 2 and (params.is_integer_rate() or (isinstance(lam, float) and lam.is_integer())):
        conjecture = conjectured_mode(params.k, int(lam))
        if backend == "exact":
            verdict, witness = _judge(table, modes, conjecture)

    return ModeReport(
        params=params,
        modes=modes,
        window_lower=lower,
        window_upper=upper,
        luo_lower=luo_lower_bound(params),
        conjecture=conjecture,
        verdict=verdict,
        witness=witness,
        backend=backend,
        near_tie=near_tie,
    )


def verify_conjecture(k: int, lam: int | Fraction) -> ModeReport:
    conjectured_mode(k, lam)  # raises on bad input
    return mode_set(Params(k, Fraction(lam)), "exact")


def _scan_point(point: tuple[int, int]) -> ModeReport:
    k, lam = point
    if k >= 2:
        return verify_conjecture(k, lam)
    return mode_set(Params(k, Fraction(lam)), "exact")


def scan(k_values: Iterable[int], lam_values: Iterable[int], jobs: int = 1) -> Iterator[ModeReport]:
    """Exact mode reports over a grid of integer rates, in (k, lam) order.

    Points are independent; with ``jobs > 1`` they run in worker processes
    but are still yielded in grid order.
    """
    lam_list = sorted(set(lam_values))
    points = [(k, lam) for k in sorted(set(k_values)) for lam in lam_list]
    if jobs <= 1 or len(points) <= 1:
        yield from map(_scan_point, points)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        yield from pool.map(_scan_point, points)


@dataclass(frozen=True)
class ScanSummary:
    points: int
    failures: tuple[ModeReport, ...]
    upper_bound_hits: tuple[ModeReport, ...]


def summarize(reports: Iterable[ModeReport]) -> ScanSummary:
    reports = list(reports)
    return ScanSummary(
        points=len(reports),
        failures=tuple(r for r in reports if r.verdict is Verdict.FAILS),
        upper_bound_hits=tuple(r for r in reports if r.at_upper_bound),
    )
