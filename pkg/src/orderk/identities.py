"""Forward differences of the order-k Poisson pmf and exact identity checks.

``Δ_x = P_x - P_{x-1}`` with ``P_{-1} = 0``. All checks run on scaled
values (the common factor ``exp(-k*lam)`` cancels from both sides) with
denominators cleared, so a pass is an exact rational equality or an exact
sign.

Identity ids are stable strings used by the CLI and by regression tests.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass
from fractions import Fraction

from .params import NotApplicableError, Params
from .pmf import Backend, ScaledPmfTable, pmf_table

__all__ = [
    "DeltaTable",
    "IdentityReport",
    "PROOF_IDENTITY_IDS",
    "check_delta_recurrence",
    "check_pmf_recurrence",
    "check_positivity_range",
    "check_proof_identities",
    "check_sign_pattern",
    "check_sign_pattern_k45",
    "delta_table",
]


@dataclass(frozen=True)
class DeltaTable:
    """Scaled differences ``d[x] = Q_x - Q_{x-1}`` for ``0 <= x <= upper``."""

    params: Params
    d: tuple[Fraction, ...]
    pmf: ScaledPmfTable

    @property
    def upper(self) -> int:
        return len(self.d) - 1

    def __getitem__(self, x: int) -> Fraction:
        if x < 0:
            return Fraction(0)
        return self.d[x]


def delta_table(params: Params, upper: int, backend: Backend = "exact") -> DeltaTable:
    if backend != "exact":
        # Differences of near-equal doubles carry no sign information worth
        # certifying; the float backend only reports signs via ScaledPmfTable.
        raise NotApplicableError("Δ tables are exact-only; use ScaledPmfTable.delta_sign for floats")
    table = pmf_table(params, upper, "exact")
    return _deltas_of(table)


def _deltas_of(table: ScaledPmfTable) -> DeltaTable:
    q = table.q
    d = (q[0],) + tuple(q[x] - q[x - 1] for x in range(1, len(q)))
    return DeltaTable(table.params, d, table)


@dataclass(frozen=True)
class IdentityReport:
    """Outcome of one exact check.

    ``relation`` is ``"="`` for identities; sign checks compare ``lhs``
    with ``rhs = 0`` using ``">"`` or ``"<"``. ``passed`` is computed from
    the two sides, never stored independently.
    """

    identity_id: str
    params: Params
    x: int | tuple[int, int] | None
    lhs: Fraction
    rhs: Fraction
    relation: str = "="
    note: str = ""

    @property
    def passed(self) -> bool:
        if self.relation == "=":
            return self.lhs == self.rhs
        if self.relation == ">":
            return self.lhs > self.rhs
        if self.relation == "<":
            return self.lhs < self.rhs
        raise ValueError(f"unknown relation {self.relation!r}")


# ----------------------------------------------------------------------------
# General recurrences


def _tables(params: Params, upper: int) -> tuple[ScaledPmfTable, DeltaTable]:
    t = pmf_table(params, max(upper, 0), "exact")
    return t, _deltas_of(t)


def check_pmf_recurrence(params: Params, x: int, *, table: ScaledPmfTable | None = None) -> IdentityReport:
    """``(x+1)(x+2)/lam * Δ_{x+2}`` against the pmf-only right-hand side

    ``sum_{j<k} (j*lam + x + 1 - j) P_{x+1-j} + k(lam - x - 2) P_{x-k+1}``,

    multiplied through by ``lam``.
    """
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    lam = params.require_exact()
    k = params.k
    t = table.extend(x + 2) if table is not None else pmf_table(params, x + 2)
    lhs = (x + 1) * (x + 2) * (t[x + 2] - t[x + 1])
    rhs = sum((j * lam + x + 1 - j) * t[x + 1 - j] for j in range(1, k)) + k * (lam - x - 2) * t[x - k + 1]
    return IdentityReport("pmf-recurrence", params, x, lhs, lam * rhs)


def check_delta_recurrence(params: Params, x: int, *, table: ScaledPmfTable | None = None) -> IdentityReport:
    """Same left side, with the right side rewritten in differences:

    ``sum_{j<k} (j(x+1) + (lam-1) j(j+1)/2) Δ_{x+1-j}
    + ((lam-1) k(k+1)/2 - 1 - x) P_{x+1-k}``.
    """
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    lam = params.require_exact()
    k = params.k
    t = table.extend(x + 2) if table is not None else pmf_table(params, x + 2)

    def delta(i: int) -> Fraction:
        return t[i] - t[i - 1]

    lhs = (x + 1) * (x + 2) * delta(x + 2)
    rhs = sum(
        (j * (x + 1) + (lam - 1) * Fraction(j * (j + 1), 2)) * delta(x + 1 - j) for j in range(1, k)
    ) + ((lam - 1) * params.triangular - 1 - x) * t[x + 1 - k]
    return IdentityReport("delta-recurrence", params, x, lhs, lam * rhs)


def check_positivity_range(params: Params) -> IdentityReport:
    """``Δ_x > 0`` for every ``0 <= x <= floor((lam-1) k(k+1)/2) - 1``.

    The report's ``lhs`` is the smallest Δ in that range.
    """
    lam = params.require_exact()
    if lam <= 1:
        raise NotApplicableError(f"the increasing range needs lam > 1, got {lam}")
    last = math.floor((lam - 1) * params.triangular) - 1
    t, d = _tables(params, max(last, 0))
    smallest = min(d[x] for x in range(0, last + 1)) if last >= 0 else d[0]
    return IdentityReport("positivity-range", params, (0, last), smallest, Fraction(0), ">")


# ----------------------------------------------------------------------------
# Identities behind the unique-mode proofs for k = 2 and k = 3


def _prod(values) -> Fraction:
    out = Fraction(1)
    for v in values:
        out *= v
    return out


def _k2_tail_ratio(lam: int, d: DeltaTable, t: ScaledPmfTable):
    # 3 Δ_{3λ} = -2 Δ_{3λ-1}
    return 3 * d[3 * lam], -2 * d[3 * lam - 1]


def _k3_tail_ratio(lam: int, d: DeltaTable, t: ScaledPmfTable):
    # 6 Δ_{6λ} = -5 Δ_{6λ-1} - 3 Δ_{6λ-2}
    return 6 * d[6 * lam], -5 * d[6 * lam - 1] - 3 * d[6 * lam - 2]


def _k2_reduction(prefactor_terms: Callable[[int], list[int]]):
    def check(lam: int, d: DeltaTable, t: ScaledPmfTable):
        lhs = _prod(prefactor_terms(lam)) * d[3 * lam - 1]
        rhs = (64 * lam**3 - 267 * lam**2 + 360 * lam - 156) * d[3 * lam - 7] + 3 * (
            lam**2 + 8 * lam - 12
        ) * t[3 * lam - 8]
        return lhs, lam**3 * rhs

    return check


def _k3_reduction(lam_power: int):
    def check(lam: int, d: DeltaTable, t: ScaledPmfTable):
        lhs = _prod(6 * lam - j for j in range(4, 9)) * d[6 * lam - 4]
        rhs = (
            (1015 * lam**3 - 3234 * lam**2 + 3396 * lam - 1176) * d[6 * lam - 9]
            + (1203 * lam**3 - 3610 * lam**2 + 3576 * lam - 1176) * d[6 * lam - 10]
            + 2 * (199 * lam**2 - 372 * lam + 168) * t[6 * lam - 11]
        )
        return lhs, lam**lam_power * rhs

    return check


def _k2_single_step(lam: int, d: DeltaTable, t: ScaledPmfTable):
    # ((3λ-1)(3λ-2)/λ) Δ_{3λ-1} = (4λ-3) Δ_{3λ-3} - P_{3λ-4}
    lhs = (3 * lam - 1) * (3 * lam - 2) * d[3 * lam - 1]
    return lhs, lam * ((4 * lam - 3) * d[3 * lam - 3] - t[3 * lam - 4])


def _k3_single_step(lam: int, d: DeltaTable, t: ScaledPmfTable):
    # ((6λ-4)(6λ-5)/λ) Δ_{6λ-4} = (7λ-6) Δ_{6λ-6} + (15λ-13) Δ_{6λ-7} - P_{6λ-8}
    lhs = (6 * lam - 4) * (6 * lam - 5) * d[6 * lam - 4]
    rhs = (7 * lam - 6) * d[6 * lam - 6] + (15 * lam - 13) * d[6 * lam - 7] - t[6 * lam - 8]
    return lhs, lam * rhs


@dataclass(frozen=True)
class _ProofIdentity:
    identity_id: str
    k: int
    min_lam: int
    check: Callable
    note: str = ""


_PRINTED_NOTE = "printed prefactor; fails wherever it applies"

_PROOF_IDENTITIES = (
    _ProofIdentity("k2-tail-ratio", 2, 1, _k2_tail_ratio),
    _ProofIdentity("k3-tail-ratio", 3, 1, _k3_tail_ratio),
    _ProofIdentity(
        "k2-reduction-printed", 2, 3,
        _k2_reduction(lambda lam: [6 * lam - j for j in range(1, 7)]),
        _PRINTED_NOTE,
    ),
    _ProofIdentity(
        "k2-reduction", 2, 3,
        _k2_reduction(lambda lam: [3 * lam - j for j in range(1, 7)]),
        "prefactor prod_{j=1..6}(3λ-j)/λ³",
    ),
    _ProofIdentity("k3-reduction-printed", 3, 2, _k3_reduction(3), _PRINTED_NOTE),
    _ProofIdentity("k3-reduction", 3, 2, _k3_reduction(2), "prefactor prod_{j=4..8}(6λ-j)/λ²"),
    _ProofIdentity("k2-single-step", 2, 1, _k2_single_step),
    _ProofIdentity("k3-single-step", 3, 1, _k3_single_step),
)

PROOF_IDENTITY_IDS = tuple(p.identity_id for p in _PROOF_IDENTITIES)


def check_proof_identities(
    k: int, lam: int, *, include_printed: bool = True
) -> list[IdentityReport]:
    """Exact checks of the k=2 or k=3 identities applicable at ``lam``.

    Identities whose precondition on ``lam`` does not hold are skipped.
    ``include_printed=False`` leaves out the two forms with the misprinted
    prefactor.
    """
    if k not in (2, 3):
        raise NotApplicableError(f"proof identities exist for k in (2, 3), got {k}")
    if isinstance(lam, bool) or Fraction(lam).denominator != 1 or lam < 1:
        raise NotApplicableError(f"proof identities need a positive integer rate, got {lam}")
    lam = int(lam)
    params = Params(k, Fraction(lam))
    t, d = _tables(params, k * (k + 1) // 2 * lam)
    reports = []
    for ident in _PROOF_IDENTITIES:
        if ident.k != k or lam < ident.min_lam:
            continue
        if not include_printed and ident.identity_id.endswith("-printed"):
            continue
        lhs, rhs = ident.check(lam, d, t)
        reports.append(IdentityReport(ident.identity_id, params, None, Fraction(lhs), Fraction(rhs), "=", ident.note))
    return reports


# ----------------------------------------------------------------------------
# Sign patterns around the predicted mode

# (positive offsets j with Δ_{c*lam - j} > 0, offset with Δ_{c*lam - j} < 0)
_SIGN_PATTERNS = {
    2: (range(1, 2), 0),
    3: (range(1, 5), 0),
    4: (range(2, 9), 1),
    5: (range(2, 14), 1),
}


def check_sign_pattern(k: int, lam: int) -> list[IdentityReport]:
    """Exact signs of Δ that pin the mode at ``lam*k(k+1)/2 - floor(k/2)``.

    For ``c = k(k+1)/2``: k=2 needs Δ_{cλ-1} > 0 > Δ_{cλ}; k=3 needs
    Δ_{cλ-j} > 0 for j=1..4 and Δ_{cλ} < 0; k=4 needs j=2..8 positive and
    Δ_{cλ-1} < 0; k=5 needs j=2..13 positive and Δ_{cλ-1} < 0.
    """
    if k not in _SIGN_PATTERNS:
        raise NotApplicableError(f"sign patterns are tabulated for k in 2..5, got {k}")
    if isinstance(lam, bool) or Fraction(lam).denominator != 1 or lam < 1:
        raise NotApplicableError(f"sign patterns need a positive integer rate, got {lam}")
    lam = int(lam)
    params = Params(k, Fraction(lam))
    centre = params.triangular * lam
    _, d = _tables(params, centre)
    positives, negative = _SIGN_PATTERNS[k]
    reports = [
        IdentityReport(f"k{k}-sign", params, centre - j, d[centre - j], Fraction(0), ">")
        for j in positives
    ]
    reports.append(
        IdentityReport(f"k{k}-sign", params, centre - negative, d[centre - negative], Fraction(0), "<")
    )
    return reports


def check_sign_pattern_k45(k: int, lam: int) -> list[IdentityReport]:
    if k not in (4, 5):
        raise NotApplicableError(f"expected k in (4, 5), got {k}")
    return check_sign_pattern(k, lam)
