"""Poisson distribution of order k.

Everything here works on the scaled pmf ``Q_x = exp(k*lam) * P_x``. The
factor ``exp(-k*lam)`` is common to every term, so with a rational rate all
comparisons between pmf values are exact rational comparisons.

Two independent routes compute ``Q_x``:

* :func:`pmf_table` runs the pgf recurrence
  ``x*Q_x = lam * sum_{j=1}^{min(k,x)} j*Q_{x-j}``;
* :func:`pmf_oracle` sums ``lam**(x_1+...+x_k) / (x_1!...x_k!)`` over all
  k-tuples of weight ``x_1 + 2*x_2 + ... + k*x_k = x``.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Union

from .params import BackendMismatchError, Params
from .scaled import ScaledFloat, scaled_sum

__all__ = [
    "Backend",
    "Composition",
    "PrecisionWarning",
    "ScaledPmfTable",
    "Scalar",
    "enumerate_compositions",
    "mean",
    "normalization_horizon",
    "pgf_eval",
    "pmf_oracle",
    "pmf_table",
]

Backend = Literal["exact", "float"]
Scalar = Union[Fraction, ScaledFloat]

# Bound on accumulated relative rounding error before a table is flagged.
_FLOAT_ERROR_BUDGET = 1e-8
_EPS = 2.0**-52
_LOG_TINY = math.log(2.2250738585072014e-308)


class PrecisionWarning(UserWarning):
    """Float-backend values have lost (or may lose) reported precision."""


@dataclass(frozen=True)
class Composition:
    """Multiplicities ``(x_1, ..., x_k)``: ``x_j`` parts of size ``j``."""

    counts: tuple[int, ...]

    @property
    def weight(self) -> int:
        return sum(j * c for j, c in enumerate(self.counts, start=1))

    @property
    def size(self) -> int:
        return sum(self.counts)


def enumerate_compositions(k: int, x: int) -> Iterator[Composition]:
    """Yield every k-tuple of non-negative ints with weight ``x`` once.

    Tuples come out in increasing lexicographic order of
    ``(x_k, x_{k-1}, ..., x_2)``; ``x_1`` is whatever weight is left.
    Apart from the generator frames, state is a single length-k list.

    >>> [c.counts for c in enumerate_compositions(2, 3)]
    [(3, 0), (1, 1)]
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    counts = [0] * k

    def fill(j: int, remaining: int) -> Iterator[Composition]:
        if j == 1:
            counts[0] = remaining
            yield Composition(tuple(counts))
            return
        for c in range(remaining // j + 1):
            counts[j - 1] = c
            yield from fill(j - 1, remaining - j * c)
        counts[j - 1] = 0

    yield from fill(k, x)


@dataclass(frozen=True)
class ScaledPmfTable:
    """Scaled pmf ``Q_0..Q_X`` of a Poisson distribution of order k.

    ``P_x = exp(-k*lam) * Q_x``. Exact tables hold Fractions, float tables
    hold :class:`ScaledFloat`. Tables are immutable; :meth:`extend`
    returns a longer table that reuses the already computed prefix.
    """

    params: Params
    backend: Backend
    q: tuple[Scalar, ...]
    precision_warning: str | None = field(default=None, compare=False)

    scale_note = "P_x = exp(-k*lam) * Q_x"

    @property
    def upper(self) -> int:
        return len(self.q) - 1

    def __len__(self) -> int:
        return len(self.q)

    def __getitem__(self, x: int) -> Scalar:
        """``Q_x``; negative indices are the zero of the backend."""
        if x < 0:
            return Fraction(0) if self.backend == "exact" else ScaledFloat(0.0, 0)
        return self.q[x]

    @property
    def log_factor(self) -> float:
        """Natural log of the common factor, ``-k*lam``."""
        return -self.params.k * self.params.lam_float

    def scaled(self, x: int) -> tuple[Scalar, float]:
        """``(Q_x, -k*lam)``, i.e. ``P_x = Q_x * exp(-k*lam)``."""
        return self[x], self.log_factor

    def log_prob(self, x: int) -> float:
        value = self[x]
        if isinstance(value, Fraction):
            if value == 0:
                return -math.inf
            log_q = math.log(value.numerator) - math.log(value.denominator)
        else:
            log_q = value.log()
        return log_q + self.log_factor

    def prob(self, x: int) -> float:
        """``P_x`` as a double (0.0 if it underflows)."""
        return math.exp(self.log_prob(x))

    def probs(self) -> list[float]:
        return [self.prob(x) for x in range(len(self.q))]

    def delta(self, x: int) -> Fraction:
        """Exact scaled ``Q_x - Q_{x-1}``; exact backend only."""
        if self.backend != "exact":
            raise BackendMismatchError("exact Δ values need the exact backend")
        return self[x] - self[x - 1]

    def delta_sign(self, x: int) -> int:
        if self.backend == "exact":
            d = self.delta(x)
            return (d > 0) - (d < 0)
        gap = self[x].signed_gap(self[x - 1])
        return (gap > 0) - (gap < 0)

    def extend(self, upper: int) -> ScaledPmfTable:
        """Table up to ``upper``; only the missing entries are computed."""
        if upper <= self.upper:
            return self
        if self.backend == "exact":
            return _exact_table(self.params, upper, self.q)
        return _float_table(self.params, upper, self.q)


def _exact_table(params: Params, upper: int, prefix: Sequence[Fraction]) -> ScaledPmfTable:
    # With lam = a/b, Q_x = N_x / (b**x * x!) and N_x is an integer:
    #   N_x = a * sum_j j * N_{x-j} * b**(j-1) * (x-1)!/(x-j)!
    lam = params.require_exact()
    a, b = lam.numerator, lam.denominator
    k = params.k
    q = list(prefix)
    n = [
        (value * b**x * math.factorial(x)).numerator for x, value in enumerate(q)
    ]
    for x in range(len(q), upper + 1):
        total = 0
        falling = 1  # (x-1)!/(x-j)!
        b_pow = 1
        for j in range(1, min(k, x) + 1):
            total += j * n[x - j] * b_pow * falling
            falling *= x - j
            b_pow *= b
        n.append(a * total)
        q.append(Fraction(n[x], b**x * math.factorial(x)))
    return ScaledPmfTable(params, "exact", tuple(q))


def _float_table(params: Params, upper: int, prefix: Sequence[ScaledFloat]) -> ScaledPmfTable:
    lam = params.lam_float
    k = params.k
    q = list(prefix)
    for x in range(len(q), upper + 1):
        terms = [q[x - j].scale(float(j)) for j in range(1, min(k, x) + 1)]
        q.append(scaled_sum(terms).scale(lam / x))
    note = None
    # Each step adds at most k+2 roundings on top of its inputs.
    if upper * (k + 2) * _EPS > _FLOAT_ERROR_BUDGET:
        note = f"relative rounding error may exceed {_FLOAT_ERROR_BUDGET:g} at x={upper}"
    elif min(v.log() for v in q) - k * lam < _LOG_TINY:
        note = "some P_x underflow doubles; use log_prob or the scaled values"
    table = ScaledPmfTable(params, "float", tuple(q), precision_warning=note)
    if note is not None:
        warnings.warn(note, PrecisionWarning, stacklevel=3)
    return table


def pmf_table(params: Params, upper: int, backend: Backend = "exact") -> ScaledPmfTable:
    """Scaled pmf ``Q_0..Q_upper`` from the pgf recurrence.

    ``backend="exact"`` needs a rational rate and returns Fractions;
    ``backend="float"`` returns :class:`ScaledFloat` values that do not
    overflow or underflow.
    """
    if upper < 0:
        raise ValueError(f"upper must be >= 0, got {upper}")
    if backend == "exact":
        params.require_exact()
        return _exact_table(params, upper, [Fraction(1)])
    if backend == "float":
        return _float_table(params, upper, [ScaledFloat(1.0, 0)])
    raise ValueError(f"unknown backend {backend!r}")


def pmf_oracle(params: Params, x: int, backend: Backend = "exact") -> Scalar:
    """``Q_x`` by direct summation over compositions of ``x``.

    Slow but shares nothing with :func:`pmf_table`; used to check it.
    """
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    if backend == "exact":
        lam = params.require_exact()
        a, b = lam.numerator, lam.denominator
        # Each term times b**x * x! is the integer a**s * b**(x-s) * x!/prod(x_j!).
        fx = math.factorial(x)
        total = 0
        for comp in enumerate_compositions(params.k, x):
            s = comp.size
            denom = 1
            for c in comp.counts:
                denom *= math.factorial(c)
            total += a**s * b ** (x - s) * (fx // denom)
        return Fraction(total, b**x * fx)
    if backend == "float":
        log_lam = math.log(params.lam_float)
        logs = [
            comp.size * log_lam - sum(math.lgamma(c + 1) for c in comp.counts)
            for comp in enumerate_compositions(params.k, x)
        ]
        log_top = max(logs)
        acc = math.fsum(math.exp(v - log_top) for v in logs)
        return _scaled_exp(log_top).scale(acc)
    raise ValueError(f"unknown backend {backend!r}")


def _scaled_exp(log_value: float) -> ScaledFloat:
    e = math.floor(log_value / math.log(2.0))
    return ScaledFloat.from_float(math.exp(log_value - e * math.log(2.0)), e)


def pgf_eval(params: Params, s: float) -> float:
    """Probability generating function ``exp(lam*(-k + s + ... + s**k))``."""
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s}")
    power_sum = math.fsum(s**j for j in range(1, params.k + 1))
    return math.exp(params.lam_float * (power_sum - params.k))


def mean(params: Params) -> Fraction | float:
    """``lam * k(k+1)/2``; exact when the rate is rational."""
    return params.lam * params.triangular


def normalization_horizon(params: Params) -> int:
    """``ceil(mean + 20*sqrt(mean*k))``, past which the tail is negligible."""
    m = float(mean(params))
    return math.ceil(m + 20.0 * math.sqrt(m * params.k))
