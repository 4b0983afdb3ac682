"""Doubles with an unbounded base-2 exponent.

Scaled pmf values grow like e^{k*lam} and the probabilities themselves
shrink below the double range, so the float backend carries each value as
a significand in [1, 2) plus a Python int exponent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import total_ordering

__all__ = ["ScaledFloat", "scaled_sum", "format_decimal"]

_LOG10_2 = math.log10(2.0)


@total_ordering
@dataclass(frozen=True, slots=True)
class ScaledFloat:
    """Non-negative value ``significand * 2**exponent``.

    Zero is stored as significand 0.0, exponent 0. Every other value keeps
    its significand in [1, 2).
    """

    significand: float
    exponent: int

    @classmethod
    def from_float(cls, value: float, exponent: int = 0) -> ScaledFloat:
        if value < 0 or not math.isfinite(value):
            raise ValueError(f"ScaledFloat holds finite non-negative values, got {value}")
        if value == 0.0:
            return cls(0.0, 0)
        m, e = math.frexp(value)
        return cls(m * 2.0, exponent + e - 1)

    @property
    def is_zero(self) -> bool:
        return self.significand == 0.0

    def log(self) -> float:
        """Natural log; ``-inf`` for zero."""
        if self.is_zero:
            return -math.inf
        return math.log(self.significand) + self.exponent * math.log(2.0)

    def log10(self) -> float:
        if self.is_zero:
            return -math.inf
        return math.log10(self.significand) + self.exponent * _LOG10_2

    def to_float(self) -> float:
        """Nearest double; overflows to ``inf`` and underflows to 0."""
        if self.exponent > 1024:
            return math.inf
        return math.ldexp(self.significand, self.exponent)

    def scale(self, factor: float) -> ScaledFloat:
        return ScaledFloat.from_float(self.significand * factor, self.exponent)

    def __mul__(self, other: ScaledFloat) -> ScaledFloat:
        if self.is_zero or other.is_zero:
            return ScaledFloat(0.0, 0)
        return ScaledFloat.from_float(
            self.significand * other.significand, self.exponent + other.exponent
        )

    def __add__(self, other: ScaledFloat) -> ScaledFloat:
        return scaled_sum((self, other))

    def __lt__(self, other: ScaledFloat) -> bool:
        if self.is_zero or other.is_zero:
            return self.significand < other.significand
        return (self.exponent, self.significand) < (other.exponent, other.significand)

    def signed_gap(self, other: ScaledFloat) -> float:
        """(self - other) / max(self, other); 0.0 when both are zero."""
        big = max(self, other)
        if big.is_zero:
            return 0.0
        top = big.exponent
        diff = math.ldexp(self.significand, self.exponent - top) - math.ldexp(
            other.significand, other.exponent - top
        )
        return diff / big.significand


def scaled_sum(terms) -> ScaledFloat:
    """Sum of non-negative ScaledFloats, aligned to the largest exponent."""
    terms = [t for t in terms if not t.is_zero]
    if not terms:
        return ScaledFloat(0.0, 0)
    top = max(t.exponent for t in terms)
    acc = math.fsum(math.ldexp(t.significand, t.exponent - top) for t in terms)
    return ScaledFloat.from_float(acc, top)


def format_decimal(log10_value: float, digits: int) -> str:
    """Decimal string with ``digits`` significant digits from a log10 value.

    Works far outside the double range.
    """
    if log10_value == -math.inf:
        return "0"
    if -300.0 < log10_value < 300.0:
        return f"{10.0 ** log10_value:.{digits}g}"
    exp10 = math.floor(log10_value)
    mant = 10.0 ** (log10_value - exp10)
    text = f"{mant:.{digits - 1}f}"
    if text.startswith("10"):
        exp10 += 1
        text = f"{mant / 10.0:.{digits - 1}f}"
    return f"{text}e{exp10:+d}"
