"""Parameter types shared by every distribution in the package."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

__all__ = [
    "BackendMismatchError",
    "NotApplicableError",
    "Params",
    "parse_rational",
    "format_rational",
]


class BackendMismatchError(ValueError):
    """Exact arithmetic was requested for a rate that is not rational."""


class NotApplicableError(ValueError):
    """The operation's preconditions do not hold for these parameters."""


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or a decimal literal as an exact rational.

    Decimals are read digit for digit, so ``"0.3"`` is ``3/10`` and not
    the nearest binary double.

    >>> parse_rational("7/3")
    Fraction(7, 3)
    >>> parse_rational("0.3")
    Fraction(3, 10)
    """
    text = text.strip()
    try:
        value = Fraction(text)
    except ZeroDivisionError:
        raise ValueError(f"zero denominator in rational {text!r}") from None
    except ValueError:
        raise ValueError(f"malformed rational {text!r}") from None
    return value


def format_rational(value: Fraction) -> str:
    """Lossless ``"n/d"`` token; the denominator is always written."""
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Params:
    """Order ``k`` and rate ``lam`` of a Poisson distribution of order k.

    ``lam`` is kept as a :class:`~fractions.Fraction` whenever it is given
    as an int or rational; a float stays a float and can only be used with
    the float backend.
    """

    k: int
    lam: Fraction | float

    def __post_init__(self) -> None:
        if isinstance(self.k, bool) or not isinstance(self.k, int):
            raise TypeError(f"k must be an int, got {type(self.k).__name__}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        lam = self.lam
        if isinstance(lam, bool):
            raise TypeError("lam must be a number")
        if isinstance(lam, Rational):
            lam = Fraction(lam)
        elif isinstance(lam, float):
            if not math.isfinite(lam):
                raise ValueError(f"lam must be finite, got {lam}")
        else:
            raise TypeError(f"lam must be rational or float, got {type(lam).__name__}")
        if lam <= 0:
            raise ValueError(f"lam must be > 0, got {lam}")
        object.__setattr__(self, "lam", lam)

    @property
    def is_exact(self) -> bool:
        return isinstance(self.lam, Fraction)

    @property
    def triangular(self) -> int:
        """k(k+1)/2, the mean number of trials per unit of rate."""
        return self.k * (self.k + 1) // 2

    @property
    def lam_float(self) -> float:
        return float(self.lam)

    def require_exact(self) -> Fraction:
        if not isinstance(self.lam, Fraction):
            raise BackendMismatchError(
                f"exact backend needs a rational rate, got float {self.lam!r}"
            )
        return self.lam

    def is_integer_rate(self) -> bool:
        return isinstance(self.lam, Fraction) and self.lam.denominator == 1

    def lam_str(self) -> str:
        if isinstance(self.lam, Fraction):
            return format_rational(self.lam)
        return repr(self.lam)
