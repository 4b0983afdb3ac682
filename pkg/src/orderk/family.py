"""Geometric and negative binomial distributions of order k.

``N_k`` counts Bernoulli(p) trials up to and including the first run of k
consecutive successes; ``Y_{k,r}`` is a sum of r independent copies. As
``r -> oo`` with ``r*q -> lam``, ``Y_{k,r} - k*r`` tends to the Poisson
distribution of order k.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .params import Params
from .pmf import enumerate_compositions, normalization_horizon, pmf_table

__all__ = [
    "GeomOrderKParams",
    "LimitRow",
    "fib_order_k",
    "fib_sequence",
    "geom_order_k_multinomial",
    "geom_order_k_pmf",
    "geom_order_k_table",
    "limit_horizon",
    "negbin_order_k_convolution",
    "negbin_order_k_multinomial",
    "negbin_order_k_pmf",
    "poisson_limit_check",
]


@dataclass(frozen=True)
class GeomOrderKParams:
    k: int
    p: Fraction

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        p = Fraction(self.p)
        if not 0 < p < 1:
            raise ValueError(f"p must lie strictly between 0 and 1, got {p}")
        object.__setattr__(self, "p", p)

    @property
    def q(self) -> Fraction:
        return 1 - self.p


# ----------------------------------------------------------------------------
# Fibonacci numbers of order k


def fib_sequence(k: int, n: int) -> list[int]:
    """``[f_1, ..., f_n]`` with ``f_1 = 1``, ``f_m = 0`` for ``m <= 0`` and
    ``f_m = f_{m-1} + ... + f_{m-k}`` for ``m >= 2``.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    values = [0] * k + [1]  # k zeros stand in for f_{1-k}..f_0
    window = 1
    for _ in range(n - 1):
        values.append(window)
        window += values[-1] - values[-1 - k]
    return values[k : k + n]


def fib_order_k(k: int, n: int) -> int:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return fib_sequence(k, n)[-1]


# ----------------------------------------------------------------------------
# Geometric distribution of order k


def geom_order_k_table(params: GeomOrderKParams, n_max: int) -> list[Fraction]:
    """``[P(N_k = n) for n in 0..n_max]`` by dynamic programming.

    State ``run[i]``: probability that no k-run has finished yet and the
    current trailing run of successes has length ``i < k``.
    """
    k, p, q = params.k, params.p, params.q
    run = [Fraction(0)] * k
    run[0] = Fraction(1)
    out = [Fraction(0)]
    for _ in range(1, n_max + 1):
        out.append(run[k - 1] * p)
        failed = q * sum(run)
        run = [failed] + [run[i] * p for i in range(k - 1)]
    return out


def geom_order_k_pmf(params: GeomOrderKParams, n: int) -> Fraction:
    if n < params.k:
        return Fraction(0)
    return geom_order_k_table(params, n)[n]


def geom_order_k_multinomial(params: GeomOrderKParams, n: int) -> Fraction:
    """``P(N_k = n)`` from the multinomial-coefficient formula."""
    return negbin_order_k_multinomial(params, 1, n)


# ----------------------------------------------------------------------------
# Negative binomial distribution of order k


def negbin_order_k_multinomial(params: GeomOrderKParams, r: int, y: int) -> Fraction:
    """``p**y * sum multinomial(y_1+...+y_k+r-1; y_1..y_k, r-1) (q/p)**(sum y)``

    over k-tuples with ``y_1 + 2 y_2 + ... + k y_k = y - k r``.
    """
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    if y < params.k * r:
        return Fraction(0)
    p, q = params.p, params.q
    ratio = q / p
    total = Fraction(0)
    for comp in enumerate_compositions(params.k, y - params.k * r):
        s = comp.size
        coeff = math.factorial(s + r - 1) // math.factorial(r - 1)
        for c in comp.counts:
            coeff //= math.factorial(c)
        total += coeff * ratio**s
    return p**y * total


def _convolve(a: Sequence[Fraction], b: Sequence[Fraction], upper: int) -> list[Fraction]:
    out = [Fraction(0)] * (upper + 1)
    for i, ai in enumerate(a[: upper + 1]):
        if ai == 0:
            continue
        for j in range(0, upper + 1 - i):
            if j < len(b) and b[j] != 0:
                out[i + j] += ai * b[j]
    return out


def negbin_order_k_convolution(params: GeomOrderKParams, r: int, y_max: int) -> list[Fraction]:
    """``[P(Y_{k,r} = y) for y in 0..y_max]`` as an r-fold convolution."""
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    geom = geom_order_k_table(params, y_max)
    dist = geom
    for _ in range(r - 1):
        dist = _convolve(dist, geom, y_max)
    return dist


def negbin_order_k_pmf(params: GeomOrderKParams, r: int, y: int) -> Fraction:
    """``P(Y_{k,r} = y)``; both routes run and must agree exactly."""
    if y < params.k * r:
        return Fraction(0)
    by_convolution = negbin_order_k_convolution(params, r, y)[y]
    by_formula = negbin_order_k_multinomial(params, r, y)
    if by_convolution != by_formula:
        raise ArithmeticError(
            f"convolution and multinomial forms disagree at k={params.k}, r={r}, y={y}"
        )
    return by_formula


# ----------------------------------------------------------------------------
# Poisson limit


@dataclass(frozen=True)
class LimitRow:
    r: int
    q: Fraction | float
    distance: float
    argmax: int


def limit_horizon(k: int, lam: Fraction | float) -> int:
    return normalization_horizon(Params(k, lam))


@lru_cache(maxsize=None)
def _log_factorial(n: int) -> float:
    return math.lgamma(n + 1)


def _shifted_negbin_floats(k: int, r: int, q: float, horizon: int) -> list[float]:
    """``P(Y_{k,r} - k r = x)`` for ``x <= horizon`` in log space."""
    p = 1.0 - q
    log_p, log_ratio = math.log(p), math.log(q / p)
    base = k * r * log_p - math.lgamma(r)
    out = []
    for x in range(horizon + 1):
        logs = [
            base
            + x * log_p
            + math.lgamma(comp.size + r)
            - sum(_log_factorial(c) for c in comp.counts)
            + comp.size * log_ratio
            for comp in enumerate_compositions(k, x)
        ]
        top = max(logs)
        out.append(math.exp(top) * math.fsum(math.exp(v - top) for v in logs))
    return out


def poisson_limit_check(k: int, lam: Fraction | float, r_values: Iterable[int]) -> tuple[list[LimitRow], list[int]]:
    """Sup-norm distance between ``Y_{k,r} - k r`` (with ``q = lam/r``) and
    the order-k Poisson pmf, over a horizon shared by every ``r``.

    Returns ``(rows, skipped)``; an ``r`` with ``lam/r >= 1`` is skipped.
    """
    lam = Fraction(lam) if not isinstance(lam, float) else lam
    horizon = limit_horizon(k, lam)
    target = pmf_table(Params(k, lam), horizon, "float").probs()
    rows, skipped = [], []
    for r in r_values:
        q = lam / r
        if not 0 < q < 1:
            skipped.append(r)
            continue
        approx = _shifted_negbin_floats(k, r, float(q), horizon)
        gaps = [abs(a - b) for a, b in zip(approx, target)]
        worst = max(range(len(gaps)), key=gaps.__getitem__)
        rows.append(LimitRow(r, q, gaps[worst], worst))
    return rows, skipped
