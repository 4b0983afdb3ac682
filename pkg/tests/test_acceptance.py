"""Acceptance criteria, one marked group per criterion.

Run ``pytest tests/test_acceptance.py -v``; the terminal summary prints one
PASS/FAIL line per criterion.
"""

import math
import subprocess
import sys
import time
from fractions import Fraction

import pytest

from orderk import Params, pmf_oracle, pmf_table
from orderk.family import (
    GeomOrderKParams,
    fib_order_k,
    geom_order_k_table,
    negbin_order_k_convolution,
    negbin_order_k_multinomial,
    poisson_limit_check,
)
from orderk.identities import (
    check_delta_recurrence,
    check_pmf_recurrence,
    check_positivity_range,
    check_proof_identities,
    check_sign_pattern_k45,
)
from orderk.modes import conjectured_mode, luo_lower_bound, mode_set
from orderk.pmf import normalization_horizon

SMALL_RATES = [Fraction(n, 10) for n in range(1, 10)]
HALF_RATES = [Fraction(n, 2) for n in range(2, 21)]  # 1, 3/2, ..., 10
GRID_RATES = SMALL_RATES + HALF_RATES


@pytest.mark.acceptance("AC1 counterexample digits at (k, lambda) = (6, 2)")
def test_ac1_counterexample():
    start = time.perf_counter()
    flt = pmf_table(Params(6, 2.0), 42, "float")
    assert abs(flt.prob(40) - 0.0297464817) <= 5e-11
    assert abs(flt.prob(39) - 0.0297385179) <= 5e-11
    exact = pmf_table(Params(6, 2), 42, "exact")
    assert abs(exact.prob(40) - 0.0297464817) <= 5e-11
    assert abs(exact.prob(39) - 0.0297385179) <= 5e-11
    assert exact[40] > exact[39]  # Fractions: exact comparison
    assert isinstance(exact[40], Fraction)
    assert time.perf_counter() - start < 1.0


@pytest.mark.acceptance("AC2 unique predicted mode for k in 2..5, lambda in 1..20")
def test_ac2_unique_mode_sweep():
    start = time.perf_counter()
    bad = []
    for k in range(2, 6):
        for lam in range(1, 21):
            report = mode_set(Params(k, lam), "exact")
            if report.modes != (conjectured_mode(k, lam),):
                bad.append((k, lam, report.modes))
    assert bad == []
    assert time.perf_counter() - start < 60.0


@pytest.mark.acceptance("AC3 mode window sandwich on the k <= 8 grid")
def test_ac3_window_sandwich():
    bad = []
    for k in range(1, 9):
        for lam in GRID_RATES:
            r = mode_set(Params(k, lam), "exact")
            if not (r.window_lower <= r.modes[0] <= r.modes[-1] <= r.window_upper):
                bad.append((k, lam, r.modes))
    assert bad == []


@pytest.mark.acceptance("AC4 window lower bound dominates Luo's bound")
def test_ac4_bound_dominance():
    bad = []
    for k in range(2, 9):
        for lam in GRID_RATES:
            r = mode_set(Params(k, lam), "exact")
            if not r.window_lower >= luo_lower_bound(Params(k, lam)):
                bad.append((k, lam))
    assert bad == []


@pytest.mark.acceptance("AC5 recurrence equals enumeration; the two delta recurrences agree")
@pytest.mark.parametrize("lam", [Fraction(1, 2), Fraction(1), Fraction(2), Fraction(7, 3)])
def test_ac5_oracle_equivalence(lam):
    for k in range(1, 7):
        params = Params(k, lam)
        table = pmf_table(params, 62)
        for x in range(0, 61):
            assert table[x] == pmf_oracle(params, x), (k, lam, x)
            pmf_form = check_pmf_recurrence(params, x, table=table).passed
            delta_form = check_delta_recurrence(params, x, table=table).passed
            assert pmf_form and delta_form, (k, lam, x)


@pytest.mark.acceptance("AC6 proof identities, sign patterns and increasing range")
@pytest.mark.parametrize("k", [2, 3])
def test_ac6_proof_identities_as_stated(k):
    # Includes the two reduction identities exactly as printed.
    failed = [
        (r.identity_id, lam)
        for lam in range(1, 11)
        for r in check_proof_identities(k, lam, include_printed=True)
        if not r.passed
    ]
    assert failed == []


@pytest.mark.acceptance("AC6 proof identities, sign patterns and increasing range")
@pytest.mark.parametrize("k", [4, 5])
def test_ac6_sign_patterns(k):
    for lam in range(1, 11):
        assert all(r.passed for r in check_sign_pattern_k45(k, lam)), lam


@pytest.mark.acceptance("AC6 proof identities, sign patterns and increasing range")
def test_ac6_positivity_range():
    rates = sorted({Fraction(11, 10), Fraction(7, 3), Fraction(10, 7), Fraction(99, 10)} | set(HALF_RATES[1:]))
    for k in range(1, 9):
        for lam in rates:
            assert check_positivity_range(Params(k, lam)).passed, (k, lam)


def test_ac6_supplement_corrected_reductions():
    """Not a criterion: the reduction identities with corrected prefactors."""
    for k in (2, 3):
        for lam in range(1, 11):
            assert all(r.passed for r in check_proof_identities(k, lam, include_printed=False))


@pytest.mark.acceptance("AC7 Fibonacci half-probability identity and negative binomial forms")
def test_ac7_fibonacci_identity():
    for k in range(1, 7):
        table = geom_order_k_table(GeomOrderKParams(k, Fraction(1, 2)), 40)
        for n in range(k, 41):
            assert table[n] == Fraction(fib_order_k(k, n - k + 1), 2**n), (k, n)


@pytest.mark.acceptance("AC7 Fibonacci half-probability identity and negative binomial forms")
@pytest.mark.parametrize("p", [Fraction(1, 3), Fraction(1, 2), Fraction(2, 3)])
def test_ac7_negbin_forms(p):
    for k in range(1, 5):
        params = GeomOrderKParams(k, p)
        for r in range(1, 6):
            conv = negbin_order_k_convolution(params, r, k * r + 20)
            for y in range(0, k * r + 21):
                assert conv[y] == negbin_order_k_multinomial(params, r, y), (k, r, y)


@pytest.mark.acceptance("AC8 Poisson limit distance decreases, d(10000) < 0.01")
def test_ac8_limit():
    rows, skipped = poisson_limit_check(3, Fraction(1), [100, 1000, 10000])
    assert skipped == []
    d = [row.distance for row in rows]
    assert d[0] > d[1] > d[2]
    assert d[2] < 0.01


@pytest.mark.acceptance("AC9 float normalization within 1e-10")
def test_ac9_normalization():
    rates = [0.1, 0.5] + [n / 2 for n in range(2, 21)]
    for k in range(1, 9):
        for lam in rates:
            params = Params(k, lam)
            probs = pmf_table(params, normalization_horizon(params), "float").probs()
            assert abs(math.fsum(probs) - 1.0) < 1e-10, (k, lam)


@pytest.mark.acceptance("AC10 scan output is byte-identical across runs")
def test_ac10_determinism():
    argv = [sys.executable, "-m", "orderk.cli", "scan", "-k", "2..6", "-l", "1..5", "--jobs", "8"]
    first = subprocess.run(argv, capture_output=True, check=False)
    second = subprocess.run(argv, capture_output=True, check=False)
    assert first.returncode == second.returncode == 2  # (6, 2) and others violate the prediction
    assert first.stdout == second.stdout
    serial = subprocess.run(argv[:-2] + ["--jobs", "1"], capture_output=True, check=False)
    assert serial.stdout == first.stdout
