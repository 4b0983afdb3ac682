import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import jsonschema
import pytest

from orderk.cli import main
from orderk.output import load_schema


@pytest.fixture(scope="module")
def validator():
    schema = load_schema()
    jsonschema.Draft202012Validator.check_schema(schema)
    return jsonschema.Draft202012Validator(schema)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, validator, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    doc = json.loads(out)
    validator.validate(doc)
    return code, doc


# --- pmf ----------------------------------------------------------------------


def test_pmf_k6_lambda2_row40(capsys, validator):
    code, doc = run_json(capsys, validator, "pmf", "-k", "6", "-l", "2", "--x-max", "42", "--backend", "exact")
    assert code == 0
    row = doc["payload"]["rows"][40]
    assert row["x"] == 40
    assert abs(float(row["p"]) - 0.0297464817) < 5e-11
    assert float(row["p"]) > float(doc["payload"]["rows"][39]["p"])


def test_pmf_rationals_round_trip(capsys, validator):
    code, doc = run_json(capsys, validator, "pmf", "-k", "3", "-l", "7/3", "--x-max", "12")
    from orderk import Params, pmf_table

    t = pmf_table(Params(3, Fraction(7, 3)), 12)
    assert [Fraction(r["q"]) for r in doc["payload"]["rows"]] == list(t.q)
    assert doc["params"] == {"k": 3, "lambda": "7/3"}


def test_pmf_k2_lambda1_first_rows_equal(capsys):
    code, out, _ = run(capsys, "pmf", "-k", "2", "-l", "1", "--x-max", "2", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["p"] == rows[1]["p"]
    assert rows[0]["q"] == rows[1]["q"] == "1/1"
    assert rows[1]["delta_sign"] == "0"
    assert "\r" not in out


def test_pmf_k1_is_poisson(capsys):
    import math

    code, out, _ = run(capsys, "pmf", "-k", "1", "-l", "3", "--x-max", "5", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    for r in rows:
        x = int(r["x"])
        assert Fraction(r["q"]) == Fraction(3) ** x / math.factorial(x)
        assert math.isclose(float(r["p"]), math.exp(-3) * 3**x / math.factorial(x), rel_tol=1e-9)


def test_pmf_decimal_rate_is_exact(capsys, validator):
    code, doc = run_json(capsys, validator, "pmf", "-k", "2", "-l", "0.3", "--x-max", "3")
    assert doc["params"]["lambda"] == "3/10"
    assert doc["payload"]["rows"][1]["q"] == "3/10"


def test_pmf_float_backend(capsys, validator):
    code, doc = run_json(capsys, validator, "pmf", "-k", "6", "-l", "2", "--x-max", "42", "--backend", "float")
    assert abs(float(doc["payload"]["rows"][40]["p"]) - 0.0297464817) < 5e-11


def test_pmf_text_header_and_quiet(capsys):
    _, out, _ = run(capsys, "pmf", "-k", "2", "-l", "1", "--x-max", "2")
    assert out.startswith("# orderk ")
    _, quiet, _ = run(capsys, "pmf", "-k", "2", "-l", "1", "--x-max", "2", "--quiet")
    assert not quiet.startswith("#")
    assert quiet == out.split("\n", 1)[1]


def test_out_writes_file(capsys, tmp_path):
    target = tmp_path / "pmf.csv"
    code, out, _ = run(capsys, "pmf", "-k", "2", "-l", "1", "--x-max", "4", "--format", "csv", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text().startswith("x,q,p,delta_sign\n")


# --- errors ----------------------------------------------------------------------


@pytest.mark.parametrize(
    "argv",
    [
        ["pmf", "-k", "2", "-l", "3/0", "--x-max", "2"],
        ["pmf", "-k", "2", "-l", "1"],
        ["pmf", "-k", "0", "-l", "1", "--x-max", "2"],
        ["scan", "-k", "5..2", "-l", "1..2"],
        ["verify", "positivity", "-k", "2", "-l", "1"],
        ["nonsense"],
    ],
)
def test_usage_errors_exit_one(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert err


# --- mode and scan -------------------------------------------------------------------


def test_mode_k5_lambda3(capsys, validator):
    code, doc = run_json(capsys, validator, "mode", "-k", "5", "-l", "3")
    p = doc["payload"]
    assert (p["modes"], p["conjecture"], p["verdict"]) == ([43], 43, "holds")
    _, out, _ = run(capsys, "mode", "-k", "5", "-l", "3", "--quiet")
    assert "modes=[43]" in out and "conjecture=43" in out and "verdict=holds" in out


def test_mode_csv(capsys):
    _, out, _ = run(capsys, "mode", "-k", "1", "-l", "3", "--format", "csv")
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["modes"] == "2;3" and row["verdict"] == "not_applicable"


def test_scan_finds_counterexample(capsys, validator):
    code, doc = run_json(capsys, validator, "scan", "-k", "6..6", "-l", "2..2")
    assert code == 2
    failures = doc["payload"]["summary"]["failures"]
    assert len(failures) == 1
    assert (failures[0]["witness"]["x"], failures[0]["witness"]["x_prime"]) == (40, 39)


def test_scan_clean_exits_zero(capsys):
    code, out, _ = run(capsys, "scan", "-k", "2..5", "-l", "1..6")
    assert code == 0
    assert "# points=24 failures=0" in out


def test_scan_jobs_do_not_change_output(capsys):
    _, one, _ = run(capsys, "scan", "-k", "2..4", "-l", "1..4", "--format", "csv")
    _, four, _ = run(capsys, "scan", "-k", "2..4", "-l", "1..4", "--format", "csv", "--jobs", "4")
    assert one == four


# --- verify ------------------------------------------------------------------------


def test_verify_identities_k3_lambda2(capsys, validator):
    code, doc = run_json(capsys, validator, "verify", "identities", "-k", "3", "-l", "2")
    failed = [r["id"] for r in doc["payload"]["reports"] if not r["passed"]]
    # only the misprinted reduction form fails
    assert failed == ["k3-reduction-printed"]
    assert code == 2
    code, doc = run_json(capsys, validator, "verify", "identities", "-k", "3", "-l", "2", "--skip-printed")
    assert code == 0 and doc["payload"]["all_passed"]
    ids = {r["id"] for r in doc["payload"]["reports"]}
    assert {"pmf-recurrence", "delta-recurrence", "positivity-range", "k3-tail-ratio",
            "k3-reduction", "k3-single-step", "k3-sign"} <= ids


def test_verify_positivity(capsys, validator):
    code, doc = run_json(capsys, validator, "verify", "positivity", "-k", "4", "-l", "3")
    assert code == 0
    assert doc["payload"]["reports"][0]["x"] == [0, 19]


def test_verify_family(capsys, validator):
    code, doc = run_json(capsys, validator, "verify", "family", "-k", "3", "-p", "2/3", "--r-max", "2")
    assert code == 0 and doc["payload"]["all_passed"]
    ids = {r["id"] for r in doc["payload"]["reports"]}
    assert ids == {"fibonacci-half", "geometric-multinomial", "negbin-r1", "negbin-r2"}


def test_verify_limit(capsys, validator):
    code, doc = run_json(capsys, validator, "verify", "limit", "-k", "3", "-l", "1")
    assert code == 0
    assert doc["payload"]["strictly_decreasing"]
    assert doc["payload"]["horizon"] == 91
    assert [r["r"] for r in doc["payload"]["rows"]] == [100, 1000, 10000]


def test_verify_limit_csv_and_skip(capsys):
    code, out, _ = run(capsys, "verify", "limit", "-k", "2", "-l", "3", "-r", "2,50,500", "--quiet")
    assert code == 0
    assert "# skipped r=2" in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "orderk.cli", "mode", "-k", "2", "-l", "3", "--quiet"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert "modes=[8]" in proc.stdout
