import csv
import io
import json
import subprocess
import sys

import pytest

from ceresa_check import report
from ceresa_check.cli import EXIT_USAGE, ScanConfig, UsageError, main
from ceresa_check.volume import RANGE_CAVEAT, Curve, verdict

SCHEMA_KEYS = ["curve", "k", "value", "abs_error", "frac_distance", "verdict", "h_terms", "notes"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_json_round_trip_is_byte_identical():
    for curve, k in [(Curve.fermat(7), 1), (Curve.quotient(7, 2), 1), (Curve.fermat(4), 1)]:
        text = report.to_json(verdict(curve, k, cross_check=True))
        again = report.to_json(report.from_json(text))
        assert again == text
        assert list(json.loads(text)) == SCHEMA_KEYS
        assert list(json.loads(text)["curve"]) == ["type", "n", "m"]
    cert = report.from_json(text)
    assert cert.eval_paths == {"closed_form", "quadrature"}


def test_verify_fermat_json(capsys):
    code, out, _ = run(capsys, "verify", "fermat", "--n", "7", "--k", "1", "--output", "json")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 1
    d = json.loads(lines[0])
    assert d["verdict"] == "nontrivial_numerical"
    assert d["curve"] == {"type": "fermat", "n": 7, "m": None}
    assert [t["h"] for t in d["h_terms"]] == [1, 2, 3]


def test_verify_quotient_bad_n(capsys):
    code, out, err = run(capsys, "verify", "quotient", "--n", "5", "--m", "2")
    assert code == 1
    assert "1 mod 3" in err
    assert out == ""


def test_verify_fermat_k2(capsys):
    code, out, _ = run(capsys, "verify", "fermat", "--n", "8", "--k", "2")
    assert code == 0
    assert "nontrivial_numerical" in out


def test_verify_inconclusive_exit(capsys):
    code, out, _ = run(capsys, "verify", "fermat", "--n", "7", "--margin-factor", "1e15", "--output", "csv")
    assert code == 2
    assert out.splitlines()[0] == ",".join(report.CSV_COLUMNS)


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "fermat"],
        ["verify", "fermat", "--n", "x"],
        ["scan", "--from", "3", "--to", "5"],
        ["scan", "--from", "9", "--to", "5"],
        ["scan", "--from", "5", "--to", "6", "--target-frac-error", "1e-20"],
        ["scan", "--from", "5", "--to", "6", "--k", "two"],
        ["scan", "--from", "5", "--to", "6", "--threads", "0"],
        ["frobnicate"],
        [],
    ],
)
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == EXIT_USAGE


def test_scan_k_max(capsys):
    code, out, err = run(capsys, "scan", "--from", "7", "--to", "8", "--k", "max", "--output", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [(r["N"], r["k"]) for r in rows] == [("7", "1"), ("7", "2"), ("8", "1"), ("8", "2")]
    assert all(r["verdict"] == "nontrivial_numerical" for r in rows)
    assert all(r["seconds"] == "" for r in rows)
    assert "rows=4" in err


def test_scan_n4_caveat(capsys):
    code, out, _ = run(capsys, "scan", "--from", "4", "--to", "4", "--output", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1
    assert rows[0]["notes"] == RANGE_CAVEAT


def test_scan_5_to_50(capsys):
    code, out, _ = run(capsys, "scan", "--from", "5", "--to", "50", "--output", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert [int(r["N"]) for r in rows] == list(range(5, 51))
    assert {r["verdict"] for r in rows} == {"nontrivial_numerical"}


def test_scan_failure_rows_continue(capsys):
    # k=2 is outside the admitted range for N < 7: those rows are inconclusive, the scan goes on
    code, out, _ = run(capsys, "scan", "--from", "5", "--to", "8", "--k", "2", "--output", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 2
    assert [r["verdict"] for r in rows] == ["inconclusive", "inconclusive", "nontrivial_numerical", "nontrivial_numerical"]
    assert "exceeds" in rows[0]["notes"]


def test_scan_timing_column(capsys):
    _, out, _ = run(capsys, "scan", "--from", "5", "--to", "6", "--output", "csv", "--timing")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert all(float(r["seconds"]) >= 0 for r in rows)


def test_scan_json_lines(capsys):
    _, out, _ = run(capsys, "scan", "--from", "5", "--to", "7", "--output", "json")
    certs = [report.from_json(line) for line in out.splitlines()]
    assert [c.curve.n for c in certs] == [5, 6, 7]


def test_scan_threads_identical(capsys):
    _, one, _ = run(capsys, "scan", "--from", "5", "--to", "30", "--output", "csv", "--threads", "1")
    _, three, _ = run(capsys, "scan", "--from", "5", "--to", "30", "--output", "csv", "--threads", "3")
    assert one == three


def test_config_precedence(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"output": "csv", "margin_factor": 1e15}))
    monkeypatch.setenv("CERESA_CHECK_CONFIG", str(cfg))
    code, out, _ = run(capsys, "verify", "fermat", "--n", "7")
    assert code == 2 and out.startswith("N,k,")
    # flags override the file
    code, out, _ = run(capsys, "verify", "fermat", "--n", "7", "--margin-factor", "10", "--output", "json")
    assert code == 0 and out.startswith("{")


def test_config_bad_key(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"colour": "blue"}))
    monkeypatch.setenv("CERESA_CHECK_CONFIG", str(cfg))
    code, _, err = run(capsys, "verify", "fermat", "--n", "7")
    assert code == EXIT_USAGE and "colour" in err


def test_scan_config_validation():
    with pytest.raises(UsageError):
        ScanConfig(4, 2_000_000, 1, "auto", 1e-9, 10.0, 1, "csv")
    cfg = ScanConfig(4, 9, "max", "auto", 1e-9, 10.0, 1, "csv")
    assert cfg.tasks() == [(4, 1), (5, 1), (6, 1), (7, 1), (7, 2), (8, 1), (8, 2), (9, 1), (9, 2), (9, 3)]


def test_selftest_shuffle_500(capsys):
    code, out, _ = run(capsys, "selftest", "--suite", "shuffle", "--trials", "500")
    assert code == 0
    assert "shuffle" in out and "trials=500" in out and "pass" in out


def test_selftest_dualpath_n7(capsys):
    code, out, _ = run(capsys, "selftest", "--suite", "dualpath", "--n", "7")
    assert code == 0
    assert "trials=225" in out


def test_selftest_default_run(capsys):
    code, out, _ = run(capsys, "selftest")
    assert code == 0
    assert len(out.strip().splitlines()) == 7


def test_selftest_failure_exit(capsys, monkeypatch):
    from ceresa_check import selftest

    def broken(**_):
        res = selftest.SuiteResult("shuffle")
        res.record("forced", 1.0, 0.0)
        return res

    monkeypatch.setitem(selftest.SUITES, "shuffle", broken)
    code, _, err = run(capsys, "selftest", "--suite", "shuffle")
    assert code == 3 and "forced" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "ceresa_check", "verify", "fermat", "--n", "5", "--output", "json"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "nontrivial_numerical"
