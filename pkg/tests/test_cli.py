from __future__ import annotations

import io
import json
import subprocess
import sys
from decimal import Decimal

import gmpy2
import jsonschema
import pytest

from kummerscan.cli import (
    EXIT_ERROR,
    EXIT_INCONCLUSIVE,
    EXIT_OK,
    EXIT_VIOLATION,
    UsageError,
    main,
    parse_range,
    parse_vector_axis,
)
from kummerscan.ratios import RatioSpec, ratio_value
from kummerscan.schema import RESULT_SCHEMA
from kummerscan.sfcore import PREC_ENV_VAR, kummer_1f1

FAST = ["--samples", "32", "--depth", "4"]


def run(*argv: str) -> tuple[int, str]:
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def run_json(*argv: str) -> tuple[int, dict]:
    code, text = run(*argv, "--format", "json")
    doc = json.loads(text)
    jsonschema.validate(doc, RESULT_SCHEMA)
    return code, doc


class TestRangeSyntax:
    @pytest.mark.parametrize("text,expected", [
        ("5", [5]),
        ("1..4", [1, 2, 3, 4]),
        ("0.5..2:0.5", [0.5, 1, 1.5, 2]),
        ("1,3..4", [1, 3, 4]),
        ("0.1..0.3:0.1", [0.1, 0.2, 0.3]),
        ("2..2", [2]),
    ])
    def test_parse(self, text, expected):
        assert parse_range(text) == expected

    @pytest.mark.parametrize("text", ["", "a..b", "3..1", "1..2:0", "1..2:-1", "nan", "1,,2"])
    def test_reject(self, text):
        with pytest.raises(UsageError):
            parse_range(text)

    def test_vector_axis(self):
        assert parse_vector_axis("2,4;3,5") == [(2, 4), (3, 5)]


class TestExitCodes:
    def test_limit_ratio(self):
        code, text = run("ratio", "--family", "f", "--n", "1", "--x", "0")
        assert code == EXIT_OK
        assert text.startswith("f_1(0) = 0.66666666666666667") and "[limit]" in text

    def test_bounds_pass(self):
        code, text = run("verify-bounds", "--n", "1..3", "--x-max", "100", "--samples", "100")
        assert code == EXIT_OK and "PASS" in text

    def test_skipped_cell(self):
        code, text = run("scan-abc", "--a", "1", "--b", "0.5", "--c", "1", "--x-max", "10")
        assert code == EXIT_INCONCLUSIVE
        assert "SKIPPED_DOMAIN" in text and "1 cells" in text

    def test_violation_prints_witness(self):
        code, text = run("verify-monotone", "--family", "g", "--reciprocal", "--n", "1",
                         "--x-max", "10")
        assert code == EXIT_VIOLATION and "witness x=" in text

    def test_all_increasing(self):
        code, _ = run("verify-monotone", "--family", "f", "--n", "1..2", "--x-max", "20", *FAST)
        assert code == EXIT_OK

    def test_vacuous(self):
        code, text = run("verify-monotone", "--family", "g", "--n", "3", "--x-min", "2",
                         "--x-max", "2")
        assert code == EXIT_INCONCLUSIVE and "VACUOUS" in text

    @pytest.mark.parametrize("argv", [
        ["bogus"],
        ["ratio", "--family", "f", "--x", "1"],
        ["ratio", "--family", "f", "--n", "1.5", "--x", "1"],
        ["ratio", "--family", "g", "--n", "0", "--x", "1"],
        ["ratio", "--family", "h", "--a", "1", "--b", "1", "--c", "2", "--x", "1"],
        ["eval", "--a", "1", "--b", "2", "--x", "-1"],
        ["eval", "--func", "pfq", "--a", "1,1,1", "--b", "1", "--x", "0.5"],
        ["eval", "--a", "1", "--b", "2", "--x", "1", "--prec", "1"],
        ["verify-bounds", "--samples", "1"],
        ["verify-monotone", "--family", "f", "--x-min", "5", "--x-max", "1"],
        ["scan-abc", "--a", "1..", "--b", "2", "--c", "1"],
    ])
    def test_usage_errors(self, argv, capsys):
        code, text = run(*argv)
        err = capsys.readouterr().err
        assert code == EXIT_ERROR and text == ""
        assert err.startswith("kummerscan: error:") and err.count("\n") == 1

    def test_precision_ceiling(self, monkeypatch, capsys):
        monkeypatch.setenv(PREC_ENV_VAR, "256")
        code, _ = run("eval", "--a", "1", "--b", "2", "--x", "1", "--rel-tol", "1e-100")
        err = capsys.readouterr().err
        assert code == EXIT_ERROR and "ceiling" in err.lower()
        monkeypatch.setenv(PREC_ENV_VAR, "1024")
        code, _ = run("eval", "--a", "1", "--b", "2", "--x", "1", "--rel-tol", "1e-100")
        assert code == EXIT_OK

    def test_bad_env(self, monkeypatch):
        monkeypatch.setenv(PREC_ENV_VAR, "tiny")
        assert run("ratio", "--family", "f", "--n", "1", "--x", "1")[0] == EXIT_ERROR


class TestJson:
    @pytest.mark.parametrize("argv", [
        ["eval", "--a", "1", "--b", "2", "--x", "1"],
        ["eval", "--func", "1f1-dx", "--a", "1", "--b", "2", "--x", "1"],
        ["eval", "--func", "pfq", "--a", "0.5", "--b", "2,3", "--x", "10"],
        ["eval", "--func", "gamma-p", "--s", "2", "--x", "1"],
        ["eval", "--func", "pochhammer", "--a", "2.5", "--k", "2"],
        ["remainder", "--n", "3", "--x", "2.5", "--route", "all"],
        ["ratio", "--family", "h", "--a", "1", "--b", "3", "--c", "1", "--x", "1"],
        ["ratio", "--family", "pfq", "--a", "0.5", "--b", "2,3", "--c", "0.5,1", "--x", "10"],
        ["derivative", "--family", "g", "--n", "2", "--x", "5"],
        ["verify-bounds", "--n", "1..2", "--x-max", "10", "--samples", "20"],
        ["verify-monotone", "--family", "g", "--n", "1..2", "--x-max", "10", *FAST],
        ["verify-monotone", "--family", "h", "--a", "0.5", "--b", "1.5", "--c", "0.25",
         "--x-max", "20", *FAST],
        ["scan-abc", "--a", "1", "--b", "1..3", "--c", "1", "--x-max", "10", *FAST],
        ["scan-pfq", "--a", "0.5", "--b", "2,3", "--c", "0.5,1;0,0", "--x-max", "10", *FAST],
    ])
    def test_validates(self, argv):
        code, doc = run_json(*argv)
        assert code in (EXIT_OK, EXIT_VIOLATION, EXIT_INCONCLUSIVE)
        assert doc["cells"]

    def test_out_file_matches_stdout(self, tmp_path):
        out = tmp_path / "scan.json"
        _, doc = run_json("scan-abc", "--a", "1", "--b", "3", "--c", "1", "--x-max", "10",
                          "--out", str(out), *FAST)
        assert json.loads(out.read_text()) == doc

    def test_resume_via_cli(self, tmp_path):
        out = str(tmp_path / "scan.json")
        args = ["scan-abc", "--a", "1", "--b", "2..3", "--c", "1", "--x-max", "10",
                "--out", out, *FAST]
        run(*args)
        _, doc = run_json(*args)
        assert doc["metadata"]["cells_computed_this_session"] == 0
        _, doc = run_json(*args, "--no-resume")
        assert doc["metadata"]["cells_computed_this_session"] == 2


class TestRoundTrip:
    @staticmethod
    def _check(printed: str, value, abs_err, digits: int) -> None:
        parsed = gmpy2.mpfr(printed, 400)
        d = Decimal(printed)
        granule = Decimal(1).scaleb(d.adjusted() - digits + 1) / 2
        with gmpy2.context(precision=400):
            assert abs(parsed - value) <= abs_err + gmpy2.mpfr(str(granule))

    @pytest.mark.parametrize("digits", [5, 17, 40])
    def test_eval(self, digits):
        _, doc = run_json("eval", "--a", "1", "--b", "3", "--x", "1", "--digits", str(digits))
        cell = doc["cells"][0]
        ref = kummer_1f1(1, 3, 1)
        self._check(cell["value"], ref.value, ref.abs_error_bound, digits)

    @pytest.mark.parametrize("digits", [5, 17, 40])
    def test_ratio(self, digits):
        _, doc = run_json("ratio", "--family", "f", "--n", "2", "--x", "3", "--digits", str(digits))
        cell = doc["cells"][0]
        ref = ratio_value(RatioSpec.f(2), 3)
        self._check(cell["value"], ref.value, cell["abs_error_bound"], digits)
        assert len(cell["value"].replace("0.", "").lstrip("0").replace(".", "")) <= digits


class TestCsv:
    def test_trace(self):
        _, text = run("verify-monotone", "--family", "f", "--n", "1", "--x-max", "5",
                      "--format", "csv", *FAST)
        lines = text.splitlines()
        assert lines[0] == "x,value,derivative,error_bound" and len(lines) > 10

    def test_trace_dir(self, tmp_path):
        run("scan-abc", "--a", "1", "--b", "3", "--c", "1", "--x-max", "5",
            "--trace-dir", str(tmp_path), *FAST)
        files = list(tmp_path.glob("*.csv"))
        assert len(files) == 1
        assert files[0].read_text().startswith("x,value,derivative,error_bound\n")

    def test_bounds_csv(self):
        _, text = run("verify-bounds", "--n", "1", "--x-max", "5", "--samples", "10",
                      "--format", "csv")
        assert text.splitlines()[0].startswith("n,x,value,error_bound")

    def test_scan_csv(self):
        _, text = run("scan-abc", "--a", "1", "--b", "3", "--c", "1", "--x-max", "5",
                      "--format", "csv", *FAST)
        header, row = text.splitlines()[:2]
        assert header.startswith("a,b,c,verdict") and ",increasing," in row


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kummerscan", "ratio", "--family", "g",
                           "--n", "1", "--x", "1"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("g_1(1) = 1.0904693927534437")


def test_help_exits_cleanly():
    proc = subprocess.run([sys.executable, "-m", "kummerscan", "--help"], capture_output=True,
                          text=True)
    assert proc.returncode == 0 and "scan-abc" in proc.stdout
