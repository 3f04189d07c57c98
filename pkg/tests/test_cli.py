import io
import json
import math
import os
import re
from pathlib import Path

import pytest

from kolmbound import __version__
from kolmbound.cli import EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, HANDLERS, build_parser, run
from kolmbound.spline_kernel import BaseSpline

GOLDEN = Path(__file__).parent / "golden" / "help.txt"


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def collect_help():
    parser = build_parser()
    chunks = [("kolmbound", parser.format_help())]
    top = next(a for a in parser._actions if a.dest == "group")
    for gname, gparser in top.choices.items():
        chunks.append((f"kolmbound {gname}", gparser.format_help()))
        sub = next(a for a in gparser._actions if a.dest == "cmd")
        for cname, cparser in sub.choices.items():
            chunks.append((f"kolmbound {gname} {cname}", cparser.format_help()))
    return "".join(f"===== {title}\n{text}\n" for title, text in chunks)


class TestExamples:
    def test_bounded_compute(self):
        code, out, err = invoke("bound", "compute", "--profile", "bounded", "--A", "1", "--m", "1", "--dm", "0.005", "--format", "json")
        data = json.loads(out)
        assert code == EXIT_OK and err == ""
        assert data["bound"] == "0.1" and data["valid"] is True

    def test_spline_verify(self):
        code, out, _ = invoke("spline", "verify", "--m", "5", "--tol", "1e-10")
        assert code == EXIT_OK and json.loads(out)["passed"] is True

    def test_power_out_of_range(self):
        code, out, err = invoke("bound", "compute", "--profile", "power", "--A", "1", "--a", "1.5", "--m", "1", "--dm", "0.01")
        assert code == EXIT_USAGE and out == "" and "error" in err


class TestExitCodes:
    @pytest.mark.parametrize(
        "argv",
        [
            ("bound",),
            ("frobnicate",),
            ("bound", "compute", "--profile", "bounded", "--A", "1", "--m", "1"),
            ("bound", "compute", "--profile", "bounded", "--A", "1", "--m", "0", "--dm", "0.1"),
            ("bound", "compute", "--profile", "bounded", "--A", "1", "--m", "1", "--dm", "0.1", "--bogus"),
            ("bound", "target", "--target", "beta", "--alpha", "2", "--m", "1", "--dm", "0.1"),
            ("validate", "nazarov", "--dim", "51"),
            ("spline", "verify", "--m", "2", "--tol", "-1"),
        ],
    )
    def test_usage(self, argv):
        code, out, err = invoke(*argv)
        assert code == EXIT_USAGE and out == "" and err

    def test_invalid_gate_is_not_fatal(self):
        code, out, _ = invoke("bound", "compute", "--profile", "bounded", "--A", "1", "--m", "1", "--dm", "0.9")
        assert code == EXIT_OK and json.loads(out)["valid"] is False

    def test_violation_exit(self, monkeypatch):
        # a spline whose top derivative is scaled fails certification
        import kolmbound.cli as cli

        real = cli._build_pp

        def broken(m):
            pp = real(m)
            return type(pp)(pp.breaks, [[c * 1.01 for c in row] for row in pp.coeffs], pp.degree)

        monkeypatch.setattr(cli, "_build_pp", broken)
        code, out, _ = invoke("spline", "verify", "--m", "3")
        assert code == EXIT_VIOLATION and json.loads(out)["passed"] is False

    def test_version(self, capsys):
        assert invoke("--version")[0] == EXIT_OK
        assert __version__ in capsys.readouterr().out


class TestSubcommands:
    def test_spline_build_roundtrip(self):
        code, out, _ = invoke("spline", "build", "--m", "3")
        base = BaseSpline.from_json(out)
        assert code == EXIT_OK and base.m == 3
        assert float(base(0.0)) == pytest.approx(0.5, abs=1e-15)

    def test_constants_csv(self):
        code, out, _ = invoke("constants", "dump", "--m", "4", "--format", "csv")
        lines = out.splitlines()
        assert code == EXIT_OK and len(lines) == 5
        assert lines[0].split(",")[0] == "m"

    def test_constants_json(self):
        rows = json.loads(invoke("constants", "dump", "--m", "3")[1])
        assert [r["m"] for r in rows] == [1, 2, 3]

    def test_beta_target_includes_universal(self):
        code, out, _ = invoke("bound", "target", "--target", "beta", "--alpha", "1", "--beta", "1", "--m", "1", "--dm", "0.01")
        data = json.loads(out)
        assert code == EXIT_OK and len(data) == 2
        assert float(data[1]["bound"]) == pytest.approx(0.2, rel=1e-14)

    def test_normal_target(self):
        code, out, _ = invoke("bound", "target", "--target", "normal", "--m", "1", "--dm", "0.001")
        assert code == EXIT_OK
        assert float(json.loads(out)["bound"]) == pytest.approx(math.sqrt(2 * 0.001 / math.sqrt(2 * math.pi)), rel=1e-14)

    def test_mvn_and_pair(self):
        assert invoke("bound", "mvn", "--dim", "3", "--m", "2", "--dm", "1e-4")[0] == EXIT_OK
        code, out, _ = invoke(
            "bound", "pair", "--A", "1", "--B", "1", "--C", "1", "--dim", "2",
            "--sigma", "1", "--sigma-star", "1", "--sigma-norm", "1",
        )
        assert code == EXIT_OK and len(json.loads(out)) >= 2

    def test_validate_urn_csv(self):
        code, out, _ = invoke("validate", "urn", "--alpha", "2", "--beta", "3", "--n", "10", "100", "--format", "csv")
        lines = out.splitlines()
        assert code == EXIT_OK and len(lines) == 3 and lines[1].startswith("urn,")

    def test_validate_clt_text(self):
        code, out, _ = invoke("validate", "clt", "--n", "25", "100", "--format", "text")
        assert code == EXIT_OK and out.count("holds=True") == 2

    def test_validate_nazarov_and_mvn(self):
        assert invoke("validate", "nazarov", "--dim", "5", "--grid", "2000")[0] == EXIT_OK
        assert invoke("validate", "mvn-disc", "--dim", "2", "--h", "0.2", "0.05")[0] == EXIT_OK

    def test_out_file(self, tmp_path):
        target = tmp_path / "bound.json"
        code, out, _ = invoke("bound", "compute", "--profile", "bounded", "--A", "1", "--m", "1", "--dm", "0.005", "--out", str(target))
        assert code == EXIT_OK and out == ""
        assert json.loads(target.read_text())["bound"] == "0.1"


class TestDeterminism:
    @pytest.mark.parametrize(
        "argv",
        [
            ("validate", "clt", "--dist", "exponential-centered", "--n", "10", "--n-mc", "5000", "--seed", "7"),
            ("validate", "nazarov", "--dim", "3", "--grid", "1000", "--seed", "3"),
            ("validate", "urn", "--alpha", "1", "--beta", "2", "--t", "2", "--n", "100", "--format", "csv"),
            ("constants", "dump", "--m", "8", "--format", "csv"),
        ],
    )
    def test_byte_identical(self, argv):
        first, second = invoke(*argv)[1], invoke(*argv)[1]
        assert first.encode() == second.encode() and first

    def test_different_seed_differs(self):
        base = ("validate", "clt", "--dist", "uniform", "--n", "3", "--n-mc", "2000")
        assert invoke(*base, "--seed", "1")[1] != invoke(*base, "--seed", "2")[1]


class TestHelp:
    def test_golden(self, monkeypatch):
        monkeypatch.setenv("COLUMNS", "100")
        text = collect_help()
        if os.environ.get("KOLMBOUND_REGEN_GOLDEN"):
            GOLDEN.write_text(text)
        assert text == GOLDEN.read_text()

    def test_every_subcommand_present(self, monkeypatch):
        monkeypatch.setenv("COLUMNS", "100")
        text = collect_help()
        for group, cmd in HANDLERS:
            assert f"===== kolmbound {group} {cmd}\n" in text

    @pytest.mark.parametrize(
        "flag",
        ["--m", "--dm", "--A", "--c", "--a", "--b", "--eps", "--B", "--dim", "--sigma", "--alpha", "--beta",
         "--t", "--n", "--r", "--theta", "--mu", "--seed", "--format", "--tol", "--strict", "--no-strict", "--out"],
    )
    def test_flag_documented(self, flag, monkeypatch):
        monkeypatch.setenv("COLUMNS", "100")
        assert re.search(rf"(?<![\w-]){re.escape(flag)}(?![\w-])", collect_help())
