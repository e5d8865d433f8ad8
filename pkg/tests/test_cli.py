"""Command-line interface: grammar, formats, exit codes, files, figures."""

from __future__ import annotations

import json
import math

import numpy as np
import pytest

from meanscope.cli import CliConfig, export_plot_data, run
from meanscope.funcspace import DomainTag, corpus_lookup
from meanscope.summability import MethodId, chain_report, verdict


def run_capture(capsys, argv):
    rc = run(argv)
    out = capsys.readouterr()
    return rc, out.out, out.err


class TestBasicCommands:
    def test_corpus_list(self, capsys):
        rc, out, _ = run_capture(capsys, ["corpus", "list"])
        assert rc == 0
        for label in ("sin", "sinlog", "dyadic-indicator",
                      "dyadic-indicator-log", "decay", "const:1"):
            assert label in out

    def test_verdict_json(self, capsys):
        rc, out, _ = run_capture(
            capsys, ["verdict", "--fn", "const:1", "--method", "cesaro",
                     "--format", "json"])
        assert rc == 0
        payload = json.loads(out)
        assert payload["status"] == "converges"
        assert abs(payload["value"] - 1.0) <= payload["tol"]

    def test_chain_csv_row_count(self, capsys):
        rc, out, _ = run_capture(
            capsys, ["chain", "--fn", "const:1", "--domain", "multiplicative",
                     "--kmax", "6", "--format", "csv"])
        assert rc == 0
        lines = [ln for ln in out.strip().splitlines() if ln]
        assert len(lines) == 9  # header + holder:1..6 + holder-limit + log-cesaro
        assert lines[0].split(",")[:3] == ["function", "method", "status"]

    def test_eval_kernel_trace(self, capsys):
        rc, out, _ = run_capture(
            capsys, ["eval", "--fn", "sin", "--op", "kernel:3",
                     "--from", "0", "--to", "50", "--points", "11",
                     "--format", "csv"])
        assert rc == 0
        lines = out.strip().splitlines()
        assert len(lines) == 12
        vals = [float(ln.split(",")[1]) for ln in lines[1:]]
        assert all(-1.0 <= v <= 1.0 for v in vals)

    def test_kernel_table_order_one(self, capsys):
        rc, out, _ = run_capture(
            capsys, ["kernel", "--n", "1", "--from", "0", "--to", "5",
                     "--points", "6", "--format", "csv"])
        assert rc == 0
        rows = [ln.split(",") for ln in out.strip().splitlines()[1:]]
        for x_str, v_str in rows:
            assert float(v_str) == pytest.approx(math.exp(-float(x_str)),
                                                 abs=1e-12)

    def test_cesaro_trace_of_constant(self, capsys):
        rc, out, _ = run_capture(
            capsys, ["eval", "--fn", "const:1", "--op", "cesaro",
                     "--from", "1", "--to", "101", "--points", "5",
                     "--format", "csv"])
        assert rc == 0
        rows = [ln.split(",") for ln in out.strip().splitlines()[1:]]
        for x_str, v_str in rows:
            x = float(x_str)
            expect = 1.0 if x == 1.0 else 1.0 - 1.0 / x
            assert float(v_str) == pytest.approx(expect, abs=1e-9)


class TestExitCodes:
    def test_unknown_label(self, capsys):
        rc, _, err = run_capture(
            capsys, ["verdict", "--fn", "mystery", "--method", "cesaro"])
        assert rc == 2
        assert "mystery" in err

    def test_unknown_method(self, capsys):
        rc, _, err = run_capture(
            capsys, ["verdict", "--fn", "sin", "--method", "banach"])
        assert rc == 2
        assert "banach" in err

    def test_unknown_op(self, capsys):
        rc, _, err = run_capture(
            capsys, ["eval", "--fn", "sin", "--op", "fourier",
                     "--from", "0", "--to", "1", "--points", "2"])
        assert rc == 2
        assert "fourier" in err

    def test_unknown_flag_exits_two(self):
        with pytest.raises(SystemExit) as exc:
            run(["verdict", "--fn", "sin", "--method", "exp", "--bogus"])
        assert exc.value.code == 2

    def test_bad_range(self, capsys):
        rc, _, err = run_capture(
            capsys, ["eval", "--fn", "sin", "--op", "exp",
                     "--from", "5", "--to", "1", "--points", "3"])
        assert rc == 2

    def test_numerical_failure_exits_three(self, capsys, tmp_path):
        cfg = tmp_path / "strict.cfg"
        cfg.write_text("quad_abs_tol = 1e-300\nquad_rel_tol = 1e-300\n"
                       "quad_max_subdivisions = 2\n")
        rc, _, err = run_capture(
            capsys, ["eval", "--fn", "decay", "--op", "window:1",
                     "--from", "0", "--to", "10", "--points", "5",
                     "--config", str(cfg)])
        assert rc == 3
        assert "numerical" in err


class TestConfigFile:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "lab.cfg"
        path.write_text("# schedule tweaks\n"
                        "window_count = 12\n"
                        "verdict_tol = 0.05\n"
                        "format = json\n")
        cfg = CliConfig.from_file(str(path))
        assert cfg.window_count == 12
        assert cfg.verdict_tol == 0.05
        assert cfg.format == "json"
        assert cfg.theta_growth == 2.0  # untouched default

    def test_unknown_key_is_an_error(self, capsys, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("window_cout = 12\n")
        rc, _, err = run_capture(
            capsys, ["corpus", "list", "--config", str(path)])
        assert rc == 2
        assert "window_cout" in err

    def test_flags_override_file(self, capsys, tmp_path):
        path = tmp_path / "lab.cfg"
        path.write_text("format = json\n")
        rc, out, _ = run_capture(
            capsys, ["corpus", "list", "--config", str(path),
                     "--format", "csv"])
        assert rc == 0
        assert out.splitlines()[0] == "label,domain,bound,smoothness"


class TestFilesAndFigures:
    def test_idempotent_output_files(self, tmp_path, capsys):
        args = ["chain", "--fn", "const:1", "--domain", "multiplicative",
                "--kmax", "3", "--format", "json"]
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        assert run(args + ["--out", str(p1)]) == 0
        assert run(args + ["--out", str(p2)]) == 0
        assert p1.read_bytes() == p2.read_bytes()

    def test_chain_writes_figure(self, tmp_path):
        out = tmp_path / "report.json"
        rc = run(["chain", "--fn", "const:1", "--domain", "multiplicative",
                  "--kmax", "2", "--format", "json", "--out", str(out)])
        assert rc == 0
        fig = out.with_suffix(".png")
        assert fig.exists() and fig.stat().st_size > 0

    def test_no_plot_skips_figure(self, tmp_path):
        out = tmp_path / "report.csv"
        rc = run(["eval", "--fn", "sin", "--op", "exp", "--from", "0",
                  "--to", "10", "--points", "5", "--format", "csv",
                  "--out", str(out), "--no-plot"])
        assert rc == 0
        assert out.exists()
        assert not out.with_suffix(".png").exists()

    def test_eval_out_writes_data_and_figure(self, tmp_path):
        out = tmp_path / "trace.csv"
        rc = run(["eval", "--fn", "sin", "--op", "window:2", "--from", "0",
                  "--to", "20", "--points", "9", "--format", "csv",
                  "--out", str(out)])
        assert rc == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "x,value"
        assert len(lines) == 10
        assert out.with_suffix(".png").exists()


class TestExportPlotData:
    def test_trace_csv_digits(self, tmp_path):
        path = tmp_path / "t.csv"
        export_plot_data([(0.0, 1.0 / 3.0), (1.5, 2.0 / 3.0)], "csv", path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "x,value"
        assert lines[1] == "0,0.333333333333"
        assert lines[2] == "1.5,0.666666666667"
        assert path.with_suffix(".png").exists()

    def test_tower_columns(self, tmp_path, const_mult_fn):
        report = chain_report(const_mult_fn, k_max=3)
        path = tmp_path / "tower.csv"
        export_plot_data(report, "csv", path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "k,upper,lower"
        assert len(lines) == 4

    def test_bad_format_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            export_plot_data([(0.0, 1.0)], "xml", tmp_path / "t.xml")


class TestCliMatchesLibrary:
    def test_verdict_values_identical(self, capsys, dyadic_fn):
        rc, out, _ = run_capture(
            capsys, ["verdict", "--fn", "dyadic-indicator",
                     "--method", "cesaro", "--format", "json"])
        assert rc == 0
        payload = json.loads(out)
        v = verdict(dyadic_fn, MethodId("cesaro"),
                    tol=CliConfig().verdict_tol)
        assert payload["status"] == v.status
        assert payload["upper"] == float(f"{v.upper:.12g}")
        assert payload["lower"] == float(f"{v.lower:.12g}")
