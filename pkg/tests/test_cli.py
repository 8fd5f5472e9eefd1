"""End-to-end tests of the command line front end.

Commands run in process through ``main`` so exit codes, produced files and
stdout can all be asserted without subprocess overhead.
"""

import json
import math
from pathlib import Path

import numpy as np
import pytest

import posfourier.boltzmann as boltzmann
import posfourier.cli as cli
from posfourier.cli import main
from posfourier.moments import MomentBasis
from posfourier.testfunctions import cosine_power, projection_errors


def read_csv(path: Path):
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]


def digest_of(path: Path) -> str:
    for line in path.read_text().splitlines():
        if line.startswith("# manifest-digest: "):
            return line.split(": ")[1]
    raise AssertionError(f"no digest header in {path}")


class TestArguments:
    def test_requires_subcommand(self):
        assert main([]) == 2

    def test_unknown_method_rejected(self, tmp_path):
        assert main(["bkw", "--method", "bogus", "--out", str(tmp_path)]) == 2

    def test_dim_must_be_three(self, tmp_path):
        rc = main(["convergence", "--dim", "2", "--q", "1", "--out", str(tmp_path)])
        assert rc == 2

    def test_unsorted_resolution_list_rejected(self, tmp_path):
        rc = main(["convergence", "--q", "1", "--n", "4,2", "--out", str(tmp_path)])
        assert rc == 2

    def test_single_run_takes_single_n(self, tmp_path):
        assert main(["bkw", "--n", "2,4", "--out", str(tmp_path)]) == 2

    def test_exponent_must_be_numeric_or_smooth(self, tmp_path):
        assert main(["convergence", "--q", "nope", "--out", str(tmp_path)]) == 2
        assert main(["convergence", "--q", "-1", "--out", str(tmp_path)]) == 2

    def test_invalid_domain_is_a_usage_error(self, tmp_path):
        # Half width below the dealiasing bound fails config validation.
        rc = main(
            ["bkw", "--n", "2", "--domain-half-width", "1.0", "--out", str(tmp_path)]
        )
        assert rc == 2

    def test_arguments_read_from_file(self, tmp_path):
        args_file = tmp_path / "run.args"
        out = tmp_path / "out"
        tokens = [
            "convergence", "--q", "0.8", "--n", "2", "--oversample", "64",
            "--out", str(out),
        ]
        args_file.write_text("\n".join(tokens) + "\n")
        assert main([f"@{args_file}"]) == 0
        assert (out / "convergence_q0.8.csv").exists()


class TestConvergenceCommand:
    def test_matches_library_values(self, tmp_path):
        rc = main(
            ["convergence", "--q", "0.8", "--n", "2,4", "--oversample", "512",
             "--out", str(tmp_path)]
        )
        assert rc == 0
        header, rows = read_csv(tmp_path / "convergence_q0.8.csv")
        assert header == [
            "n", "positive_gap", "moment_gap", "tail", "total", "order",
            "ssn_iters", "status",
        ]
        expected = projection_errors(cosine_power(0.8), 4, 512 * 4)
        assert float(rows[1][1]) == expected.positive_gap
        assert float(rows[1][3]) == expected.tail
        assert rows[0][5] == ""  # first row has no order
        order = math.log(float(rows[0][4]) / float(rows[1][4])) / math.log(2.0)
        assert float(rows[1][5]) == pytest.approx(order, rel=1e-12)
        assert rows[0][7] == rows[1][7] == "ok"

    def test_byte_identical_reruns(self, tmp_path):
        argv = ["convergence", "--q", "1", "--n", "1,2", "--oversample", "64"]
        assert main(argv + ["--out", str(tmp_path / "a")]) == 0
        assert main(argv + ["--out", str(tmp_path / "b")]) == 0
        first = (tmp_path / "a/convergence_q1.csv").read_bytes()
        second = (tmp_path / "b/convergence_q1.csv").read_bytes()
        assert first == second

    def test_digest_tracks_parameters(self, tmp_path):
        main(["convergence", "--q", "1", "--n", "1", "--oversample", "64",
              "--out", str(tmp_path / "a")])
        main(["convergence", "--q", "1", "--n", "2", "--oversample", "64",
              "--out", str(tmp_path / "b")])
        assert digest_of(tmp_path / "a/convergence_q1.csv") != digest_of(
            tmp_path / "b/convergence_q1.csv"
        )

    def test_manifest_lists_outputs_and_digest(self, tmp_path):
        main(["convergence", "--q", "1", "--n", "1", "--oversample", "64",
              "--out", str(tmp_path), "--plot-scripts"])
        manifest = json.loads((tmp_path / "manifest_convergence_q1.json").read_text())
        assert manifest["outputs"] == [
            "convergence_q1.csv", "convergence_q1.csv.gnuplot",
        ]
        assert manifest["digest"] == digest_of(tmp_path / "convergence_q1.csv")
        assert manifest["wall_time_s"] > 0
        assert (tmp_path / "convergence_q1.csv.gnuplot").exists()

    def test_failed_row_continues_and_flags_exit(self, tmp_path, monkeypatch):
        real = cli.projection_errors

        def flaky(sf, modes, *args, **kwargs):
            if modes == 2:
                raise RuntimeError("forced failure")
            return real(sf, modes, *args, **kwargs)

        monkeypatch.setattr(cli, "projection_errors", flaky)
        rc = main(["convergence", "--q", "0.8", "--n", "1,2,4", "--oversample",
                   "64", "--out", str(tmp_path)])
        assert rc == 1
        _, rows = read_csv(tmp_path / "convergence_q0.8.csv")
        assert [row[7] for row in rows] == ["ok", "error", "ok"]
        assert rows[1][1] == ""  # failed row carries no numbers
        assert float(rows[2][5]) != 0.0  # order bridges over the failed row

    def test_trace_written(self, tmp_path):
        trace = tmp_path / "trace.csv"
        main(["convergence", "--q", "0.8", "--n", "2", "--oversample", "64",
              "--out", str(tmp_path), "--trace", str(trace)])
        header = trace.read_text().splitlines()[0]
        assert header.startswith("iteration,objective,grad_norm")


class TestRelaxationCommands:
    def test_bkw_series_and_summary(self, tmp_path):
        rc = main(["bkw", "--n", "2", "--scheme", "euler", "--t-final", "0.05",
                   "--out", str(tmp_path)])
        assert rc == 0
        header, rows = read_csv(tmp_path / "bkw_positive_n2_series.csv")
        assert header == ["t", "l2_err", "moment_err", "min_val", "ssn_iters"]
        assert len(rows) == 6  # initial state plus five steps
        for row in rows:
            assert row[1] != ""  # closed-form solution available
            assert float(row[2]) <= 1e-12
            assert float(row[3]) >= 0.0
        _, summary = read_csv(tmp_path / "bkw_positive_n2_summary.csv")
        assert summary[0][1] == "positive" and summary[0][2] == "euler"
        assert float(summary[0][0]) == 2

    def test_spectral_run_uses_no_solver(self, tmp_path):
        main(["bkw", "--n", "2", "--method", "spectral", "--scheme", "euler",
              "--t-final", "0.02", "--out", str(tmp_path)])
        _, rows = read_csv(tmp_path / "bkw_spectral_n2_series.csv")
        assert all(row[4] == "0" for row in rows)

    def test_riemann_slice_and_blank_errors(self, tmp_path):
        rc = main(["riemann", "--n", "2", "--t-final", "0.02",
                   "--out", str(tmp_path)])
        assert rc == 0
        header, rows = read_csv(tmp_path / "riemann_positive_n2_slice.csv")
        assert header == ["v1", "f"]
        assert len(rows) == 5
        assert all(float(row[1]) >= 0.0 for row in rows)
        v1 = [float(row[0]) for row in rows]
        assert v1 == sorted(v1) and v1[0] < 0.0 < v1[-1]
        _, series = read_csv(tmp_path / "riemann_positive_n2_series.csv")
        assert all(row[1] == "" for row in series)  # no exact solution

    def test_long_run_gate(self, tmp_path, capsys):
        rc = main(["bkw", "--n", "16", "--out", str(tmp_path)])
        assert rc == 2
        assert "--confirm-long" in capsys.readouterr().err
        assert not list(tmp_path.glob("*.csv"))

    def test_solver_failure_exit_code(self, tmp_path, monkeypatch):
        def explode(cfg, ssn_params=None):
            raise boltzmann.NonFiniteState("forced blow-up")

        monkeypatch.setattr(cli, "run_simulation", explode)
        rc = main(["bkw", "--n", "2", "--t-final", "0.01", "--out", str(tmp_path)])
        assert rc == 1


class TestSelftest:
    def test_all_suites_pass(self, capsys):
        assert main(["selftest"]) == 0
        out = capsys.readouterr().out
        passes = [ln for ln in out.splitlines() if ": pass" in ln]
        assert len(passes) >= 8
        assert f"{len(cli._SUITES)}/{len(cli._SUITES)} suites passed" in out

    def test_threshold_canary(self, capsys, monkeypatch):
        # A build with the kernel branch thresholds disabled must fail the
        # singular-line continuity suite and nothing else.
        monkeypatch.setattr(boltzmann, "_SMALL", 0.0)
        monkeypatch.setattr(boltzmann, "_DIAG", 0.0)
        assert main(["selftest"]) == 1
        out = capsys.readouterr().out
        assert "kernel-singular-lines: FAIL" in out
        failures = [ln for ln in out.splitlines() if "FAIL" in ln]
        assert len(failures) == 1
