"""Command-line interface: run, sweep-gain, validate."""

import csv

import pytest
import yaml

from pcosync.cli import main


@pytest.fixture
def scenario_file(tmp_path):
    data = {"name": "cli-smoke", "seed": 3, "n_nodes": 4, "area_side_m": 50.0,
            "protocol": "both", "duration_s": 600.0, "sample_interval_s": 100.0}
    path = tmp_path / "smoke.yaml"
    with open(path, "w") as fh:
        yaml.safe_dump(data, fh)
    return path


class TestRun:
    def test_writes_metrics_and_summary(self, tmp_path, scenario_file, capsys):
        out = tmp_path / "results"
        rc = main(["run", "--scenario", str(scenario_file), "--out-dir", str(out)])
        assert rc == 0
        assert (out / "cli-smoke.pco.metrics.csv").exists()
        assert (out / "cli-smoke.broadcast.metrics.csv").exists()
        assert (out / "cli-smoke.summary.csv").exists()
        text = capsys.readouterr().out
        assert "energy_ratio_broadcast_over_pco" in text

    def test_rerun_byte_identical(self, tmp_path, scenario_file):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            assert main(["run", "--scenario", str(scenario_file),
                         "--out-dir", str(out), "--quiet"]) == 0
        for name in ("cli-smoke.pco.metrics.csv", "cli-smoke.broadcast.metrics.csv",
                     "cli-smoke.summary.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_seed_override_changes_output(self, tmp_path, scenario_file):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["run", "--scenario", str(scenario_file),
                     "--out-dir", str(out1), "--quiet"]) == 0
        assert main(["run", "--scenario", str(scenario_file),
                     "--out-dir", str(out2), "--seed", "99", "--quiet"]) == 0
        a = (out1 / "cli-smoke.pco.metrics.csv").read_bytes()
        b = (out2 / "cli-smoke.pco.metrics.csv").read_bytes()
        assert a != b

    def test_missing_scenario_fails(self, tmp_path):
        rc = main(["run", "--scenario", str(tmp_path / "nope.yaml"),
                   "--out-dir", str(tmp_path)])
        assert rc == 2

    def test_metric_csv_columns(self, tmp_path, scenario_file):
        out = tmp_path / "results"
        main(["run", "--scenario", str(scenario_file), "--out-dir", str(out),
              "--quiet"])
        with open(out / "cli-smoke.pco.metrics.csv") as fh:
            header = next(csv.reader(fh))
        assert header == ["t_s", "pos", "tts_ms", "clock_var_s2", "density_per_m2",
                          "energy_tx_J", "energy_rx_J", "energy_startup_J",
                          "sync_eff_per_W"]


class TestSweepGain:
    def test_writes_curve_csv(self, tmp_path):
        out = tmp_path / "gain.csv"
        rc = main(["sweep-gain", "--n-min", "10", "--n-max", "1000",
                   "--n-points", "10", "--delta", "2,3", "--out", str(out),
                   "--quiet"])
        assert rc == 0
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        assert {r["exponent"] for r in rows} == {"2.0", "3.0"}
        for exp in ("2.0", "3.0"):
            vals = [float(r["gain"]) for r in rows if r["exponent"] == exp]
            assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_explicit_n_values(self, tmp_path):
        out = tmp_path / "gain.csv"
        rc = main(["sweep-gain", "--n-values", "612", "--delta", "2",
                   "--out", str(out), "--quiet"])
        assert rc == 0
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 1
        assert rows[0]["n"] == "612"

    def test_aggregate_mode_falls_for_exponent_two(self, tmp_path):
        out = tmp_path / "gain.csv"
        rc = main(["sweep-gain", "--n-min", "10", "--n-max", "10000",
                   "--n-points", "8", "--delta", "2", "--mode", "aggregate-sum",
                   "--out", str(out), "--quiet"])
        assert rc == 0
        with open(out) as fh:
            vals = [float(r["gain"]) for r in csv.DictReader(fh)]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_unknown_mode_rejected(self, tmp_path):
        rc = main(["sweep-gain", "--mode", "bogus",
                   "--out", str(tmp_path / "g.csv"), "--quiet"])
        assert rc == 2


class TestValidate:
    def test_valid_scenario_ok(self, scenario_file):
        assert main(["validate", "--scenario", str(scenario_file)]) == 0

    def test_invalid_scenario_rejected(self, tmp_path, capsys):
        path = tmp_path / "bad.yaml"
        with open(path, "w") as fh:
            yaml.safe_dump({"name": "bad", "seed": 1, "pco": {"x_th": -1}}, fh)
        assert main(["validate", "--scenario", str(path)]) == 2
        assert "x_th" in capsys.readouterr().err
