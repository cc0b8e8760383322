"""CLI: configuration validation, artifacts, determinism, exit codes."""

import json
import math
import shutil
from pathlib import Path

import pytest

from qndsim.cli import main
from qndsim.io import read_csv

TWO_PI = 2.0 * math.pi
CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(args):
    return main([str(a) for a in args])


@pytest.fixture
def outdir(tmp_path):
    return tmp_path / "out"


def base_config():
    return json.loads((CONFIGS / "reference_setup.json").read_text())


def write_config(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return p


class TestConfigValidation:
    def test_unknown_key_rejected(self, tmp_path, outdir):
        cfg = base_config()
        cfg["circuit"]["bogus_element"] = 1.0
        path = write_config(tmp_path, cfg)
        assert run(["metrics", "--config", path, "--out", outdir]) == 2
        assert not (outdir / "merit_report.json").exists()

    def test_missing_file(self, outdir):
        assert run(["metrics", "--config", "/nonexistent.json",
                    "--out", outdir]) == 2

    def test_malformed_json(self, tmp_path, outdir):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        assert run(["metrics", "--config", p, "--out", outdir]) == 2

    def test_type_errors(self, tmp_path, outdir):
        cfg = base_config()
        cfg["membrane"]["frequency_hz"] = "eighty megahertz"
        path = write_config(tmp_path, cfg)
        assert run(["metrics", "--config", path, "--out", outdir]) == 2

    def test_missing_section_for_subcommand(self, tmp_path, outdir):
        cfg = base_config()  # no measurement section
        path = write_config(tmp_path, cfg)
        assert run(["measure", "--config", path, "--out", outdir]) == 2


class TestMetricsCommand:
    def test_reference_lambda(self, tmp_path, outdir, capsys):
        path = write_config(tmp_path, base_config())
        assert run(["metrics", "--config", path, "--out", outdir]) == 0
        out = capsys.readouterr().out
        assert "lambda = 121.6" in out
        doc = json.loads((outdir / "merit_report.json").read_text())
        assert doc["lambda_total"] == pytest.approx(121.6, rel=0.01)
        assert "manifest" in doc

    def test_driveless_config(self, tmp_path, outdir):
        cfg = base_config()
        del cfg["drive"]
        path = write_config(tmp_path, cfg)
        assert run(["metrics", "--config", path, "--out", outdir]) == 0
        doc = json.loads((outdir / "merit_report.json").read_text())
        assert doc["D_sq"] is None

    def test_csv_round_trip(self, tmp_path, outdir):
        path = write_config(tmp_path, base_config())
        run(["metrics", "--config", path, "--out", outdir])
        cols, rows, manifest = read_csv(outdir / "metrics.csv")
        assert manifest
        doc = json.loads((outdir / "merit_report.json").read_text())
        assert rows[0]["lambda_total"] == doc["lambda_total"]  # bitwise


class TestPlanCommand:
    def test_balance_plan(self, tmp_path, outdir):
        path = CONFIGS / "plan_balance.json"
        assert run(["plan", "--config", path, "--out", outdir]) == 0
        doc = json.loads((outdir / "plan.json").read_text())
        assert doc["alpha_sq_total"] == pytest.approx(4.5e11, rel=0.15)
        assert doc["N_e"] == pytest.approx(1.0, rel=1e-9)

    def test_infeasible_is_numeric_failure(self, tmp_path, outdir):
        cfg = json.loads((CONFIGS / "plan_balance.json").read_text())
        cfg["membrane"]["n_bar_m"] = 3.0
        cfg["plan"] = {"delta_nb": 1e-6, "time": 1.0}
        path = write_config(tmp_path, cfg)
        assert run(["plan", "--config", path, "--out", outdir]) == 3


class TestMeasureCommand:
    def _cfg(self, windows=4000):
        cfg = json.loads((CONFIGS / "measure_default.json").read_text())
        cfg["measurement"]["windows"] = windows
        return cfg

    def test_artifacts_and_schema(self, tmp_path, outdir):
        path = write_config(tmp_path, self._cfg())
        assert run(["measure", "--config", path, "--out", outdir]) == 0
        cols, rows, _ = read_csv(outdir / "histogram.csv")
        assert cols == ["bin_left", "bin_right", "count", "density",
                        "poisson_err"]
        assert sum(r["count"] for r in rows) == 4000
        cols, _, _ = read_csv(outdir / "pdf.csv")
        assert cols == ["v_over_sigma", "density"]

    def test_byte_identical_across_runs_and_threads(self, tmp_path, outdir):
        path = write_config(tmp_path, self._cfg())
        a, b = outdir / "a", outdir / "b"
        assert run(["measure", "--config", path, "--out", a,
                    "--threads", 1]) == 0
        assert run(["measure", "--config", path, "--out", b,
                    "--threads", 8]) == 0
        assert (a / "histogram.csv").read_bytes() == \
            (b / "histogram.csv").read_bytes()
        assert (a / "measure_summary.json").read_bytes() == \
            (b / "measure_summary.json").read_bytes()

    def test_seed_changes_histogram(self, tmp_path, outdir):
        path = write_config(tmp_path, self._cfg())
        a, b = outdir / "a", outdir / "b"
        run(["measure", "--config", path, "--out", a, "--seed", 1])
        run(["measure", "--config", path, "--out", b, "--seed", 2])
        assert (a / "histogram.csv").read_bytes() != \
            (b / "histogram.csv").read_bytes()


class TestOptimizeCommand:
    def test_analytic_table(self, tmp_path, outdir):
        cfg = base_config()
        cfg["optimization"] = {"lambda_primes": [100.0, 300.0], "n_eff": 1.0}
        path = write_config(tmp_path, cfg)
        assert run(["optimize", "--config", path, "--out", outdir]) == 0
        _, rows, _ = read_csv(outdir / "optimize.csv")
        assert rows[0]["delta_nb_opt"] == pytest.approx(0.27, rel=0.2)
        assert rows[1]["delta_nb_opt"] == pytest.approx(0.12, rel=0.2)


class TestSweepCommand:
    def test_planner_table(self, outdir):
        path = CONFIGS / "planner_sweep.json"
        assert run(["sweep", "--config", path, "--out", outdir,
                    "--threads", 2]) == 0
        cols, rows, _ = read_csv(outdir / "sweep.csv")
        assert len(rows) == 4 * 3  # grid x quality values, no drops
        by_key = {(r["Cs_over_C0"], r["quality_Q"]): r for r in rows}
        assert by_key[(100.0, 1e6)]["intracavity_photons"] < \
            by_key[(1000.0, 1e6)]["intracavity_photons"]
        assert by_key[(100.0, 1e6)]["strong_coupling_boundary_Cs"] == \
            pytest.approx(3.77, rel=0.01)

    def test_manifest_stability(self, tmp_path, outdir):
        path = CONFIGS / "planner_sweep.json"
        a, b = outdir / "a", outdir / "b"
        run(["sweep", "--config", path, "--out", a, "--threads", 1])
        run(["sweep", "--config", path, "--out", b, "--threads", 4])
        assert (a / "sweep.csv").read_bytes() == (b / "sweep.csv").read_bytes()
