import csv
import json

import numpy as np
import pytest

from sgpl.cli import main
from sgpl.dgp import DGPSpec, gen_dataset
from sgpl.harness import write_points_csv


@pytest.fixture()
def sim_config(tmp_path):
    cfg = {
        "n_values": [500],
        "lambda_sem_values": [0.0],
        "patterns": ["uniform"],
        "reps": 3,
        "master_seed": 11,
        "grid": {"resolution": 5},
        "sampler": {"q_target": 40},
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return path


class TestSimulateCommand:
    def test_writes_outputs(self, sim_config, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["simulate", str(sim_config), "--outdir", str(out)]) == 0
        assert (out / "metrics.csv").exists()
        assert (out / "replicates.csv").exists()
        assert (out / "estimates.png").exists()
        assert "slope mean" in capsys.readouterr().out

    def test_no_figures_flag(self, sim_config, tmp_path):
        out = tmp_path / "nofig"
        assert main(["simulate", str(sim_config), "--outdir", str(out), "--no-figures"]) == 0
        assert not (out / "estimates.png").exists()

    def test_bad_config_is_input_error(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{"n_values": [10]}')
        assert main(["simulate", str(path)]) == 1
        assert "error" in capsys.readouterr().err

    def test_missing_file_is_input_error(self):
        assert main(["simulate", "nope.json"]) == 1


class TestFitCommand:
    def test_fit_synthetic(self, tmp_path, capsys):
        path = tmp_path / "pts.csv"
        spec = DGPSpec(n=1500, pattern="uniform", lambda_sem=0.0, sigma_eps2=0.05, seed=1)
        write_points_csv(gen_dataset(spec), path)
        out = tmp_path / "fit"
        rc = main(
            [
                "fit", str(path), "--x-col", "x", "--y-col", "y",
                "--resolution", "6", "--q-target", "100", "--runs", "5",
                "--outdir", str(out), "--no-figures",
            ]
        )
        assert rc == 0
        assert (out / "fit_runs.csv").exists()
        with open(out / "fit_runs.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 5
        assert "averaged estimates" in capsys.readouterr().out

    def test_constant_y_is_numerical_failure(self, tmp_path, capsys):
        path = tmp_path / "const.csv"
        rng = np.random.default_rng(0)
        lines = ["px,py,x,y"]
        for _ in range(300):
            lines.append(f"{rng.random()},{rng.random()},{rng.normal()},7.0")
        path.write_text("\n".join(lines) + "\n")
        rc = main(
            [
                "fit", str(path), "--x-col", "x", "--y-col", "y",
                "--resolution", "4", "--q-target", "20", "--runs", "1",
                "--outdir", str(tmp_path / "o"), "--no-figures",
            ]
        )
        assert rc == 2
        assert "numerical failure" in capsys.readouterr().err

    def test_missing_column_is_input_error(self, tmp_path):
        path = tmp_path / "pts.csv"
        spec = DGPSpec(n=100, pattern="uniform", lambda_sem=0.0, seed=2)
        write_points_csv(gen_dataset(spec), path)
        rc = main(
            [
                "fit", str(path), "--x-col", "sqft", "--y-col", "y",
                "--outdir", str(tmp_path / "o"), "--no-figures",
            ]
        )
        assert rc == 1

    def test_cell_edge_override(self, tmp_path):
        path = tmp_path / "pts.csv"
        spec = DGPSpec(n=1500, pattern="uniform", lambda_sem=0.0, sigma_eps2=0.05, seed=3)
        write_points_csv(gen_dataset(spec), path)
        rc = main(
            [
                "fit", str(path), "--x-col", "x", "--y-col", "y",
                "--cell-edge", "0.011", "--q-target", "80", "--runs", "3",
                "--outdir", str(tmp_path / "o"), "--no-figures",
            ]
        )
        assert rc == 0


class TestExportPairsCommand:
    def test_synthetic_export_deterministic(self, tmp_path):
        args = [
            "export-pairs", "--n", "1500", "--pattern", "uniform",
            "--lambda-sem", "0.3", "--dgp-seed", "4", "--resolution", "6",
            "--q-target", "60", "--seed", "9", "--no-figures",
        ]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        header = a.read_text().splitlines()[0]
        assert header == "cell_q,cell_r,i,l,xi_coord,yi_coord,xl_coord,yl_coord"

    def test_figure_rendered(self, tmp_path):
        out = tmp_path / "pairs.csv"
        rc = main(
            [
                "export-pairs", "--n", "800", "--dgp-seed", "5",
                "--resolution", "6", "--q-target", "30", "--out", str(out),
            ]
        )
        assert rc == 0
        assert out.with_suffix(".png").exists()

    def test_from_csv(self, tmp_path):
        src = tmp_path / "pts.csv"
        spec = DGPSpec(n=900, pattern="uniform", lambda_sem=0.0, seed=6)
        write_points_csv(gen_dataset(spec), src)
        out = tmp_path / "pairs.csv"
        rc = main(
            [
                "export-pairs", "--from-csv", str(src), "--resolution", "6",
                "--q-target", "25", "--out", str(out), "--no-figures",
            ]
        )
        assert rc == 0
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        assert 0 < len(rows) <= 25


class TestTimingCommand:
    def test_timing_outputs(self, tmp_path, capsys):
        cfg = {
            "n_values": [300, 600],
            "lambda_sem_values": [0.3],
            "patterns": ["uniform"],
            "reps": 3,
            "master_seed": 5,
            "benchmark": "ml_oracle",
            "grid": {"resolution": 5},
            "sampler": {"q_target": 30},
        }
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        out = tmp_path / "t"
        assert main(["timing", str(path), "--outdir", str(out), "--no-figures"]) == 0
        with open(out / "timing.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert [r["n"] for r in rows] == ["300", "600"]
        assert "ratio" in capsys.readouterr().out

    def test_requires_ml_benchmark(self, tmp_path):
        cfg = {
            "n_values": [300],
            "lambda_sem_values": [0.0],
            "patterns": ["uniform"],
            "reps": 2,
            "master_seed": 5,
            "grid": {"resolution": 5},
            "sampler": {"q_target": 20},
        }
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        assert main(["timing", str(path), "--no-figures"]) == 1


class TestArgumentHandling:
    def test_unknown_flag_exits_one(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["simulate", "cfg.json", "--frobnicate"])
        assert exc.value.code == 1

    def test_help_exits_zero(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--help"])
        assert exc.value.code == 0
        assert "simulate" in capsys.readouterr().out
