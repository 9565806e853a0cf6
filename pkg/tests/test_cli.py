"""Tests for the udvd command-line interface."""

import json

import pytest
from typer.testing import CliRunner

from udvd_cli import __version__
from udvd_cli.config import load_train_config, save_train_config
from udvd_cli.images import read_png, write_png
from udvd_cli.main import app
from udvd_cli.model import load_model, save_model
from udvd_cli.tensor import load_tensor
from udvd_cli.train import TrainConfig

runner = CliRunner()


@pytest.fixture
def hr_png(tmp_path, make_image):
    path = tmp_path / "hr.png"
    write_png(path, make_image(32, 32, seed=7))
    return path


@pytest.fixture
def model_path(tmp_path, tiny_model):
    path = tmp_path / "model.ckpt"
    save_model(path, tiny_model)
    return path


@pytest.fixture
def lr_png(tmp_path, make_image):
    path = tmp_path / "lr.png"
    write_png(path, make_image(6, 6, seed=8))
    return path


class TestGeneral:
    def test_help(self):
        result = runner.invoke(app, ["--help"])
        assert result.exit_code == 0
        assert "degrade" in result.output
        assert "grad-check" in result.output

    def test_unknown_command(self):
        result = runner.invoke(app, ["upscale"])
        assert result.exit_code == 2

    def test_version(self):
        result = runner.invoke(app, ["version"])
        assert result.exit_code == 0
        assert __version__ in result.output


# =============================================================================
# Degradation commands
# =============================================================================


class TestDegrade:
    def args(self, hr_png, out, seed=0):
        return [
            "degrade", "--in", str(hr_png), "--out", str(out),
            "--eps", "1.3", "--sigma", "15", "--scale", "2", "--seed", str(seed),
        ]

    def test_writes_image_and_map(self, tmp_path, hr_png):
        out = tmp_path / "lr.png"
        result = runner.invoke(app, self.args(hr_png, out))
        assert result.exit_code == 0, result.output
        assert read_png(out).shape == (1, 3, 16, 16)
        assert load_tensor(tmp_path / "lr.map.ten").shape == (16, 16, 16)

    def test_deterministic(self, tmp_path, hr_png):
        a, b = tmp_path / "a.png", tmp_path / "b.png"
        assert runner.invoke(app, self.args(hr_png, a, seed=3)).exit_code == 0
        assert runner.invoke(app, self.args(hr_png, b, seed=3)).exit_code == 0
        assert a.read_bytes() == b.read_bytes()
        assert (tmp_path / "a.map.ten").read_bytes() == (tmp_path / "b.map.ten").read_bytes()

    def test_out_of_range_is_usage_error(self, tmp_path, hr_png):
        args = [
            "degrade", "--in", str(hr_png), "--out", str(tmp_path / "lr.png"),
            "--eps=-1", "--sigma", "15", "--scale", "2",
        ]
        result = runner.invoke(app, args)
        assert result.exit_code == 2
        assert "--eps" in result.output

    def test_missing_input(self, tmp_path):
        result = runner.invoke(app, self.args(tmp_path / "missing.png", tmp_path / "lr.png"))
        assert result.exit_code == 1
        assert "error:" in result.output

    def test_spatial(self, tmp_path, hr_png):
        out = tmp_path / "ramp.png"
        result = runner.invoke(
            app, ["degrade-spatial", "--in", str(hr_png), "--out", str(out), "--scale", "2"]
        )
        assert result.exit_code == 0, result.output
        assert read_png(out).shape == (1, 3, 16, 16)
        assert load_tensor(tmp_path / "ramp.map.ten").shape == (16, 16, 16)

    def test_bad_range(self, tmp_path, hr_png):
        result = runner.invoke(
            app,
            [
                "degrade-spatial", "--in", str(hr_png), "--out", str(tmp_path / "r.png"),
                "--scale", "2", "--eps-range", "2.0,0.5",
            ],
        )
        assert result.exit_code == 2

    def test_synthesize(self, tmp_path, hr_dir):
        out_dir = tmp_path / "data"
        result = runner.invoke(
            app,
            ["synthesize", "--hr-dir", str(hr_dir), "--out-dir", str(out_dir), "--scale", "2"],
        )
        assert result.exit_code == 0, result.output
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert len(manifest) == 2

    def test_pca_fit(self, tmp_path):
        out = tmp_path / "basis.ten"
        result = runner.invoke(
            app, ["pca-fit", "--out", str(out), "--dim", "3", "--grid-size", "20"]
        )
        assert result.exit_code == 0, result.output
        assert out.exists()


# =============================================================================
# Training and inference
# =============================================================================


class TestTrainInfer:
    def test_train(self, tmp_path, hr_dir):
        out = tmp_path / "run" / "model.ckpt"
        result = runner.invoke(
            app,
            [
                "train", "--data", str(hr_dir), "--out", str(out),
                "--res-blocks", "1", "--trunk-channels", "8", "--block-seq", "UD",
                "--scale", "2", "--patch", "8", "--batch", "2", "--steps", "2",
            ],
        )
        assert result.exit_code == 0, result.output
        assert load_model(out).config.block_seq == "UD"
        assert (tmp_path / "run" / "model.log.csv").exists()

    def test_train_from_config_file(self, tmp_path, hr_dir, tiny_config):
        cfg = TrainConfig(model=tiny_config, batch=2, patch_lr=8, total_steps=2, seed=3)
        config_file = tmp_path / "train.json"
        save_train_config(cfg, config_file)
        out = tmp_path / "model.ckpt"
        result = runner.invoke(
            app, ["train", "--config", str(config_file), "--data", str(hr_dir), "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        assert load_model(out).config == tiny_config
        assert load_train_config(config_file) == cfg
        rows = (tmp_path / "model.log.csv").read_text().splitlines()
        assert [row.split(",")[0] for row in rows[1:]] == ["1", "2"]

    def test_infer(self, tmp_path, model_path, lr_png):
        out = tmp_path / "sr.png"
        result = runner.invoke(
            app,
            [
                "infer", "--model", str(model_path), "--in", str(lr_png), "--out", str(out),
                "--eps", "1.3", "--sigma", "15",
            ],
        )
        assert result.exit_code == 0, result.output
        assert read_png(out).shape == (1, 3, 12, 12)

    def test_infer_spatial(self, tmp_path, model_path, lr_png):
        out = tmp_path / "sr.png"
        result = runner.invoke(
            app,
            [
                "infer", "--model", str(model_path), "--in", str(lr_png), "--out", str(out),
                "--spatial-eps", "0.2,2.0", "--spatial-sigma", "5,50",
            ],
        )
        assert result.exit_code == 0, result.output
        assert out.exists()

    def test_infer_requires_degradation(self, tmp_path, model_path, lr_png):
        result = runner.invoke(
            app,
            [
                "infer", "--model", str(model_path), "--in", str(lr_png),
                "--out", str(tmp_path / "x.png"),
            ],
        )
        assert result.exit_code == 2

    def test_infer_scale_mismatch(self, tmp_path, model_path, lr_png):
        result = runner.invoke(
            app,
            [
                "infer", "--model", str(model_path), "--in", str(lr_png),
                "--out", str(tmp_path / "x.png"), "--eps", "1.3", "--sigma", "15", "--scale", "3",
            ],
        )
        assert result.exit_code == 1
        assert "error:" in result.output

    def test_viz_kernels(self, tmp_path, model_path, lr_png):
        out = tmp_path / "viz.png"
        result = runner.invoke(
            app, ["viz-kernels", "--model", str(model_path), "--in", str(lr_png), "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        assert read_png(out).shape == (1, 3, 30, 94)

    def test_sweep_csv(self, tmp_path, model_path, hr_dir):
        out = tmp_path / "sweep.csv"
        result = runner.invoke(
            app,
            [
                "sweep", "--model", str(model_path), "--hr-dir", str(hr_dir),
                "-o", "csv", "-f", str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        lines = out.read_text().splitlines()
        assert lines[0] == "setting,model_psnr,model_ssim,bicubic_psnr,bicubic_ssim"
        assert len(lines) == 10


# =============================================================================
# Evaluation and diagnostics
# =============================================================================


class TestEvalDiagnostics:
    def test_eval_json(self, tmp_path, hr_dir):
        out = tmp_path / "report.json"
        result = runner.invoke(
            app,
            ["eval", "--pred", str(hr_dir), "--gt", str(hr_dir), "--scale", "2", "-f", str(out)],
        )
        assert result.exit_code == 0, result.output
        data = json.loads(out.read_text())
        assert data["mean_psnr"] == 99.0
        assert len(data["images"]) == 2

    def test_eval_table(self, hr_dir):
        result = runner.invoke(
            app, ["eval", "--pred", str(hr_dir), "--gt", str(hr_dir), "--scale", "2", "-o", "table"]
        )
        assert result.exit_code == 0, result.output
        assert "Mean PSNR" in result.output

    def test_eval_missing_directory(self, tmp_path, hr_dir):
        result = runner.invoke(
            app, ["eval", "--pred", str(tmp_path / "nope"), "--gt", str(hr_dir), "--scale", "2"]
        )
        assert result.exit_code == 1
        assert "error:" in result.output

    def test_bench(self):
        result = runner.invoke(app, ["bench", "--size", "16", "--k", "3", "--repeats", "1"])
        assert result.exit_code == 0, result.output
        assert "op,size,k,ref_ms,opt_ms,speedup" in result.output
        assert "dynconv,16,3," in result.output

    def test_bench_check_against_baseline(self, tmp_path):
        baseline = tmp_path / "baseline.json"
        baseline.write_text(json.dumps({"min_speedup": 1e12}))
        result = runner.invoke(
            app,
            ["bench", "--size", "16", "--repeats", "1", "--check", "--baseline", str(baseline)],
        )
        assert result.exit_code == 1
        assert "below the baseline" in result.output

    def test_bench_default_baseline_outside_the_repository(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        result = runner.invoke(
            app, ["bench", "--size", "16", "--k", "3", "--repeats", "1", "--check"]
        )
        assert "file not found" not in result.output
        assert result.exit_code in (0, 1)
        if result.exit_code == 1:
            assert "below the baseline" in result.output

    def test_grad_check_help_mentions_sampling(self):
        result = runner.invoke(app, ["grad-check", "--help"])
        assert result.exit_code == 0
        assert "--full" in result.output
        assert "sample" in result.output

    def test_grad_check(self, tmp_path):
        out = tmp_path / "grad.json"
        result = runner.invoke(
            app, ["grad-check", "--max-entries", "8", "-o", "json", "-f", str(out)]
        )
        assert result.exit_code == 0, result.output
        assert json.loads(out.read_text())["ok"] is True
