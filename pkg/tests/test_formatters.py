"""Tests for output formatters."""

import json

import pytest

from udvd_cli.diagnostics import BenchResult
from udvd_cli.formatters import (
    CSVFormatter,
    JSONFormatter,
    OutputFormat,
    TableFormatter,
    get_formatter,
)
from udvd_cli.tensor import GradCheckResult
from udvd_cli.train import EvalReport, ImageScore, SweepReport, SweepRow


@pytest.fixture
def report():
    images = [
        ImageScore(name="a.png", psnr=30.5, ssim=0.9),
        ImageScore(name="b.png", psnr=29.5, ssim=0.8),
    ]
    return EvalReport(images=images, mean_psnr=30.0, mean_ssim=0.85, config={"scale": 2})


@pytest.fixture
def sweep_report():
    row = SweepRow(label="BI", model_psnr=31.0, model_ssim=0.9, bicubic_psnr=28.0, bicubic_ssim=0.8)
    return SweepReport(scale=2, border=2, images=3, rows=[row])


@pytest.fixture
def gradcheck_results():
    return [
        GradCheckResult("conv2d", 40, 1.0, 1e-6, True),
        GradCheckResult("relu", 10, 0.5, 0.3, False, skipped=2),
    ]


class TestGetFormatter:
    @pytest.mark.parametrize(
        "fmt,cls",
        [
            (OutputFormat.TABLE, TableFormatter),
            (OutputFormat.JSON, JSONFormatter),
            (OutputFormat.CSV, CSVFormatter),
        ],
    )
    def test_lookup(self, fmt, cls):
        formatter = get_formatter(fmt)
        assert isinstance(formatter, cls)
        assert formatter.format_name == fmt.value


class TestCSVFormatter:
    def test_report(self, report):
        lines = CSVFormatter().format_report(report).splitlines()
        assert lines[0] == "image,psnr,ssim"
        assert lines[1] == "a.png,30.5000,0.900000"
        assert lines[-1] == "mean,30.0000,0.850000"

    def test_sweep(self, sweep_report):
        lines = CSVFormatter().format_sweep(sweep_report).splitlines()
        assert lines[0] == "setting,model_psnr,model_ssim,bicubic_psnr,bicubic_ssim"
        assert lines[1].startswith("BI,31.0000")

    def test_gradcheck(self, gradcheck_results):
        lines = CSVFormatter().format_gradcheck(gradcheck_results).splitlines()
        assert lines[0] == "check,checked,skipped,passed_fraction,max_rel_error,ok"
        assert lines[2] == "relu,10,2,0.5000,3.000e-01,False"


class TestJSONFormatter:
    def test_report(self, report):
        data = json.loads(JSONFormatter().format_report(report))
        assert data["mean_psnr"] == 30.0
        assert [i["name"] for i in data["images"]] == ["a.png", "b.png"]

    def test_sweep(self, sweep_report):
        data = json.loads(JSONFormatter().format_sweep(sweep_report))
        assert data["rows"][0]["bicubic_psnr"] == 28.0

    def test_gradcheck(self, gradcheck_results):
        data = json.loads(JSONFormatter().format_gradcheck(gradcheck_results))
        assert data["ok"] is False
        assert data["checks"][1]["skipped"] == 2
        assert json.loads(JSONFormatter().format_gradcheck(gradcheck_results[:1]))["ok"] is True


class TestTableFormatter:
    def test_report_summary(self, report):
        output = TableFormatter().format_report(report)
        assert "a.png" in output
        assert "Mean PSNR" in output
        assert "30.00 dB" in output

    def test_sweep(self, sweep_report):
        output = TableFormatter().format_sweep(sweep_report)
        assert "BI" in output
        assert "28.00" in output

    def test_gradcheck(self, gradcheck_results):
        output = TableFormatter().format_gradcheck(gradcheck_results)
        assert "PASS" in output
        assert "FAIL" in output


class TestBench:
    def test_header_and_row(self):
        result = BenchResult(op="dynconv", size=64, k=5, ref_ms=120.0, opt_ms=3.0, speedup=40.0)
        for formatter in (CSVFormatter(), JSONFormatter(), TableFormatter()):
            assert formatter.format_bench(result) == (
                "op,size,k,ref_ms,opt_ms,speedup\ndynconv,64,5,120.000,3.000,40.000\n"
            )
