"""CSV formatter for spreadsheets and plotting scripts."""

import csv
import io
from typing import Iterable, List, Sequence

from ..tensor import GradCheckResult
from ..train import EvalReport, SweepReport
from .base import BaseFormatter


def _rows_to_csv(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


class CSVFormatter(BaseFormatter):
    """Format output as CSV with a header row."""

    @property
    def format_name(self) -> str:
        return "csv"

    def format_report(self, report: EvalReport) -> str:
        rows = [(s.name, f"{s.psnr:.4f}", f"{s.ssim:.6f}") for s in report.images]
        rows.append(("mean", f"{report.mean_psnr:.4f}", f"{report.mean_ssim:.6f}"))
        return _rows_to_csv(("image", "psnr", "ssim"), rows)

    def format_sweep(self, report: SweepReport) -> str:
        rows = [
            (r.label, f"{r.model_psnr:.4f}", f"{r.model_ssim:.6f}",
             f"{r.bicubic_psnr:.4f}", f"{r.bicubic_ssim:.6f}")
            for r in report.rows
        ]
        header = ("setting", "model_psnr", "model_ssim", "bicubic_psnr", "bicubic_ssim")
        return _rows_to_csv(header, rows)

    def format_gradcheck(self, results: List[GradCheckResult]) -> str:
        rows = [
            (
                r.name,
                r.checked,
                r.skipped,
                f"{r.passed_fraction:.4f}",
                f"{r.max_rel_error:.3e}",
                r.ok,
            )
            for r in results
        ]
        header = ("check", "checked", "skipped", "passed_fraction", "max_rel_error", "ok")
        return _rows_to_csv(header, rows)
