"""Rich table formatter for terminal output."""

from typing import List

from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from ..tensor import GradCheckResult
from ..train import EvalReport, SweepReport
from .base import BaseFormatter


class TableFormatter(BaseFormatter):
    """Format output as rich terminal tables."""

    def __init__(self):
        self.console = Console()

    @property
    def format_name(self) -> str:
        return "table"

    def _render(self, *parts) -> str:
        with self.console.capture() as capture:
            for part in parts:
                self.console.print(part)
        return capture.get()

    def format_report(self, report: EvalReport) -> str:
        """Per-image scores followed by a summary panel."""
        table = Table(title="Evaluation (Y channel)", show_header=True, header_style="bold")
        table.add_column("Image", width=30)
        table.add_column("PSNR (dB)", justify="right")
        table.add_column("SSIM", justify="right")
        for score in report.images:
            table.add_row(score.name[:30], f"{score.psnr:.2f}", f"{score.ssim:.4f}")

        summary = Text()
        summary.append("Images: ", style="bold")
        summary.append(f"{len(report.images)}\n")
        summary.append("Mean PSNR: ", style="bold")
        summary.append(f"{report.mean_psnr:.2f} dB\n")
        summary.append("Mean SSIM: ", style="bold")
        summary.append(f"{report.mean_ssim:.4f}")
        return self._render(table, Panel(summary, title="Summary", border_style="blue"))

    def format_sweep(self, report: SweepReport) -> str:
        table = Table(
            title=f"Degradation sweep x{report.scale} ({report.images} images)",
            show_header=True,
            header_style="bold",
        )
        table.add_column("Setting", width=20)
        table.add_column("UDVD PSNR", justify="right")
        table.add_column("UDVD SSIM", justify="right")
        table.add_column("Bicubic PSNR", justify="right")
        table.add_column("Bicubic SSIM", justify="right")
        for row in report.rows:
            style = "green" if row.model_psnr >= row.bicubic_psnr else "yellow"
            table.add_row(
                row.label,
                Text(f"{row.model_psnr:.2f}", style=style),
                f"{row.model_ssim:.4f}",
                f"{row.bicubic_psnr:.2f}",
                f"{row.bicubic_ssim:.4f}",
            )
        return self._render(table)

    def format_gradcheck(self, results: List[GradCheckResult]) -> str:
        table = Table(title="Gradient checks", show_header=True, header_style="bold")
        table.add_column("Check", width=26)
        table.add_column("Entries", justify="right")
        table.add_column("Skipped", justify="right")
        table.add_column("Passed", justify="right")
        table.add_column("Max rel. error", justify="right")
        table.add_column("Status")
        for r in results:
            table.add_row(
                r.name,
                str(r.checked),
                str(r.skipped),
                f"{r.passed_fraction:.2%}",
                f"{r.max_rel_error:.2e}",
                Text("PASS", style="green") if r.ok else Text("FAIL", style="red bold"),
            )
        return self._render(table)
