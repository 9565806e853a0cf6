"""The eval command."""

from pathlib import Path
from typing import Optional

import typer

from ..formatters import OutputFormat, get_formatter
from ..train import evaluate_dirs
from .common import handle_errors, progress, write_output


def eval_command(
    pred: Path = typer.Option(..., "--pred", help="Directory of predicted PNG images"),
    gt: Path = typer.Option(..., "--gt", help="Directory of ground-truth PNG images"),
    scale: int = typer.Option(..., "--scale", min=1, max=4, help="Upscaling factor"),
    border: Optional[int] = typer.Option(
        None, "--border", min=0, help="Pixels cropped per side for PSNR (default: the scale)"
    ),
    output: OutputFormat = typer.Option(OutputFormat.JSON, "--output", "-o", help="Output format"),
    output_file: Optional[Path] = typer.Option(
        None, "--output-file", "-f", help="Write output to file"
    ),
):
    """PSNR and SSIM on the Y channel for every prediction/ground-truth pair."""
    with handle_errors():
        with progress() as bar:
            task = bar.add_task("Evaluating...", total=None)
            report = evaluate_dirs(
                pred, gt, scale, border,
                progress_callback=lambda s: bar.update(task, description=s.name),
            )
    write_output(get_formatter(output).format_report(report), output_file)
