"""Operator benchmark and gradient-check commands."""

import json
from enum import Enum
from pathlib import Path
from typing import Optional

import typer

from ..diagnostics import benchmark_dynconv, run_gradient_suite
from ..formatters import OutputFormat, get_formatter
from .common import err_console, fail, handle_errors, progress, write_output

BASELINE_FILE = Path(__file__).resolve().parent.parent / "bench_baseline.json"


class BenchOp(str, Enum):
    DYNCONV = "dynconv"


def bench_command(
    op: BenchOp = typer.Option(BenchOp.DYNCONV, "--op", help="Operator to benchmark"),
    size: int = typer.Option(256, "--size", min=8, help="Square input size"),
    k: int = typer.Option(5, "--k", min=1, help="Per-pixel kernel size (odd)"),
    seed: int = typer.Option(0, "--seed", min=0, help="Input seed"),
    repeats: int = typer.Option(3, "--repeats", min=1, help="Timed runs of the fast operator"),
    check: bool = typer.Option(
        False, "--check", help="Exit 1 if the speedup is below the recorded baseline"
    ),
    baseline: Path = typer.Option(BASELINE_FILE, "--baseline", help="Baseline JSON file"),
):
    """Time the vectorized dynamic convolution against the nested-loop reference."""
    with handle_errors():
        with progress() as bar:
            bar.add_task(f"Benchmarking {op.value} {size}x{size} k={k}...", total=None)
            result = benchmark_dynconv(size=size, k=k, seed=seed, repeats=repeats)
        required = None
        if check:
            required = float(json.loads(baseline.read_text())["min_speedup"])
    write_output(get_formatter(OutputFormat.CSV).format_bench(result), None)
    if required is not None and result.speedup < required:
        fail(f"speedup {result.speedup:.2f}x is below the baseline {required:.2f}x")


def grad_check_command(
    seed: int = typer.Option(0, "--seed", min=0, help="Seed for inputs and sampling"),
    max_entries: Optional[int] = typer.Option(
        64,
        "--max-entries",
        min=1,
        help="Entries sampled per input; the default checks a 64-entry sample, not every entry",
    ),
    full: bool = typer.Option(
        False, "--full", help="Check every entry of every input instead of a sample"
    ),
    output: OutputFormat = typer.Option(OutputFormat.TABLE, "--output", "-o", help="Output format"),
    output_file: Optional[Path] = typer.Option(
        None, "--output-file", "-f", help="Write output to file"
    ),
):
    """Finite-difference check of every differentiable operation and a tiny UDVD.

    By default each input contributes a random sample of --max-entries entries;
    pass --full for exhaustive coverage.
    """
    with handle_errors():
        with progress() as bar:
            task = bar.add_task("Checking gradients...", total=None)
            results = run_gradient_suite(
                seed=seed,
                max_entries=None if full else max_entries,
                progress_callback=lambda r: bar.update(task, description=f"{r.name} done"),
            )
    write_output(get_formatter(output).format_gradcheck(results), output_file)
    failed = [r.name for r in results if not r.ok]
    if failed:
        fail(f"gradient check failed for {', '.join(failed)}")
    err_console.print(f"[green]All {len(results)} gradient checks passed[/green]")
