"""udvd - super-resolution for multiple degradations with dynamic convolution."""

import logging

import typer
from rich.console import Console
from rich.logging import RichHandler

from .commands import degrade, diagnostics, evaluate, infer, train
from .commands.common import fail
from .config import log_level
from .errors import ConfigError

app = typer.Typer(
    name="udvd",
    help="UDVD - super-resolution for multiple degradations with dynamic convolution",
    no_args_is_help=True,
)
console = Console()

# Add commands
app.command("degrade")(degrade.degrade_command)
app.command("degrade-spatial")(degrade.degrade_spatial_command)
app.command("synthesize")(degrade.synthesize_command)
app.command("pca-fit")(degrade.pca_fit_command)
app.command("train")(train.train_command)
app.command("infer")(infer.infer_command)
app.command("viz-kernels")(infer.viz_kernels_command)
app.command("sweep")(infer.sweep_command)
app.command("eval")(evaluate.eval_command)
app.command("bench")(diagnostics.bench_command)
app.command("grad-check")(diagnostics.grad_check_command)


@app.command()
def version():
    """Show version information."""
    from . import __version__

    console.print(f"udvd-cli version {__version__}")


def setup_logging(verbose: bool) -> None:
    """Send library logs to stderr through rich."""
    try:
        level = log_level(verbose)
    except ConfigError as e:
        fail(str(e))
    handler = RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=False)
    logging.basicConfig(
        level=level, format="%(message)s", datefmt="[%X]", handlers=[handler], force=True
    )


@app.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging on stderr"),
):
    """
    UDVD - super-resolution for multiple degradations with dynamic convolution.

    Get started:

        udvd degrade --in hr.png --out lr.png --eps 1.3 --sigma 15 --scale 2

        udvd train --data hr_dir --out model.ckpt --desk --steps 3000

        udvd infer --model model.ckpt --in lr.png --out sr.png --eps 1.3 --sigma 15
    """
    setup_logging(verbose)


def cli():
    """CLI entry point."""
    app()


if __name__ == "__main__":
    cli()
