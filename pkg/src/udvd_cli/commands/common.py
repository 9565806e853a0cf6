"""Helpers shared by the command modules."""

import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, NoReturn, Optional, Tuple

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn

from ..degrade import PcaBasis, default_basis, load_basis
from ..errors import UdvdError, validation_message

logger = logging.getLogger(__name__)

console = Console()
err_console = Console(stderr=True)


def fail(message: str) -> NoReturn:
    """Print the one-line ``error:`` report on stderr and exit 1."""
    err_console.print(f"error: {message}", markup=False, highlight=False, soft_wrap=True)
    raise typer.Exit(1)


@contextmanager
def handle_errors() -> Iterator[None]:
    """Turn library failures into ``error:`` lines and exit code 1."""
    try:
        yield
    except ValidationError as e:
        fail(validation_message(e))
    except (UdvdError, ValueError) as e:
        fail(str(e))
    except FileNotFoundError as e:
        fail(f"file not found: {e.filename or e}")
    except OSError as e:
        fail(str(e))


def parse_range(value: Optional[str]) -> Optional[Tuple[float, float]]:
    """Typer callback for ``lo,hi`` flags; bad input is a usage error naming the flag."""
    if value is None:
        return None
    pieces = value.split(",")
    try:
        lo, hi = (float(p) for p in pieces)
    except ValueError:
        raise typer.BadParameter(f"expected 'lo,hi', got {value!r}")
    if lo > hi:
        raise typer.BadParameter(f"lower bound {lo} exceeds upper bound {hi}")
    return lo, hi


def range_option(default: Optional[str], flag: str, help: str):
    return typer.Option(default, flag, help=help, callback=parse_range)


def resolve_basis(path: Optional[Path], dim: int) -> PcaBasis:
    if path is None:
        return default_basis(dim)
    return load_basis(path)


def progress() -> Progress:
    """Transient spinner on stderr, so stdout stays machine-readable."""
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        console=err_console,
        transient=True,
    )


def write_output(text: str, output_file: Optional[Path]) -> None:
    """Write to a file when requested, otherwise to stdout without markup."""
    if output_file:
        output_file.parent.mkdir(parents=True, exist_ok=True)
        output_file.write_text(text)
        err_console.print(f"[green]Output written to {output_file}[/green]")
    else:
        typer.echo(text, nl=not text.endswith("\n"))
