"""Base formatter interface."""

from abc import ABC, abstractmethod
from enum import Enum
from typing import TYPE_CHECKING, List

if TYPE_CHECKING:
    from ..diagnostics import BenchResult
    from ..tensor import GradCheckResult
    from ..train import EvalReport, SweepReport


class OutputFormat(str, Enum):
    """Available output formats."""
    TABLE = "table"
    JSON = "json"
    CSV = "csv"


BENCH_COLUMNS = ("op", "size", "k", "ref_ms", "opt_ms", "speedup")


class BaseFormatter(ABC):
    """Base class for output formatters."""

    @property
    @abstractmethod
    def format_name(self) -> str:
        """Return the format name."""
        pass

    @abstractmethod
    def format_report(self, report: "EvalReport") -> str:
        """
        Format an evaluation report.

        Args:
            report: Per-image and mean PSNR/SSIM

        Returns:
            Formatted string output
        """
        pass

    @abstractmethod
    def format_sweep(self, report: "SweepReport") -> str:
        """Format model-vs-bicubic metrics for every degradation setting."""
        pass

    @abstractmethod
    def format_gradcheck(self, results: List["GradCheckResult"]) -> str:
        """Format the outcome of the gradient-check suite."""
        pass

    def format_bench(self, result: "BenchResult") -> str:
        """Benchmarks are always one CSV row under a header."""
        values = result.model_dump()
        row = ",".join(
            f"{values[c]:.3f}" if isinstance(values[c], float) else str(values[c])
            for c in BENCH_COLUMNS
        )
        return ",".join(BENCH_COLUMNS) + "\n" + row + "\n"


def get_formatter(format: OutputFormat) -> BaseFormatter:
    """Get the appropriate formatter for the output format."""
    from .csv_formatter import CSVFormatter
    from .json_formatter import JSONFormatter
    from .table_formatter import TableFormatter

    formatters = {
        OutputFormat.TABLE: TableFormatter,
        OutputFormat.JSON: JSONFormatter,
        OutputFormat.CSV: CSVFormatter,
    }

    formatter_class = formatters.get(format, TableFormatter)
    return formatter_class()
