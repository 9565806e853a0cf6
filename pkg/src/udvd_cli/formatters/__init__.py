"""Output formatters for evaluation, sweep, gradient-check and benchmark results."""

from .base import OutputFormat, get_formatter
from .csv_formatter import CSVFormatter
from .json_formatter import JSONFormatter
from .table_formatter import TableFormatter

__all__ = [
    "OutputFormat",
    "get_formatter",
    "CSVFormatter",
    "JSONFormatter",
    "TableFormatter",
]
