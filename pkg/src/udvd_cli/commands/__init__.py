"""CLI commands for udvd."""

from . import degrade, diagnostics, evaluate, infer, train

__all__ = ["degrade", "diagnostics", "evaluate", "infer", "train"]
