"""JSON formatter for machine-readable output."""

import json
from dataclasses import asdict
from typing import List

from ..tensor import GradCheckResult
from ..train import EvalReport, SweepReport
from .base import BaseFormatter


class JSONFormatter(BaseFormatter):
    """Format output as JSON."""

    @property
    def format_name(self) -> str:
        return "json"

    def format_report(self, report: EvalReport) -> str:
        return report.model_dump_json(indent=2)

    def format_sweep(self, report: SweepReport) -> str:
        return report.model_dump_json(indent=2)

    def format_gradcheck(self, results: List[GradCheckResult]) -> str:
        output = {
            "ok": all(r.ok for r in results),
            "checks": [asdict(r) for r in results],
        }
        return json.dumps(output, indent=2)
