"""Console rendering helpers."""
from __future__ import annotations

import sys
from typing import Sequence

try:
    from rich.console import Console
    from rich.table import Table
except ImportError:  # pragma: no cover - depends on optional extra
    Console = None
    Table = None

from ..types import CheckResult


def _cell(value: object) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return "" if value is None else str(value)


def render_checks(results: Sequence[CheckResult]) -> None:
    """Print one line per check and a PASS/FAIL total."""

    failed = [result for result in results if not result.passed]
    if Console and Table:
        console = Console(stderr=True)
        table = Table(title="Verification", show_lines=False)
        for column in ("Suite", "Check", "Result", "Value", "Expected"):
            table.add_column(column)
        for result in results:
            status = "[green]PASS[/green]" if result.passed else "[red]FAIL[/red]"
            table.add_row(result.suite, result.name, status, _cell(result.value), _cell(result.expected))
        console.print(table)
        colour = "red" if failed else "green"
        console.print(f"[{colour}]{len(results) - len(failed)}/{len(results)} checks passed[/{colour}]")
        return

    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"- {status} {result.suite}/{result.name} | {_cell(result.value)} | {_cell(result.expected)}", file=sys.stderr)
    print(f"{len(results) - len(failed)}/{len(results)} checks passed", file=sys.stderr)
