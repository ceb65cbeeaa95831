"""Output writers for CSV and JSON reports."""
from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Any, Sequence

from .. import utils

Row = dict[str, Any]


def _serialize_value(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, float) and not math.isfinite(value):
        return utils.json_loads(utils.json_dumps(value))
    if isinstance(value, (list, tuple, dict)):
        return utils.json_dumps(value)
    return value


def _normalize_rows(records: Sequence) -> list[Row]:
    rows: list[Row] = []
    for record in records:
        if isinstance(record, dict):
            rows.append(record)
        else:
            rows.append(record.model_dump())
    return rows


def _write_rows(handle: Any, rows: list[Row], columns: Sequence[str]) -> None:
    writer = csv.DictWriter(handle, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: _serialize_value(row.get(key)) for key in columns})


def write_csv(path: Path, records: Sequence, *, columns: Sequence[str]) -> None:
    rows = _normalize_rows(records)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        _write_rows(handle, rows, columns)


def format_csv(records: Sequence, *, columns: Sequence[str]) -> str:
    buffer = io.StringIO()
    _write_rows(buffer, _normalize_rows(records), columns)
    return buffer.getvalue()


def write_json(path: Path, records: Sequence) -> None:
    """One JSON object per line."""

    utils.write_jsonl(path, _normalize_rows(records), mode="w")


def format_json(records: Sequence) -> str:
    return "".join(utils.json_dumps(row) + "\n" for row in _normalize_rows(records))


def export_table(records: Sequence, *, columns: Sequence[str], fmt: str = "json", out: Path | None = None) -> str | None:
    """Write ``records`` to ``out`` or return them as text when no path is given."""

    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown report format {fmt!r}")
    if out is not None:
        if fmt == "csv":
            write_csv(out, records, columns=columns)
        else:
            write_json(out, records)
        return None
    return format_csv(records, columns=columns) if fmt == "csv" else format_json(records)


__all__ = ["export_table", "format_csv", "format_json", "write_csv", "write_json"]
