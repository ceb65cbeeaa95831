"""Utility helpers shared across modules."""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Iterable, Iterator, Sequence

import numpy as np

try:  # pragma: no cover - optional dependency for speed
    import orjson
except Exception:  # pragma: no cover - fallback during tests
    orjson = None  # type: ignore


def _sanitize(data: Any) -> Any:
    """Replace values JSON cannot carry (non-finite floats, numpy scalars)."""

    if isinstance(data, dict):
        return {str(key): _sanitize(value) for key, value in data.items()}
    if isinstance(data, (list, tuple)):
        return [_sanitize(item) for item in data]
    if isinstance(data, np.ndarray):
        return [_sanitize(item) for item in data.tolist()]
    if isinstance(data, np.generic):
        data = data.item()
    if isinstance(data, float) and not math.isfinite(data):
        if math.isnan(data):
            return "nan"
        return "inf" if data > 0 else "-inf"
    return data


def json_dumps(data: Any, *, indent: bool = False) -> str:
    data = _sanitize(data)
    if orjson is not None:  # pragma: no cover - executed when orjson available
        option = orjson.OPT_INDENT_2 if indent else 0
        return orjson.dumps(data, option=option).decode("utf-8")
    return json.dumps(data, default=str, indent=2 if indent else None)


def json_loads(data: str | bytes) -> Any:
    if orjson is not None:  # pragma: no cover
        return orjson.loads(data)
    return json.loads(data)


def write_jsonl(path: Path, records: Iterable[Any], *, mode: str = "a") -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open(mode, encoding="utf-8") as fh:
        for item in records:
            fh.write(json_dumps(item))
            fh.write("\n")


def read_jsonl(path: Path) -> Iterator[Any]:
    if not path.exists():
        return iter(())
    return _iter_jsonl(path)


def _iter_jsonl(path: Path) -> Iterator[Any]:
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            yield json_loads(line)


def chunked(seq: Sequence[Any], size: int) -> Iterator[Sequence[Any]]:
    for idx in range(0, len(seq), size):
        yield seq[idx : idx + size]


def chunk_sizes(total: int, size: int) -> list[int]:
    """Split ``total`` replicates into fixed-size chunks (last one may be short)."""

    if total < 1:
        raise ValueError("total must be positive")
    if size < 1:
        raise ValueError("chunk size must be positive")
    full, rest = divmod(total, size)
    return [size] * full + ([rest] if rest else [])


def as_points(values: Any, dim: int | None = None) -> np.ndarray:
    """Return ``values`` as a 2-D array of points with shape ``(n, p)``."""

    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1) if dim is None or arr.shape[0] == dim else arr.reshape(-1, 1)
    if dim is not None and arr.shape[1] != dim:
        raise ValueError(f"expected points of dimension {dim}, got {arr.shape[1]}")
    return arr


def as_vector(values: Any, dim: int) -> np.ndarray:
    """Broadcast a scalar or sequence to a length-``dim`` location vector."""

    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        return np.full(dim, float(arr))
    arr = arr.reshape(-1)
    if arr.shape[0] == 1 and dim > 1:
        # a single number is read as a point on the first axis
        out = np.zeros(dim)
        out[0] = arr[0]
        return out
    if arr.shape[0] != dim:
        raise ValueError(f"expected a vector of length {dim}, got {arr.shape[0]}")
    return arr


def combine_moments(parts: Sequence[tuple[int, float, float]]) -> tuple[int, float, float]:
    """Merge per-chunk ``(count, mean, m2)`` summaries in the given order.

    ``m2`` is the sum of squared deviations from the chunk mean. The merge uses
    compensated summation so the result does not depend on how chunks were
    scheduled.
    """

    total = sum(count for count, _, _ in parts)
    if total == 0:
        return 0, math.nan, math.nan
    mean = math.fsum(count * chunk_mean for count, chunk_mean, _ in parts) / total
    m2 = math.fsum(
        chunk_m2 + count * (chunk_mean - mean) ** 2 for count, chunk_mean, chunk_m2 in parts
    )
    return total, mean, m2


def summarize_chunk(values: np.ndarray) -> tuple[int, float, float]:
    values = np.asarray(values, dtype=float).reshape(-1)
    count = int(values.shape[0])
    if count == 0:
        return 0, 0.0, 0.0
    mean = math.fsum(values) / count
    m2 = math.fsum((values - mean) ** 2)
    return count, mean, m2
