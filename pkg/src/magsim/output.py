"""Serialization of sweep tables to CSV and JSON."""

from __future__ import annotations

import csv
import io
import json
import math
from typing import IO, Any

from magsim.errors import ParameterError
from magsim.scenarios import SweepResult


def format_value(value: Any) -> str:
    """Cell text: 17 significant digits, inf/-inf/nan sentinels, empty for missing."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    if isinstance(value, int):
        return str(value)
    return str(value)


def _json_value(value: Any) -> str:
    if value is None or isinstance(value, bool):
        return json.dumps(value)
    if isinstance(value, float):
        if math.isfinite(value):
            return format(value, ".17g")
        return json.dumps(format_value(value))
    if isinstance(value, int):
        return str(value)
    return json.dumps(str(value))


def to_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    cols = result.columns()
    writer.writerow(cols)
    for row in result.rows():
        writer.writerow([format_value(row.get(c)) for c in cols])
    return buf.getvalue()


def to_json(result: SweepResult) -> str:
    cols = result.columns()
    records = []
    for row in result.rows():
        fields = ", ".join(f"{json.dumps(c)}: {_json_value(row.get(c))}" for c in cols)
        records.append("  {" + fields + "}")
    return "[\n" + ",\n".join(records) + "\n]\n"


def emit(result: SweepResult, fmt: str, sink: IO[str]) -> int:
    """Write ``result`` to ``sink`` as ``csv`` or ``json``; returns the number of UTF-8 bytes written."""
    if not result.points:
        raise ParameterError("nothing to emit: the sweep result is empty")
    if fmt == "csv":
        text = to_csv(result)
    elif fmt == "json":
        text = to_json(result)
    else:
        raise ParameterError(f"unknown output format {fmt!r}")
    sink.write(text)
    return len(text.encode("utf-8"))


def parse_cell(text: str) -> Any:
    """Inverse of :func:`format_value` for numeric and boolean cells."""
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return float(text)
    except ValueError:
        return text


def read_csv(text: str) -> list[dict[str, Any]]:
    reader = csv.DictReader(io.StringIO(text))
    return [{k: parse_cell(v) for k, v in row.items()} for row in reader]
