"""CSV and JSON output of experiment tables.

Every file starts with the resolved schedule and configuration: `# key: value`
comment lines in CSV, a "header" object in JSON. Floats carry 17 significant
digits in CSV; JSON numbers use the shortest repr that round-trips.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
from dataclasses import dataclass, field
from typing import Any, Iterable, Literal

from FileSystem import ensure_parent

logger = logging.getLogger(__name__)

Format = Literal["csv", "json"]


class OutputNotWritable(Exception):
    def __init__(self, path: str, reason: str):
        super().__init__(f"cannot write {path}: {reason}")


@dataclass
class Table:
    columns: tuple[str, ...]
    rows: list[dict[str, Any]] = field(default_factory=list)
    header: dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.rows)

    def extend(self, rows: Iterable[dict[str, Any]]) -> None:
        self.rows.extend(rows)


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    return value


def write_csv(table: Table, stream) -> None:
    for key, value in table.header.items():
        shown = json.dumps(_json_value(value)) if isinstance(value, (list, tuple, dict)) else format_value(value)
        stream.write(f"# {key}: {shown}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_value(row.get(column)) for column in table.columns])


def write_json(table: Table, stream) -> None:
    document = {
        "header": _json_value(table.header),
        "columns": list(table.columns),
        "records": [{column: _json_value(row.get(column)) for column in table.columns} for row in table.rows],
    }
    json.dump(document, stream, indent=2)
    stream.write("\n")


def emit(table: Table, format: Format, path: str) -> str:
    """Writes `table` to `path` and returns the absolute path."""
    writer = {"csv": write_csv, "json": write_json}.get(format)
    if writer is None:
        raise ValueError(f"unknown output format '{format}'")
    try:
        path = ensure_parent(path)
        with open(path, "w", newline="") as f:
            writer(table, f)
    except OSError as e:
        raise OutputNotWritable(path, e.strerror or str(e)) from e
    logger.info("wrote %d records to %s", len(table), path)
    return path


def read_csv(path: str) -> tuple[dict[str, str], list[dict[str, str]]]:
    """Parses a file written by `emit`: the header block and the rows as strings."""
    header: dict[str, str] = {}
    with open(path, newline="") as f:
        lines = f.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("# ") and not body:
            key, _, value = line[2:].partition(": ")
            header[key] = value
        else:
            body.append(line)
    return header, list(csv.DictReader(body))


def read_json(path: str) -> dict[str, Any]:
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    with open(path) as f:
        return json.load(f)
