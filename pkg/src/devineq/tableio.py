"""Delimited-table reading/writing with ``#``-prefixed metadata headers.

Every table the package emits is UTF-8 delimited text: zero or more
``# key = value`` lines, one header row, then data rows. Floats are
written with ``repr`` so a write/read round trip is value-exact.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np


def format_cell(value: Any) -> str:
    """Render one cell; None becomes the empty field."""
    if isinstance(value, np.generic):
        value = value.item()
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_table(
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    metadata: dict[str, Any] | None = None,
    delimiter: str = ",",
) -> str:
    """Render a table to a string (metadata lines, header, rows)."""
    buf = io.StringIO()
    for key, value in (metadata or {}).items():
        buf.write(f"# {key} = {format_cell(value)}\n")
    writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(cell) for cell in row])
    return buf.getvalue()


def write_table(
    path: str | Path,
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
    metadata: dict[str, Any] | None = None,
    delimiter: str = ",",
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_table(columns, rows, metadata, delimiter), encoding="utf-8")
    return path


def read_table(
    path: str | Path, delimiter: str = ","
) -> tuple[dict[str, str], list[str], list[list[str]]]:
    """Read a table back as (metadata, columns, string rows).

    Cells come back as strings; callers reparse the columns they need.
    """
    metadata: dict[str, str] = {}
    data_lines: list[str] = []
    with open(path, encoding="utf-8", newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, value = body.partition("=")
                    metadata[key.strip()] = value.strip()
            elif line.strip():
                data_lines.append(line)
    reader = csv.reader(data_lines, delimiter=delimiter)
    table = list(reader)
    if not table:
        return metadata, [], []
    return metadata, table[0], table[1:]
