"""CSV output with a ``# key=value`` preamble.

Every file starts with comment lines recording the resolved parameters and
the tool version, then one header row, then data rows. Floats are written
with ``precision`` significant digits (17 round-trips a double exactly).
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

PRECISION_ENV = "TELEHEAT_PRECISION"


def default_precision() -> int:
    value = os.environ.get(PRECISION_ENV)
    return int(value) if value else 17


def format_value(v, precision: int) -> str:
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.{precision}g}"
    return str(v)


def write_csv(
    path,
    columns: Sequence[str],
    rows: Iterable[Sequence],
    meta: Mapping[str, object] | None = None,
    precision: int | None = None,
) -> Path:
    from teleheat import __version__

    precision = default_precision() if precision is None else precision
    path = Path(path)
    lines = [f"# version={__version__}"]
    for key, value in (meta or {}).items():
        lines.append(f"# {key}={format_value(value, precision)}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(format_value(v, precision) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path) -> tuple[dict[str, str], list[str], np.ndarray]:
    """Parse a file written by :func:`write_csv` into (meta, columns, data)."""
    meta: dict[str, str] = {}
    columns: list[str] = []
    rows = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key] = value
        elif not columns:
            columns = line.split(",")
        elif line:
            rows.append([float(v) for v in line.split(",")])
    data = np.array(rows, dtype=float).reshape(len(rows), len(columns))
    return meta, columns, data
