"""Result tables and their CSV / JSON serialisation.

CSV files start with a block of ``# key=value`` metadata lines (including the
fully resolved configuration), then a header row, then the data.  Floats are
written with 17 significant digits, enough to round-trip every double.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


def fmt(v) -> str:
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


@dataclass
class ResultTable:
    name: str
    columns: list
    units: list
    rows: np.ndarray
    metadata: list = field(default_factory=list)

    def __post_init__(self):
        self.rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
        if self.rows.shape[1] != len(self.columns) or len(self.units) != len(self.columns):
            raise ValueError("column, unit and row widths differ")

    def column(self, name) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]

    def to_csv(self) -> str:
        lines = [f"# {k}={v}" for k, v in self.metadata]
        lines.append("# units=" + ",".join(self.units))
        lines.append(",".join(self.columns))
        lines.extend(",".join(fmt(v) for v in row) for row in self.rows)
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        body = {"name": self.name, "metadata": dict(self.metadata), "columns": self.columns, "units": self.units,
                "rows": [[fmt(v) for v in row] for row in self.rows]}
        return json.dumps(body, indent=1) + "\n"

    def write(self, directory, fmt_name: str = "csv") -> Path:
        path = Path(directory) / f"{self.name}.{fmt_name}"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_csv() if fmt_name == "csv" else self.to_json())
        return path


def read_csv(path):
    """Inverse of :meth:`ResultTable.to_csv`; returns ``(metadata dict, columns, rows)``."""
    meta, columns, rows = {}, None, []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            k, _, v = line[1:].strip().partition("=")
            meta[k] = v
        elif columns is None:
            columns = line.split(",")
        elif line:
            rows.append([float(t) for t in line.split(",")])
    return meta, columns, np.array(rows)
