"""Experiment reports: schema-versioned JSON plus flat per-trial CSV.

Numbers are written with 17 significant digits so every 64-bit float round
trips losslessly; per-trial rows are a pure function of (config, trial
index), which is what makes the byte-identity reproducibility contract
testable across worker counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

FORMAT_VERSION = "fpp-report/1"


def fmt_float(x: float) -> str:
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.17g}"
    return str(x)


def _to_json(obj, indent, level) -> str:
    pad = " " * (indent * level)
    pad2 = " " * (indent * (level + 1))
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return f'"{fmt_float(obj)}"'
        return fmt_float(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{out}"'
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [_to_json(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(pad2 + i for i in items) + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'"{k}": ' + _to_json(v, indent, level + 1) for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(pad2 + i for i in items) + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def to_json(obj, indent=2) -> str:
    """JSON text with deterministic 17-digit float formatting."""
    return _to_json(obj, indent, 0) + "\n"


@dataclass
class ExperimentReport:
    kind: str
    config: dict
    columns: list
    rows: list  # list of tuples aligned with columns
    aggregates: dict = field(default_factory=dict)
    counters: dict = field(default_factory=dict)
    gates: dict = field(default_factory=dict)
    format_version: str = FORMAT_VERSION

    def rows_csv(self) -> str:
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(fmt_float(v) for v in row))
        return "\n".join(lines) + "\n"

    def as_dict(self) -> dict:
        return {
            "format": self.format_version,
            "kind": self.kind,
            "config": self.config,
            "columns": list(self.columns),
            "rows": [list(r) for r in self.rows],
            "aggregates": self.aggregates,
            "counters": self.counters,
            "gates": self.gates,
        }

    def json(self) -> str:
        return to_json(self.as_dict())

    @property
    def all_gates_pass(self) -> bool:
        return all(self.gates.values())


def parse_rows_csv(text: str):
    """Inverse of rows_csv (floats parsed back; ints preserved when exact)."""
    lines = [ln for ln in text.splitlines() if ln]
    columns = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        vals = []
        for tok in ln.split(","):
            try:
                vals.append(int(tok))
            except ValueError:
                vals.append(float(tok))
        rows.append(tuple(vals))
    return columns, rows
