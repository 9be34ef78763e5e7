"""Deterministic CSV / JSON / plot-data writers."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path


def fmt(x) -> str:
    """17 significant digits for floats, so values round-trip exactly."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return format(x, ".17g")
    if isinstance(x, complex):
        return f"{format(x.real, '.17g')}{format(x.imag, '+.17g')}j"
    return str(x)


def write_csv(path: Path, header, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def write_json(path: Path, obj) -> Path:
    path = Path(path)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n")
    return path


def _json_default(x):
    if hasattr(x, "tolist"):
        return x.tolist()
    if isinstance(x, complex):
        return [x.real, x.imag]
    raise TypeError(f"cannot serialize {type(x).__name__}")


def write_plot_data(path: Path, values) -> Path:
    """Two whitespace-separated columns: index and value."""
    path = Path(path)
    with path.open("w") as fh:
        for j, v in enumerate(values):
            fh.write(f"{j} {fmt(float(v))}\n")
    return path
