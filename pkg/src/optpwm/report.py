"""CSV and JSON writers shared by the CLI."""

from __future__ import annotations

import csv
import json
import math

import numpy as np

from optpwm.circuit import PiecewiseCurrent, current_samples


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def spec_comment(spec: dict | None) -> str:
    if spec is None:
        return ""
    return "# spec=" + json.dumps(spec, sort_keys=True, default=_default) + "\n"


def write_rows_csv(path, rows: list[dict], columns: list[str], spec: dict | None = None) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(spec_comment(spec))
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(c)) for c in columns])


def write_current_csv(path, current: PiecewiseCurrent, samples: int = 2000, spec: dict | None = None) -> None:
    """Dump one period as ``t_seconds,i_amperes``."""
    t = np.linspace(0.0, current.period, samples, endpoint=False)
    i = current_samples(current, t)
    with open(path, "w", newline="") as fh:
        fh.write(spec_comment(spec))
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t_seconds", "i_amperes"])
        for a, b in zip(t.tolist(), i.tolist()):
            writer.writerow([repr(a), repr(b)])


def write_json(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_default)
        fh.write("\n")


def _default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")
