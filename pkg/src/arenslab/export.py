"""Serialization of grids, estimates and reports.

Complex numbers are written as ``"re+imj"`` with 17 significant digits in
CSV, which round-trips every double exactly, and as ``[re, im]`` pairs in
JSON.
"""

import csv
import enum
import io
import json
import math
from dataclasses import asdict, is_dataclass

import numpy as np

__all__ = ["format_complex", "parse_complex", "grid_to_csv", "grid_from_csv", "to_jsonable",
           "dumps", "grid_record", "verdict_record"]


def format_complex(z):
    """``"re+imj"`` with 17 significant digits.

    >>> format_complex(1 - 0.5j)
    '1-0.5j'
    """
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}j"


def parse_complex(text):
    return complex(text.strip())


def grid_to_csv(entries):
    """Row-major CSV text, one grid row per line."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in np.asarray(entries):
        writer.writerow([format_complex(z) for z in row])
    return buf.getvalue()


def grid_from_csv(text):
    rows = [[parse_complex(cell) for cell in row] for row in csv.reader(io.StringIO(text)) if row]
    return np.array(rows, dtype=np.complex128)


def _number(x):
    # JSON has no inf/nan literals
    if math.isfinite(x):
        return x
    return str(x)


def to_jsonable(obj):
    """Recursively convert numpy values, complex numbers, enums and dataclasses."""
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _number(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return [_number(float(obj.real)), _number(float(obj.imag))]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()] if obj.dtype.kind == "c" else to_jsonable(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if is_dataclass(obj):
        return to_jsonable(asdict(obj))
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def dumps(obj):
    """Deterministic JSON text (sorted keys, fixed separators)."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _limit_record(est):
    if est is None:
        return None
    return {"value": est.value, "stabilized": est.stabilized, "lines_used": est.lines_used}


def grid_record(grid, include_entries=True):
    rec = {
        "N": grid.N,
        "scenario": grid.scenario_id,
        "tail_window": grid.tail_window,
        "eps": grid.eps,
        "row_then_col": _limit_record(grid.row_then_col),
        "col_then_row": _limit_record(grid.col_then_row),
        "flags": {
            "row_then_col_stabilized": bool(grid.row_then_col and grid.row_then_col.stabilized),
            "col_then_row_stabilized": bool(grid.col_then_row and grid.col_then_row.stabilized),
        },
    }
    if include_entries:
        rec["entries"] = np.asarray(grid.entries)
    return rec


def verdict_record(v):
    return {"status": v.status, "discrepancy": v.discrepancy, "tol": v.tol, "witness": v.witness}
