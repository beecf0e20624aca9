"""Schema-versioned JSON reports.

The wall-clock timestamp lives in exactly one field, ``provenance.timestamp``,
so two runs of the same config can be compared after masking it.
"""

from __future__ import annotations

import csv
import io
import json
import math
from datetime import datetime, timezone
from fractions import Fraction

import numpy as np

SCHEMA_VERSION = "1.0"
TIMESTAMP_MASK = "<masked>"


def tool_version() -> str:
    try:
        from importlib.metadata import version

        return version("artifact")
    except Exception:  # not installed: running from a source tree
        return "0.1.0"


def clean(obj):
    """Plain-JSON view: numpy scalars and arrays unwrapped, non-finite floats as strings."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating, Fraction)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def build_report(
    command: str,
    config: dict,
    summary: dict,
    rows: list | None = None,
    seed: int | None = None,
    constants: dict | None = None,
    exact: bool | dict | None = None,
) -> dict:
    return clean({
        "schema_version": SCHEMA_VERSION,
        "tool_version": tool_version(),
        "command": command,
        "config": config,
        "summary": summary,
        "rows": rows or [],
        "provenance": {
            "seed": seed,
            "constants": constants or {},
            "exact": exact,
            "timestamp": datetime.now(timezone.utc).isoformat(),
        },
    })


def mask_timestamp(report: dict) -> dict:
    out = json.loads(json.dumps(report))
    out["provenance"]["timestamp"] = TIMESTAMP_MASK
    return out


def dumps_json(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    cols = list(rows[0].keys())
    for r in rows[1:]:
        cols += [c for c in r if c not in cols]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({c: json.dumps(v) if isinstance(v, (list, dict)) else v for c, v in clean(r).items()})
    return buf.getvalue()
