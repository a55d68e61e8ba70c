"""JSON and CSV emission with platform-stable number formatting.

Floats are written with 17 significant digits, complex numbers as
``{"re": ..., "im": ...}``; non-finite floats become ``null``. CSV uses ``,``,
a mandatory header row, UTF-8 and LF line endings.
"""
from __future__ import annotations

import csv
import io
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

SCHEMA_VERSION = "1"
TIMESTAMP_KEY = "generated_at"


def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        return "null"
    if x == 0.0:
        return "0.0" if math.copysign(1.0, x) > 0 else "-0.0"
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def _normalize(obj):
    if isinstance(obj, dict):
        return {str(k): _normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_normalize(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _dump(obj, indent: int, level: int, out: list[str]):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f"{pad}{json.dumps(k)}: ")
            _dump(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _dump(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "]")
    elif isinstance(obj, float):
        out.append(format_float(obj))
    else:
        out.append(json.dumps(obj))


def dumps(obj, indent: int = 2) -> str:
    out: list[str] = []
    _dump(_normalize(obj), indent, 0, out)
    return "".join(out) + "\n"


def envelope(subcommand: str, config: dict, result: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "subcommand": subcommand,
        "config": config,
        "result": result,
        TIMESTAMP_KEY: datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def strip_timestamp(doc: dict) -> dict:
    return {k: v for k, v in doc.items() if k != TIMESTAMP_KEY}


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO(newline="")
    w = csv.writer(buf, delimiter=",", lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, (float, np.floating)):
        return format_float(v) if math.isfinite(v) else str(float(v))
    return v


def write_text(text: str, path: str | None, stream=None):
    if path:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    else:
        (stream or sys.stdout).write(text)
