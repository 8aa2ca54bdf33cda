"""JSON wire formats for matrices and schedules.

Matrix: {"rows": n, "cols": m, "entries": [[re, im], ...]} with the entries
flat in row-major order.  Schedule: {"segments": [{"type": "free",
"duration": x, "h": <matrix>} | {"type": "pulse", "u": <matrix>}]}.
Malformed input raises ValueError; the CLI maps that to exit code 2.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .dynamics import Free, HamiltonianSchedule, Pulse


def matrix_to_obj(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in m.reshape(-1)],
    }


def matrix_from_obj(obj: Any) -> np.ndarray:
    if not isinstance(obj, dict):
        raise ValueError(f"matrix object must be a dict, got {type(obj).__name__}")
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        entries = obj["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix object: {exc}") from exc
    if rows < 1 or cols < 1:
        raise ValueError(f"matrix dims must be positive, got {rows}x{cols}")
    if len(entries) != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, got {len(entries)}")
    flat = np.empty(rows * cols, dtype=complex)
    for i, pair in enumerate(entries):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ValueError(f"entry {i} is not a [re, im] pair")
        flat[i] = complex(float(pair[0]), float(pair[1]))
    if not np.all(np.isfinite(flat.view(float))):
        raise ValueError("matrix contains non-finite entries")
    return flat.reshape(rows, cols)


def schedule_to_obj(sched: HamiltonianSchedule) -> dict:
    segs = []
    for seg in sched.segments:
        if isinstance(seg, Free):
            segs.append({"type": "free", "duration": seg.duration, "h": matrix_to_obj(seg.h)})
        else:
            segs.append({"type": "pulse", "u": matrix_to_obj(seg.u)})
    return {"segments": segs}


def schedule_from_obj(obj: Any) -> HamiltonianSchedule:
    if not isinstance(obj, dict) or "segments" not in obj:
        raise ValueError("schedule object needs a 'segments' list")
    segs: list = []
    for i, s in enumerate(obj["segments"]):
        kind = s.get("type")
        if kind == "free":
            segs.append(Free(float(s["duration"]), matrix_from_obj(s["h"])))
        elif kind == "pulse":
            segs.append(Pulse(matrix_from_obj(s["u"])))
        else:
            raise ValueError(f"segment {i} has unknown type {kind!r}")
    return HamiltonianSchedule(tuple(segs))


def load_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read JSON from {path}: {exc}") from exc


def _coerce_scalar(o: Any):
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def dump_json(obj: Any, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=1, sort_keys=False, default=_coerce_scalar)
        fh.write("\n")
