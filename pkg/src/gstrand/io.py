"""Serialization: 17-significant-digit JSON, NDJSON streams, snapshot and filament CSVs."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .grid import GridSpec
from .state import STATE_FIELDS, StrandState


def fmt(x) -> str:
    """Round-trippable number text with 17 significant digits."""
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def dumps(obj) -> str:
    """Compact, key-ordered JSON with every float written by :func:`fmt`.

    The stdlib encoder always uses repr() for floats, which gives the
    shortest round-trip form rather than a fixed digit count.
    """
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj) + "\n")


class NDJSONWriter:
    def __init__(self, path):
        self.path = Path(path)
        self._fh = open(self.path, "w")

    def write(self, record: dict) -> None:
        self._fh.write(dumps(record) + "\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_ndjson(path) -> list:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def write_snapshot(path, state: StrandState, meta: dict | None = None) -> Path:
    """CSV ``s,field,component,value`` plus a ``.json`` sidecar describing the grid."""
    path = Path(path)
    s = state.grid.s
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["s", "field", "component", "value"])
        for name in state.names:
            f = state[name]
            for j in range(state.grid.n):
                for c in range(3):
                    w.writerow([fmt(s[j]), name, c, fmt(f[j, c])])
    side = {"group": state.group, "n": state.grid.n, "length": state.grid.length, "fields": list(state.names)}
    side.update(meta or {})
    write_json(path.with_suffix(".json"), side)
    return path


class SnapshotError(ValueError):
    pass


def read_snapshot(path) -> tuple:
    """Inverse of :func:`write_snapshot`; returns (state, sidecar dict)."""
    path = Path(path)
    side_path = path.with_suffix(".json")
    if not side_path.exists():
        raise SnapshotError(f"missing sidecar {side_path}")
    meta = json.loads(side_path.read_text())
    group = meta.get("group")
    if group not in STATE_FIELDS:
        raise SnapshotError(f"sidecar names unknown group {group!r}")
    grid = GridSpec(int(meta["n"]), float(meta["length"]))
    names = STATE_FIELDS[group]
    data = np.full((len(names), grid.n, 3), np.nan)
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r, None)
        if header != ["s", "field", "component", "value"]:
            raise SnapshotError(f"bad snapshot header {header}")
        for row in r:
            s, name, comp, val = row
            if name not in names:
                raise SnapshotError(f"field {name!r} does not belong to group {group}")
            j = int(round(float(s) / grid.ds))
            if not 0 <= j < grid.n:
                raise SnapshotError(f"s={s} lies outside the grid")
            data[names.index(name), j, int(comp)] = float(val)
    if not np.all(np.isfinite(data)):
        raise SnapshotError("snapshot is incomplete or holds non-finite values")
    return StrandState(group, grid, data), meta


def write_filament(path, s, points) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["s", "x", "y", "z"])
        for sj, p in zip(s, points):
            w.writerow([fmt(sj), fmt(p[0]), fmt(p[1]), fmt(p[2])])
    return path
