"""Run configuration: JSON document with ``"schema": 1``.

Validation errors name the offending field path (``closure.so3.mu``);
parse errors carry the line and column reported by the JSON decoder.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .closures import (
    ClosureError,
    ClosureParamsSE3,
    ClosureParamsSO3,
    ClosureParamsSO4Ex1,
    ClosureParamsSO4Ex2,
    PolySpec,
    SMKParams,
)
from .dynamics import se2_closure_problems
from .grid import SCHEMES, FourierModeSpec, GridError, GridSpec, synth_field
from .state import STATE_FIELDS, StrandState

GROUP_STATE = {"so3": "so3", "so4_ex1": "so4", "so4_ex2": "so4", "se3": "se3", "se2": "se3", "smk": "se3"}

DEFAULTS = {
    "scheme": "central4",
    "t_end": 1.0,
    "output_cadence": 10,
    "snapshot_cadence": None,  # falls back to output_cadence * 10
    "lambdas": [0.5, 1.0, 2.0, 5.0],
    "seed": 0,
    "output_dir": "gstrand_out",
    "plots": True,
    "verify": {"steps": 50, "constraint_tol": 1e-10, "zcr_tol": 1e-10},
    "series": {"pointwise_tol": 1e-10, "integral_tol": 1e-9, "scheme": "spectral"},
}

_CLOSURE_KEYS = {
    "so3": {"A": "vec", "mu": "num", "nu": "num", "f": "poly"},
    "so4_ex1": {"a1": "vec", "a2": "vec", "mu": "num", "nu": "num", "f": "poly"},
    "so4_ex2": {"a": "vec", "b": "vec", "nu": "num", "mu": "num", "sigma": "num"},
    "se3": {"a1": "vec", "a2": "vec", "mu": "num", "nu": "num", "f": "poly"},
    "smk": {
        "J": "mat",
        "K_Gamma": "mat",
        "K_Omega": "mat",
        "Gamma_ref": "vec",
        "Omega_ref": "vec",
        "probe_a1": "vec",
        "probe_a2": "vec",
    },
}
_CLOSURE_KEYS["se2"] = _CLOSURE_KEYS["se3"]
_REQUIRED = {"so3": ("A",), "so4_ex1": ("a1", "a2"), "so4_ex2": ("a", "b"), "se3": ("a1", "a2"), "se2": ("a1", "a2"), "smk": ()}

_TOP_KEYS = {
    "schema", "group", "grid", "scheme", "dt", "t_end", "output_cadence", "snapshot_cadence",
    "closure", "initial", "lambdas", "seed", "output_dir", "plots", "verify", "series",
}


class ConfigError(ValueError):
    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}" if path else reason)
        self.path = path
        self.reason = reason


class ConfigParseError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col


@dataclass
class RunConfig:
    group: str
    grid: GridSpec
    scheme: str
    dt: float
    t_end: float
    output_cadence: int
    snapshot_cadence: int
    closure: object
    initial: dict  # field -> {"offset": [..], "modes": [FourierModeSpec]}
    lambdas: list
    seed: int
    output_dir: str
    plots: bool = True
    verify: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict)
    raw_closure: dict = field(default_factory=dict)

    @property
    def state_group(self) -> str:
        return GROUP_STATE[self.group]

    @property
    def nsteps(self) -> int:
        return int(round(self.t_end / self.dt))

    def initial_state(self, grid: GridSpec | None = None) -> StrandState:
        grid = grid or self.grid
        fields = {}
        for name in STATE_FIELDS[self.state_group]:
            spec = self.initial.get(name, {"offset": [0.0, 0.0, 0.0], "modes": []})
            modes = spec["modes"] if grid.n > 1 else []
            fields[name] = synth_field(grid, modes, spec["offset"])
        return StrandState.from_fields(self.state_group, grid, **fields)

    def resolved(self) -> dict:
        """Plain-data form with every default filled in; parses back to an equal config."""
        init = {
            k: {
                "offset": list(v["offset"]),
                "modes": [
                    {"component": m.component, "wavenumber": m.wavenumber, "amplitude": m.amplitude, "phase": m.phase}
                    for m in v["modes"]
                ],
            }
            for k, v in self.initial.items()
        }
        return {
            "schema": 1,
            "group": self.group,
            "grid": {"n": self.grid.n, "length": self.grid.length},
            "scheme": self.scheme,
            "dt": self.dt,
            "t_end": self.t_end,
            "output_cadence": self.output_cadence,
            "snapshot_cadence": self.snapshot_cadence,
            "closure": {self.group: self.raw_closure},
            "initial": init,
            "lambdas": list(self.lambdas),
            "seed": self.seed,
            "output_dir": self.output_dir,
            "plots": self.plots,
            "verify": dict(self.verify),
            "series": dict(self.series),
        }


def _num(v, path, positive=False, integer=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(path, f"expected a number, got {type(v).__name__}")
    if not np.isfinite(v):
        raise ConfigError(path, "must be finite")
    if integer and int(v) != v:
        raise ConfigError(path, "must be an integer")
    if positive and v <= 0:
        raise ConfigError(path, "must be positive")
    return int(v) if integer else float(v)


def _vec(v, path):
    if not isinstance(v, list) or len(v) != 3:
        raise ConfigError(path, "expected a list of 3 numbers")
    return [_num(x, f"{path}[{i}]") for i, x in enumerate(v)]


def _mat(v, path):
    if not isinstance(v, list) or len(v) != 3:
        raise ConfigError(path, "expected a 3x3 nested list")
    return [_vec(row, f"{path}[{i}]") for i, row in enumerate(v)]


def _poly(v, path):
    if not isinstance(v, list):
        raise ConfigError(path, "expected a list of polynomial coefficients")
    if len(v) > 9:
        raise ConfigError(path, "polynomial degree must be at most 8")
    return [_num(x, f"{path}[{i}]") for i, x in enumerate(v)]


def _dict(v, path):
    if not isinstance(v, dict):
        raise ConfigError(path, f"expected an object, got {type(v).__name__}")
    return v


def _closure(group: str, block, path: str):
    block = _dict(block, path)
    for key in block:
        if key not in _CLOSURE_KEYS:
            raise ConfigError(f"{path}.{key}", f"unknown closure block {key!r}")
        if key != group:
            raise ConfigError(f"{path}.{key}", f"closure block {key!r} does not match group {group!r}")
    if group not in block:
        raise ConfigError(f"{path}.{group}", "missing closure block")
    spec = _dict(block[group], f"{path}.{group}")
    allowed = _CLOSURE_KEYS[group]
    raw = {}
    for key, val in spec.items():
        kp = f"{path}.{group}.{key}"
        kind = allowed.get(key)
        if kind is None:
            raise ConfigError(kp, f"not a parameter of the {group} closure")
        raw[key] = {"num": _num, "vec": _vec, "mat": _mat, "poly": _poly}[kind](val, kp)
    for key in _REQUIRED[group]:
        if key not in raw:
            raise ConfigError(f"{path}.{group}.{key}", "required")
    kw = {k: (PolySpec(tuple(v)) if allowed[k] == "poly" else (np.array(v) if isinstance(v, list) else v)) for k, v in raw.items()}
    cls = {
        "so3": ClosureParamsSO3,
        "so4_ex1": ClosureParamsSO4Ex1,
        "so4_ex2": ClosureParamsSO4Ex2,
        "se3": ClosureParamsSE3,
        "se2": ClosureParamsSE3,
        "smk": SMKParams,
    }[group]
    try:
        params = cls(**kw)
    except ClosureError as e:
        raise ConfigError(f"{path}.{group}", str(e)) from None
    # materialize defaults for the resolved echo
    for k, kind in allowed.items():
        if k not in raw:
            v = getattr(params, k)
            raw[k] = list(v.coefficients) if kind == "poly" else (np.asarray(v).tolist() if kind in ("vec", "mat") else float(v))
    if group == "se2":
        problems = se2_closure_problems(params)
        if problems:
            raise ConfigError(f"{path}.{group}", "; ".join(problems))
    return params, raw


def _initial(group: str, block, grid: GridSpec, path: str) -> dict:
    block = _dict(block, path)
    names = STATE_FIELDS[GROUP_STATE[group]]
    out = {}
    for fname, spec in block.items():
        fp = f"{path}.{fname}"
        if fname not in names:
            raise ConfigError(fp, f"not a field of the {group} state (expected one of {', '.join(names)})")
        spec = _dict(spec, fp)
        for k in spec:
            if k not in ("offset", "modes"):
                raise ConfigError(f"{fp}.{k}", "unknown key")
        offset = _vec(spec.get("offset", [0.0, 0.0, 0.0]), f"{fp}.offset")
        modes = []
        raw_modes = spec.get("modes", [])
        if not isinstance(raw_modes, list):
            raise ConfigError(f"{fp}.modes", "expected a list")
        for i, m in enumerate(raw_modes):
            mp = f"{fp}.modes[{i}]"
            m = _dict(m, mp)
            for k in m:
                if k not in ("component", "wavenumber", "amplitude", "phase"):
                    raise ConfigError(f"{mp}.{k}", "unknown key")
            comp = _num(m.get("component", 0), f"{mp}.component", integer=True)
            if comp not in (0, 1, 2):
                raise ConfigError(f"{mp}.component", "must be 0, 1 or 2")
            k = _num(m.get("wavenumber", 0), f"{mp}.wavenumber", integer=True)
            if grid.n > 1 and abs(k) > grid.n // 2 - 1:
                raise ConfigError(f"{mp}.wavenumber", f"|k| must be at most n/2 - 1 = {grid.n // 2 - 1}")
            amp = _num(m.get("amplitude", 0.0), f"{mp}.amplitude")
            ph = _num(m.get("phase", 0.0), f"{mp}.phase")
            modes.append(FourierModeSpec(comp, k, amp, ph))
        out[fname] = {"offset": offset, "modes": modes}
    for fname in names:
        out.setdefault(fname, {"offset": [0.0, 0.0, 0.0], "modes": []})
    if group == "se2":
        _check_se2_initial(out, path)
    return out


# components that must vanish for planar data: Pi, Omega normal to the plane, Mom, Gamma in it
_SE2_ALLOWED = {"Pi": (2,), "Omega": (2,), "Mom": (0, 1), "Gamma": (0, 1)}


def _check_se2_initial(init: dict, path: str) -> None:
    for fname, allowed in _SE2_ALLOWED.items():
        spec = init[fname]
        for c in range(3):
            if c not in allowed and spec["offset"][c] != 0:
                raise ConfigError(f"{path}.{fname}.offset[{c}]", "must be zero for planar (se2) data")
        for i, m in enumerate(spec["modes"]):
            if m.component not in allowed:
                raise ConfigError(f"{path}.{fname}.modes[{i}].component", "breaks the planar (se2) split")


def validate(doc: dict) -> RunConfig:
    doc = _dict(doc, "")
    for key in doc:
        if key not in _TOP_KEYS:
            raise ConfigError(key, "unknown top-level key")
    if doc.get("schema") != 1:
        raise ConfigError("schema", "must be 1")
    group = doc.get("group")
    if group not in GROUP_STATE:
        raise ConfigError("group", f"must be one of {', '.join(GROUP_STATE)}")
    g = _dict(doc.get("grid"), "grid") if "grid" in doc else None
    if g is None:
        raise ConfigError("grid", "required")
    for k in g:
        if k not in ("n", "length"):
            raise ConfigError(f"grid.{k}", "unknown key")
    n = _num(g.get("n", 128), "grid.n", positive=True, integer=True)
    length = _num(g.get("length", 1.0), "grid.length", positive=True)
    try:
        grid = GridSpec(n, length)
    except GridError as e:
        raise ConfigError("grid.n", str(e)) from None
    scheme = doc.get("scheme", DEFAULTS["scheme"])
    if scheme not in SCHEMES:
        raise ConfigError("scheme", f"must be one of {', '.join(SCHEMES)}")
    if scheme == "spectral" and n > 1 and n % 2:
        raise ConfigError("grid.n", "spectral scheme needs an even number of points")
    dt = _num(doc.get("dt", 0.5 * grid.ds), "dt", positive=True)
    if n > 1 and dt > 2 * grid.ds:
        raise ConfigError("dt", f"exceeds the stability limit 2*ds = {2 * grid.ds}")
    t_end = _num(doc.get("t_end", DEFAULTS["t_end"]), "t_end")
    if t_end < 0:
        raise ConfigError("t_end", "must be nonnegative")
    cad = _num(doc.get("output_cadence", DEFAULTS["output_cadence"]), "output_cadence", positive=True, integer=True)
    snap = doc.get("snapshot_cadence")
    snap = cad * 10 if snap is None else _num(snap, "snapshot_cadence", positive=True, integer=True)
    if "closure" not in doc:
        raise ConfigError("closure", "required")
    params, raw = _closure(group, doc["closure"], "closure")
    initial = _initial(group, doc.get("initial", {}), grid, "initial")
    lambdas = doc.get("lambdas", DEFAULTS["lambdas"])
    if not isinstance(lambdas, list) or not lambdas:
        raise ConfigError("lambdas", "expected a nonempty list of numbers")
    lambdas = [_num(x, f"lambdas[{i}]") for i, x in enumerate(lambdas)]
    seed = _num(doc.get("seed", DEFAULTS["seed"]), "seed", integer=True)
    out = doc.get("output_dir", DEFAULTS["output_dir"])
    if not isinstance(out, str) or not out:
        raise ConfigError("output_dir", "expected a nonempty string")
    plots = doc.get("plots", DEFAULTS["plots"])
    if not isinstance(plots, bool):
        raise ConfigError("plots", "expected true or false")
    verify = dict(DEFAULTS["verify"])
    for k, v in _dict(doc.get("verify", {}), "verify").items():
        if k not in verify:
            raise ConfigError(f"verify.{k}", "unknown key")
        verify[k] = _num(v, f"verify.{k}", positive=True, integer=k == "steps")
    series = dict(DEFAULTS["series"])
    if n > 1 and n % 2:
        series["scheme"] = "central4"  # spectral default is unavailable on odd grids
    for k, v in _dict(doc.get("series", {}), "series").items():
        if k not in series:
            raise ConfigError(f"series.{k}", "unknown key")
        if k == "scheme":
            if v not in SCHEMES:
                raise ConfigError("series.scheme", f"must be one of {', '.join(SCHEMES)}")
            series[k] = v
        else:
            series[k] = _num(v, f"series.{k}", positive=True)
    if series["scheme"] == "spectral" and n > 1 and n % 2:
        raise ConfigError("series.scheme", "spectral scheme needs an even number of points")
    return RunConfig(
        group=group,
        grid=grid,
        scheme=scheme,
        dt=dt,
        t_end=t_end,
        output_cadence=cad,
        snapshot_cadence=snap,
        closure=params,
        initial=initial,
        lambdas=lambdas,
        seed=seed,
        output_dir=out,
        plots=plots,
        verify=verify,
        series=series,
        raw_closure=raw,
    )


def loads(text: str) -> RunConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigParseError(e.msg, e.lineno, e.colno) from None
    return validate(doc)


def parse_config(path) -> RunConfig:
    return loads(Path(path).read_text())
