"""Prognostic and diagnostic field containers.

Both containers keep their fields stacked in a single (k, n, 3) array so
that Runge-Kutta arithmetic is one vector operation.
"""

from __future__ import annotations

import numpy as np

from .grid import GridSpec

GROUPS = ("so3", "so4", "se3")

STATE_FIELDS = {
    "so3": ("Pi", "Gamma"),
    "so4": ("pi", "xi", "Omega", "Gamma"),
    "se3": ("Pi", "Mom", "Omega", "Gamma"),
}

DIAG_FIELDS = {
    "so3": ("Omega", "Xi"),
    "so4": ("CapPi", "CapXi", "omega", "gamma"),
    "se3": ("W", "V", "M", "N"),
}


class _Fields:
    _names: dict = {}

    def __init__(self, group: str, grid: GridSpec, data):
        if group not in GROUPS:
            raise ValueError(f"unknown group {group!r}")
        data = np.asarray(data, dtype=float)
        names = self._names[group]
        if data.shape != (len(names), grid.n, 3):
            raise ValueError(f"expected shape {(len(names), grid.n, 3)}, got {data.shape}")
        self.group = group
        self.grid = grid
        self.data = data

    @property
    def names(self) -> tuple:
        return self._names[self.group]

    def __getattr__(self, name):
        names = type(self)._names.get(self.__dict__.get("group"), ())
        if name in names:
            return self.data[names.index(name)]
        raise AttributeError(name)

    def __getitem__(self, name):
        return self.data[self.names.index(name)]

    def as_dict(self) -> dict:
        return {k: self.data[i] for i, k in enumerate(self.names)}

    @classmethod
    def from_fields(cls, group: str, grid: GridSpec, **fields):
        names = cls._names[group]
        missing = set(names) - set(fields)
        extra = set(fields) - set(names)
        if missing or extra:
            raise ValueError(f"{group} needs fields {names}; missing {sorted(missing)}, unexpected {sorted(extra)}")
        data = np.stack([np.broadcast_to(np.asarray(fields[k], dtype=float), (grid.n, 3)) for k in names])
        return cls(group, grid, data)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.data)))


class StrandState(_Fields):
    """Prognostic fields of one strand on a periodic grid."""

    _names = STATE_FIELDS

    def copy(self) -> "StrandState":
        return StrandState(self.group, self.grid, self.data.copy())

    def with_data(self, data) -> "StrandState":
        return StrandState(self.group, self.grid, data)

    @classmethod
    def zeros(cls, group: str, grid: GridSpec) -> "StrandState":
        return cls(group, grid, np.zeros((len(STATE_FIELDS[group]), grid.n, 3)))

    @classmethod
    def random(cls, group: str, grid: GridSpec, rng, kmax: int = 3, amp: float = 0.5) -> "StrandState":
        """Smooth random state: a few random Fourier modes per component."""
        k = len(STATE_FIELDS[group])
        s = grid.s / grid.length
        data = amp * rng.normal(size=(k, 1, 3)) * np.ones((1, grid.n, 1))
        if grid.n > 1:
            kmax = min(kmax, grid.n // 2 - 1)
            for m in range(1, kmax + 1):
                a = amp * rng.normal(size=(k, 1, 3)) / m
                b = amp * rng.normal(size=(k, 1, 3)) / m
                ang = 2 * np.pi * m * s[None, :, None]
                data = data + a * np.cos(ang) + b * np.sin(ang)
        return cls(group, grid, data)


class DiagnosticState(_Fields):
    """Diagnostic fields computed from a StrandState by a closure."""

    _names = DIAG_FIELDS
