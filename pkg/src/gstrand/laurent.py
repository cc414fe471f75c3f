"""Truncated Laurent series in the spectral parameter with grid-function coefficients."""

from __future__ import annotations

import numpy as np

from .grid import GridSpec, deriv_s


class LaurentField:
    """sum_k c_k lambda^k for k_min <= k <= k_max.

    Products keep every power down to ``floor`` (default: no truncation),
    so multiplication is exact whenever both factors are exact.
    """

    def __init__(self, grid: GridSpec, coeffs: dict, floor: int | None = None):
        self.grid = grid
        self.floor = floor
        self.coeffs = {}
        for k, c in coeffs.items():
            if floor is not None and k < floor:
                continue
            self.coeffs[int(k)] = np.broadcast_to(np.asarray(c, dtype=complex), (grid.n,)).copy()

    @property
    def k_min(self) -> int:
        return min(self.coeffs) if self.coeffs else 0

    @property
    def k_max(self) -> int:
        return max(self.coeffs) if self.coeffs else 0

    def __getitem__(self, k: int) -> np.ndarray:
        return self.coeffs.get(k, np.zeros(self.grid.n, dtype=complex))

    def _floor(self, other) -> int | None:
        fl = [f for f in (self.floor, getattr(other, "floor", None)) if f is not None]
        return max(fl) if fl else None

    def _lift(self, other) -> "LaurentField":
        if isinstance(other, LaurentField):
            return other
        return LaurentField(self.grid, {0: other})

    def __add__(self, other) -> "LaurentField":
        other = self._lift(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out[k] + c if k in out else c
        return LaurentField(self.grid, out, self._floor(other))

    __radd__ = __add__

    def __neg__(self) -> "LaurentField":
        return LaurentField(self.grid, {k: -c for k, c in self.coeffs.items()}, self.floor)

    def __sub__(self, other) -> "LaurentField":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "LaurentField":
        return self._lift(other) - self

    def __mul__(self, other) -> "LaurentField":
        if not isinstance(other, LaurentField):
            return LaurentField(self.grid, {k: c * other for k, c in self.coeffs.items()}, self.floor)
        floor = self._floor(other)
        out: dict = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                if floor is not None and i + j < floor:
                    continue
                out[i + j] = out[i + j] + a * b if i + j in out else a * b
        return LaurentField(self.grid, out, floor)

    __rmul__ = __mul__

    def ds(self, scheme: str = "spectral") -> "LaurentField":
        return LaurentField(
            self.grid, {k: deriv_s(c, self.grid, scheme) for k, c in self.coeffs.items()}, self.floor
        )

    def evaluate(self, lam) -> np.ndarray:
        return sum(c * lam**k for k, c in self.coeffs.items())

    def max_abs(self, k: int) -> float:
        return float(np.abs(self[k]).max())
