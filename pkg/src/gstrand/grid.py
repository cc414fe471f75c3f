"""Periodic 1-D grid, derivative stencils, quadrature and initial-data synthesis.

Fields are plain arrays whose grid axis is ``axis`` (default 0), so a
Vec3 field has shape (n, 3) and a stack of fields (k, n, 3) uses axis=1.
A grid with n == 1 is the spatially uniform (ODE) grid: every derivative
is identically zero there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SCHEMES = ("central2", "central4", "spectral")


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    n: int
    length: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise GridError(f"n must be a positive integer, got {self.n}")
        if self.n != 1 and self.n < 8:
            raise GridError(f"n must be 1 (uniform mode) or at least 8, got {self.n}")
        if not (np.isfinite(self.length) and self.length > 0):
            raise GridError(f"length must be positive, got {self.length}")

    @property
    def ds(self) -> float:
        return self.length / self.n

    @property
    def s(self) -> np.ndarray:
        return np.arange(self.n) * self.ds

    @property
    def uniform(self) -> bool:
        return self.n == 1

    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers matching ``np.fft.fftfreq`` ordering."""
        return 2 * np.pi * np.fft.fftfreq(self.n, d=self.ds)


@dataclass(frozen=True)
class FourierModeSpec:
    component: int
    wavenumber: int
    amplitude: float
    phase: float = 0.0

    def __post_init__(self):
        if self.component not in (0, 1, 2):
            raise GridError(f"component must be 0, 1 or 2, got {self.component}")


def _roll(f, k, axis):
    return np.roll(f, k, axis=axis)


def deriv_s(f, grid: GridSpec, scheme: str = "central4", axis: int = 0) -> np.ndarray:
    """Periodic derivative d/ds of ``f`` along ``axis``."""
    f = np.asarray(f)
    if f.shape[axis] != grid.n:
        raise GridError(f"field has {f.shape[axis]} points on axis {axis}, grid has {grid.n}")
    if scheme not in SCHEMES:
        raise GridError(f"unknown scheme {scheme!r}")
    if grid.n == 1:
        return np.zeros_like(f)
    h = grid.ds
    if scheme == "central2":
        return (_roll(f, -1, axis) - _roll(f, 1, axis)) / (2 * h)
    if scheme == "central4":
        # grouped as differences so constants cancel exactly
        d1 = _roll(f, -1, axis) - _roll(f, 1, axis)
        d2 = _roll(f, -2, axis) - _roll(f, 2, axis)
        return (8 * d1 - d2) / (12 * h)
    if grid.n % 2:
        raise GridError("spectral derivative needs an even number of points")
    if np.iscomplexobj(f):
        k = grid.wavenumbers()
        k[grid.n // 2] = 0.0
        shape = [1] * f.ndim
        shape[axis] = grid.n
        return np.fft.ifft(1j * k.reshape(shape) * np.fft.fft(f, axis=axis), axis=axis)
    k = 2 * np.pi * np.fft.rfftfreq(grid.n, d=h)
    k[-1] = 0.0  # Nyquist mode has no odd partner
    shape = [1] * f.ndim
    shape[axis] = k.size
    fh = np.fft.rfft(f, axis=axis)
    return np.fft.irfft(1j * k.reshape(shape) * fh, n=grid.n, axis=axis)


def integrate_s(f, grid: GridSpec, axis: int = 0):
    """Periodic rectangle rule ds * sum along ``axis``."""
    f = np.asarray(f)
    return grid.ds * np.sum(f, axis=axis)


def synth_field(grid: GridSpec, modes=(), offset=(0.0, 0.0, 0.0)) -> np.ndarray:
    """Sum of cosine modes plus a constant offset, shape (n, 3)."""
    out = np.tile(np.asarray(offset, dtype=float), (grid.n, 1))
    s = grid.s
    kmax = grid.n // 2 - 1
    for m in modes:
        if grid.n > 1 and abs(m.wavenumber) > kmax:
            raise GridError(f"wavenumber {m.wavenumber} not resolvable on n={grid.n}")
        if grid.n == 1 and m.wavenumber != 0:
            raise GridError("uniform grid only admits wavenumber 0")
        out[:, m.component] += m.amplitude * np.cos(2 * np.pi * m.wavenumber * s / grid.length + m.phase)
    return out
