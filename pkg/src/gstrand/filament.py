"""Rebuild the space curve of an SE(3) strand from its strain fields."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import hat4_se3, se3
from .state import StrandState


class FrameError(ValueError):
    pass


@dataclass
class Filament:
    s: np.ndarray  # n + 1 arclength stations, last one is s = L
    points: np.ndarray  # (n + 1, 3)
    frames: np.ndarray  # (n + 1, 4, 4)
    closure_gap: float  # |g(L) - g0|, zero for a closed, untwisted loop


def validate_frame(g0, tol: float = 1e-10) -> np.ndarray:
    g0 = np.asarray(g0, dtype=float)
    if g0.shape != (4, 4) or not np.all(np.isfinite(g0)):
        raise FrameError("g0 must be a finite 4x4 matrix")
    R = g0[:3, :3]
    if np.abs(R.T @ R - np.eye(3)).max() > tol or abs(np.linalg.det(R) - 1) > tol:
        raise FrameError("rotation block of g0 is not in SO(3)")
    if np.abs(g0[3] - [0, 0, 0, 1]).max() > tol:
        raise FrameError("bottom row of g0 must be (0, 0, 0, 1)")
    return g0


def _gram_schmidt(R: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(R)
    return q * np.sign(np.diag(r))


def _midpoint(f: np.ndarray) -> np.ndarray:
    """Periodic cubic interpolation to the half-points j + 1/2."""
    return (-np.roll(f, 1, 0) + 9 * f + 9 * np.roll(f, -1, 0) - np.roll(f, -2, 0)) / 16.0


def reconstruct_filament(state: StrandState, g0=None) -> Filament:
    """Integrate g_s = g * hat(Omega, Gamma) across one period with RK4."""
    if state.group != "se3":
        raise ValueError("filament reconstruction needs an se3 state")
    g0 = validate_frame(np.eye(4) if g0 is None else g0)
    grid = state.grid
    h = grid.ds
    X = hat4_se3(se3(state.Omega, state.Gamma))
    if grid.n >= 4:
        Xm = hat4_se3(se3(_midpoint(state.Omega), _midpoint(state.Gamma)))
    else:
        Xm = 0.5 * (X + np.roll(X, -1, 0))
    frames = np.empty((grid.n + 1, 4, 4))
    frames[0] = g = g0
    for j in range(grid.n):
        a, m, b = X[j], Xm[j], X[(j + 1) % grid.n]
        k1 = g @ a
        k2 = (g + 0.5 * h * k1) @ m
        k3 = (g + 0.5 * h * k2) @ m
        k4 = (g + h * k3) @ b
        g = g + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        g[:3, :3] = _gram_schmidt(g[:3, :3])
        g[3] = (0.0, 0.0, 0.0, 1.0)
        frames[j + 1] = g
    s = np.arange(grid.n + 1) * h
    gap = float(np.linalg.norm(frames[-1] - g0))
    return Filament(s=s, points=frames[:, :3, 3].copy(), frames=frames, closure_gap=gap)
