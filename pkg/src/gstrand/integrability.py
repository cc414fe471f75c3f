"""Lax operators, constraint rows, zero-curvature residuals and Riccati densities.

L = lam^2 A + lam * momentum + strain and M = lam^2 B + lam * dual + diagnostic.
Expanding dL/dt - dM/ds - [L, M] in powers of lam gives

    lam^4:  [A, B]
    lam^3:  [A, dual] - [B, momentum]
    lam^2:  [A, diagnostic] - [B, strain] + [momentum, dual]

which must vanish identically, while the lam^1 and lam^0 rows are the
equations of motion themselves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AlgPair, bracket, cross, dot
from .closures import (
    ClosureParamsSO3,
    diag_pair,
    diagnose,
    dual_pair,
    momentum_pair,
    strain_pair,
)
from .dynamics import rhs_from_diag
from .grid import deriv_s
from .laurent import LaurentField
from .state import DiagnosticState, StrandState


# --------------------------------------------------------------------------
# helpers on "algebra fields" (bare (n,3) arrays for so3, AlgPair otherwise)
# --------------------------------------------------------------------------


def _norm(x) -> np.ndarray:
    if isinstance(x, AlgPair):
        return x.norm()
    return np.linalg.norm(x, axis=-1)


def _flat(x) -> np.ndarray:
    if isinstance(x, AlgPair):
        return np.concatenate([x.first, x.second], axis=-1)
    return np.asarray(x)


def _ds(x, grid, scheme):
    if isinstance(x, AlgPair):
        return x.map(lambda v: deriv_s(v, grid, scheme))
    return deriv_s(x, grid, scheme)


def _poly(lam, a2, a1, a0):
    return lam**2 * a2 + lam * a1 + a0


@dataclass
class LaxPairField:
    group: str
    lam: complex
    L: object
    Mx: object


@dataclass
class ConstraintResiduals:
    r4: float
    r3: float
    r2: float

    def as_dict(self) -> dict:
        return {"r4": self.r4, "r3": self.r3, "r2": self.r2}

    def worst(self) -> tuple:
        return max(self.as_dict().items(), key=lambda kv: kv[1])


def _check_pair(state: StrandState, params) -> None:
    if state.group != params.group:
        raise ValueError(f"closure {params.kind} does not apply to {state.group} states")


def build_lax(state: StrandState, diag: DiagnosticState, params, lam) -> LaxPairField:
    _check_pair(state, params)
    A, B = params.lax_AB()
    L = _poly(lam, A, momentum_pair(state), strain_pair(state))
    Mx = _poly(lam, B, dual_pair(diag), diag_pair(diag))
    return LaxPairField(state.group, lam, L, Mx)


def constraint_residuals(state: StrandState, diag: DiagnosticState, params) -> ConstraintResiduals:
    _check_pair(state, params)
    A, B = params.lax_AB()
    mom, strain = momentum_pair(state), strain_pair(state)
    dual, dg = dual_pair(diag), diag_pair(diag)
    r4 = float(np.max(_norm(bracket(A, B))))
    r3 = float(np.max(_norm(bracket(A, dual) - bracket(B, mom))))
    r2 = float(np.max(_norm(bracket(A, dg) - bracket(B, strain) + bracket(mom, dual))))
    return ConstraintResiduals(r4, r3, r2)


def _tangent_pair(tangent: StrandState):
    return momentum_pair(tangent), strain_pair(tangent)


def zcr_residual_field(state: StrandState, params, lam, scheme: str = "spectral",
                       diag: DiagnosticState | None = None) -> np.ndarray:
    """Pointwise dL/dt - dM/ds - [L, M] with dL/dt taken from the right-hand side.

    Passing ``diag`` overrides the closure (used to probe broken constraints);
    the right-hand side is then built from the same overridden fields.
    """
    if diag is None:
        diag = diagnose(state, params)
    tangent = rhs_from_diag(state, diag, scheme)
    dmom, dstrain = _tangent_pair(tangent)
    lax = build_lax(state, diag, params, lam)
    dtL = lam * dmom + dstrain
    res = dtL - _ds(lax.Mx, state.grid, scheme) - bracket(lax.L, lax.Mx)
    return _flat(res)


def zcr_residual_semidiscrete(state: StrandState, params, lam, scheme: str = "spectral",
                              diag: DiagnosticState | None = None) -> float:
    return float(np.max(np.abs(zcr_residual_field(state, params, lam, scheme, diag))))


GRADED_LAMBDAS = (0.5, 1.0, 2.0, 3.0, 5.0)


def graded_residuals(state: StrandState, params, scheme: str = "spectral",
                     lambdas=GRADED_LAMBDAS, diag=None) -> np.ndarray:
    """Max-norm of each lambda^k coefficient (k = 0..4) of the residual polynomial.

    The residual is a quartic in lambda; sampling it at five distinct values
    and inverting the Vandermonde matrix recovers every coefficient.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    if lambdas.size != 5 or np.unique(lambdas).size != 5:
        raise ValueError("need five distinct lambda values")
    samples = np.stack([zcr_residual_field(state, params, lam, scheme, diag) for lam in lambdas])
    V = np.vander(lambdas, 5, increasing=True)
    coeffs = np.linalg.solve(V, samples.reshape(5, -1))
    return np.abs(coeffs).max(axis=1)


def dominant_lambda_power(state: StrandState, params, scheme: str = "spectral", diag=None,
                          lambdas=(1.0, 2.0, 4.0, 8.0)) -> float:
    """Slope of log(residual) against log(lambda) over the top of the sweep."""
    lam = np.asarray(lambdas, dtype=float)
    r = np.array([zcr_residual_semidiscrete(state, params, x, scheme, diag) for x in lam])
    if np.any(r <= 0):
        return float("-inf")
    return float(np.polyfit(np.log(lam[-2:]), np.log(r[-2:]), 1)[0])


def zcr_residual_discrete(snapshots, params, dt: float, lam, scheme: str = "spectral") -> float:
    """ZCR residual at the middle of five equally spaced snapshots.

    dL/dt comes from the fourth-order central difference in time, so this
    measures the combined effect of time stepping and the time stencil.
    """
    snapshots = list(snapshots)
    if len(snapshots) != 5:
        raise ValueError(f"need exactly 5 snapshots, got {len(snapshots)}")
    Ls = []
    for st in snapshots:
        A, _ = params.lax_AB()
        Ls.append(_flat(_poly(lam, A, momentum_pair(st), strain_pair(st))))
    dtL = (-Ls[4] + 8 * Ls[3] - 8 * Ls[1] + Ls[0]) / (12 * dt)
    mid = snapshots[2]
    diag = diagnose(mid, params)
    lax = build_lax(mid, diag, params, lam)
    res = dtL - _flat(_ds(lax.Mx, mid.grid, scheme)) - _flat(bracket(lax.L, lax.Mx))
    return float(np.max(np.abs(res)))


# --------------------------------------------------------------------------
# Riccati recursion (SO(3))
# --------------------------------------------------------------------------

ROTATE_TOL = 1e-6


def frame_to_e1(A) -> np.ndarray:
    """Proper rotation R with R @ A = |A| e1."""
    A = np.asarray(A, dtype=float)
    e = A / np.linalg.norm(A)
    trial = np.eye(3)[np.argmin(np.abs(e))]
    u = trial - (trial @ e) * e
    u /= np.linalg.norm(u)
    w = np.cross(e, u)
    return np.stack([e, u, w])


def _riccati_parts(state: StrandState, A, scheme: str):
    grid = state.grid
    L = [LaurentField(grid, {2: A[k], 1: state.Pi[:, k], 0: state.Gamma[:, k]}) for k in range(3)]
    L12 = L[0] - 1j * L[1]
    Lsq = L[0] * L[0] + L[1] * L[1] + L[2] * L[2]
    L12s = L12.ds(scheme)
    L12ss = L12s.ds(scheme)
    L3s = L[2].ds(scheme)
    rest = L12 * L12 * (L3s - Lsq) - L[2] * L12 * L12s + 0.5 * L12 * L12ss - 0.75 * L12s * L12s
    return L12 * L12, rest


def riccati_remainder(state: StrandState, A, coeffs: dict, scheme: str = "spectral") -> LaurentField:
    """L12^2 (rho_s + rho^2) minus the right-hand side, for a truncated rho."""
    L12sq, rest = _riccati_parts(state, A, scheme)
    rho = LaurentField(state.grid, coeffs)
    return L12sq * (rho.ds(scheme) + rho * rho) + rest


def _solve_riccati(state: StrandState, A, scheme: str):
    a = float(np.linalg.norm(A))
    A12 = A[0] - 1j * A[1]
    L12sq, rest = _riccati_parts(state, A, scheme)
    coeffs = {2: np.full(state.grid.n, a, dtype=complex)}
    for j in (1, 2, 3):
        rho = LaurentField(state.grid, coeffs)
        F = L12sq * (rho.ds(scheme) + rho * rho) + rest
        coeffs[2 - j] = -F[8 - j] / (2 * a * A12**2)
    return coeffs


def riccati_densities(state: StrandState, p: ClosureParamsSO3 | np.ndarray, scheme: str = "spectral",
                      lambda_order: int = 3, return_all: bool = False):
    """rho_{-1}, rho_0, rho_1 by balancing the lam^7, lam^6, lam^5 coefficients.

    If A is (nearly) along e3 the leading coefficient of L12 vanishes, so the
    fields are first expressed in a frame where A = |A| e1.
    """
    if state.group != "so3":
        raise ValueError("Riccati densities are defined for so3 states")
    if lambda_order != 3:
        raise ValueError("only lambda_order=3 is supported")
    A = np.asarray(getattr(p, "A", p), dtype=float)
    a = np.linalg.norm(A)
    if a == 0:
        raise ValueError("A must be nonzero")
    if abs(A[0] - 1j * A[1]) < ROTATE_TOL * a:
        R = frame_to_e1(A)
        state = StrandState.from_fields("so3", state.grid, Pi=state.Pi @ R.T, Gamma=state.Gamma @ R.T)
        A = R @ A
    coeffs = _solve_riccati(state, A, scheme)
    out = (coeffs[1], coeffs[0], coeffs[-1])
    if return_all:
        return out, coeffs, state, A
    return out


def rho_closed_forms(state: StrandState, A, scheme: str = "spectral"):
    """Direct formulas for rho_{-1}, rho_0 and a rho_1 that differs from
    the series value by nothing (same frame, same derivatives)."""
    A = np.asarray(A, dtype=float)
    a = np.linalg.norm(A)
    Pi, Ga = state.Pi, state.Gamma
    AxP = cross(A, Pi)
    rm1 = dot(A, Pi) / a
    r0 = (dot(AxP, AxP) / (2 * a**2) + dot(A, Ga)) / a
    g = state.grid
    A12 = A[0] - 1j * A[1]
    P12 = Pi[:, 0] - 1j * Pi[:, 1]
    tot = -deriv_s(rm1, g, scheme) - deriv_s(Pi[:, 2], g, scheme) + deriv_s(A[2] * P12 / A12, g, scheme)
    r1 = (2 * dot(Pi, Ga) - 2 * rm1 * r0 + tot) / (2 * a)
    return rm1, r0, r1
