"""Strand right-hand sides and explicit time stepping."""

from __future__ import annotations

import warnings

import numpy as np

from .algebra import cross
from .closures import ClosureParamsSE3, diagnose
from .grid import GridSpec, deriv_s
from .state import DiagnosticState, StrandState


class BlowUpError(RuntimeError):
    def __init__(self, step: int, last_good: StrandState | None = None):
        super().__init__(f"non-finite values at step {step}")
        self.step = step
        self.last_good = last_good


class CFLError(ValueError):
    pass


class CFLWarning(UserWarning):
    pass


def _same_grid(state: StrandState, diag: DiagnosticState) -> None:
    if diag.grid != state.grid or diag.group != state.group:
        raise ValueError("state and diagnostics live on different grids or groups")


def _Ds(f, state, scheme):
    return deriv_s(f, state.grid, scheme)


def rhs_so3(state: StrandState, diag: DiagnosticState, scheme: str = "central4") -> StrandState:
    _same_grid(state, diag)
    Pi, Ga = state.Pi, state.Gamma
    Om, Xi = diag.Omega, diag.Xi
    dPi = -cross(Om, Pi) + _Ds(Xi, state, scheme) + cross(Ga, Xi)
    dGa = _Ds(Om, state, scheme) + cross(Ga, Om)
    return state.with_data(np.stack([dPi, dGa]))


def rhs_so4(state: StrandState, diag: DiagnosticState, scheme: str = "central4") -> StrandState:
    _same_grid(state, diag)
    pi, xi, Om, Ga = state.pi, state.xi, state.Omega, state.Gamma
    P, X, om, ga = diag.CapPi, diag.CapXi, diag.omega, diag.gamma
    dpi = _Ds(P, state, scheme) + cross(Om, P) + cross(Ga, X) + cross(pi, om) + cross(xi, ga)
    dxi = _Ds(X, state, scheme) + cross(Om, X) + cross(Ga, P) + cross(pi, ga) + cross(xi, om)
    dGa = _Ds(ga, state, scheme) + cross(Om, ga) + cross(Ga, om)
    dOm = _Ds(om, state, scheme) + cross(Om, om) + cross(Ga, ga)
    return state.with_data(np.stack([dpi, dxi, dOm, dGa]))


def rhs_se3(state: StrandState, diag: DiagnosticState, scheme: str = "central4") -> StrandState:
    _same_grid(state, diag)
    Pi, Mom, Om, Ga = state.Pi, state.Mom, state.Omega, state.Gamma
    W, V, M, N = diag.W, diag.V, diag.M, diag.N
    dPi = _Ds(M, state, scheme) + cross(Pi, W) + cross(Mom, V) + cross(Ga, N) + cross(Om, M)
    dMom = _Ds(N, state, scheme) + cross(Mom, W) + cross(Om, N)
    dGa = _Ds(V, state, scheme) + cross(Ga, W) + cross(Om, V)
    dOm = _Ds(W, state, scheme) + cross(Om, W)
    return state.with_data(np.stack([dPi, dMom, dOm, dGa]))


_RHS = {"so3": rhs_so3, "so4": rhs_so4, "se3": rhs_se3}


def rhs_from_diag(state: StrandState, diag: DiagnosticState, scheme: str = "central4") -> StrandState:
    return _RHS[state.group](state, diag, scheme)


def rhs(state: StrandState, closure, scheme: str = "central4") -> StrandState:
    """Closure followed by the group's right-hand side."""
    return rhs_from_diag(state, diagnose(state, closure), scheme)


def ode_mode_rhs(state: StrandState, closure) -> StrandState:
    """Right-hand side with every s-derivative set to zero (Euler-Poincare ODE)."""
    if state.grid.n == 1:
        return rhs(state, closure)
    if np.ptp(state.data, axis=1).max() > 0:
        raise ValueError("ODE mode needs n == 1 or spatially uniform data")
    one = StrandState(state.group, GridSpec(1, state.grid.length), state.data[:, :1])
    t = rhs(one, closure).data
    return state.with_data(np.repeat(t, state.grid.n, axis=1))


def check_cfl(dt: float, grid, strict: bool = True) -> None:
    """Characteristic speed is 1: warn above dt = ds, refuse above 2 ds."""
    if not dt > 0:
        raise CFLError(f"dt must be positive, got {dt}")
    if grid.n == 1:
        return
    if dt > 2 * grid.ds:
        if strict:
            raise CFLError(f"dt={dt} exceeds 2*ds={2 * grid.ds}")
    elif dt > grid.ds:
        warnings.warn(f"dt={dt} exceeds ds={grid.ds}", CFLWarning, stacklevel=2)


def step_rk4(state: StrandState, closure, dt: float, scheme: str = "central4") -> StrandState:
    """One classical RK4 step; the closure is re-evaluated at every stage."""
    y = state.data
    k1 = rhs(state, closure, scheme).data
    k2 = rhs(state.with_data(y + 0.5 * dt * k1), closure, scheme).data
    k3 = rhs(state.with_data(y + 0.5 * dt * k2), closure, scheme).data
    k4 = rhs(state.with_data(y + dt * k3), closure, scheme).data
    return state.with_data(y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4))


def integrate(state: StrandState, closure, dt: float, nsteps: int, scheme: str = "central4",
              callback=None, cadence: int = 1, check=True):
    """Advance ``nsteps`` RK4 steps.

    ``callback(step, state)`` runs at step 0 and every ``cadence`` steps
    (and at the final step).  Raises BlowUpError carrying the last finite state.
    """
    if check:
        check_cfl(dt, state.grid)
    if callback is not None:
        callback(0, state)
    for i in range(1, nsteps + 1):
        new = step_rk4(state, closure, dt, scheme)
        if not new.is_finite():
            raise BlowUpError(i, state)
        state = new
        if callback is not None and (i % cadence == 0 or i == nsteps):
            callback(i, state)
    return state


# --------------------------------------------------------------------------
# SE(2) reduction
# --------------------------------------------------------------------------

ZHAT = np.array([0.0, 0.0, 1.0])


def check_se2_split(state: StrandState, normal=ZHAT) -> float:
    """Largest departure from planar-curve structure.

    Pi and Omega should be normal to the plane, Mom and Gamma in it.
    """
    if state.group != "se3":
        raise ValueError("SE(2) split applies to se3 states")
    n = np.asarray(normal, dtype=float)
    n = n / np.linalg.norm(n)

    def inplane(v):
        return np.linalg.norm(v - np.outer(v @ n, n), axis=-1)

    def along(v):
        return np.abs(v @ n)

    err = inplane(state.Pi) + inplane(state.Omega) + along(state.Mom) + along(state.Gamma)
    return float(err.max())


def se2_closure_problems(p, normal=ZHAT, tol: float = 1e-14) -> list:
    """Reasons why closure ``p`` would not preserve the SE(2) split (empty if it does).

    With mu or nu nonzero the diagnostic W picks up beta*Mom, which is in-plane,
    so only the f-driven part of the family is compatible.
    """
    if not isinstance(p, ClosureParamsSE3):
        return ["se2 needs the integrable se3 closure"]
    out = []
    n = np.asarray(normal, dtype=float)
    n = n / np.linalg.norm(n)
    if p.mu != 0 or p.nu != 0:
        out.append("mu and nu must be zero")
    scale = max(np.linalg.norm(p.a1), np.linalg.norm(p.a2), 1.0)
    if np.linalg.norm(p.a1 - (p.a1 @ n) * n) > tol * scale:
        out.append("a1 must be normal to the plane")
    if abs(p.a2 @ n) > tol * scale:
        out.append("a2 must lie in the plane")
    return out
