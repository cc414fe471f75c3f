"""Hamiltonians, conserved functionals, variational-derivative checks and drift monitoring."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import cross, dot
from .closures import diagnose
from .grid import integrate_s
from .state import StrandState

DRIFT_FLOOR = 1e-14


def eval_H_so3(state: StrandState, A) -> tuple:
    """H_{-1}, H_0, H_1 of the SO(3) strand."""
    if state.group != "so3":
        raise ValueError("H_{-1}, H_0, H_1 are defined for so3 states")
    A = np.asarray(A, dtype=float)
    a2 = A @ A
    Pi, Ga = state.Pi, state.Gamma
    AP = dot(A, Pi)
    AxP = cross(A, Pi)
    h0 = dot(AxP, AxP) / (2 * a2) + dot(A, Ga)
    h1 = dot(Pi, Ga) - AP / a2 * h0
    g = state.grid
    return float(integrate_s(AP, g)), float(integrate_s(h0, g)), float(integrate_s(h1, g))


def hamiltonian_density(state: StrandState, p) -> np.ndarray:
    kind = p.kind
    if state.group != p.group:
        raise ValueError(f"closure {kind} does not apply to {state.group} states")
    if kind == "so3":
        Pi, Ga = state.Pi, state.Gamma
        r = dot(p.A, Pi)
        return dot(Pi, Ga) + (p.mu * r + p.nu) * (0.5 * dot(Pi, Pi) + dot(p.A, Ga)) + p.f(r)
    if kind == "so4_ex1":
        pi, xi, Om, Ga = state.pi, state.xi, state.Omega, state.Gamma
        r = dot(p.a1, pi) + dot(p.a2, xi)
        q = 0.5 * (dot(pi, pi) + dot(xi, xi)) + dot(p.a1, Om) + dot(p.a2, Ga)
        return dot(pi, Om) + dot(xi, Ga) + (p.mu * r + p.nu) * q + p.f(r)
    if kind == "so4_ex2":
        pi, xi, Om, Ga = state.pi, state.xi, state.Omega, state.Gamma
        nu = p.nu
        return (
            0.5 * nu * (dot(pi, pi) + dot(xi, xi))
            + dot(pi, Ga)
            + dot(xi, Om)
            + dot(p.alpha, pi)
            + dot(p.beta, xi)
            + nu * (dot(p.a, Om) + dot(p.b, Ga))
        )
    if kind == "se3":
        Pi, Mom, Om, Ga = state.Pi, state.Mom, state.Omega, state.Gamma
        r = dot(p.a1, Pi) + dot(p.a2, Mom)
        q = dot(Pi, Mom) + dot(p.a2, Om) + dot(p.a1, Ga)
        return dot(Pi, Om) + dot(Mom, Ga) + (p.mu * r + p.nu) * q + p.f(r)
    if kind == "smk":
        return dot(state.Mom, state.Mom) + dot(state.Pi, state.Pi @ p.J) + p.psi(state.Gamma, state.Omega)
    raise ValueError(f"unknown closure {kind!r}")


def eval_h(state: StrandState, p) -> float:
    return float(integrate_s(hamiltonian_density(state, p), state.grid))


# which diagnostic field is the functional derivative with respect to which state field
DERIVATIVE_MAP = {
    "so3": {"Pi": "Omega", "Gamma": "Xi"},
    "so4": {"pi": "omega", "xi": "gamma", "Omega": "CapPi", "Gamma": "CapXi"},
    "se3": {"Pi": "W", "Mom": "V", "Omega": "M", "Gamma": "N"},
}


def var_deriv_fd_check(state: StrandState, p, eps_rel: float = 1e-6) -> float:
    """Max relative gap between closure fields and finite-difference dh/d(field).

    Each grid point and component is bumped by +-eps and the change in h is
    divided by 2 eps ds, the discrete analogue of a functional derivative.
    """
    diag = diagnose(state, p)
    grid = state.grid
    scale = max(1.0, float(np.abs(state.data).max()))
    eps = eps_rel * scale
    worst = 0.0
    for fname, dname in DERIVATIVE_MAP[state.group].items():
        fi = state.names.index(fname)
        analytic = diag[dname]
        fd = np.empty_like(analytic)
        for j in range(grid.n):
            for c in range(3):
                up = state.data.copy()
                dn = state.data.copy()
                up[fi, j, c] += eps
                dn[fi, j, c] -= eps
                hu = eval_h(state.with_data(up), p)
                hd = eval_h(state.with_data(dn), p)
                fd[j, c] = (hu - hd) / (2 * eps * grid.ds)
        denom = max(1.0, float(np.abs(analytic).max()))
        worst = max(worst, float(np.abs(fd - analytic).max()) / denom)
    return worst


def lagrangian_so3(state: StrandState, p) -> float:
    diag = diagnose(state, p)
    return float(integrate_s(dot(state.Pi, diag.Omega), state.grid)) - eval_h(state, p)


def _perp(v, A):
    e = A / np.linalg.norm(A)
    return v - np.outer(v @ e, e)


def legendre_identity_check(state: StrandState, p) -> float:
    """Max-norm of P_perpA(Omega - Gamma) - beta P_perpA(Pi)."""
    if p.kind != "so3":
        raise ValueError("the Legendre identity check is for the so3 closure")
    diag = diagnose(state, p)
    beta = p.mu * dot(p.A, state.Pi) + p.nu
    lhs = _perp(diag.Omega - state.Gamma, p.A)
    rhs = beta[:, None] * _perp(state.Pi, p.A)
    return float(np.abs(lhs - rhs).max())


def casimir_densities_so4(state: StrandState) -> tuple:
    """C1 = |pi|^2 + |xi|^2 and C2 = pi.xi pointwise."""
    if state.group != "so4":
        raise ValueError("so4 Casimirs need an so4 state")
    pi, xi = state.pi, state.xi
    return dot(pi, pi) + dot(xi, xi), dot(pi, xi)


@dataclass
class ConservedReport:
    t: float
    values: dict
    relative_drift: dict = field(default_factory=dict)

    def max_drift(self, keys=None) -> float:
        items = self.relative_drift if keys is None else {k: self.relative_drift[k] for k in keys}
        return max(items.values()) if items else 0.0


def conserved_values(state: StrandState, p, ode_mode: bool = False) -> dict:
    vals = {"h": eval_h(state, p)}
    if p.kind == "so3":
        vals["H_m1"], vals["H_0"], vals["H_1"] = eval_H_so3(state, p.A)
    if ode_mode and state.group == "so4":
        c1, c2 = casimir_densities_so4(state)
        vals["C1"] = float(np.mean(c1))
        vals["C2"] = float(np.mean(c2))
    return vals


class Monitor:
    """Tracks conserved values against their first recorded value."""

    def __init__(self, p, ode_mode: bool = False):
        self.p = p
        self.ode_mode = ode_mode
        self.initial: dict | None = None

    def __call__(self, t: float, state: StrandState) -> ConservedReport:
        vals = conserved_values(state, self.p, self.ode_mode)
        if self.initial is None:
            self.initial = dict(vals)
        drift = {
            k: abs(v - self.initial[k]) / max(abs(self.initial[k]), DRIFT_FLOOR) for k, v in vals.items()
        }
        return ConservedReport(t, vals, drift)


def monitor(trajectory, p, cadence: int = 1, ode_mode: bool = False):
    """Yield a ConservedReport for every ``cadence``-th (t, state) in ``trajectory``."""
    mon = Monitor(p, ode_mode)
    for i, (t, state) in enumerate(trajectory):
        if i % cadence == 0:
            yield mon(t, state)
