"""Hamiltonian closures: maps from prognostic to diagnostic fields.

Each parameter class names one Hamiltonian family.  The closure functions
return the variational derivatives of that family's Hamiltonian, which are
the diagnostic fields entering the strand equations.

se(3) momenta are paired with strains through the cross pairing
<<(Pi, Mom), (Omega, Gamma)>> = Pi.Gamma + Mom.Omega, so the derivative of h
with respect to Pi lands in the W slot and so on:

    W = dh/dPi,  V = dh/dMom,  M = dh/dOmega,  N = dh/dGamma.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgPair, cross, dot, se3, so4
from .state import DiagnosticState, StrandState


class ClosureError(ValueError):
    pass


def _vec(v, name) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise ClosureError(f"{name} must be a finite 3-vector")
    return v


@dataclass(frozen=True)
class PolySpec:
    """f(r) = sum_k c_k r^k with degree at most 8."""

    coefficients: tuple = ()

    def __post_init__(self):
        c = tuple(float(x) for x in self.coefficients)
        if len(c) > 9:
            raise ClosureError("polynomial degree must be at most 8")
        if not all(np.isfinite(c)):
            raise ClosureError("polynomial coefficients must be finite")
        object.__setattr__(self, "coefficients", c)

    def __call__(self, r):
        return np.polynomial.polynomial.polyval(r, self.coefficients) if self.coefficients else np.zeros_like(r, dtype=float)

    def deriv(self) -> "PolySpec":
        return PolySpec(tuple(np.polynomial.polynomial.polyder(self.coefficients))) if len(self.coefficients) > 1 else PolySpec()


ZERO = PolySpec()


@dataclass(frozen=True)
class ClosureParamsSO3:
    A: np.ndarray
    mu: float = 0.0
    nu: float = 0.0
    f: PolySpec = ZERO
    kind = "so3"
    group = "so3"

    def __post_init__(self):
        object.__setattr__(self, "A", _vec(self.A, "A"))
        if np.linalg.norm(self.A) == 0:
            raise ClosureError("A must be nonzero")

    def lax_AB(self):
        return self.A, self.A


@dataclass(frozen=True)
class ClosureParamsSO4Ex1:
    a1: np.ndarray
    a2: np.ndarray
    mu: float = 0.0
    nu: float = 0.0
    f: PolySpec = ZERO
    kind = "so4_ex1"
    group = "so4"

    def __post_init__(self):
        object.__setattr__(self, "a1", _vec(self.a1, "a1"))
        object.__setattr__(self, "a2", _vec(self.a2, "a2"))
        if not (np.any(self.a1) or np.any(self.a2)):
            raise ClosureError("(a1, a2) must be nonzero")

    def lax_AB(self):
        A = so4(self.a1, self.a2)
        return A, A


@dataclass(frozen=True)
class ClosureParamsSO4Ex2:
    a: np.ndarray
    b: np.ndarray
    nu: float = 0.0
    mu: float = 0.0
    sigma: float = 0.0
    kind = "so4_ex2"
    group = "so4"

    def __post_init__(self):
        object.__setattr__(self, "a", _vec(self.a, "a"))
        object.__setattr__(self, "b", _vec(self.b, "b"))
        scale = max(np.linalg.norm(self.a) * np.linalg.norm(self.b), 1e-300)
        if np.linalg.norm(cross(self.a, self.b)) <= 1e-12 * scale:
            raise ClosureError("a x b must be nonzero")

    @property
    def alpha(self) -> np.ndarray:
        return self.mu * self.a + self.sigma * self.b

    @property
    def beta(self) -> np.ndarray:
        return self.sigma * self.a + self.mu * self.b

    def lax_AB(self):
        return so4(self.a, self.b), so4(self.b, self.a)


@dataclass(frozen=True)
class ClosureParamsSE3:
    a1: np.ndarray
    a2: np.ndarray
    mu: float = 0.0
    nu: float = 0.0
    f: PolySpec = ZERO
    kind = "se3"
    group = "se3"

    def __post_init__(self):
        object.__setattr__(self, "a1", _vec(self.a1, "a1"))
        object.__setattr__(self, "a2", _vec(self.a2, "a2"))
        if not (np.any(self.a1) or np.any(self.a2)):
            raise ClosureError("(a1, a2) must be nonzero")

    def lax_AB(self):
        A = se3(self.a1, self.a2)
        return A, A


def _sym(m, name) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3) or not np.all(np.isfinite(m)):
        raise ClosureError(f"{name} must be a finite 3x3 matrix")
    if not np.allclose(m, m.T, rtol=0, atol=1e-14 * max(1.0, np.abs(m).max())):
        raise ClosureError(f"{name} must be symmetric")
    return m


@dataclass(frozen=True)
class SMKParams:
    """Exact-rod Hamiltonian h = int Mom^2 + Pi.J Pi + psi(Gamma, Omega) ds.

    psi = 1/2 (G - G_ref).K_Gamma (G - G_ref) + 1/2 (O - O_ref).K_Omega (O - O_ref).
    probe_a1, probe_a2 are the constant Lax vectors against which the
    constraint rows are evaluated; the model has no Lax pair of its own.
    """

    J: np.ndarray = field(default_factory=lambda: np.eye(3))
    K_Gamma: np.ndarray = field(default_factory=lambda: np.eye(3))
    K_Omega: np.ndarray = field(default_factory=lambda: np.eye(3))
    Gamma_ref: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))
    Omega_ref: np.ndarray = field(default_factory=lambda: np.zeros(3))
    probe_a1: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    probe_a2: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))
    kind = "smk"
    group = "se3"

    def __post_init__(self):
        J = _sym(self.J, "J")
        if np.linalg.eigvalsh(J).min() <= 0:
            raise ClosureError("J must be positive definite")
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "K_Gamma", _sym(self.K_Gamma, "K_Gamma"))
        object.__setattr__(self, "K_Omega", _sym(self.K_Omega, "K_Omega"))
        for name in ("Gamma_ref", "Omega_ref", "probe_a1", "probe_a2"):
            object.__setattr__(self, name, _vec(getattr(self, name), name))

    def psi(self, Gamma, Omega):
        dG = Gamma - self.Gamma_ref
        dO = Omega - self.Omega_ref
        return 0.5 * dot(dG, dG @ self.K_Gamma) + 0.5 * dot(dO, dO @ self.K_Omega)

    def lax_AB(self):
        A = se3(self.probe_a1, self.probe_a2)
        return A, A


def _check(state: StrandState, p) -> None:
    if state.group != p.group:
        raise ClosureError(f"closure {p.kind} needs a {p.group} state, got {state.group}")


def _col(x):
    return np.asarray(x)[..., None]


def closure_so3(state: StrandState, p: ClosureParamsSO3) -> DiagnosticState:
    _check(state, p)
    Pi, Gamma, A = state.Pi, state.Gamma, p.A
    r = dot(Pi, A)
    beta = p.mu * r + p.nu
    gamma = p.mu * (0.5 * dot(Pi, Pi) + dot(A, Gamma)) + p.f.deriv()(r)
    Xi = Pi + _col(beta) * A
    Omega = Gamma + _col(beta) * Pi + _col(gamma) * A
    return DiagnosticState.from_fields("so3", state.grid, Omega=Omega, Xi=Xi)


def closure_so4_ex1(state: StrandState, p: ClosureParamsSO4Ex1) -> DiagnosticState:
    _check(state, p)
    pi, xi, Om, Ga = state.pi, state.xi, state.Omega, state.Gamma
    r = dot(p.a1, pi) + dot(p.a2, xi)
    beta = _col(p.mu * r + p.nu)
    sig = _col(p.mu * (0.5 * (dot(pi, pi) + dot(xi, xi)) + dot(p.a1, Om) + dot(p.a2, Ga)) + p.f.deriv()(r))
    return DiagnosticState.from_fields(
        "so4",
        state.grid,
        CapPi=pi + beta * p.a1,
        CapXi=xi + beta * p.a2,
        omega=Om + beta * pi + sig * p.a1,
        gamma=Ga + beta * xi + sig * p.a2,
    )


def closure_so4_ex2(state: StrandState, p: ClosureParamsSO4Ex2) -> DiagnosticState:
    _check(state, p)
    pi, xi, Om, Ga = state.pi, state.xi, state.Omega, state.Gamma
    nu = p.nu
    return DiagnosticState.from_fields(
        "so4",
        state.grid,
        CapPi=xi + nu * p.a,
        CapXi=pi + nu * p.b,
        omega=Ga + nu * pi + p.alpha,
        gamma=Om + nu * xi + p.beta,
    )


def closure_se3(state: StrandState, p: ClosureParamsSE3) -> DiagnosticState:
    _check(state, p)
    Pi, Mom, Om, Ga = state.Pi, state.Mom, state.Omega, state.Gamma
    r = dot(p.a1, Pi) + dot(p.a2, Mom)
    beta = _col(p.mu * r + p.nu)
    # cross-pairing quadratic: a1 pairs with Gamma, a2 with Omega
    q = dot(Pi, Mom) + dot(p.a2, Om) + dot(p.a1, Ga)
    gam = _col(p.mu * q + p.f.deriv()(r))
    return DiagnosticState.from_fields(
        "se3",
        state.grid,
        W=Om + beta * Mom + gam * p.a1,
        V=Ga + beta * Pi + gam * p.a2,
        M=Pi + beta * p.a2,
        N=Mom + beta * p.a1,
    )


def closure_smk(state: StrandState, p: SMKParams) -> DiagnosticState:
    _check(state, p)
    return DiagnosticState.from_fields(
        "se3",
        state.grid,
        W=2.0 * state.Pi @ p.J,
        V=2.0 * state.Mom,
        M=(state.Omega - p.Omega_ref) @ p.K_Omega,
        N=(state.Gamma - p.Gamma_ref) @ p.K_Gamma,
    )


_DISPATCH = {
    "so3": closure_so3,
    "so4_ex1": closure_so4_ex1,
    "so4_ex2": closure_so4_ex2,
    "se3": closure_se3,
    "smk": closure_smk,
}


def diagnose(state: StrandState, p) -> DiagnosticState:
    """Apply whichever closure ``p`` describes."""
    try:
        fn = _DISPATCH[p.kind]
    except (AttributeError, KeyError):
        raise ClosureError(f"unknown closure parameters {type(p).__name__}") from None
    return fn(state, p)


def momentum_pair(state: StrandState):
    """Coefficient of lambda in L, as an algebra element field."""
    if state.group == "so3":
        return state.Pi
    if state.group == "so4":
        return so4(state.pi, state.xi)
    return se3(state.Mom, state.Pi)  # cross-pairing order


def strain_pair(state: StrandState):
    """Constant term of L."""
    if state.group == "so3":
        return state.Gamma
    pair = so4 if state.group == "so4" else se3
    return pair(state.Omega, state.Gamma)


def dual_pair(diag: DiagnosticState):
    """Coefficient of lambda in the time Lax operator."""
    if diag.group == "so3":
        return diag.Xi
    if diag.group == "so4":
        return so4(diag.CapPi, diag.CapXi)
    return se3(diag.N, diag.M)


def diag_pair(diag: DiagnosticState):
    """Constant term of the time Lax operator."""
    if diag.group == "so3":
        return diag.Omega
    if diag.group == "so4":
        return so4(diag.omega, diag.gamma)
    return se3(diag.W, diag.V)


__all__ = [
    "AlgPair",
    "ClosureError",
    "PolySpec",
    "ClosureParamsSO3",
    "ClosureParamsSO4Ex1",
    "ClosureParamsSO4Ex2",
    "ClosureParamsSE3",
    "SMKParams",
    "closure_so3",
    "closure_so4_ex1",
    "closure_so4_ex2",
    "closure_se3",
    "closure_smk",
    "diagnose",
    "momentum_pair",
    "strain_pair",
    "dual_pair",
    "diag_pair",
]
