import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FAMILIES, random_params, random_state
from gstrand.closures import (
    ClosureError,
    ClosureParamsSE3,
    ClosureParamsSO3,
    ClosureParamsSO4Ex1,
    ClosureParamsSO4Ex2,
    PolySpec,
    SMKParams,
    closure_se3,
    closure_smk,
    closure_so3,
    closure_so4_ex1,
    closure_so4_ex2,
    diagnose,
)
from gstrand.grid import GridSpec
from gstrand.integrability import constraint_residuals
from gstrand.state import StrandState
from oracles import so3_closure

G8 = GridSpec(8, 1.0)


def uniform(group, **fields):
    return StrandState.from_fields(group, G8, **fields)


def test_polyspec():
    f = PolySpec((1.0, 2.0, 3.0))
    assert f(2.0) == 17.0
    assert f.deriv()(2.0) == 14.0
    assert PolySpec()(np.array([1.0, 2.0])).tolist() == [0.0, 0.0]
    assert PolySpec((5.0,)).deriv()(3.0) == 0.0
    with pytest.raises(ClosureError):
        PolySpec(tuple(range(10)))


def test_parameter_validation():
    with pytest.raises(ClosureError):
        ClosureParamsSO3(np.zeros(3))
    with pytest.raises(ClosureError):
        ClosureParamsSO4Ex1(np.zeros(3), np.zeros(3))
    with pytest.raises(ClosureError):
        ClosureParamsSO4Ex2([1, 0, 0], [2, 0, 0])
    with pytest.raises(ClosureError):
        ClosureParamsSE3(np.zeros(3), np.zeros(3))
    with pytest.raises(ClosureError):
        SMKParams(J=-np.eye(3))
    with pytest.raises(ClosureError):
        SMKParams(J=[[1, 1, 0], [0, 1, 0], [0, 0, 1]])


def test_so3_examples():
    rng = np.random.default_rng(0)
    Pi, Ga = rng.normal(size=(2, 3))
    A = np.array([0.6, 0.0, 0.8])
    st = uniform("so3", Pi=Pi, Gamma=Ga)
    d = closure_so3(st, ClosureParamsSO3(A))
    assert np.array_equal(d.Xi, st.Pi) and np.array_equal(d.Omega, st.Gamma)
    d = closure_so3(st, ClosureParamsSO3(A, mu=0.0, nu=1.0))
    assert np.allclose(d.Xi, Pi + A, atol=1e-15) and np.allclose(d.Omega, Ga + Pi, atol=1e-15)
    st = uniform("so3", Pi=A, Gamma=np.zeros(3))
    d = closure_so3(st, ClosureParamsSO3(A, mu=1.0, nu=0.0))
    assert np.allclose(d.Xi, 2 * A, atol=1e-15) and np.allclose(d.Omega, 1.5 * A, atol=1e-15)


def test_so3_matches_transcribed_relations(rng):
    st = random_state("so3", rng)
    p = random_params("so3", rng)
    d = closure_so3(st, p)
    Om, Xi = so3_closure(st.Pi, st.Gamma, p.A, p.mu, p.nu, p.f.deriv())
    assert np.abs(d.Omega - Om).max() <= 1e-14 and np.abs(d.Xi - Xi).max() <= 1e-14


def test_so4_ex1_examples():
    rng = np.random.default_rng(1)
    a1, a2, pi, xi, Om, Ga = rng.normal(size=(6, 3))
    st = uniform("so4", pi=pi, xi=xi, Omega=Om, Gamma=Ga)
    d = closure_so4_ex1(st, ClosureParamsSO4Ex1(a1, a2))
    assert np.array_equal(d.CapPi, st.pi) and np.array_equal(d.gamma, st.Gamma)
    d = closure_so4_ex1(st, ClosureParamsSO4Ex1(a1, a2, mu=0.0, nu=1.0))
    assert np.allclose(d.CapPi, pi + a1) and np.allclose(d.CapXi, xi + a2)
    assert np.allclose(d.omega, Om + pi) and np.allclose(d.gamma, Ga + xi)
    st = uniform("so4", pi=a1, xi=a2, Omega=np.zeros(3), Gamma=np.zeros(3))
    d = closure_so4_ex1(st, ClosureParamsSO4Ex1(a1, a2, mu=1.0, nu=0.0))
    r = a1 @ a1 + a2 @ a2
    # beta = r, sigma = r / 2
    assert np.allclose(d.CapPi, a1 + r * a1)
    assert np.allclose(d.omega, r * a1 + 0.5 * r * a1)


def test_so4_ex2_examples():
    a, b = np.array([1.0, 0, 0]), np.array([0, 1.0, 0])
    rng = np.random.default_rng(2)
    pi, xi, Om, Ga = rng.normal(size=(4, 3))
    st = uniform("so4", pi=pi, xi=xi, Omega=Om, Gamma=Ga)
    d = closure_so4_ex2(st, ClosureParamsSO4Ex2(a, b))
    assert np.array_equal(d.CapPi, st.xi) and np.array_equal(d.CapXi, st.pi)
    assert np.array_equal(d.omega, st.Gamma) and np.array_equal(d.gamma, st.Omega)
    z = uniform("so4", pi=np.zeros(3), xi=np.zeros(3), Omega=np.zeros(3), Gamma=np.zeros(3))
    d = closure_so4_ex2(z, ClosureParamsSO4Ex2(a, b, nu=1.0))
    assert np.allclose(d.CapPi, a) and np.allclose(d.CapXi, b)
    assert np.array_equal(d.omega, np.zeros((8, 3))) and np.array_equal(d.gamma, np.zeros((8, 3)))


def test_se3_examples():
    rng = np.random.default_rng(3)
    a1, a2, Pi, Mom, Om, Ga = rng.normal(size=(6, 3))
    st = uniform("se3", Pi=Pi, Mom=Mom, Omega=Om, Gamma=Ga)
    d = closure_se3(st, ClosureParamsSE3(a1, a2))
    assert np.array_equal(d.W, st.Omega) and np.array_equal(d.V, st.Gamma)
    assert np.array_equal(d.M, st.Pi) and np.array_equal(d.N, st.Mom)
    # nu = 1: the cross pairing routes Mom into W and a2 into M
    d = closure_se3(st, ClosureParamsSE3(a1, a2, mu=0.0, nu=1.0))
    assert np.allclose(d.W, Om + Mom) and np.allclose(d.V, Ga + Pi)
    assert np.allclose(d.M, Pi + a2) and np.allclose(d.N, Mom + a1)


def test_smk_examples():
    rng = np.random.default_rng(4)
    Pi, Om, Ga = rng.normal(size=(3, 3))
    p = SMKParams(J=np.eye(3), K_Gamma=np.zeros((3, 3)), K_Omega=np.zeros((3, 3)))
    st = uniform("se3", Pi=Pi, Mom=np.zeros(3), Omega=Om, Gamma=Ga)
    d = closure_smk(st, p)
    assert np.array_equal(d.V, np.zeros((8, 3))) and np.allclose(d.W, 2 * Pi)
    z = uniform("se3", Pi=np.zeros(3), Mom=np.zeros(3), Omega=np.zeros(3), Gamma=np.zeros(3))
    d = closure_smk(z, SMKParams(Gamma_ref=np.zeros(3)))
    assert np.array_equal(d.data, np.zeros_like(d.data))


def test_smk_is_not_integrable(rng):
    for _ in range(10):
        st = random_state("se3", rng)
        p = random_params("smk", rng)
        assert constraint_residuals(st, closure_smk(st, p), p).r3 > 1e-3


def test_group_mismatch_rejected(rng):
    with pytest.raises(ClosureError):
        diagnose(random_state("so3", rng), random_params("se3", rng))
    with pytest.raises(ClosureError):
        diagnose(random_state("so3", rng), object())


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(FAMILIES), st.integers(0, 2**32 - 1))
def test_integrable_closures_satisfy_constraints(kind, seed):
    rng = np.random.default_rng(seed)
    p = random_params(kind, rng)
    state = random_state(p.group, rng, n=16)
    r = constraint_residuals(state, diagnose(state, p), p)
    assert r.r4 == 0.0
    assert r.r3 <= 1e-12 and r.r2 <= 1e-12


def test_literal_se3_pairing_breaks_constraints(rng):
    """Pairing a1 with Pi and a2 with Mom in the dot sense fails the constraint rows."""
    from gstrand.algebra import dot
    from gstrand.state import DiagnosticState

    p = random_params("se3", rng)
    s = random_state("se3", rng)
    Pi, Mom, Om, Ga = s.Pi, s.Mom, s.Omega, s.Gamma
    r = dot(p.a1, Pi) + dot(p.a2, Mom)
    beta = (p.mu * r + p.nu)[:, None]
    gam = (p.mu * (0.5 * (dot(Pi, Pi) + dot(Mom, Mom)) + dot(p.a1, Om) + dot(p.a2, Ga)) + p.f.deriv()(r))[:, None]
    d = DiagnosticState.from_fields(
        "se3", s.grid, W=Om + beta * Pi + gam * p.a1, V=Ga + beta * Mom + gam * p.a2, M=Pi + beta * p.a1, N=Mom + beta * p.a2
    )
    res = constraint_residuals(s, d, p)
    assert res.r3 > 1e-3 or res.r2 > 1e-3
