import cmath

import numpy as np
import pytest

from sitdde import (
    ModelParams,
    State,
    delta_coefficients,
    expansion_coefficients,
    jacobians,
)
from sitdde.linearization import CoefficientSet

from conftest import corpus_params
from oracles import fd_partial


def _random_cs(rng) -> CoefficientSet:
    names = [f.name for f in CoefficientSet.__dataclass_fields__.values()]
    return CoefficientSet(**{n: float(rng.normal()) for n in names})


def test_origin_substitution():
    p = ModelParams(a=3, b=5, c=0.7, r=2, xi1=0.4, xi2=1.9, xi3=0.6)
    cs = expansion_coefficients(State(0, 0, 0), p)
    assert cs.a1 == 0.0
    assert cs.b4 == pytest.approx(p.b, rel=1e-15)
    assert cs.c8 == pytest.approx(p.c, rel=1e-15)
    assert cs.b6 == 0.0 and cs.b7 == 0.0 and cs.b8 == 0.0
    jp = jacobians(cs)
    assert jp.J0[1].tolist() == [pytest.approx(p.b), 0.0, 0.0]


def test_linear_coefficients_match_finite_differences(reference_params, reference_equilibrium):
    p = reference_params
    eq = reference_equilibrium.location
    jp = jacobians(expansion_coefficients(eq, p))
    for out in range(3):
        for inp in range(3):
            fd_cur = fd_partial(p, eq, out, inp, "current")
            fd_del = fd_partial(p, eq, out, inp, "delayed")
            assert jp.J0[out, inp] == pytest.approx(fd_cur, abs=1e-5 * (1 + abs(fd_cur)))
            assert jp.J1[out, inp] == pytest.approx(fd_del, abs=1e-5 * (1 + abs(fd_del)))


def test_specific_slots_at_reference(reference_params, reference_equilibrium):
    p = reference_params
    eq = reference_equilibrium.location
    cs = expansion_coefficients(eq, p)
    a2_fd = fd_partial(p, eq, 0, 0, "current")
    a4_fd = fd_partial(p, eq, 0, 2, "delayed")
    assert cs.a2 == pytest.approx(a2_fd, rel=1e-5)
    assert cs.a4 == pytest.approx(a4_fd, rel=1e-5)


def test_all_coefficients_finite_at_equilibria(reference_params, reference_equilibrium):
    from sitdde import positive_equilibria

    cases = [(reference_params, reference_equilibrium.location)]
    for p in corpus_params():
        for rep in positive_equilibria(p):
            cases.append((p, rep.location))
    for p, eq in cases:
        cs = expansion_coefficients(eq, p)
        vals = cs.as_dict()
        assert all(np.isfinite(v) for v in vals.values())
        # constant terms must vanish at a genuine equilibrium, not be assumed to
        scale = max(1.0, eq.norm())
        for name in ("a1", "b8", "c1"):
            assert abs(vals[name]) <= 1e-9 * scale, name


def test_jacobian_sparsity():
    rng = np.random.default_rng(5)
    cs = _random_cs(rng)
    jp = jacobians(cs)
    assert jp.J0[0, 2] == 0.0
    expected_zero = np.ones((3, 3), dtype=bool)
    expected_zero[0, 2] = expected_zero[2, 0] = False
    assert np.all(jp.J1[expected_zero] == 0.0)
    assert jp.J1[0, 2] == cs.a4 and jp.J1[2, 0] == cs.c4


def test_zero_coefficients_give_zero_matrices():
    names = [f.name for f in CoefficientSet.__dataclass_fields__.values()]
    cs = CoefficientSet(**{n: 0.0 for n in names})
    jp = jacobians(cs)
    assert not jp.J0.any() and not jp.J1.any()


def test_delta_recomputation_identities():
    rng = np.random.default_rng(7)
    for _ in range(20):
        cs = _random_cs(rng)
        d = delta_coefficients(cs)
        assert d.d3 == pytest.approx(-(cs.a2 + cs.b7 + cs.c3), rel=1e-14)
        assert d.d4 == pytest.approx(-cs.a4 * cs.c8, rel=1e-14)
        assert d.d6 == pytest.approx(-cs.a4 * cs.c4, rel=1e-14)
        assert d.d7 == pytest.approx(cs.a4 * cs.b7 * cs.c4, rel=1e-14)


def test_delta_trivial_cases():
    rng = np.random.default_rng(9)
    cs = _random_cs(rng)
    cs_a4 = CoefficientSet(**{**cs.as_dict(), "a4": 0.0})
    d = delta_coefficients(cs_a4)
    assert d.d4 == 0.0 and d.d6 == 0.0 and d.d7 == 0.0
    assert d.d5 == pytest.approx(-cs.a3 * cs.b6 * cs.c4, rel=1e-14)
    cs_b7c4 = CoefficientSet(**{**cs.as_dict(), "b7": 0.0, "c4": 0.0})
    assert delta_coefficients(cs_b7c4).d7 == 0.0


def _char_det(lam: complex, tau: float, jp) -> complex:
    M = lam * np.eye(3, dtype=complex) - jp.J0 - jp.J1 * cmath.exp(-lam * tau)
    return complex(np.linalg.det(M))


def _quasipoly(lam: complex, tau: float, d) -> complex:
    e = cmath.exp(-lam * tau)
    return (
        lam**3 + d.d1 + d.d2 * lam + d.d3 * lam * lam
        + (d.d4 * lam + d.d5) * e
        + (d.d6 * lam + d.d7) * e * e
    )


def test_determinant_identity_random_coefficients():
    rng = np.random.default_rng(13)
    for _ in range(10):
        cs = _random_cs(rng)
        jp = jacobians(cs)
        d = delta_coefficients(cs)
        for _ in range(20):
            lam = complex(rng.normal(), rng.normal())
            tau = float(rng.uniform(0, 3))
            diff = abs(_quasipoly(lam, tau, d) - _char_det(lam, tau, jp))
            assert diff <= 1e-9 * (1.0 + abs(lam) ** 3)


def test_tau0_eigenvalues_solve_collapsed_cubic(reference_params, reference_equilibrium):
    cs = expansion_coefficients(reference_equilibrium.location, reference_params)
    jp = jacobians(cs)
    d = delta_coefficients(cs)
    eig = np.linalg.eigvals(jp.J0 + jp.J1)
    cubic = np.array([1.0, d.d3, d.d2 + d.d4 + d.d6, d.d1 + d.d5 + d.d7])
    roots = np.sort_complex(np.roots(cubic))
    for got, ref in zip(np.sort_complex(eig), roots):
        assert got == pytest.approx(ref, rel=1e-8)
