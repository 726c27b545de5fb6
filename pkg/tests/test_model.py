import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gasstar.model import (
    LinearEntropy,
    ModelSpec,
    Polytrope,
    PowerLawRotation,
    RangeError,
    TabulatedEntropy,
    TabulatedEOS,
    TabulatedRotation,
    check_conditions,
    eval_A,
    eval_A_prime,
    invert_A_prime,
)

gamma2 = Polytrope(1.0, 2.0)


def tabulated(gamma=5.0 / 3.0, K=1.0):
    s = np.geomspace(1e-6, 1e6, 200)
    return TabulatedEOS(np.r_[0.0, s], np.r_[0.0, K * s**gamma], gamma_bar=gamma + 1)


def test_A_polytrope_values():
    assert eval_A(gamma2, 0.0) == 0.0
    assert eval_A(gamma2, 2.0) == pytest.approx(4.0, rel=1e-15)
    eos = Polytrope(1.0, 5.0 / 3.0)
    assert eval_A(eos, 1.0) == pytest.approx(1.5, rel=1e-15)
    # adaptive quadrature of the defining integral against the closed form
    for s in (1e-3, 1.0, 7.5):
        assert eos.A_quad(s) == pytest.approx(float(eos.A(s)), rel=1e-10)


def test_A_prime_values():
    assert eval_A_prime(gamma2, 1.5) == pytest.approx(3.0)
    assert eval_A_prime(gamma2, 0.0) == 0.0
    assert eval_A_prime(tabulated(), 0.0) == 0.0
    lhs = eval_A_prime(gamma2, 2.0) - eval_A(gamma2, 2.0) / 2
    assert lhs == pytest.approx(float(gamma2.f(2.0)) / 2) and lhs == pytest.approx(2.0)


def test_invert_A_prime_values():
    assert invert_A_prime(gamma2, 3.0) == pytest.approx(1.5)
    assert invert_A_prime(gamma2, 0.0) == 0.0
    for eos in (gamma2, Polytrope(2.0, 5.0 / 3.0), tabulated()):
        s = np.array([1e-6, 1.0, 10.0])
        back = invert_A_prime(eos, eval_A_prime(eos, s))
        np.testing.assert_allclose(back, s, rtol=1e-10)


def test_errors():
    with pytest.raises(ValueError):
        eval_A(gamma2, -1.0)
    with pytest.raises(ValueError):
        invert_A_prime(gamma2, -0.1)
    eos = tabulated()
    with pytest.raises(RangeError):
        eval_A(eos, 2e6)
    with pytest.raises(RangeError):
        invert_A_prime(eos, 1e20)
    with pytest.raises(ValueError):
        Polytrope(-1.0, 2.0)
    with pytest.raises(ValueError):
        TabulatedEOS([0, 1, 2], [0, 2, 1])  # not increasing
    with pytest.raises(ValueError):
        TabulatedEOS([1, 2, 3], [1, 2, 3])  # linear growth: A diverges


def test_tabulated_matches_polytrope():
    eos, ref = tabulated(), Polytrope(1.0, 5.0 / 3.0)
    s = np.geomspace(1e-5, 1e5, 37)
    np.testing.assert_allclose(eos.f(s), ref.f(s), rtol=1e-12)
    np.testing.assert_allclose(eos.A(s), ref.A(s), rtol=1e-10)
    np.testing.assert_allclose(eos.A_prime(s), ref.A_prime(s), rtol=1e-10)
    # quadrature path agrees with the segment formulas
    assert eos.A_quad(3.0) == pytest.approx(float(eos.A(3.0)), rel=1e-9)


@settings(max_examples=50, deadline=None)
@given(
    s1=st.floats(1e-5, 1e4),
    ratio=st.floats(1.0001, 100.0),
    gamma=st.floats(1.34, 3.0),
)
def test_A_prime_strictly_increasing(s1, ratio, gamma):
    eos = Polytrope(1.0, gamma)
    assert eos.A_prime(s1) < eos.A_prime(s1 * ratio)


@settings(max_examples=50, deadline=None)
@given(s=st.floats(1e-6, 1e6), gamma=st.floats(1.34, 3.0), K=st.floats(0.1, 10.0))
def test_A_prime_identity(s, gamma, K):
    eos = Polytrope(K, gamma)
    lhs = eos.A_prime(s) - eos.A(s) / s
    assert lhs == pytest.approx(float(eos.f(s)) / s, rel=1e-10)


def test_entropy_T_bounds():
    ent = LinearEntropy(0.5)
    assert ent.T(0.0) == 1.0
    n = np.linspace(0.0, 1.0, 1000)
    T1, T0 = ent.bounds(1.0)
    T = ent.T(n)
    assert np.all((T >= T1) & (T <= T0))
    assert np.all(np.abs(ent.dT(n)) <= T0)
    tab = TabulatedEntropy([0.0, 0.5, 1.0], [0.0, -0.1, -0.4])
    assert tab.T(0.0) == 1.0
    # S(0) != 0 is reported by the checker
    shifted = TabulatedEntropy([0.0, 1.0], [0.1, 0.0])
    assert "A5" in check_conditions(ModelSpec(gamma2, shifted, M=1.0)).failed()


def test_conditions_equality_case():
    spec = ModelSpec(gamma2, LinearEntropy(2.0 / 3.0), PowerLawRotation(1.0, 4.0 / 3.0), M=1.0)
    rep = check_conditions(spec)
    assert rep.passed, rep.failed()
    assert rep.results["A3"].passed and rep.results["A4"].passed
    assert rep.slope_bound


def test_conditions_A4_counterexample():
    spec = ModelSpec(gamma2, angmom=PowerLawRotation(1.0, 2.0), M=1.0)
    rep = check_conditions(spec)
    assert rep.failed() == ["A4"]
    ce = rep.results["A4"].counterexample
    assert ce.lhs < ce.rhs
    # the counterexample re-evaluates to the same violation
    assert spec.angmom.L(ce.a * ce.x) == pytest.approx(ce.lhs)
    assert ce.a ** (4 / 3) * spec.angmom.L(ce.x) == pytest.approx(ce.rhs)
    # the documented instance a = 0.5, m = 1
    assert spec.angmom.L(0.5) == pytest.approx(0.25)
    assert 0.5 ** (4 / 3) == pytest.approx(0.3969, abs=1e-4)


def test_conditions_reject_bad_entropy_and_rotation():
    # entropy increasing near the vacuum fails A7
    rising = TabulatedEntropy([0.0, 0.5, 1.0], [0.0, -0.2, 0.1], delta0=0.2)
    rep = check_conditions(ModelSpec(gamma2, rising, M=1.0))
    assert "A7" in rep.failed()
    # a steep entropy drop fails A6
    steep = LinearEntropy(5.0)
    rep = check_conditions(ModelSpec(gamma2, steep, M=1.0))
    assert "A6" in rep.failed() and not rep.slope_bound
    # a decreasing rotation table is refused at construction
    with pytest.raises(ValueError):
        TabulatedRotation([0.0, 1.0], [1.0, 0.0])
    # L(0) != 0 fails A3
    rep = check_conditions(ModelSpec(gamma2, angmom=TabulatedRotation([0.0, 1.0], [0.1, 1.0]), M=1.0))
    assert "A3" in rep.failed()


def test_conditions_builtin_families_pass():
    for gamma in (1.5, 5.0 / 3.0, 2.0):
        for q in (1.0, 4.0 / 3.0):
            spec = ModelSpec(Polytrope(1.0, gamma), LinearEntropy(0.3), PowerLawRotation(0.2, q), M=1.0)
            assert check_conditions(spec).passed


def test_conditions_A1_rejects_soft_eos():
    # f = s^(5/4) grows slower than s^(4/3)
    rep = check_conditions(ModelSpec(Polytrope(1.0, 1.25), M=1.0))
    assert "A1" in rep.failed()


def test_entropy_slope_bound_implies_A6(rng):
    # random smooth entropies with sup |S'| <= 2/(3M) satisfy A6
    M = 1.0
    bound = 2.0 / (3.0 * M)
    n = np.linspace(0.0, M, 400)
    for _ in range(5):
        # S' = -c (1 + a sin(k n + p)) with c (1 + |a|) below the bound
        a, k, p = rng.uniform(-1, 1), rng.uniform(1, 20), rng.uniform(0, 2 * np.pi)
        c = 0.95 * bound / (1 + abs(a))
        S = -c * (n - a * (np.cos(k * n + p) - np.cos(p)) / k)
        ent = TabulatedEntropy(n, S)
        rep = check_conditions(ModelSpec(gamma2, ent, M=M))
        assert rep.sup_abs_dS <= bound * (1 + 1e-12)
        assert rep.slope_bound
        assert rep.results["A6"].passed


def test_model_spec_validation():
    with pytest.raises(ValueError):
        ModelSpec(gamma2, M=-1.0)
    with pytest.raises(ValueError):
        ModelSpec(gamma2, b=0.0)
    with pytest.raises(ValueError):
        ModelSpec(gamma2, b=3.0, xi=2.0)
    assert ModelSpec(gamma2, b=0.5, xi=2.0).b == 0.5
    assert ModelSpec(gamma2, M=2.0).delta0 == pytest.approx(0.2)
