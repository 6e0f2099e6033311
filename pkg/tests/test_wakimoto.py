from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from opera.wakimoto import (FieldMode, FockState, WakimotoModule, WindowExceeded, basis_monomials, critical_form,
                            critical_level, literal_miura_constant, state_degree, sugawara_vacuum_scalar,
                            verify_relations, weyl_mode)

W = WakimotoModule(window=3, degree=3, u_range=2)
MONOS = basis_monomials(3)


def state(i):
    return W.basis_state(MONOS[i % len(MONOS)])


@settings(max_examples=60, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(0, 500))
def test_weyl_relations(n, m, i):
    s = state(i)
    lhs = weyl_mode("a", n, weyl_mode("a*", m, s)) - weyl_mode("a*", m, weyl_mode("a", n, s))
    expected = s if n + m == 0 else FockState(s.ring)
    assert lhs == expected
    aa = weyl_mode("a", n, weyl_mode("a", m, s)) - weyl_mode("a", m, weyl_mode("a", n, s))
    assert aa.is_zero()


def test_critical_form_values():
    assert critical_form("e", "f") == critical_form("f", "e") == -2
    assert critical_form("h", "h") == -4
    assert critical_form("e", "e") == 0
    assert critical_level() == -2


def test_vacuum_is_highest_weight_when_only_u0_is_on():
    # positive modes of u(z) would feed creation operators, so keep only u_0
    W0 = WakimotoModule(window=3, degree=3, u_range=0)
    vac = W0.vacuum()
    for n in range(0, 4):
        assert W0.apply_field_mode(FieldMode("e", n), vac).is_zero()
    for n in range(1, 4):
        assert W0.apply_field_mode(FieldMode("f", n), vac).is_zero()
        assert W0.apply_field_mode(FieldMode("h", n), vac).is_zero()
    assert W0.apply_field_mode(FieldMode("h", 0), vac) == FockState(W0.ring, {(): W0.u(0)})


def test_positive_u_modes_reach_the_vacuum():
    assert not W.apply_field_mode(FieldMode("f", 1), W.vacuum()).is_zero()


@pytest.mark.parametrize("n", [1, 2, 3])
def test_cartan_level_on_vacuum(n):
    vac = W.vacuum()
    got = W.commutator_on_state(FieldMode("h", n), FieldMode("h", -n), vac)
    assert got == vac.scale(critical_form("h", "h") * n)


def test_degree_grading_counts_zero_mode_of_a_star():
    degree_one = sorted(m for m in basis_monomials(1) if m)
    assert degree_one == [(((0, 1), 1),), (((1, 0), 1),)]
    assert all(state_degree(m) == 1 for m in degree_one)
    assert len(basis_monomials(0)) == 1


def test_empty_window_passes_vacuously():
    checks = verify_relations(window=0, degree=0, u_range=0)
    assert all(c.passed for c in checks)


def test_wrong_derivative_coefficient_is_caught():
    checks = {c.id: c for c in verify_relations(window=1, degree=1, u_range=0, deriv_coeff=2)}
    assert not checks["[e,f]"].passed
    assert "counterexample" in checks["[e,f]"].detail


def test_small_window_relations():
    assert all(c.passed for c in verify_relations(window=2, degree=2, u_range=1))


def test_sugawara_without_u_vanishes():
    W0 = WakimotoModule(window=2, degree=2, u_range=-1)
    for n in range(-2, 3):
        assert W0.sugawara_mode_apply(n, W0.vacuum()).is_zero()


def test_sugawara_vacuum_scalar_is_twice_cartan_miura():
    for n in range(-2, 3):
        assert sugawara_vacuum_scalar(n) == W.miura_mode(n) * 2


def test_literal_form_is_not_proportional():
    assert literal_miura_constant() is None


def test_window_guard():
    with pytest.raises(WindowExceeded):
        W.apply_field_mode(FieldMode("e", 4), W.vacuum())
    big = [m for m in basis_monomials(4) if state_degree(m) == 4][0]
    with pytest.raises(WindowExceeded):
        W.apply_field_mode(FieldMode("e", 0), W.basis_state(big))
    with pytest.raises(ValueError):
        FieldMode("x", 0)
    with pytest.raises(ValueError):
        WakimotoModule(window=-1)
