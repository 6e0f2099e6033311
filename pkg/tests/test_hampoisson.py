from fractions import Fraction

import pytest

from opera.hampoisson import (CartanData, HamiltonianOperator, ModeValue, NonlinearCoefficient, NotSkewAdjoint,
                              adjoint, hamiltonian_flow, heisenberg_diagonal, heisenberg_mode_value,
                              heisenberg_operator, intertwining_constant, kdv_miura_map, mode_bracket,
                              proportionality, pushforward_structure, virasoro_mode_value, virasoro_operator)
from opera.jetring import JetPolynomial, total_derivative
from opera.psdo import PseudoDiffOp, lax_rhs

u = JetPolynomial.var(1)
D = total_derivative


def test_cartan_data():
    c = CartanData(3)
    assert c.cartan_matrix == [[2, -1, 0], [-1, 2, -1], [0, -1, 2]]
    assert c.dual_coxeter == 4
    assert c.rho_vee == [Fraction(3, 2), 2, Fraction(3, 2)]
    assert c.is_positive_definite()
    with pytest.raises(ValueError):
        CartanData(0)


def test_adjoint_rules():
    # (v d)^* = -d o v = -v d - v'
    assert adjoint(PseudoDiffOp({1: u})).coeffs == {1: -u, 0: -D(u)}
    P = PseudoDiffOp({3: 1, 1: u})
    assert adjoint(adjoint(P)).coeffs == P.coeffs


def test_skew_adjoint_check():
    with pytest.raises(NotSkewAdjoint):
        HamiltonianOperator.scalar(PseudoDiffOp({2: 1}))
    assert heisenberg_operator(CartanData(2)).is_skew_adjoint()


def test_heisenberg_diagonal_sl2():
    assert heisenberg_diagonal(2)[0, 0].coeffs == {1: Fraction(-1, 2)}


def test_pushforward_is_virasoro():
    P = pushforward_structure([kdv_miura_map()], heisenberg_diagonal(2))
    assert P.rewritten
    assert P == virasoro_operator()


def test_kdv_is_hamiltonian_for_virasoro():
    # KdV flow equals 1/2 P(delta H) with H = res L^{3/2}
    from opera.psdo import conserved_density

    flow = hamiltonian_flow(virasoro_operator(), conserved_density(2, 3))
    assert proportionality(flow, lax_rhs(2, 3)) is not None


def test_mode_tables():
    vir = mode_bracket(virasoro_operator(), 2, 4)
    for n in range(-4, 5):
        for m in range(-4, 5):
            assert vir.bracket(1, n, 1, m) == virasoro_mode_value(n, m)
    assert vir.is_skew_symmetric()
    assert vir.jacobi_failures() == []
    heis = mode_bracket(heisenberg_diagonal(2), 1, 4)
    assert heis.bracket(1, 3, 1, -3) == heisenberg_mode_value(3, -3)


def test_nonlinear_coefficients_rejected():
    P = HamiltonianOperator.scalar(PseudoDiffOp({1: u * u, 0: u * D(u)}))
    with pytest.raises(NonlinearCoefficient):
        mode_bracket(P, 2, 2)


def test_mode_value_arithmetic():
    a = ModeValue({(1, 2): Fraction(1)}, Fraction(3))
    b = a.scale(-1)
    assert (a + b).is_zero()


def test_intertwining_constants():
    assert intertwining_constant(3) == Fraction(3, 2)
    assert intertwining_constant(1) == Fraction(1, 2)


def test_proportionality_none():
    assert proportionality([u, u * u], [u, u]) is None
    assert proportionality([JetPolynomial()], [JetPolynomial()]) is None
