import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from opera.jetring import JetPolynomial, total_derivative
from opera.psdo import (DepthExhausted, OperatorShapeError, PseudoDiffOp, commutator, compose, conserved_density,
                        fractional_power, lax_rhs, nth_root, power, random_pseudo_operator,
                        residue_commutator_is_exact, scalar_lax_operator)

v = JetPolynomial.var(1)
D = total_derivative
d = PseudoDiffOp.d()
seeds = st.integers(0, 10 ** 6)


def test_d_inverse_cancels():
    assert compose(PseudoDiffOp.d(-1), d, cutoff=-4).agrees_with(PseudoDiffOp.scalar(1).truncate(-4))


def test_leibniz_on_multiplication():
    # d o v = v d + v'
    assert compose(d, PseudoDiffOp.scalar(v)).coeffs == {1: v, 0: D(v)}


def test_inverse_derivative_expansion():
    # d^-1 o v = v d^-1 - v' d^-2 + v'' d^-3 - ...
    out = compose(PseudoDiffOp.d(-1), PseudoDiffOp.scalar(v), cutoff=-4)
    assert [out[k] for k in (-1, -2, -3, -4)] == [v, -D(v), D(v, 2), -D(v, 3)]


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_associativity(seed):
    rng = random.Random(seed)
    a, b, c = (random_pseudo_operator(rng, (1,), top=1, bottom=-1, max_order=1, max_degree=2, terms=2)
               for _ in range(3))
    cut = -4
    left = compose(compose(a, b, cut), c, cut)
    right = compose(a, compose(b, c, cut), cut)
    assert left.agrees_with(right)


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_residue_of_commutator_is_total_derivative(seed):
    rng = random.Random(seed)
    a = random_pseudo_operator(rng, (1,), top=1, bottom=-2, max_order=1, max_degree=2, terms=2)
    b = random_pseudo_operator(rng, (1,), top=1, bottom=-2, max_order=1, max_degree=2, terms=2)
    assert residue_commutator_is_exact(a, b, (1,))


def test_square_root_squares_back():
    L = scalar_lax_operator(2)
    R = nth_root(L, 2, 6)
    assert power(R, 2, cutoff=-3).agrees_with(L.truncate(-3))


def test_cube_root_of_third_order():
    L = scalar_lax_operator(3)
    R = nth_root(L, 3, 6)
    assert power(R, 3, cutoff=-2).agrees_with(L.truncate(-2))


def test_kdv_density():
    # res L^{3/2} for L = d^2 - v
    assert conserved_density(2, 3) == v * v * Fraction(3, 8) - D(v, 2) * Fraction(1, 8)


def test_kdv_flow():
    (rhs,) = lax_rhs(2, 3)
    assert rhs == D(v, 3) * Fraction(1, 4) - v * D(v) * Fraction(3, 2)


def test_positive_part_of_fractional_power():
    plus = fractional_power(scalar_lax_operator(2), 2, 3, 0).plus()
    assert plus.coeffs == {3: JetPolynomial.const(1), 1: v * Fraction(-3, 2), 0: D(v) * Fraction(-3, 4)}


def test_trivial_flow_rejected():
    with pytest.raises(ValueError):
        lax_rhs(2, 4)
    with pytest.raises(ValueError):
        lax_rhs(1, 3)


def test_shape_errors():
    with pytest.raises(OperatorShapeError):
        PseudoDiffOp.differential({-1: v})
    with pytest.raises(OperatorShapeError):
        nth_root(d + PseudoDiffOp.d(2), 2, 3)
    with pytest.raises(OperatorShapeError):
        nth_root(PseudoDiffOp({2: 1, 1: v}), 2, 3)


def test_depth_is_enforced():
    R = nth_root(scalar_lax_operator(2), 2, 3)
    with pytest.raises(DepthExhausted):
        R[-5]
    with pytest.raises(DepthExhausted):
        nth_root(scalar_lax_operator(2), 2, 0)


def test_commutator_of_differential_operators():
    a = PseudoDiffOp.differential({2: 1})
    b = PseudoDiffOp.scalar(v)
    assert commutator(a, b).coeffs == {1: 2 * D(v), 0: D(v, 2)}
