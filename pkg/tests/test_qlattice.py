from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from opera.coeffcore import ParamRational
from opera.grammar import parse_expression
from opera.jetring import JetPolynomial
from opera.qlattice import (QDiffOp, ShiftPoly, baxter_substitute, classical_limit, deformed_relation_template,
                            deformed_structure_function, q_compose, q_miura_expand, q_nth_root, q_root_lax,
                            structure_constant, sym, t_series, verify_t_bracket)
from opera.qlattice.distributions import f_coefficient, lambda_antisymmetry
from opera.qlattice.limits import (ZRational, classical_h2_expected, first_order_dual, first_order_in_t,
                                  regular_at_t_equals_q)
from opera.qlattice.qdiff import QDepthExhausted, QShapeError, generic_q_oper

L0 = ShiftPoly.symbol(sym("L", 1))
q = ParamRational.gen("q")


class TestShiftPoly:
    def test_inverse_and_shift(self):
        assert L0 * L0.inverse() == 1
        assert L0.shift(2) == ShiftPoly.symbol(sym("L", 1, 2))
        with pytest.raises(ZeroDivisionError):
            (L0 + 1).inverse()

    @settings(max_examples=30, deadline=None)
    @given(st.integers(-3, 3), st.integers(-3, 3))
    def test_shift_is_additive(self, a, b):
        p = L0 * 2 + L0.shift(1) ** -1
        assert p.shift(a).shift(b) == p.shift(a + b)


def test_d_moves_past_functions_with_a_shift():
    D = QDiffOp.D()
    out = q_compose(D, QDiffOp.scalar(L0))
    assert out.coeffs == {1: L0.shift(1)}


def test_constrained_miura_sl2():
    (t1,), const = q_miura_expand(2)
    assert t1 == t_series("z")
    assert const == 1


def test_unconstrained_miura_sl3_top_coefficient():
    (t1, t2), const = q_miura_expand(3, constrained=False)
    L = lambda i, s: ShiftPoly.symbol(sym("L", i, s))
    assert t1 == L(1, 0) + L(2, 1) + L(3, 2)
    assert const == L(1, 0) * L(2, 0) * L(3, 0)


def test_constant_coefficient_root():
    # (D + 1)^2 = D^2 + 2D + 1
    R, _ = q_nth_root(QDiffOp({2: 1, 1: 2, 0: 1}), 2, 4)
    assert R[1] == 1 and R[0] == 1 and R[-1] == 0 and R[-2] == 0


def test_root_errors():
    with pytest.raises(QShapeError):
        q_nth_root(QDiffOp({2: 2}), 2, 3)
    with pytest.raises(QDepthExhausted):
        q_nth_root(generic_q_oper(2), 2, 0)
    R, _ = q_nth_root(generic_q_oper(2), 2, 3)
    with pytest.raises(QDepthExhausted):
        R[-5]


def test_root_lax_shape_sl3():
    out = q_root_lax(3, 1)
    assert len(out["flows"]) == 2
    with pytest.raises(ValueError):
        q_root_lax(3, 3)


def test_t_bracket_closed_form():
    report = verify_t_bracket(4)
    assert report["passed"]
    assert lambda_antisymmetry(4)


def test_f_coefficient_is_odd():
    for n in range(1, 5):
        assert f_coefficient(-n) == -f_coefficient(n)


def test_classical_limit_low_orders():
    s = classical_limit(4)
    assert s[0] == 2
    assert not s[1]
    assert s[2] == classical_h2_expected()
    with pytest.raises(ValueError):
        classical_limit(2)


def test_zrational_shift():
    z = ZRational.gen("z")
    qz = ZRational.gen("q") ** 2 * z
    assert (z / (1 - z)).shift_z(2) == qz / (1 - qz)


def test_baxter_linear_q():
    res = baxter_substitute(parse_expression("1 - z"))
    assert res.consistent
    with pytest.raises(ValueError):
        baxter_substitute(parse_expression("u1"))
    with pytest.raises(ZeroDivisionError):
        baxter_substitute(JetPolynomial())


def test_structure_function_at_t1_starts_at_one():
    assert deformed_structure_function(3, t_value=Fraction(1))[0] == 1


def test_dual_number_derivative_matches_generic():
    assert first_order_dual(3) == first_order_in_t(deformed_structure_function(3))


def test_structure_constant_small_window():
    c, ratios = structure_constant(3)
    assert c == 2 and len(ratios) == 3


def test_relation_template_degenerates():
    assert deformed_relation_template().degenerates_at_t1()


def test_regular_when_t_equals_q():
    assert regular_at_t_equals_q(5)
