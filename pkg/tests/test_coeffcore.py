from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from opera.coeffcore import (ConstantTermError, DualNumber, NonTruncatingError, ParamRational, TruncatedSeries,
                             gens, q_pochhammer_series, series_exp, solve_exact)

q, t, h = gens()

small = st.integers(min_value=-4, max_value=4)
fracs = st.fractions(min_value=-4, max_value=4, max_denominator=5)


@st.composite
def rational_functions(draw):
    num = sum((draw(small) * q ** draw(st.integers(0, 3)) * t ** draw(st.integers(0, 2)) for _ in range(3)),
              Fraction(0))
    den = 1 + sum((draw(small) * q ** draw(st.integers(1, 2)) for _ in range(2)), Fraction(0))
    if den == 0:
        den = Fraction(1)
    return num / den if not isinstance(num, Fraction) or num else Fraction(draw(small))


class TestParamRational:
    def test_reduces_and_demotes_constants(self):
        x = (q * q - 1) / (q - 1)
        assert x == q + 1
        assert (q / q) == 1
        assert isinstance(q / q, Fraction)

    def test_laurent_identity(self):
        assert (q - 1 / q) * (q + 1 / q) == q ** 2 - q ** (-2)

    def test_subs_and_derivative(self):
        f = (q ** 2 + t) / (1 - q)
        assert f.subs(q=Fraction(2), t=Fraction(1)) == -5
        assert f.derivative("t") == 1 / (1 - q)
        with pytest.raises(ZeroDivisionError):
            f.subs(q=Fraction(1))

    def test_partial_subs_keeps_parameters(self):
        f = q * t + 1
        assert f.subs(t=Fraction(1)) == q + 1

    def test_valuation(self):
        assert (q ** 3 / (1 + q)).valuation("q") == 3
        assert (1 / (q ** 2 * (1 - q))).valuation("q") == -2

    def test_printing_parenthesizes_compound_denominators(self):
        s = str((q + 1) / (q * t))
        assert "/(" in s

    def test_zero_division(self):
        with pytest.raises(ZeroDivisionError):
            q / (q - q)

    @settings(max_examples=40, deadline=None)
    @given(rational_functions(), rational_functions(), rational_functions())
    def test_field_axioms(self, a, b, c):
        assert (a + b) + c == a + (b + c)
        assert a * (b + c) == a * b + a * c
        assert (a - b) + b == a
        if b != 0:
            assert (a / b) * b == a

    def test_dual_number_matches_symbolic_derivative(self):
        f = lambda x: (q ** 2 * x ** 3 - x) / (1 + q * x ** 2)
        d = f(DualNumber(1, 1))
        assert d.re == f(Fraction(1))
        assert d.eps == f(t).derivative("t").subs(t=Fraction(1))


class TestTruncatedSeries:
    def test_inverse(self):
        s = TruncatedSeries.from_list("z", [1, 2, 3, 4, 5, 6])
        assert (s * s.inverse()).agrees_with(TruncatedSeries.constant("z", 6))

    def test_order_rule_for_products(self):
        a = TruncatedSeries("z", 5, {1: Fraction(1)})
        b = TruncatedSeries("z", 7, {0: Fraction(1)})
        assert (a * b).order == 5

    def test_getitem_beyond_order(self):
        with pytest.raises(IndexError):
            TruncatedSeries("z", 3)[3]

    def test_exp_is_a_homomorphism(self):
        a = TruncatedSeries("z", 8, {1: Fraction(1), 3: Fraction(-2)})
        b = TruncatedSeries("z", 8, {2: q})
        assert series_exp(a + b).agrees_with(series_exp(a) * series_exp(b))

    def test_exp_needs_zero_constant(self):
        with pytest.raises(ConstantTermError):
            series_exp(TruncatedSeries.constant("z", 4))

    @settings(max_examples=30, deadline=None)
    @given(st.lists(fracs, min_size=3, max_size=5), st.lists(fracs, min_size=2, max_size=4),
           st.lists(fracs, min_size=2, max_size=4))
    def test_composition_is_associative(self, fa, fb, fc):
        order = 6
        f = TruncatedSeries.from_list("s", fa, order)
        g = TruncatedSeries("s", order, {1: Fraction(1) + abs(fb[0]), 2: fb[1]})
        k = TruncatedSeries("s", order, {1: Fraction(2) + abs(fc[0]), 3: fc[1]})
        left = f.compose(g).compose(k)
        right = f.compose(g.compose(k))
        n = min(left.order, right.order)
        assert left.agrees_with(right, n)

    def test_compose_requires_linear_term(self):
        f = TruncatedSeries.from_list("s", [1, 1, 1])
        with pytest.raises(Exception):
            f.compose(TruncatedSeries("s", 3, {2: Fraction(1)}))


class TestPochhammer:
    def test_euler_first_two_coefficients(self):
        # e_1 and e_2 of {a b^k}: -a/(1-b) and a^2 b/((1-b)(1-b^2))
        s = q_pochhammer_series((q ** 2, 1), (q ** 4, 0), 3)
        b = q ** 4
        assert s[1] == -q ** 2 / (1 - b)
        assert s[2] == q ** 4 * b / ((1 - b) * (1 - b * b))

    def test_finite_product_when_b_carries_z(self):
        # (z; z) = 1 - z - z^2 + z^5 + z^7 - ...
        s = q_pochhammer_series((Fraction(1), 1), (Fraction(1), 1), 8)
        assert [s[k] for k in range(8)] == [1, -1, -1, 0, 0, 1, 0, 1]

    def test_non_truncating_inputs(self):
        with pytest.raises(NonTruncatingError):
            q_pochhammer_series((q, 0), (q, 0), 4)
        with pytest.raises(NonTruncatingError):
            q_pochhammer_series((q, 1), (Fraction(2), 0), 4)
        with pytest.raises(NonTruncatingError):
            q_pochhammer_series((q, -1), (q, 0), 4)

    def test_numeric_base_matches_truncated_product(self):
        # b = 1/2: compare with a long finite product
        s = q_pochhammer_series((Fraction(1), 1), (Fraction(1, 2), 0), 4)
        prod = TruncatedSeries.constant("z", 4)
        for n in range(60):
            prod = prod * TruncatedSeries("z", 4, {0: Fraction(1), 1: -Fraction(1, 2 ** n)})
        for k in range(4):
            assert abs(float(s[k] - prod[k])) < 1e-15


def test_solve_exact():
    assert solve_exact([[Fraction(2), Fraction(1)], [Fraction(1), Fraction(3)]], [Fraction(3), Fraction(4)]) == [1, 1]
    assert solve_exact([[Fraction(1), Fraction(1)], [Fraction(2), Fraction(2)]], [Fraction(1), Fraction(3)]) is None
