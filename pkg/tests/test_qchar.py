import pytest

from opera.qchar import (LambdaIndexError, YPolynomial, character_text, first_fundamental_character, forgetful,
                         lambda_image, qchar_eval_sl2, substitute_lambda)
from opera.qlattice import q_miura_expand, t_series


def test_sl2_evaluation_module():
    assert substitute_lambda(t_series("z"), 2) == qchar_eval_sl2()
    assert substitute_lambda(t_series("z"), 2, base=3) == qchar_eval_sl2(3)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_forgetful_image_is_fundamental_character(n):
    (t1, *_), _ = q_miura_expand(n, constrained=False)
    assert forgetful(substitute_lambda(t1, n)) == first_fundamental_character(n)


def test_rendering():
    assert character_text(forgetful(qchar_eval_sl2()), rank=1) in ("y + y^-1", "y^-1 + y")
    assert "aq" in YPolynomial.Y(1, 1).to_text()
    assert "aq^{2}" in YPolynomial.Y(1, 2).to_text(latex=True)


def test_lambda_index_range():
    with pytest.raises(LambdaIndexError):
        lambda_image(0, 0, 2)
    with pytest.raises(LambdaIndexError):
        lambda_image(4, 0, 3)


def test_only_unit_monomials_invert():
    with pytest.raises(ZeroDivisionError):
        (YPolynomial.Y(1, 0) + YPolynomial.Y(1, 2)) ** -1
    assert YPolynomial.Y(1, 0) * YPolynomial.Y(1, 0) ** -1 == YPolynomial.one()
