"""Acceptance suite: one test group per criterion.

Every check is an exact identity, so the comparison tolerance is zero.
Runtime budgets are pinned below and asserted.
"""
import random
import time
from fractions import Fraction

import pytest
import sympy as sp

from opera.coeffcore import ParamRational, TruncatedSeries
from opera.hampoisson import (heisenberg_diagonal, heisenberg_mode_value, intertwining_constant, kdv_miura_map,
                              miura_linear_central_term, mode_bracket, pushforward_structure, evolve_under,
                              virasoro_mode_value, virasoro_operator)
from opera.jetring import JetPolynomial, euler_derivative, total_derivative
from opera.oper import (CanonicalOper, canonicalize, gauge_oper, miura_diagonal, miura_equivariance_defect,
                        miura_expand, mobius_series, random_unipotent, schwarzian, schwarzian_cocycle_defect)
from opera.psdo import (commutator, fractional_power, lax_commutator, lax_rhs, nth_root, power,
                        random_pseudo_operator, residue_commutator_is_exact, scalar_lax_operator)
from opera.qchar import (character_text, first_fundamental_character, forgetful, qchar_eval_sl2,
                         substitute_lambda)
from opera.qlattice import (classical_limit, deformed_structure_function, lambda_product, q_miura_expand,
                            structure_constant, verify_t_bracket)
from opera.qlattice.distributions import f_coefficient
from opera.qlattice.limits import DICTIONARY_NOTE, classical_h2_expected, first_order_dual
from opera.qlattice.shiftring import ShiftPoly, sym
from opera.wakimoto import SUGAWARA_CONSTANT, verify_relations

TOLERANCE = 0  # exact arithmetic throughout
BUDGET_SUBSECOND = 1.0
BUDGET_SECONDS = 30.0
BUDGET_MINUTES = 300.0

u = JetPolynomial.var(1)
v = JetPolynomial.var(1)


def _timed(fn, *args, **kwargs):
    start = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - start


def _poly_to_sympy(p: JetPolynomial, x, fns):
    total = sp.Integer(0)
    for (zp, vs), c in p.terms.items():
        term = sp.Rational(c.numerator, c.denominator)
        for (i, k), e in vs:
            term *= sp.diff(fns[i], x, k) ** e
        total += term
    return total


# 1 -------------------------------------------------------------------------


@pytest.mark.criterion(1, "Miura n=2 gives v = u^2 - u'")
def test_miura_sl2_matches_operator_product():
    (vs,), elapsed = _timed(miura_expand, miura_diagonal(2))
    assert vs == u * u - total_derivative(u)
    # oracle: apply (d - u)(d + u) to a test function and read off -v
    x = sp.Symbol("x")
    U, f = sp.Function("u")(x), sp.Function("f")(x)
    inner = sp.diff(f, x) + U * f
    outer = sp.expand(sp.diff(inner, x) - U * inner)
    minus_v = sp.expand(outer - sp.diff(f, x, 2)).coeff(f)
    assert sp.simplify(-minus_v - _poly_to_sympy(vs, x, {1: U})) == TOLERANCE
    assert elapsed < BUDGET_SUBSECOND


# 2 -------------------------------------------------------------------------

WINDOW_POISSON = 8


@pytest.mark.criterion(2, "Heisenberg pushes forward to Virasoro; mode brackets on |n|,|m| <= 8")
def test_poisson_map_and_mode_brackets():
    start = time.perf_counter()
    push = pushforward_structure([kdv_miura_map()], heisenberg_diagonal(2))
    assert push.rewritten
    assert push == virasoro_operator()
    W = WINDOW_POISSON
    vt = mode_bracket(virasoro_operator(), 2, W)
    ht = mode_bracket(heisenberg_diagonal(2), 1, W)
    for n in range(-W, W + 1):
        for m in range(-W, W + 1):
            assert vt.bracket(1, n, 1, m) == virasoro_mode_value(n, m), (n, m)
            assert ht.bracket(1, n, 1, m) == heisenberg_mode_value(n, m), (n, m)
        # {(n+1) u_n, (-n+1) u_-n} alone supplies -1/2 (n^3 - n)
        assert miura_linear_central_term(ht, n, -n) == Fraction(-(n ** 3 - n), 2)
    assert virasoro_mode_value(3, -3).central == -12
    assert heisenberg_mode_value(3, -3).central == Fraction(3, 2)
    assert time.perf_counter() - start < BUDGET_SECONDS


# 3 -------------------------------------------------------------------------

LAX_DEPTH = 8
# frozen: D_mu(mKdV_m) = (m/2) KdV_m(mu)
INTERTWINING = {3: Fraction(3, 2), 5: Fraction(5, 2)}


@pytest.mark.criterion(3, "KdV Lax structure: order-0 commutator, commuting flows, mKdV intertwining")
def test_lax_structure():
    start = time.perf_counter()
    c = lax_commutator(2, 3)
    assert set(c.coeffs) == {0}
    kdv = lax_rhs(2, 3)[0]
    assert kdv == total_derivative(v, 3) * Fraction(1, 4) - v * total_derivative(v) * Fraction(3, 2)
    k5 = lax_rhs(2, 5)[0]
    cross = evolve_under([k5], [kdv], [1])[0] - evolve_under([kdv], [k5], [1])[0]
    assert cross.is_zero()
    for m, c_m in INTERTWINING.items():
        assert intertwining_constant(m) == c_m
    # the depth-8 root reproduces the automatically sized fractional power
    L = scalar_lax_operator(2)
    R = nth_root(L, 2, LAX_DEPTH)
    assert power(R, 3, cutoff=0).plus() == fractional_power(L, 2, 3, 0).plus()
    assert commutator(power(R, 3, cutoff=0).plus(), L) == c
    assert time.perf_counter() - start < BUDGET_MINUTES


# 4 -------------------------------------------------------------------------

TRIALS = 20


@pytest.mark.criterion(4, "canonicalize undoes random unipotent gauges, n in {2,3,4}, 20 trials")
@pytest.mark.parametrize("n", [2, 3, 4])
def test_canonicalization_inverts_gauge(n):
    rng = random.Random(1000 + n)
    fields = list(range(1, n))
    target = tuple(JetPolynomial.var(i) for i in fields)
    base = CanonicalOper(n, target).matrix_oper()
    start = time.perf_counter()
    for _ in range(TRIALS):
        moved = gauge_oper(random_unipotent(rng, n, fields), base)
        canon, _ = canonicalize(moved)
        assert canon.v == target
    assert time.perf_counter() - start < BUDGET_SECONDS


# 5 -------------------------------------------------------------------------

COCYCLE_ORDER = 10
EQUIVARIANCE_ORDER = 8


def _diffeo(rng, order):
    coeffs = {1: Fraction(rng.choice([1, 2, -3]), rng.randint(1, 3))}
    coeffs.update({k: Fraction(rng.randint(-3, 3), rng.randint(1, 4)) for k in range(2, 6)})
    return TruncatedSeries("s", order, coeffs)


@pytest.mark.criterion(5, "Schwarzian on Mobius maps, cocycle to order 10, Miura equivariance to order 8")
def test_coordinate_laws():
    start = time.perf_counter()
    for a, b, c, d in [(2, 1, 3, 5), (1, 0, -1, 1), (-4, 3, 2, 7)]:
        S = schwarzian(mobius_series(a, b, c, d, COCYCLE_ORDER + 3))
        assert S.order >= COCYCLE_ORDER and S.is_zero()
    rng = random.Random(5)
    for _ in range(4):
        d = schwarzian_cocycle_defect(_diffeo(rng, COCYCLE_ORDER + 3), _diffeo(rng, COCYCLE_ORDER + 3))
        assert d.order >= COCYCLE_ORDER and d.is_zero()
        e = miura_equivariance_defect(_diffeo(rng, EQUIVARIANCE_ORDER + 3), EQUIVARIANCE_ORDER)
        assert e.order >= EQUIVARIANCE_ORDER and e.is_zero()
    # the law is sharp: the wrong connection weight breaks it
    bad = miura_equivariance_defect(_diffeo(rng, EQUIVARIANCE_ORDER + 3), EQUIVARIANCE_ORDER, rho=Fraction(1, 3))
    assert not bad.is_zero()
    assert time.perf_counter() - start < BUDGET_SECONDS


# 6 -------------------------------------------------------------------------


@pytest.mark.criterion(6, "q-Miura: t = Lambda(z) + Lambda(zq^2)^-1; constant term is the Lambda product")
def test_q_miura():
    start = time.perf_counter()
    (t,), const = q_miura_expand(2)
    assert t == ShiftPoly.symbol(sym("L", 1)) + ShiftPoly.symbol(sym("L", 1, 1), -1)
    assert const == 1
    for n in range(1, 5):
        assert q_miura_expand(n, constrained=False)[1] == lambda_product(n)
    assert time.perf_counter() - start < BUDGET_SUBSECOND


# 7 -------------------------------------------------------------------------

WINDOW_Q = 12


@pytest.mark.criterion(7, "q-bracket of t(z) matches the closed form on window 12")
def test_q_bracket():
    r, elapsed = _timed(verify_t_bracket, WINDOW_Q)
    assert r["passed"]
    assert r["offending"] == []
    assert r["residual"].is_zero()
    assert r["audit_failures"] == []
    for (_, m), c in r["lhs"].terms.items():
        assert isinstance(c, (Fraction, ParamRational))
    assert elapsed < BUDGET_SECONDS


# 8 -------------------------------------------------------------------------


@pytest.mark.criterion(8, "classical limit: 2, 0, 4(phi^2 - z phi') with the dictionary note")
def test_classical_limit(capsys):
    s, elapsed = _timed(classical_limit, 4)
    assert s[0] == JetPolynomial.const(2)
    assert JetPolynomial.lift(s[1]).is_zero()
    z = JetPolynomial.z()
    assert s[2] == classical_h2_expected()
    assert s[2] == (u * u * z * z - total_derivative(u) * z * z - u * z) * 4
    print(DICTIONARY_NOTE)
    assert "-4 z u" in capsys.readouterr().out
    assert elapsed < BUDGET_SUBSECOND


# 9 -------------------------------------------------------------------------

STRUCTURE_ORDER = 20
# frozen: d/dt f|_{t=1} = 2 sum_n (q^n - q^-n)/(q^n + q^-n) z^n
STRUCTURE_CONSTANT = 2


@pytest.mark.criterion(9, "deformed structure function: 1 at t=1 to order 20, first order gives 2x the q-kernel")
def test_structure_function():
    start = time.perf_counter()
    f1 = deformed_structure_function(STRUCTURE_ORDER + 1, t_value=Fraction(1))
    assert f1[0] == 1
    assert all(f1[k] == 0 for k in range(1, STRUCTURE_ORDER + 1))
    c, ratios = structure_constant(WINDOW_Q)
    assert c == STRUCTURE_CONSTANT
    assert len(ratios) == WINDOW_Q
    # oracle: differentiating log f termwise at t = 1 gives 2 (q^n - q^-n)/(q^n + q^-n)
    d = first_order_dual(WINDOW_Q + 1)
    for n in range(1, WINDOW_Q + 1):
        qq = ParamRational.gen("q")
        assert d[n] == 2 * (qq ** n - qq ** (-n)) / (qq ** n + qq ** (-n))
        assert d[n] == STRUCTURE_CONSTANT * f_coefficient(n)
    assert d[0] == 0
    assert time.perf_counter() - start < BUDGET_SECONDS


# 10 ------------------------------------------------------------------------


@pytest.mark.criterion(10, "q-characters: Y_a + Y_aq^2^-1, forgetful images")
def test_q_characters():
    start = time.perf_counter()
    ch = qchar_eval_sl2()
    assert ch.to_text(rank=1) == "Y[a] + Y[aq^2]^-1"
    assert character_text(forgetful(ch), rank=1) == "y + y^-1"
    for n in (2, 3, 4):
        (t1, *_), _ = q_miura_expand(n, constrained=False)
        img = forgetful(substitute_lambda(t1, n))
        assert img == first_fundamental_character(n)
        assert sum(img.values()) == n
    assert time.perf_counter() - start < BUDGET_SUBSECOND


# 11 ------------------------------------------------------------------------

WAKIMOTO_WINDOW = 3
WAKIMOTO_DEGREE = 4


@pytest.mark.criterion(11, "Wakimoto module: affine relations, central S_n acting by the Miura scalar")
def test_wakimoto_relations():
    checks, elapsed = _timed(verify_relations, WAKIMOTO_WINDOW, WAKIMOTO_DEGREE)
    for c in checks:
        print(f"{c.id}: {'pass' if c.passed else 'fail'} ({c.detail})")
    assert [c.id for c in checks] == ["[e,e]", "[h,e]", "[h,f]", "[e,f]", "[h,h]", "[f,f]", "S central",
                                      "S scalar = c*(w^2-w')_n, w=u/2"]
    assert all(c.passed for c in checks)
    assert SUGAWARA_CONSTANT == 2
    assert elapsed < BUDGET_MINUTES


# 12 ------------------------------------------------------------------------

GD_PAIRS = 50


@pytest.mark.criterion(12, "res[A, B] is a total derivative on 50 random pseudodifferential pairs")
def test_residue_of_commutator_is_exact():
    rng = random.Random(12)
    start = time.perf_counter()
    nontrivial = 0
    for _ in range(GD_PAIRS):
        a = random_pseudo_operator(rng, [1, 2], max_order=2, max_degree=2, terms=3)
        b = random_pseudo_operator(rng, [1, 2], max_order=2, max_degree=2, terms=3)
        res = commutator(a, b, cutoff=-1).residue()
        assert all(euler_derivative(res, i).is_zero() for i in (1, 2))
        assert residue_commutator_is_exact(a, b, [1, 2])
        nontrivial += not res.is_zero()
    assert nontrivial > GD_PAIRS // 2
    assert time.perf_counter() - start < BUDGET_SECONDS
