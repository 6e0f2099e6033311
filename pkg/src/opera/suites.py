"""Verification suites run by ``opera verify``.

Each suite takes a :class:`SuiteConfig` and returns a list of checks.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .coeffcore import TruncatedSeries
from .jetring import JetPolynomial, substitute, to_text, total_derivative
from .report import Check, Report

SUITES = ("poisson", "lax", "oper", "qbracket", "qlimit", "wqt", "qchar", "wakimoto")

# suite-specific fallback windows when --window is not given
DEFAULT_WINDOWS = {"poisson": 8, "wakimoto": 3}


@dataclass
class SuiteConfig:
    window: int | None = None
    depth: int = 8
    order: int = 20
    seed: int = 20240601
    trials: int = 20
    default_window: int = 12

    def window_for(self, suite: str) -> int:
        if self.window is not None:
            return self.window
        return DEFAULT_WINDOWS.get(suite, self.default_window)


# ---------------------------------------------------------------------------


def suite_poisson(cfg: SuiteConfig) -> list[Check]:
    from .hampoisson import (CartanData, heisenberg_diagonal, heisenberg_mode_value, heisenberg_operator,
                             kdv_miura_map, miura_linear_central_term, mode_bracket, pushforward_structure,
                             virasoro_mode_value, virasoro_operator)
    from .oper import miura_diagonal, miura_expand

    W = cfg.window_for("poisson")
    out = []
    heis = heisenberg_diagonal(2)
    vir = virasoro_operator()
    out.append(Check.of("heisenberg skew-adjoint", heis.is_skew_adjoint() and
                        heisenberg_operator(CartanData(1)).is_skew_adjoint()))
    out.append(Check.of("virasoro skew-adjoint", vir.is_skew_adjoint()))
    push = pushforward_structure([kdv_miura_map()], heis)
    out.append(Check.of("miura pushes heisenberg to virasoro", push.rewritten and push == vir, str(push)))

    vt = mode_bracket(vir, 2, W)
    bad = [(n, m) for n in range(-W, W + 1) for m in range(-W, W + 1)
           if vt.bracket(1, n, 1, m) != virasoro_mode_value(n, m)]
    out.append(Check.of(f"virasoro modes |n|,|m|<={W}", not bad, f"mismatch at {bad[:3]}" if bad else ""))
    ht = mode_bracket(heis, 1, W)
    bad = [(n, m) for n in range(-W, W + 1) for m in range(-W, W + 1)
           if ht.bracket(1, n, 1, m) != heisenberg_mode_value(n, m)]
    out.append(Check.of(f"heisenberg modes |n|,|m|<={W}", not bad, f"mismatch at {bad[:3]}" if bad else ""))
    bad = [n for n in range(-W, W + 1)
           if miura_linear_central_term(ht, n, -n) != virasoro_mode_value(n, -n).central]
    out.append(Check.of("central term from linear part of miura", not bad, f"mismatch at {bad}" if bad else ""))
    jw = min(W, 6)
    fails = vt.jacobi_failures()[:3] if jw == W else mode_bracket(vir, 2, jw).jacobi_failures()[:3]
    out.append(Check.of(f"virasoro jacobi |n|<={jw}", not fails, f"fails at {fails}" if fails else ""))
    for n in (3, 4):
        p = pushforward_structure(miura_expand(miura_diagonal(n)), heisenberg_diagonal(n))
        out.append(Check.of(f"sl{n} pushforward skew-adjoint in targets", p.rewritten and p.is_skew_adjoint()))
    return out


def suite_lax(cfg: SuiteConfig) -> list[Check]:
    from .hampoisson import evolve_under, hamiltonian_flow, intertwining_constant, proportionality, virasoro_operator
    from .psdo import (conserved_density, lax_commutator, lax_rhs, nth_root, power,
                       random_pseudo_operator, residue_commutator_is_exact, scalar_lax_operator)
    from .qlattice import q_root_lax
    from .qlattice.shiftring import ShiftPoly, sym

    out = []
    v = JetPolynomial.var(1)
    c = lax_commutator(2, 3)
    out.append(Check.of("[(L^3/2)+, L] has order 0", set(c.coeffs) <= {0}, f"orders {sorted(c.coeffs)}"))
    kdv = lax_rhs(2, 3)[0]
    expected = total_derivative(v, 3) * Fraction(1, 4) - v * total_derivative(v) * Fraction(3, 2)
    out.append(Check.of("KdV flow v_t = 1/4 v''' - 3/2 v v'", kdv == expected, to_text(kdv)))
    out.append(Check.of("m=1 flow is transport", lax_rhs(2, 1)[0] == total_derivative(v)))
    k5 = lax_rhs(2, 5)[0]
    comm = evolve_under([k5], [kdv], [1])[0] - evolve_under([kdv], [k5], [1])[0]
    out.append(Check.of("m=3 and m=5 flows commute", comm.is_zero()))
    consts = {m: intertwining_constant(m) for m in (3, 5)}
    ok = all(consts[m] == Fraction(m, 2) for m in consts)
    out.append(Check.of("mKdV intertwines KdV with c_m = m/2", ok, f"c_3={consts[3]}, c_5={consts[5]}"))
    vir = virasoro_operator()
    ok = all(proportionality(hamiltonian_flow(vir, conserved_density(2, m)), lax_rhs(2, m)) == Fraction(m, 2)
             for m in (1, 3, 5))
    out.append(Check.of("virasoro flow of res L^(m/2) = m/2 Lax flow", ok))
    ok = True
    for n in (3, 4):
        for m in range(1, 4):
            if m % n:
                ok &= max(lax_commutator(n, m).coeffs, default=0) < n - 1
    out.append(Check.of("sl3, sl4 Lax commutators keep the oper shape", ok))
    L = scalar_lax_operator(2)
    R = nth_root(L, 2, cfg.depth)
    sq = power(R, 2, cutoff=R.cutoff + 1)
    ok = all(sq[k] == L[k] for k in range(sq.cutoff, 3))
    out.append(Check.of(f"square root of L certified to depth {cfg.depth}", ok, f"R^2 known down to d^{sq.cutoff}"))

    rng = random.Random(cfg.seed)
    fails = 0
    for _ in range(50):
        a = random_pseudo_operator(rng, [1, 2], max_order=2, max_degree=2, terms=3)
        b = random_pseudo_operator(rng, [1, 2], max_order=2, max_degree=2, terms=3)
        fails += not residue_commutator_is_exact(a, b, [1, 2])
    out.append(Check.of("res[A,B] is a total derivative (50 random pairs)", fails == 0, f"{fails} failures"))

    r = q_root_lax(2, 1)
    t = ShiftPoly.symbol(sym("t", 1))
    rho = ShiftPoly.symbol(sym("rho", 0))
    ok = r["flows"][0] == -t * t + rho * t * 2 and r["relations"][0] == t
    out.append(Check.of("q-Lax n=2 m=1 flow", ok, str(r["flows"][0])))
    return out


def suite_oper(cfg: SuiteConfig) -> list[Check]:
    from .oper import (CanonicalOper, MiuraData, canonicalize, gauge_oper, miura_diagonal, miura_equivariance_defect,
                       miura_expand, mobius_series, random_unipotent, scalar_coefficients, scalar_operator,
                       schwarzian, schwarzian_cocycle_defect)
    from .hampoisson import kdv_miura_map

    out = []
    v2 = miura_expand(miura_diagonal(2))
    out.append(Check.of("miura n=2: v = u^2 - u'", v2 == [kdv_miura_map()], to_text(v2[0])))
    for n in (3, 4):
        diag = miura_diagonal(n)
        canon, _ = canonicalize(MiuraData(diag).matrix_oper())
        out.append(Check.of(f"miura n={n} agrees with canonical form", list(canon.v) == miura_expand(diag)))

    rng = random.Random(cfg.seed)
    for n in (2, 3, 4):
        fields = list(range(1, n))
        v = tuple(JetPolynomial.var(i) for i in fields)
        base = CanonicalOper(n, v).matrix_oper()
        bad = 0
        for _ in range(cfg.trials):
            g = random_unipotent(rng, n, fields)
            moved = gauge_oper(g, base)
            canon, _ = canonicalize(moved)
            oracle = scalar_coefficients(scalar_operator(moved), n)
            bad += canon.v != v or list(oracle) != list(v)
        out.append(Check.of(f"canonicalize undoes random gauge n={n}", bad == 0, f"{cfg.trials} trials, {bad} bad"))

    order = 10
    mob = [mobius_series(a, b, c, d, order + 3) for a, b, c, d in ((2, 1, 3, 5), (1, 0, -1, 1), (3, -2, 7, 4))]
    ok = all(schwarzian(m).truncate(order).is_zero() for m in mob)
    out.append(Check.of("schwarzian vanishes on mobius maps", ok))
    fails = 0
    for _ in range(5):
        phi = _random_diffeo(rng, order + 3)
        psi = _random_diffeo(rng, order + 3)
        d = schwarzian_cocycle_defect(phi, psi)
        fails += not (d.order >= order and d.truncate(order).is_zero())
    out.append(Check.of(f"schwarzian cocycle to order {order}", fails == 0))
    fails = 0
    for _ in range(3):
        d = miura_equivariance_defect(_random_diffeo(rng, 11), 8)
        fails += not (d.order >= 8 and d.is_zero())
    out.append(Check.of("miura equivariance under reparameterization to order 8", fails == 0))
    return out


def _random_diffeo(rng, order: int) -> TruncatedSeries:
    coeffs = {1: Fraction(rng.choice([1, 2, 3, -1, -2]), rng.randint(1, 3))}
    for k in range(2, min(order, 6)):
        coeffs[k] = Fraction(rng.randint(-4, 4), rng.randint(1, 4))
    return TruncatedSeries("s", order, coeffs)


def suite_qbracket(cfg: SuiteConfig) -> list[Check]:
    from .qlattice import lambda_product, q_miura_expand, verify_t_bracket
    from .qlattice.distributions import lambda_antisymmetry
    from .qlattice.shiftring import ShiftPoly, sym

    W = cfg.window_for("qbracket")
    out = []
    t, const = q_miura_expand(2)
    lam = ShiftPoly.symbol(sym("L", 1))
    expected = lam + ShiftPoly.symbol(sym("L", 1, 1), -1)
    out.append(Check.of("q-miura n=2: t = Λ(z) + Λ(zq^2)^-1", t[0] == expected and const == 1, str(t[0])))
    ok = all(q_miura_expand(n, constrained=False)[1] == lambda_product(n) for n in range(1, 5))
    out.append(Check.of("q-miura constant term = product of Λ_i (n<=4)", ok))
    r = verify_t_bracket(W)
    detail = "" if r["passed"] else f"offending {r['offending'][:4]}"
    out.append(Check.of(f"t-bracket closed form on window {W}", r["passed"], detail))
    out.append(Check.of("f-to-delta rewrites audited", not r["audit_failures"]))
    out.append(Check.of("bracket vanishes at q = 1", not r["q1_failures"]))
    out.append(Check.of("Λ bracket antisymmetric", lambda_antisymmetry(W)))
    return out


def suite_qlimit(cfg: SuiteConfig) -> list[Check]:
    from .grammar import parse_expression
    from .qlattice import baxter_substitute, classical_limit
    from .qlattice.limits import DICTIONARY_NOTE, classical_h2_expected, quoted_h2_form

    out = []
    s = classical_limit(4)
    two = JetPolynomial.const(2)
    out.append(Check.of("h^0 term is 2", s[0] == two))
    out.append(Check.of("h^1 term vanishes", s[1] == 0 or JetPolynomial.lift(s[1]).is_zero()))
    h2 = s[2]
    out.append(Check.of("h^2 term is 4(φ^2 - z∂φ), φ = uz", h2 == classical_h2_expected(), to_text(h2)))
    diff = h2 - quoted_h2_form()
    out.append(Check.of("dictionary note", diff == JetPolynomial.var(1) * JetPolynomial.z() * -4,
                        DICTIONARY_NOTE))
    b = baxter_substitute(parse_expression("1 - z"))
    out.append(Check.of("baxter substitution consistent for Q = 1 - z", b.consistent, str(b.t)))
    return out


def suite_wqt(cfg: SuiteConfig) -> list[Check]:
    from .qlattice import deformed_relation_template, deformed_structure_function, structure_constant
    from .qlattice.limits import regular_at_t_equals_q

    W = cfg.window_for("wqt")
    order = cfg.order + 1
    out = []
    f1 = deformed_structure_function(order, t_value=Fraction(1))
    ok = f1[0] == 1 and all(f1[k] == 0 for k in range(1, order))
    out.append(Check.of(f"f = 1 at t = 1 to order {cfg.order}", ok))
    c, ratios = structure_constant(W)
    out.append(Check.of(f"first order in t matches the q-kernel (window {W})", c == 2,
                        f"frozen constant {c}"))
    gw = min(W, 5)
    cg, _ = structure_constant(gw, generic=True)
    out.append(Check.of(f"generic-t derivative agrees (window {gw})", cg == c))
    out.append(Check.of("coefficients regular at t = q (order 6)", regular_at_t_equals_q(6)))
    out.append(Check.of("relation prefactor vanishes at t = 1", deformed_relation_template().degenerates_at_t1()))
    return out


def suite_qchar(cfg: SuiteConfig) -> list[Check]:
    from .qchar import (character_text, first_fundamental_character, forgetful, qchar_eval_sl2,
                        substitute_lambda)
    from .qlattice import q_miura_expand

    out = []
    ch = qchar_eval_sl2()
    out.append(Check.of("χ_q(V(a)) = Y_a + Y_aq^2^-1", ch.to_text(rank=1) == "Y[a] + Y[aq^2]^-1", ch.to_text(rank=1)))
    img = forgetful(ch)
    out.append(Check.of("forgetful image y + y^-1", img == first_fundamental_character(2),
                        character_text(img, rank=1)))
    for n in (2, 3, 4):
        t, _ = q_miura_expand(n, constrained=False)
        y = substitute_lambda(t[0], n)
        out.append(Check.of(f"t_1 for sl{n} forgets to the first fundamental character",
                            forgetful(y) == first_fundamental_character(n), y.to_text()))
    return out


def suite_wakimoto(cfg: SuiteConfig) -> list[Check]:
    from .wakimoto import SUGAWARA_CONSTANT, literal_miura_constant, verify_relations

    W = cfg.window_for("wakimoto")
    out = [Check.of(r.id, r.passed, r.detail) for r in verify_relations(W, 4)]
    out[-1].detail += f"; frozen constant {SUGAWARA_CONSTANT}"
    neg = verify_relations(min(W, 2), 2, deriv_coeff=2)
    ef = next(r for r in neg if r.id == "[e,f]")
    out.append(Check.of("negative control: corrupted f breaks [e,f]", not ef.passed, ef.counterexample[:120]))
    out.append(Check.of("literal u^2 - u' is not proportional (recorded)", literal_miura_constant() is None))
    return out


RUNNERS: dict[str, Callable[[SuiteConfig], list[Check]]] = {
    "poisson": suite_poisson,
    "lax": suite_lax,
    "oper": suite_oper,
    "qbracket": suite_qbracket,
    "qlimit": suite_qlimit,
    "wqt": suite_wqt,
    "qchar": suite_qchar,
    "wakimoto": suite_wakimoto,
}


class UnknownSuite(ValueError):
    pass


def run_suite(name: str, cfg: SuiteConfig | None = None) -> Report:
    cfg = cfg or SuiteConfig()
    if name != "all" and name not in RUNNERS:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {', '.join(SUITES + ('all',))}")
    names = SUITES if name == "all" else (name,)
    report = Report(name, config={"window": cfg.window, "depth": cfg.depth, "order": cfg.order,
                                  "default_window": cfg.default_window})
    for n in names:
        checks = RUNNERS[n](cfg)
        if name == "all":
            for c in checks:
                c.id = f"{n}: {c.id}"
        report.extend(checks)
    return report
