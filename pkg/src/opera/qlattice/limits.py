"""Classical limit, Baxter substitution and the deformed structure function."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import flint

from ..coeffcore import DualNumber, ParamRational, TruncatedSeries, q_pochhammer_series, series_exp, gens
from ..jetring import JetPolynomial, total_derivative

# ---------------------------------------------------------------------------
# q = e^h


def euler_operator(p: JetPolynomial) -> JetPolynomial:
    """theta = z d/dz on differential polynomials in u(z)."""
    return JetPolynomial.z() * total_derivative(p)


def classical_limit(order: int) -> TruncatedSeries:
    """t(z) = Lambda(z) + Lambda(z q^2)^-1 as a series in h, with q = e^h.

    Lambda(z) = exp(2 h phi(z)), phi = u z, and
    phi(z e^(2h)) = sum_k (2h)^k / k! theta^k phi.
    """
    if order < 3:
        raise ValueError("classical limit needs order >= 3")
    phi = JetPolynomial.z() * JetPolynomial.var(1)
    first = series_exp(TruncatedSeries("h", order, {1: phi * 2}))
    shifted = {}
    term = phi
    fact = 1
    for k in range(0, order - 1):
        if k:
            fact *= k
            term = euler_operator(term)
        # -2 h * (2h)^k / k! theta^k phi
        shifted[k + 1] = term * Fraction(-2 * 2 ** k, fact)
    second = series_exp(TruncatedSeries("h", order, shifted))
    return first + second


def classical_h2_expected() -> JetPolynomial:
    """4 (phi^2 - theta phi) with phi = u z."""
    phi = JetPolynomial.z() * JetPolynomial.var(1)
    return (phi * phi - euler_operator(phi)) * 4


def quoted_h2_form() -> JetPolynomial:
    """4 v z^2 with v = u^2 - u'."""
    u = JetPolynomial.var(1)
    return (u * u - total_derivative(u)) * JetPolynomial.z(2) * 4


DICTIONARY_NOTE = (
    "direct expansion gives 4(phi^2 - z phi') = 4 z^2 (u^2 - u') - 4 z u with phi = u z; "
    "the quoted form 4 h^2 v(z) z^2 with v = u^2 - u' omits the -4 z u term, "
    "which is linear in u and of lower degree in z"
)


# ---------------------------------------------------------------------------
# rational functions of q and z


class ZRational(ParamRational):
    """Reduced rational function in q and z."""

    __slots__ = ()
    _ctx = flint.fmpz_mpoly_ctx.get(("q", "z"), "lex")
    _names = ("q", "z")

    def shift_z(self, power_of_q: int) -> "ZRational":
        """f(z) -> f(z q^power)."""
        scale = ZRational.gen("q") ** power_of_q
        num = _compose(self._num, scale)
        den = _compose(self._den, scale)
        return num / den


def _compose(poly, scale) -> "ZRational":
    out = Fraction(0)
    qq, zz = ZRational.gen("q"), ZRational.gen("z")
    for (eq, ez), c in poly.to_dict().items():
        out = out + (qq ** int(eq)) * ((zz * scale) ** int(ez)) * int(c)
    return out


def jet_to_zrational(p: JetPolynomial):
    """Convert a field-free Laurent polynomial in z (coefficients in q) to ZRational."""
    if p.fields():
        raise ValueError("Q must not involve fields")
    zz = ZRational.gen("z")
    out = Fraction(0)
    for (zp, _), c in p.terms.items():
        if isinstance(c, ParamRational):
            if c.variables() - {"q"}:
                raise ValueError("Q coefficients may only involve q")
            c = _param_to_z(c)
        out = out + c * (zz ** zp)
    return out


def _param_to_z(c: ParamRational):
    qq = ZRational.gen("q")

    def conv(poly):
        out = Fraction(0)
        for exps, k in poly.to_dict().items():
            out = out + (qq ** int(exps[0])) * int(k)
        return out

    return conv(c.numerator) / conv(c.denominator)


def _shift(x, power_of_q: int):
    return x.shift_z(power_of_q) if isinstance(x, ZRational) else x


@dataclass
class BaxterResult:
    t: object
    via_lambda: object
    consistent: bool


def baxter_substitute(Q: JetPolynomial) -> BaxterResult:
    """t(z) = Q(zq^2)/Q(z) + Q(zq^-2)/Q(z), cross-checked through Lambda = Q(zq^-2)/Q(z)."""
    Qz = jet_to_zrational(Q)
    if Qz == 0:
        raise ZeroDivisionError("Q must be nonzero")
    t = _shift(Qz, 2) / Qz + _shift(Qz, -2) / Qz
    lam = _shift(Qz, -2) / Qz
    via = lam + 1 / _shift(lam, 2)
    return BaxterResult(t, via, t == via)


# ---------------------------------------------------------------------------
# deformed Virasoro structure function


def deformed_structure_function(order: int, t_value=None) -> TruncatedSeries:
    """Truncated series in z of

        1/(1 - z) (z q^2; q^4 t^4)(z t^2; q^4 t^4) / ((z q^4 t^2; q^4 t^4)(z q^2 t^4; q^4 t^4)).

    ``t_value`` optionally specializes t first (any exact value or rational
    function of q).
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    q, t, _ = gens()
    if t_value is not None:
        t = t_value
    b = (q ** 4 * t ** 4, 0)
    num = q_pochhammer_series((q ** 2, 1), b, order) * q_pochhammer_series((t ** 2, 1), b, order)
    den = q_pochhammer_series((q ** 4 * t ** 2, 1), b, order) * q_pochhammer_series((q ** 2 * t ** 4, 1), b, order)
    geometric = TruncatedSeries("z", order, {k: Fraction(1) for k in range(order)})
    return geometric * num * den.inverse()


def regular_at_t_equals_q(order: int) -> bool:
    """Specializing t = q before or after expanding gives the same finite coefficients.

    A zero denominator at t = q would raise in the generic substitution, so
    agreement means every coefficient up to ``order`` is regular there.
    """
    q = ParamRational.gen("q")
    generic = deformed_structure_function(order)
    direct = deformed_structure_function(order, t_value=q)
    for k in range(order):
        c = generic[k]
        try:
            at_q = c.subs(t=q) if isinstance(c, ParamRational) else c
        except ZeroDivisionError:
            return False
        if at_q != direct[k]:
            return False
    return True


def first_order_in_t(series: TruncatedSeries) -> dict[int, object]:
    """d/dt of each coefficient at t = 1."""
    out = {}
    for k in range(series.order):
        c = series[k]
        out[k] = c.derivative("t").subs(t=Fraction(1)) if isinstance(c, ParamRational) else Fraction(0)
    return out


def first_order_dual(order: int) -> dict[int, object]:
    """Same as first_order_in_t, computed at t = 1 + eps with eps^2 = 0."""
    series = deformed_structure_function(order, t_value=DualNumber(1, 1))
    out = {}
    for k in range(order):
        c = series[k]
        out[k] = c.eps if isinstance(c, DualNumber) else Fraction(0)
    return out


def structure_constant(window: int, generic: bool = False):
    """The single constant c with d/dt f_n|_{t=1} = c (q^n - q^-n)/(q^n + q^-n), 1 <= n <= window.

    Returns (c, per-n ratios).  The negative-n side is the antisymmetric
    extension, matching the oddness of the classical kernel.  ``generic``
    differentiates the full rational functions in t instead of using dual
    numbers (slow, kept as a cross-check).
    """
    from .distributions import f_coefficient

    order = window + 1
    d = first_order_in_t(deformed_structure_function(order)) if generic else first_order_dual(order)
    ratios = {n: d[n] / f_coefficient(n) for n in range(1, window + 1)}
    values = set(ratios.values())
    return (values.pop() if len(values) == 1 else None), ratios


@dataclass(frozen=True)
class RelationTemplate:
    """f(w/z) T(z) T(w) - f(z/w) T(w) T(z) = prefactor (delta(w/(z q^2 t^2)) - delta(w q^2 t^2 / z))."""

    prefactor: ParamRational
    delta_shifts: tuple

    def degenerates_at_t1(self) -> bool:
        return self.prefactor.subs(t=Fraction(1)) == 0


def deformed_relation_template() -> RelationTemplate:
    q, t, _ = gens()
    return RelationTemplate((q - 1 / q) * (t - 1 / t), ("w/(z q^2 t^2)", "w q^2 t^2/z"))
