"""Differential polynomials in fields u_1, u_2, ... and their derivatives.

A jet variable ``(i, k)`` stands for the k-th derivative of field i.  A
monomial is a pair ``(z_exponent, ((var, exp), ...))`` with the variables
sorted, so a dict from monomials to nonzero coefficients is a canonical form
and ``==`` is syntactic.  The independent variable z has ``D z = 1``.
"""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import comb
from typing import Iterable, Mapping

from .coeffcore import ParamRational, as_coeff, coeff_latex

Var = tuple[int, int]
Monomial = tuple[int, tuple[tuple[Var, int], ...]]

ONE_MONO: Monomial = (0, ())


class MissingAssignment(KeyError):
    pass


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a[1]:
        return (a[0] + b[0], b[1])
    if not b[1]:
        return (a[0] + b[0], a[1])
    exps = dict(a[1])
    for v, e in b[1]:
        exps[v] = exps.get(v, 0) + e
    return (a[0] + b[0], tuple(sorted(exps.items())))


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m[1])


def _sort_key(m: Monomial):
    # degree-lex on (field, order) pairs, then z power
    return (_mono_degree(m), tuple((v, e) for v, e in m[1]), m[0])


class JetPolynomial:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, object] | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c != 0}
        self._hash = None

    # construction -----------------------------------------------------
    @classmethod
    def const(cls, c) -> "JetPolynomial":
        return cls({ONE_MONO: as_coeff(c)})

    @classmethod
    def var(cls, field: int, order: int = 0) -> "JetPolynomial":
        if field < 1 or order < 0:
            raise ValueError(f"bad jet variable u{field}^({order})")
        return cls({(0, (((field, order), 1),)): Fraction(1)})

    @classmethod
    def z(cls, power: int = 1) -> "JetPolynomial":
        return cls({(power, ()): Fraction(1)})

    @staticmethod
    def lift(x) -> "JetPolynomial":
        if isinstance(x, JetPolynomial):
            return x
        return JetPolynomial.const(x)

    # queries ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m == ONE_MONO for m in self.terms)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms.get(ONE_MONO, Fraction(0))

    def variables(self) -> set[Var]:
        return {v for m in self.terms for v, _ in m[1]}

    def fields(self) -> set[int]:
        return {v[0] for v in self.variables()}

    def max_order(self, field: int | None = None) -> int:
        orders = [k for i, k in self.variables() if field is None or i == field]
        return max(orders) if orders else -1

    def degree(self) -> int:
        return max((_mono_degree(m) for m in self.terms), default=0)

    def homogeneous_parts(self) -> dict[int, "JetPolynomial"]:
        parts: dict[int, dict] = {}
        for m, c in self.terms.items():
            parts.setdefault(_mono_degree(m), {})[m] = c
        return {d: JetPolynomial(t) for d, t in parts.items()}

    # ring operations ---------------------------------------------------
    def __add__(self, other):
        other = JetPolynomial.lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return JetPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return JetPolynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-JetPolynomial.lift(other))

    def __rsub__(self, other):
        return JetPolynomial.lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, JetPolynomial):
            c = as_coeff(other)
            if c == 0:
                return JetPolynomial()
            return JetPolynomial({m: v * c for m, v in self.terms.items()})
        out: dict = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = _mono_mul(ma, mb)
                v = ca * cb
                out[m] = out[m] + v if m in out else v
        return JetPolynomial(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, JetPolynomial):
            other = other.constant_value()
        return self * (Fraction(1) / as_coeff(other))

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers of differential polynomials are not polynomial")
        return reduce(lambda a, b: a * b, [self] * k, JetPolynomial.const(1))

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, JetPolynomial):
            return self.terms == other.terms
        try:
            return self.terms == JetPolynomial.const(other).terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def map_coeffs(self, fn) -> "JetPolynomial":
        return JetPolynomial({m: fn(c) for m, c in self.terms.items()})

    # calculus ---------------------------------------------------------
    def partial(self, v: Var) -> "JetPolynomial":
        out: dict = {}
        for (zp, vs), c in self.terms.items():
            for idx, (w, e) in enumerate(vs):
                if w == v:
                    rest = vs[:idx] + (((w, e - 1),) if e > 1 else ()) + vs[idx + 1:]
                    out[(zp, rest)] = c * e
        return JetPolynomial(out)

    def partial_z(self) -> "JetPolynomial":
        return JetPolynomial({(zp - 1, vs): c * zp for (zp, vs), c in self.terms.items() if zp})

    def coefficient_of(self, mono: Monomial):
        return self.terms.get(mono, Fraction(0))

    def __repr__(self):
        return f"JetPolynomial({self})"

    def __str__(self):
        return to_text(self)


def total_derivative(p: JetPolynomial, times: int = 1) -> JetPolynomial:
    """D with D(u_{i,k}) = u_{i,k+1} and D(z) = 1."""
    for _ in range(times):
        out: dict = {}

        def put(m, c):
            out[m] = out[m] + c if m in out else c

        for (zp, vs), c in p.terms.items():
            if zp:
                put((zp - 1, vs), c * zp)
            for idx, ((i, k), e) in enumerate(vs):
                exps = dict(vs)
                if e > 1:
                    exps[(i, k)] = e - 1
                else:
                    del exps[(i, k)]
                exps[(i, k + 1)] = exps.get((i, k + 1), 0) + 1
                put((zp, tuple(sorted(exps.items()))), c * e)
        p = JetPolynomial(out)
    return p


def euler_derivative(p: JetPolynomial, field: int) -> JetPolynomial:
    """Variational derivative sum_k (-D)^k dp/du_{field,k}."""
    top = p.max_order(field)
    result = JetPolynomial()
    for k in range(top + 1):
        part = p.partial((field, k))
        if part:
            term = total_derivative(part, k)
            result = result + (term if k % 2 == 0 else -term)
    return result


def frechet_coefficients(p: JetPolynomial, field: int) -> dict[int, JetPolynomial]:
    """Order -> coefficient map of the linearization of p in direction ``field``."""
    out = {}
    for k in range(p.max_order(field) + 1):
        part = p.partial((field, k))
        if part:
            out[k] = part
    return out


def frechet_derivative(p: JetPolynomial, field: int | None = None):
    """Linearization of p as a differential operator, or the row of them."""
    from .psdo import PseudoDiffOp

    if field is not None:
        return PseudoDiffOp.differential(frechet_coefficients(p, field))
    return [PseudoDiffOp.differential(frechet_coefficients(p, i)) for i in sorted(p.fields())]


def substitute(p: JetPolynomial, assignments: Mapping[int, JetPolynomial], partial: bool = False) -> JetPolynomial:
    """Replace field i by an expression, prolonging to all derivatives."""
    missing = p.fields() - set(assignments)
    if missing and not partial:
        raise MissingAssignment(f"no assignment for fields {sorted(missing)}")
    cache: dict[Var, JetPolynomial] = {}

    def image(v: Var) -> JetPolynomial:
        if v not in cache:
            i, k = v
            if i not in assignments:
                cache[v] = JetPolynomial.var(i, k)
            elif k == 0:
                cache[v] = JetPolynomial.lift(assignments[i])
            else:
                cache[v] = total_derivative(image((i, k - 1)))
        return cache[v]

    result = JetPolynomial()
    for (zp, vs), c in p.terms.items():
        term = JetPolynomial({(zp, ()): c})
        for v, e in vs:
            term = term * image(v) ** e
        result = result + term
    return result


def evaluate(p: JetPolynomial, values: Mapping[Var, object], z_value=None):
    """Plug ring elements (numbers, series, ...) in for jet variables."""
    total = None
    for (zp, vs), c in p.terms.items():
        term = c
        if zp:
            if z_value is None:
                raise MissingAssignment("z appears but no value was given")
            term = (z_value ** zp) * term
        for v, e in vs:
            if v not in values:
                raise MissingAssignment(f"no value for u{v[0]}^({v[1]})")
            term = (values[v] ** e) * term
        total = term if total is None else total + term
    return Fraction(0) if total is None else total


def shift_fields(p: JetPolynomial, offset: int) -> JetPolynomial:
    """Rename field i to i + offset."""
    return JetPolynomial({
        (zp, tuple(sorted(((i + offset, k), e) for (i, k), e in vs))): c
        for (zp, vs), c in p.terms.items()
    })


def binomial(k: int, j: int) -> Fraction:
    """Generalized binomial k(k-1)...(k-j+1)/j!, valid for negative k."""
    if k >= 0:
        return Fraction(comb(k, j))
    num = 1
    for r in range(j):
        num *= k - r
    den = 1
    for r in range(2, j + 1):
        den *= r
    return Fraction(num, den)


# printing -----------------------------------------------------------------

def default_names(i: int) -> str:
    return f"u{i}"


def _var_text(v: Var, names) -> str:
    i, k = v
    base = names(i)
    return base + "'" * k if k <= 3 else f"{base}_{k}"


def _var_latex(v: Var, names) -> str:
    i, k = v
    base = names(i)
    if "_" not in base and len(base) > 1 and base[1:].isdigit():
        base = f"{base[0]}_{{{base[1:]}}}"
    if k == 0:
        return base
    return base + ("'" * k if k <= 3 else f"^{{({k})}}")


def _mono_text(m: Monomial, names, latex: bool) -> str:
    zp, vs = m
    parts = []
    for v, e in vs:
        s = _var_latex(v, names) if latex else _var_text(v, names)
        if e != 1:
            s = f"({s})^{{{e}}}" if latex and s.endswith("'") else (f"{s}^{{{e}}}" if latex else f"{s}^{e}")
        parts.append(s)
    if zp:
        parts.append("z" if zp == 1 else (f"z^{{{zp}}}" if latex else f"z^{zp}"))
    return (" " if latex else "*").join(parts)


def _render(p: JetPolynomial, names, latex: bool) -> str:
    if not p.terms:
        return "0"
    out = []
    for m in sorted(p.terms, key=_sort_key, reverse=True):
        c = p.terms[m]
        mono = _mono_text(m, names, latex)
        if isinstance(c, Fraction):
            neg = c < 0
            mag = -c if neg else c
            if not mono:
                cs = coeff_latex(mag) if latex else str(mag)
            elif mag == 1:
                cs = ""
            else:
                cs = (coeff_latex(mag) + " ") if latex else f"{mag}*"
            body = cs + mono
        else:
            neg = False
            cs = f"\\left({coeff_latex(c)}\\right)" if latex else f"({c})"
            body = cs + ((" " if latex else "*") + mono if mono else "")
        out.append(("-" if neg else "+", body))
    text = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text


def to_text(p: JetPolynomial, names=default_names) -> str:
    return _render(p, names, latex=False)


def to_latex(p: JetPolynomial, names=default_names) -> str:
    return _render(p, names, latex=True)


def jet_vars(count: int) -> list[JetPolynomial]:
    return [JetPolynomial.var(i) for i in range(1, count + 1)]


def random_jet_polynomial(rng, fields: Iterable[int], max_order: int = 3, max_degree: int = 3,
                          terms: int = 4, coeff_range: int = 5) -> JetPolynomial:
    """Random differential polynomial, used by the property tests."""
    fields = list(fields)
    p = JetPolynomial()
    for _ in range(terms):
        c = Fraction(rng.randint(-coeff_range, coeff_range), rng.randint(1, 3))
        term = JetPolynomial.const(c)
        for _ in range(rng.randint(0, max_degree)):
            term = term * JetPolynomial.var(rng.choice(fields), rng.randint(0, max_order))
        p = p + term
    return p
