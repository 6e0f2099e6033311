"""Exact coefficient arithmetic.

Plain rationals are :class:`fractions.Fraction`.  Rational functions in the
formal parameters ``q, t, h`` are :class:`ParamRational`, kept in reduced,
sign-normalized form on top of flint's multivariate integer polynomials, so
``==`` is a complete equality test.  A ParamRational never holds a constant:
constant results are demoted to Fraction, which keeps equality and hashing
consistent across the two types.

:class:`TruncatedSeries` is a univariate truncated Laurent series whose
coefficients may be Fractions, ParamRationals or any ring element that
supports ``+``, ``*`` and truthiness (e.g. JetPolynomial).
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Mapping

import flint

PARAMETERS = ("q", "t", "h")
_CTX = flint.fmpz_mpoly_ctx.get(PARAMETERS, "lex")


class CoeffError(ArithmeticError):
    pass


class NonTruncatingError(CoeffError):
    """The requested infinite product does not truncate in the series variable."""


class ConstantTermError(CoeffError):
    pass


class ParamRational:
    """Reduced quotient of two integer polynomials in q, t, h."""

    __slots__ = ("_num", "_den", "_hash")
    _ctx = _CTX
    _names = PARAMETERS

    def __init__(self, num, den=None):
        if den is None:
            den = self._ctx.constant(1)
        self._num, self._den = num, den
        self._hash = None

    # construction -----------------------------------------------------
    @classmethod
    def _make(cls, num, den):
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            return Fraction(0)
        g = num.gcd(den)
        if not g.is_one():
            num = num // g
            den = den // g
        if den.leading_coefficient() < 0:
            num, den = -num, -den
        if num.is_constant() and den.is_constant():
            return Fraction(int(num.leading_coefficient()), int(den.leading_coefficient()))
        return cls(num, den)

    @classmethod
    def _lift(cls, x):
        if isinstance(x, ParamRational):
            if x._ctx is not cls._ctx:
                raise TypeError(f"cannot mix rational functions in {x._names} and {cls._names}")
            return x._num, x._den
        if isinstance(x, (int, Fraction)) or isinstance(x, Rational):
            x = Fraction(x)
            return cls._ctx.constant(x.numerator), cls._ctx.constant(x.denominator)
        return None

    @classmethod
    def gen(cls, name: str) -> "ParamRational":
        return cls(cls._ctx.gen(cls._names.index(name)))

    @classmethod
    def from_terms(cls, num_terms: Mapping[tuple, int], den_terms: Mapping[tuple, int] | None = None):
        num = cls._ctx.from_dict(dict(num_terms))
        den = cls._ctx.from_dict(dict(den_terms)) if den_terms is not None else cls._ctx.constant(1)
        return cls._make(num, den)

    # accessors --------------------------------------------------------
    @property
    def numerator(self):
        return self._num

    @property
    def denominator(self):
        return self._den

    def is_polynomial(self) -> bool:
        return self._den.is_one()

    def variables(self) -> set[str]:
        used = set()
        for poly in (self._num, self._den):
            for exps in poly.to_dict():
                used.update(n for n, e in zip(self._names, exps) if e)
        return used

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self._make(self._num * o[1] + o[0] * self._den, self._den * o[1])

    __radd__ = __add__

    def __neg__(self):
        return type(self)(-self._num, self._den)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self._make(self._num * o[1] - o[0] * self._den, self._den * o[1])

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self._make(o[0] * self._den - self._num * o[1], self._den * o[1])

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self._make(self._num * o[0], self._den * o[1])

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if o[0].is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return self._make(self._num * o[1], self._den * o[0])

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self._make(o[0] * self._den, o[1] * self._num)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k >= 0:
            return type(self)(self._num ** k, self._den ** k)
        return self._make(self._den ** (-k), self._num ** (-k))

    def __bool__(self):
        return True

    def __eq__(self, other):
        if isinstance(other, ParamRational):
            return self._ctx is other._ctx and self._num == other._num and self._den == other._den
        if isinstance(other, (int, Fraction)):
            return False
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((tuple(sorted(self._num.to_dict().items())),
                               tuple(sorted(self._den.to_dict().items()))))
        return self._hash

    # calculus / evaluation ---------------------------------------------
    def derivative(self, name: str):
        n, d = self._num, self._den
        return self._make(n.derivative(name) * d - n * d.derivative(name), d * d)

    def subs(self, **values):
        """Substitute Fractions or ParamRationals for some of q, t, h."""
        def evaluate(poly):
            total = Fraction(0)
            for exps, c in poly.to_dict().items():
                term = Fraction(int(c))
                for name, e in zip(self._names, exps):
                    if not e:
                        continue
                    term = term * (values[name] if name in values else self.gen(name)) ** int(e)
                total = total + term
            return total

        den = evaluate(self._den)
        if den == 0:
            raise ZeroDivisionError(f"denominator vanishes under {values}")
        return evaluate(self._num) / den

    def valuation(self, name: str) -> int:
        """Order of vanishing at ``name = 0`` (negative for a pole)."""
        i = self._names.index(name)
        low = lambda p: min(int(e[i]) for e in p.to_dict())
        return low(self._num) - low(self._den)

    # printing ---------------------------------------------------------
    def __str__(self):
        if self._den.is_one():
            return str(self._num)
        wrap = lambda p: f"({p})" if len(p) > 1 or int(p.leading_coefficient()) < 0 else str(p)
        den = str(self._den)
        return f"{wrap(self._num)}/{den if den.isalnum() or den.replace('^', '').isalnum() else f'({den})'}"

    def __repr__(self):
        return f"{type(self).__name__}({self})"

    def to_latex(self) -> str:
        num = _poly_latex(self._num, self._names)
        if self._den.is_one():
            return num
        return rf"\frac{{{num}}}{{{_poly_latex(self._den, self._names)}}}"


def _poly_latex(poly, names=PARAMETERS) -> str:
    parts = []
    for exps, c in sorted(poly.to_dict().items(), reverse=True):
        c = int(c)
        mono = "".join(
            name if e == 1 else f"{name}^{{{e}}}" for name, e in zip(names, exps) if e
        )
        mag = abs(c)
        body = (str(mag) if mag != 1 or not mono else "") + mono
        parts.append(("-" if c < 0 else "+", body))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


Coeff = Fraction | ParamRational


def gens() -> tuple[ParamRational, ParamRational, ParamRational]:
    return tuple(ParamRational.gen(n) for n in PARAMETERS)


def as_coeff(x) -> Coeff:
    if isinstance(x, ParamRational):
        return x
    if isinstance(x, (int, Fraction)) or isinstance(x, Rational):
        return Fraction(x)
    raise TypeError(f"not an exact coefficient: {x!r}")


def _ring_coeff(x):
    return x if isinstance(x, DualNumber) else as_coeff(x)


class DualNumber:
    """``a + b eps`` with ``eps^2 = 0`` over exact coefficients.

    Evaluating a rational expression at ``t = t0 + eps`` yields its value and
    its exact t-derivative at t0 in one pass.
    """

    __slots__ = ("re", "eps")

    def __init__(self, re, eps=Fraction(0)):
        self.re = re if isinstance(re, ParamRational) else Fraction(re)
        self.eps = eps if isinstance(eps, ParamRational) else Fraction(eps)

    @staticmethod
    def _lift(x):
        return x if isinstance(x, DualNumber) else DualNumber(as_coeff(x))

    def __add__(self, other):
        o = self._lift(other)
        return DualNumber(self.re + o.re, self.eps + o.eps)

    __radd__ = __add__

    def __neg__(self):
        return DualNumber(-self.re, -self.eps)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return DualNumber(self.re * o.re, self.re * o.eps + self.eps * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o.re == 0:
            raise ZeroDivisionError("division by a dual number with zero real part")
        return DualNumber(self.re / o.re, (self.eps * o.re - self.re * o.eps) / (o.re * o.re))

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return DualNumber(1) / (self ** (-k))
        if k == 0:
            return DualNumber(1)
        base = self.re ** (k - 1)
        return DualNumber(base * self.re, base * self.eps * k)

    def __eq__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.eps == o.eps

    def __hash__(self):
        return hash((self.re, self.eps))

    def __bool__(self):
        return self.re != 0 or self.eps != 0

    def __repr__(self):
        return f"DualNumber({self.re}, {self.eps})"


def coeff_str(c) -> str:
    return str(c)


def coeff_latex(c) -> str:
    if isinstance(c, Fraction):
        if c.denominator == 1:
            return str(c.numerator)
        sign = "-" if c < 0 else ""
        return rf"{sign}\frac{{{abs(c.numerator)}}}{{{c.denominator}}}"
    if hasattr(c, "to_latex"):
        return c.to_latex()
    return str(c)


_OPS: dict[str, Callable] = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "−": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "×": lambda a, b: a * b,
    "/": lambda a, b: a / b,
    "÷": lambda a, b: a / b,
}


def ratfun_arith(a, b, op: str) -> Coeff:
    """Apply one of + - * / to two exact coefficients."""
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown operation {op!r}") from None
    a, b = as_coeff(a), as_coeff(b)
    if fn is _OPS["/"] and b == 0:
        raise ZeroDivisionError("division by zero coefficient")
    return fn(a, b)


def solve_exact(matrix: list[list], rhs: list) -> list | None:
    """Solve ``matrix @ x = rhs`` over an exact field.

    Returns one solution (free variables set to zero) or None when the
    system is inconsistent.
    """
    rows = [list(r) + [b] for r, b in zip(matrix, rhs)]
    ncols = len(matrix[0]) if matrix else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][c]
        rows[r] = [x / lead for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    for i in range(r, len(rows)):
        if rows[i][-1] != 0:
            return None
    x = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        x[c] = rows[i][-1]
    return x


# ---------------------------------------------------------------------------
# truncated series


def _nonzero(c) -> bool:
    return bool(c)


class TruncatedSeries:
    """Truncated Laurent series ``sum c_k var^k + O(var^order)``."""

    __slots__ = ("var", "order", "coeffs")

    def __init__(self, var: str, order: int, coeffs: Mapping[int, object] | None = None):
        self.var = var
        self.order = int(order)
        self.coeffs = {int(k): c for k, c in (coeffs or {}).items() if k < self.order and _nonzero(c)}

    @classmethod
    def from_list(cls, var: str, values: Iterable, order: int | None = None, start: int = 0):
        values = list(values)
        if order is None:
            order = start + len(values)
        return cls(var, order, {start + i: v for i, v in enumerate(values)})

    @classmethod
    def monomial(cls, var: str, order: int, exponent: int = 1, coeff=Fraction(1)):
        return cls(var, order, {exponent: coeff})

    @classmethod
    def constant(cls, var: str, order: int, value=Fraction(1)):
        return cls(var, order, {0: value})

    # basic queries ------------------------------------------------------
    def __getitem__(self, k: int):
        if k >= self.order:
            raise IndexError(f"coefficient {k} is beyond the truncation order {self.order}")
        return self.coeffs.get(k, Fraction(0))

    def valuation(self) -> int:
        return min(self.coeffs) if self.coeffs else self.order

    def is_zero(self) -> bool:
        return not self.coeffs

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise ValueError("truncation may not widen the order")
        return TruncatedSeries(self.var, order, self.coeffs)

    def map_coeffs(self, fn) -> "TruncatedSeries":
        return TruncatedSeries(self.var, self.order, {k: fn(c) for k, c in self.coeffs.items()})

    def _check(self, other):
        if not isinstance(other, TruncatedSeries):
            return False
        if other.var != self.var:
            raise ValueError(f"series in different variables: {self.var}, {other.var}")
        return True

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if not self._check(other):
            return self + TruncatedSeries.constant(self.var, self.order, other)
        order = min(self.order, other.order)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out[k] + c if k in out else c
        return TruncatedSeries(self.var, order, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.var, self.order, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not self._check(other):
            return TruncatedSeries(self.var, self.order, {k: c * other for k, c in self.coeffs.items()})
        va, vb = self.valuation(), other.valuation()
        order = min(self.order, other.order, self.order + vb, other.order + va)
        out: dict[int, object] = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                k = i + j
                if k >= order:
                    continue
                out[k] = out[k] + a * b if k in out else a * b
        return TruncatedSeries(self.var, order, out)

    def __rmul__(self, other):
        return TruncatedSeries(self.var, self.order, {k: other * c for k, c in self.coeffs.items()})

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return self * other.inverse()
        return self * (Fraction(1) / as_coeff(other))

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = TruncatedSeries.constant(self.var, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.var == other.var and self.order == other.order and self.coeffs == other.coeffs

    def agrees_with(self, other: "TruncatedSeries", order: int | None = None) -> bool:
        """Coefficient equality below ``order`` (default: both known orders)."""
        n = min(self.order, other.order) if order is None else order
        if n > min(self.order, other.order):
            raise ValueError(f"cannot compare to order {n}; known only to {min(self.order, other.order)}")
        keys = {k for k in self.coeffs if k < n} | {k for k in other.coeffs if k < n}
        return all(self[k] == other[k] for k in keys)

    __hash__ = None

    # analytic operations --------------------------------------------------
    def derivative(self) -> "TruncatedSeries":
        return TruncatedSeries(self.var, self.order - 1,
                               {k - 1: k * c for k, c in self.coeffs.items() if k})

    def inverse(self) -> "TruncatedSeries":
        if not self.coeffs:
            raise ZeroDivisionError("inverse of a series with no known nonzero coefficient")
        v = self.valuation()
        lead = self.coeffs[v]
        inv_lead = Fraction(1) / lead
        unit = {k - v: c * inv_lead for k, c in self.coeffs.items()}
        n = self.order - v
        out = [Fraction(1)]
        for k in range(1, n):
            acc = None
            for j in range(1, k + 1):
                cj = unit.get(j)
                if cj is None:
                    continue
                term = cj * out[k - j]
                acc = term if acc is None else acc + term
            out.append(-acc if acc is not None else Fraction(0))
        return TruncatedSeries(self.var, n - v,
                               {k - v: c * inv_lead for k, c in enumerate(out)})

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """``self(inner(s))`` for an inner series with zero constant term."""
        if inner.valuation() < 1:
            raise CoeffError("inner series must start at order >= 1")
        if 1 not in inner.coeffs:
            raise CoeffError("inner series must have an invertible linear coefficient")
        unit = TruncatedSeries(inner.var, inner.order - 1, {k - 1: c for k, c in inner.coeffs.items()})
        # inner**k = s**k * unit**k is known below k + inner.order - 1
        nonconst = [k for k in self.coeffs if k != 0]
        order = self.order
        if nonconst:
            order = min(order, min(nonconst) + inner.order - 1)
        result = TruncatedSeries(inner.var, order)
        power_cache: dict[int, TruncatedSeries] = {}
        for k in sorted(self.coeffs):
            if k >= order:
                break
            if k not in power_cache:
                power_cache[k] = unit ** k
            term = power_cache[k] * self.coeffs[k]
            shifted = TruncatedSeries(inner.var, term.order + k, {e + k: c for e, c in term.coeffs.items()})
            result = result + shifted
        return result.truncate(order) if result.order > order else result

    # printing -------------------------------------------------------------
    def __repr__(self):
        return f"TruncatedSeries({self})"

    def __str__(self):
        parts = []
        for k in sorted(self.coeffs):
            c = self.coeffs[k]
            mono = "" if k == 0 else (self.var if k == 1 else f"{self.var}^{k}")
            cs = str(c)
            if mono:
                parts.append(f"({cs})*{mono}" if cs not in ("1",) else mono)
            else:
                parts.append(cs)
        parts.append(f"O({self.var}^{self.order})")
        return " + ".join(parts)


def series_exp(s: TruncatedSeries) -> TruncatedSeries:
    """``exp(s)`` for a power series with zero constant term."""
    if s.coeffs and s.valuation() < 0:
        raise ConstantTermError("exp of a series with negative powers")
    if 0 in s.coeffs:
        raise ConstantTermError("exp needs a series with zero constant term")
    n = s.order
    e: list = [Fraction(1)]
    for k in range(1, n):
        acc = None
        for j in range(1, k + 1):
            sj = s.coeffs.get(j)
            if sj is None:
                continue
            term = (j * sj) * e[k - j]
            acc = term if acc is None else acc + term
        e.append(acc * Fraction(1, k) if acc is not None else Fraction(0))
    return TruncatedSeries(s.var, n, dict(enumerate(e)))


def _is_numeric(c) -> bool:
    return isinstance(c, Fraction)


def q_pochhammer_series(a: tuple, b: tuple, order: int, var: str = "z") -> TruncatedSeries:
    """Truncated expansion of ``(a; b)_inf = prod_{n>=0} (1 - a b^n)``.

    ``a`` and ``b`` are Laurent monomials given as ``(coefficient, exponent)``
    pairs meaning ``coefficient * var**exponent``; the coefficients are exact
    (rational numbers or rational functions of q, t, h).

    When ``b`` is free of ``var`` the product has infinitely many factors in
    every degree and is resummed with Euler's identity
    ``(x; b)_inf = sum_k (-1)^k b^(k(k-1)/2) x^k / ((1-b)...(1-b^k))``,
    which is exact as a power series in the parameters of ``b``.
    """
    ca, ka = _ring_coeff(a[0]), int(a[1])
    cb, kb = _ring_coeff(b[0]), int(b[1])
    one = TruncatedSeries.constant(var, order)
    if ca == 0:
        return one
    if ka < 0:
        raise NonTruncatingError("a must not carry negative powers of the series variable")
    if cb == 0:
        return one - TruncatedSeries.monomial(var, order, ka, ca)
    if kb < 0:
        raise NonTruncatingError("b must not carry negative powers of the series variable")
    if kb > 0:
        result = one
        n = 0
        while ka + n * kb < order:
            result = result * (one - TruncatedSeries.monomial(var, order, ka + n * kb, ca * cb ** n))
            n += 1
        return result
    if ka == 0:
        raise NonTruncatingError("a and b both free of the series variable: infinite constant product")
    if _is_numeric(cb) and abs(cb) >= 1:
        raise NonTruncatingError(f"b = {cb} does not make the product converge")
    coeffs = {0: Fraction(1)}
    denom = Fraction(1)
    k = 1
    while k * ka < order:
        factor = 1 - cb ** k
        if factor == 0:
            raise NonTruncatingError(f"1 - b^{k} vanishes; b is a root of unity")
        denom = denom * factor
        sign = -1 if k % 2 else 1
        coeffs[k * ka] = sign * (cb ** (k * (k - 1) // 2)) * (ca ** k) / denom
        k += 1
    return TruncatedSeries(var, order, coeffs)
