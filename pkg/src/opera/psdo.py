"""Pseudodifferential operators over the jet ring.

An operator is a map ``order -> JetPolynomial`` together with a declared top
order and a cutoff: every order below ``cutoff`` is unknown (``None`` means the
operator is exact, i.e. a finite sum).  Products track the cutoff so a result
never claims more orders than its inputs justify.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .jetring import JetPolynomial, binomial, euler_derivative, total_derivative, to_text, to_latex


class DepthExhausted(ArithmeticError):
    pass


class OperatorShapeError(ValueError):
    pass


def _lower(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


class PseudoDiffOp:
    __slots__ = ("coeffs", "order", "cutoff")

    def __init__(self, coeffs: Mapping[int, object], order: int | None = None, cutoff: int | None = None):
        clean = {}
        for k, c in coeffs.items():
            c = JetPolynomial.lift(c)
            if c and (cutoff is None or k >= cutoff):
                clean[int(k)] = c
        self.coeffs = clean
        if order is None:
            order = max(clean, default=0)
        self.order = order
        self.cutoff = cutoff
        if clean and max(clean) > order:
            raise OperatorShapeError(f"coefficient at order {max(clean)} above declared top {order}")
        if cutoff is not None and order - cutoff < 0:
            raise DepthExhausted(f"operator of top order {order} with cutoff {cutoff} has no known orders")

    # construction -----------------------------------------------------
    @classmethod
    def differential(cls, coeffs: Mapping[int, object]) -> "PseudoDiffOp":
        if any(k < 0 for k, c in coeffs.items() if c):
            raise OperatorShapeError("a differential operator has no negative orders")
        return cls(coeffs)

    @classmethod
    def d(cls, k: int = 1) -> "PseudoDiffOp":
        return cls({k: 1}, order=k)

    @classmethod
    def scalar(cls, a) -> "PseudoDiffOp":
        return cls({0: a}, order=0)

    @classmethod
    def from_scalar_lax(cls, v: list, n: int) -> "PseudoDiffOp":
        """``d^n - v_1 d^(n-2) - ... - v_{n-1}``."""
        coeffs = {n: JetPolynomial.const(1)}
        for i, vi in enumerate(v, start=1):
            coeffs[n - 1 - i] = -JetPolynomial.lift(vi)
        return cls(coeffs, order=n)

    # queries ----------------------------------------------------------
    @property
    def depth(self) -> int | None:
        """Number of certified orders counted from the top, or None if exact."""
        return None if self.cutoff is None else self.order - self.cutoff + 1

    def is_exact(self) -> bool:
        return self.cutoff is None

    def is_differential(self) -> bool:
        return self.is_exact() and all(k >= 0 for k in self.coeffs)

    def __getitem__(self, k: int) -> JetPolynomial:
        if self.cutoff is not None and k < self.cutoff:
            raise DepthExhausted(f"order {k} is below the certified cutoff {self.cutoff}")
        return self.coeffs.get(k, JetPolynomial())

    def plus(self) -> "PseudoDiffOp":
        if self.cutoff is not None and self.cutoff > 0:
            raise DepthExhausted("differential part is not fully certified")
        return PseudoDiffOp({k: c for k, c in self.coeffs.items() if k >= 0}, order=max(self.order, 0))

    def residue(self) -> JetPolynomial:
        return self[-1]

    def truncate(self, cutoff: int) -> "PseudoDiffOp":
        return PseudoDiffOp(self.coeffs, self.order, _lower(self.cutoff, cutoff))

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, PseudoDiffOp):
            other = PseudoDiffOp.scalar(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out[k] + c if k in out else c
        return PseudoDiffOp(out, max(self.order, other.order), _lower(self.cutoff, other.cutoff))

    __radd__ = __add__

    def __neg__(self):
        return PseudoDiffOp({k: -c for k, c in self.coeffs.items()}, self.order, self.cutoff)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, PseudoDiffOp):
            return compose(self, other)
        return PseudoDiffOp({k: c * other for k, c in self.coeffs.items()}, self.order, self.cutoff)

    def __rmul__(self, other):
        return PseudoDiffOp({k: JetPolynomial.lift(other) * c for k, c in self.coeffs.items()},
                            self.order, self.cutoff)

    def __pow__(self, k: int):
        return power(self, k)

    def __eq__(self, other):
        if not isinstance(other, PseudoDiffOp):
            return NotImplemented
        return self.coeffs == other.coeffs and self.cutoff == other.cutoff

    __hash__ = None

    def agrees_with(self, other: "PseudoDiffOp") -> bool:
        """Coefficient equality on the orders both operands certify."""
        low = _lower(self.cutoff, other.cutoff)
        keys = set(self.coeffs) | set(other.coeffs)
        return all(self.coeffs.get(k, JetPolynomial()) == other.coeffs.get(k, JetPolynomial())
                   for k in keys if low is None or k >= low)

    def apply(self, f) -> JetPolynomial:
        """Apply a differential operator to a differential polynomial."""
        if not self.is_differential():
            raise OperatorShapeError("only differential operators act on functions")
        f = JetPolynomial.lift(f)
        out = JetPolynomial()
        for k, c in self.coeffs.items():
            out = out + c * total_derivative(f, k)
        return out

    def map_coeffs(self, fn) -> "PseudoDiffOp":
        return PseudoDiffOp({k: fn(c) for k, c in self.coeffs.items()}, self.order, self.cutoff)

    # printing -----------------------------------------------------------
    def to_text(self, names=None) -> str:
        return _render(self, names, latex=False)

    def to_latex(self, names=None) -> str:
        return _render(self, names, latex=True)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"PseudoDiffOp({self})"


def _render(op: PseudoDiffOp, names, latex: bool) -> str:
    kw = {} if names is None else {"names": names}
    fmt = to_latex if latex else to_text
    parts = []
    for k in sorted(op.coeffs, reverse=True):
        c = op.coeffs[k]
        sym = "" if k == 0 else (r"\partial" if latex else "∂")
        if k not in (0, 1):
            sym += f"^{{{k}}}" if latex else f"^{k}"
        body = fmt(c, **kw)
        if sym:
            if body == "1":
                body = sym
            elif body == "-1":
                body = "-" + sym
            else:
                body = f"({body}){sym}" if len(c.terms) > 1 else f"{body}{' ' if latex else '*'}{sym}"
        parts.append(body)
    if op.cutoff is not None:
        parts.append(rf"O(\partial^{{{op.cutoff - 1}}})" if latex else f"O(∂^{op.cutoff - 1})")
    if not parts:
        return "0"
    text = parts[0]
    for p in parts[1:]:
        text += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return text


def compose(a: PseudoDiffOp, b: PseudoDiffOp, cutoff: int | None = None) -> PseudoDiffOp:
    """``a o b`` by the generalized Leibniz rule.

    ``cutoff`` asks for the result only at orders >= cutoff; it is required
    when ``a`` has negative orders and both inputs are exact.
    """
    top = a.order + b.order
    known = _lower(cutoff, _lower(None if a.cutoff is None else a.cutoff + b.order,
                                  None if b.cutoff is None else b.cutoff + a.order))
    if known is None and any(k < 0 for k in a.coeffs):
        raise DepthExhausted("composition with a negative-order left factor needs a cutoff")
    if known is not None and top - known + 1 < 1:
        raise DepthExhausted(f"composition would have no certified orders (top {top}, cutoff {known})")
    out: dict[int, JetPolynomial] = {}
    derivs: dict[tuple[int, int], JetPolynomial] = {}
    for i, ca in a.coeffs.items():
        for j, cb in b.coeffs.items():
            r = 0
            while True:
                k = i + j - r
                if known is not None and k < known:
                    break
                if i >= 0 and r > i:
                    break
                if (j, r) not in derivs:
                    derivs[(j, r)] = cb if r == 0 else total_derivative(derivs[(j, r - 1)])
                dcb = derivs[(j, r)]
                if not dcb:
                    break
                term = ca * dcb * binomial(i, r)
                out[k] = out[k] + term if k in out else term
                r += 1
    return PseudoDiffOp(out, top, known)


def power(a: PseudoDiffOp, k: int, cutoff: int | None = None) -> PseudoDiffOp:
    if k < 0:
        raise ValueError("negative powers are taken through nth_root or inverse")
    result = PseudoDiffOp.scalar(1)
    for i in range(1, k + 1):
        # the remaining factors raise orders by (k - i) * order
        step = None if cutoff is None else cutoff - (k - i) * a.order
        result = compose(result, a, step)
    return result


def commutator(a: PseudoDiffOp, b: PseudoDiffOp, cutoff: int | None = None) -> PseudoDiffOp:
    return compose(a, b, cutoff) - compose(b, a, cutoff)


def positive_part_residue(a: PseudoDiffOp) -> tuple[PseudoDiffOp, JetPolynomial]:
    return a.plus(), a.residue()


def nth_root(L: PseudoDiffOp, n: int, depth: int) -> PseudoDiffOp:
    """Monic first-order R with R^n = L on ``depth`` orders (1 down to 2 - depth)."""
    if n < 1:
        raise ValueError("root index must be positive")
    if L.order != n or L[n] != JetPolynomial.const(1):
        raise OperatorShapeError(f"expected a monic operator of order {n}")
    if n > 1 and L[n - 1]:
        raise OperatorShapeError("subprincipal coefficient must vanish")
    if depth < 1:
        raise DepthExhausted("root depth must be at least 1")
    coeffs = {1: JetPolynomial.const(1)}
    for j in range(1, depth - 1):
        target = n - 1 - j
        approx = PseudoDiffOp(coeffs, order=1)
        pw = power(approx, n, cutoff=target)
        coeffs[1 - j - 1] = (L[target] - pw[target]) * Fraction(1, n)
    return PseudoDiffOp(coeffs, order=1, cutoff=2 - depth)


def fractional_power(L: PseudoDiffOp, n: int, m: int, lowest: int) -> PseudoDiffOp:
    """``L^(m/n)`` certified at orders >= lowest."""
    depth = max(m - lowest + 1, 1)
    root = nth_root(L, n, depth)
    # R^m certified from (m - 1) + cutoff(R) upward
    return power(root, m, cutoff=lowest)


def scalar_lax_operator(n: int) -> PseudoDiffOp:
    """``d^n - v_1 d^(n-2) - ... - v_{n-1}`` with v_i the i-th field."""
    return PseudoDiffOp.from_scalar_lax([JetPolynomial.var(i) for i in range(1, n)], n)


def _check_nm(n: int, m: int):
    if n < 2:
        raise ValueError("n must be at least 2")
    if m <= 0:
        raise ValueError("m must be positive")
    if m % n == 0:
        raise ValueError(f"m = {m} is divisible by n = {n}; the flow is trivial")


def lax_commutator(n: int, m: int, L: PseudoDiffOp | None = None) -> PseudoDiffOp:
    """``[(L^(m/n))_+, L]`` as an exact differential operator."""
    _check_nm(n, m)
    L = L if L is not None else scalar_lax_operator(n)
    plus = fractional_power(L, n, m, 0).plus()
    return commutator(plus, L)


def lax_rhs(n: int, m: int, L: PseudoDiffOp | None = None) -> list[JetPolynomial]:
    """Right-hand sides of the m-th flow: the time derivatives of v_1..v_{n-1}."""
    c = lax_commutator(n, m, L)
    bad = [k for k in c.coeffs if k >= n - 1]
    if bad:
        raise AssertionError(f"Lax commutator has order {max(bad)} >= n - 1; truncation bug")
    return [-c[n - 1 - i] for i in range(1, n)]


def conserved_density(n: int, m: int, L: PseudoDiffOp | None = None) -> JetPolynomial:
    """``res L^(m/n)``."""
    _check_nm(n, m)
    L = L if L is not None else scalar_lax_operator(n)
    return fractional_power(L, n, m, -1).residue()


def residue_commutator_is_exact(a: PseudoDiffOp, b: PseudoDiffOp, fields) -> bool:
    """The residue of [a, b] is a total derivative (checked by Euler operators)."""
    res = commutator(a, b, cutoff=-1).residue()
    return all(not euler_derivative(res, i) for i in fields)


def random_pseudo_operator(rng, fields, top: int = 2, bottom: int = -2, **poly_kwargs) -> PseudoDiffOp:
    """Finite exact operator sum_{bottom <= k <= top} a_k d^k with random jet coefficients."""
    from .jetring import random_jet_polynomial

    coeffs = {k: random_jet_polynomial(rng, fields, **poly_kwargs) for k in range(bottom, top + 1)}
    return PseudoDiffOp(coeffs, order=top)
