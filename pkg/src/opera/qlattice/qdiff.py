"""q-difference operators ``sum a_k(z) D^k`` with ``(D f)(z) = f(z q^2)``.

Composition uses ``D o a(z) = a(z q^2) D`` and is exact for every power of D,
including negative ones, so truncation only enters through roots.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .shiftring import ShiftPoly, Symbol, render, sym


class QDepthExhausted(ArithmeticError):
    pass


class QShapeError(ValueError):
    pass


class QDiffOp:
    __slots__ = ("coeffs", "order", "cutoff")

    def __init__(self, coeffs: Mapping[int, object], order: int | None = None, cutoff: int | None = None):
        self.coeffs = {}
        for k, c in coeffs.items():
            c = ShiftPoly.lift(c)
            if c and (cutoff is None or k >= cutoff):
                self.coeffs[int(k)] = c
        self.order = max(self.coeffs, default=0) if order is None else order
        self.cutoff = cutoff

    @classmethod
    def D(cls, k: int = 1) -> "QDiffOp":
        return cls({k: 1}, order=k)

    @classmethod
    def scalar(cls, a) -> "QDiffOp":
        return cls({0: a}, order=0)

    def __getitem__(self, k: int) -> ShiftPoly:
        if self.cutoff is not None and k < self.cutoff:
            raise QDepthExhausted(f"power {k} of D is below the certified cutoff {self.cutoff}")
        return self.coeffs.get(k, ShiftPoly())

    def __add__(self, other):
        if not isinstance(other, QDiffOp):
            other = QDiffOp.scalar(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out[k] + c if k in out else c
        cut = [c for c in (self.cutoff, other.cutoff) if c is not None]
        return QDiffOp(out, max(self.order, other.order), max(cut) if cut else None)

    __radd__ = __add__

    def __neg__(self):
        return QDiffOp({k: -c for k, c in self.coeffs.items()}, self.order, self.cutoff)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        return q_compose(self, other)

    def __eq__(self, other):
        if not isinstance(other, QDiffOp):
            return NotImplemented
        return self.coeffs == other.coeffs and self.cutoff == other.cutoff

    __hash__ = None

    def plus(self) -> "QDiffOp":
        if self.cutoff is not None and self.cutoff > 0:
            raise QDepthExhausted("nonnegative part is not fully certified")
        return QDiffOp({k: c for k, c in self.coeffs.items() if k >= 0})

    def map_coeffs(self, fn) -> "QDiffOp":
        return QDiffOp({k: fn(c) for k, c in self.coeffs.items()}, self.order, self.cutoff)

    def to_text(self, latex: bool = False, show_index: bool = True) -> str:
        parts = []
        for k in sorted(self.coeffs, reverse=True):
            body = render(self.coeffs[k], latex, show_index)
            d = "" if k == 0 else ("D" if k == 1 else (f"D^{{{k}}}" if latex else f"D^{k}"))
            if d:
                body = d if body == "1" else f"({body}){d}"
            parts.append(body)
        if self.cutoff is not None:
            parts.append(f"O(D^{self.cutoff - 1})")
        return " + ".join(parts) if parts else "0"

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"QDiffOp({self})"


def q_compose(a: QDiffOp, b: QDiffOp, cutoff: int | None = None) -> QDiffOp:
    """``a o b``; only powers of D at or above ``cutoff`` are kept."""
    known = [c for c in (cutoff,
                         None if a.cutoff is None else a.cutoff + b.order,
                         None if b.cutoff is None else b.cutoff + a.order) if c is not None]
    low = max(known) if known else None
    out: dict = {}
    for i, ca in a.coeffs.items():
        for j, cb in b.coeffs.items():
            k = i + j
            if low is not None and k < low:
                continue
            term = ca * cb.shift(i)
            out[k] = out[k] + term if k in out else term
    return QDiffOp(out, a.order + b.order, low)


def q_power(a: QDiffOp, m: int, cutoff: int | None = None) -> QDiffOp:
    result = QDiffOp.scalar(1)
    for i in range(1, m + 1):
        step = None if cutoff is None else cutoff - (m - i) * a.order
        result = q_compose(result, a, step)
    return result


def Lam(i: int, shift: int = 0, var: str = "z") -> ShiftPoly:
    return ShiftPoly.symbol(sym("L", i, shift, var))


def q_miura_product(n: int, constrained: bool | None = None) -> QDiffOp:
    """``(D + Lambda_1(z)) ... (D + Lambda_n(z))``.

    With ``constrained`` (default for n = 2) the last factor is
    ``(Lambda_1 ... Lambda_{n-1})^-1`` so the product of all Lambda_i is 1.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if constrained is None:
        constrained = n == 2
    factors = [Lam(i) for i in range(1, n + 1)]
    if constrained and n > 1:
        prod = ShiftPoly.const(1)
        for f in factors[:-1]:
            prod = prod * f
        factors[-1] = prod.inverse()
    op = QDiffOp.scalar(1)
    for f in factors:
        op = q_compose(op, QDiffOp.D() + QDiffOp.scalar(f))
    return op


def q_miura_expand(n: int, constrained: bool | None = None) -> tuple[list[ShiftPoly], ShiftPoly]:
    """Return (t_1..t_{n-1}, constant term) of the q-Miura product."""
    op = q_miura_product(n, constrained)
    if op[n] != ShiftPoly.const(1):
        raise AssertionError("q-Miura product is not monic")
    return [op[n - i] for i in range(1, n)], op[0]


def lambda_product(n: int) -> ShiftPoly:
    out = ShiftPoly.const(1)
    for i in range(1, n + 1):
        out = out * Lam(i)
    return out


# ---------------------------------------------------------------------------
# roots and the q-KdV Lax flows


def q_oper(t_coeffs: Sequence) -> QDiffOp:
    """``D^n + t_1 D^(n-1) + ... + t_{n-1} D + 1``."""
    n = len(t_coeffs) + 1
    coeffs = {n: ShiftPoly.const(1), 0: ShiftPoly.const(1)}
    for i, t in enumerate(t_coeffs, start=1):
        c = ShiftPoly.lift(t)
        coeffs[n - i] = coeffs.get(n - i, ShiftPoly()) + c
    return QDiffOp(coeffs, order=n)


def generic_q_oper(n: int) -> QDiffOp:
    return q_oper([ShiftPoly.symbol(sym("t", i)) for i in range(1, n)])


class RootUnknowns:
    """Auxiliary unknowns rho_j with sum_{p=0}^{n-1} rho_j(z q^(2p)) = rhs_j.

    Every shift of rho_j is reduced to the window 0..n-2, which makes the
    representation canonical.
    """

    def __init__(self, n: int):
        self.n = n
        self.rhs: dict[int, ShiftPoly] = {}
        self._memo: dict[tuple[int, int], ShiftPoly] = {}

    def add(self, j: int, rhs: ShiftPoly) -> ShiftPoly:
        self.rhs[j] = self.reduce(rhs)
        return ShiftPoly.symbol(sym("rho", j))

    def _image(self, s: Symbol) -> ShiftPoly | None:
        name, j, var, k = s
        if name != "rho" or j not in self.rhs or 0 <= k <= self.n - 2:
            return None
        key = (j, k)
        if key not in self._memo:
            n = self.n
            if k >= n - 1:
                base = k - (n - 1)
                val = self.rhs[j].shift(base)
                for p in range(n - 1):
                    val = val - ShiftPoly.symbol(sym("rho", j, base + p))
            else:
                val = self.rhs[j].shift(k)
                for p in range(1, n):
                    val = val - ShiftPoly.symbol(sym("rho", j, k + p))
            self._memo[key] = self.reduce(val)
        return self._memo[key]

    def reduce(self, p: ShiftPoly) -> ShiftPoly:
        if self.n == 1:
            return p
        return p.substitute(self._image)


def q_nth_root(L: QDiffOp, n: int, depth: int) -> tuple[QDiffOp, RootUnknowns]:
    """Monic R = D + r_0 + r_{-1} D^-1 + ... with R^n = L on ``depth`` powers of D.

    Constant-coefficient operators get constant solutions; otherwise each
    r_{-j} is a new unknown rho_j tied to L by a shift relation.
    """
    if L.order != n or L[n] != ShiftPoly.const(1):
        raise QShapeError(f"expected a monic q-difference operator of order {n}")
    if depth < 1:
        raise QDepthExhausted("root depth must be at least 1")
    unknowns = RootUnknowns(n)
    constant = all(c.is_constant() for c in L.coeffs.values())
    coeffs = {1: ShiftPoly.const(1)}
    for j in range(0, depth - 1):
        target = n - 1 - j
        approx = QDiffOp(coeffs, order=1)
        pw = q_power(approx, n, cutoff=target)
        rhs = unknowns.reduce(L[target] - pw[target])
        if constant:
            coeffs[-j] = rhs * Fraction(1, n)
        else:
            coeffs[-j] = unknowns.add(j, rhs)
    return QDiffOp(coeffs, order=1, cutoff=1 - (depth - 1)), unknowns


def q_root_lax(n: int, m: int, t_coeffs: Sequence | None = None) -> dict:
    """Right-hand sides of ``d L_q / d t_m = [(L_q^(m/n))_+, L_q]``.

    Returns the flows of t_1..t_{n-1}, the root relations, and the shape
    checks (top and constant coefficients of the commutator vanish).
    """
    if m <= 0 or m % n == 0:
        raise ValueError(f"need m > 0 not divisible by n (got n={n}, m={m})")
    L = generic_q_oper(n) if t_coeffs is None else q_oper(t_coeffs)
    R, unknowns = q_nth_root(L, n, depth=m + 1)
    P = q_power(R, m, cutoff=0).plus()
    P = P.map_coeffs(unknowns.reduce)
    C = q_compose(P, L) - q_compose(L, P)
    C = C.map_coeffs(unknowns.reduce)
    stray = sorted(k for k in C.coeffs if k >= n or k <= 0)
    if stray:
        raise AssertionError(f"Lax commutator leaves the q-oper shape at powers {stray}")
    return {
        "flows": [C[n - i] for i in range(1, n)],
        "relations": dict(unknowns.rhs),
        "root": R,
        "unknowns": unknowns,
    }
