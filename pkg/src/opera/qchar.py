"""q-characters for sl_n and the forgetful map to ordinary characters.

A spectral point ``a q^k`` is stored as the integer k relative to a fixed
base point a.
"""
from __future__ import annotations

from collections import Counter
from typing import Mapping

from .qlattice.shiftring import ShiftPoly

YMono = tuple[tuple[tuple[int, int], int], ...]


def _mul(a: tuple, b: tuple) -> tuple:
    exps = dict(a)
    for k, e in b:
        exps[k] = exps.get(k, 0) + e
        if not exps[k]:
            del exps[k]
    return tuple(sorted(exps.items()))


class YPolynomial:
    """Integer Laurent polynomial in Y_{i, a q^k}."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[YMono, int] | None = None):
        self.terms = {m: int(c) for m, c in (terms or {}).items() if c}

    @classmethod
    def Y(cls, i: int, k: int, exp: int = 1) -> "YPolynomial":
        return cls({(((i, k), exp),): 1})

    @classmethod
    def one(cls) -> "YPolynomial":
        return cls({(): 1})

    def __add__(self, other):
        out = Counter(self.terms)
        out.update(other.terms)
        return YPolynomial(out)

    def __mul__(self, other):
        out: Counter = Counter()
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                out[_mul(ma, mb)] += ca * cb
        return YPolynomial(out)

    def __pow__(self, k: int):
        if k < 0:
            if len(self.terms) != 1 or abs(next(iter(self.terms.values()))) != 1:
                raise ZeroDivisionError("only unit monomials are invertible")
            (m, c), = self.terms.items()
            return YPolynomial({tuple((v, -e) for v, e in m): c}) ** (-k)
        out = YPolynomial.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, YPolynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def shift(self, k: int) -> "YPolynomial":
        """Replace the base point a by a q^k."""
        return YPolynomial({tuple(sorted(((i, s + k), e) for (i, s), e in m)): c for m, c in self.terms.items()})

    def to_text(self, latex: bool = False, rank: int | None = None) -> str:
        return _render(self.terms, lambda key: _y_name(key, latex, rank), latex)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"YPolynomial({self})"


def _y_name(key, latex: bool, rank: int | None) -> str:
    i, k = key
    point = "a" if k == 0 else ("aq" if k == 1 else (f"aq^{{{k}}}" if latex else f"aq^{k}"))
    if rank == 1:
        return f"Y_{{{point}}}" if latex else f"Y[{point}]"
    return f"Y_{{{i},{point}}}" if latex else f"Y[{i},{point}]"


def _render(terms: Mapping, name, latex: bool) -> str:
    if not terms:
        return "0"
    parts = []
    for m in sorted(terms, key=lambda m: (tuple(-e for _, e in m), m)):
        c = terms[m]
        factors = []
        for key, e in m:
            base = name(key)
            if e != 1:
                base += f"^{{{e}}}" if latex else f"^{e}"
            factors.append(base)
        mono = (" " if latex else "*").join(factors)
        mag = abs(c)
        body = mono if mono and mag == 1 else (f"{mag}" + (("" if latex else "*") + mono if mono else ""))
        parts.append(("-" if c < 0 else "+", body))
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


class LambdaIndexError(ValueError):
    pass


def lambda_image(i: int, shift: int, n: int) -> YPolynomial:
    """Lambda_i(a q^(2 shift)) -> Y_{i, a q^(2s-i+1)} Y_{i-1, a q^(2s-i+2)}^-1, Y_0 = Y_n = 1."""
    if not 1 <= i <= n:
        raise LambdaIndexError(f"Lambda index {i} outside 1..{n}")
    out = YPolynomial.one()
    if i < n:
        out = out * YPolynomial.Y(i, 2 * shift - i + 1)
    if i - 1 >= 1:
        out = out * YPolynomial.Y(i - 1, 2 * shift - i + 2, -1)
    return out


def substitute_lambda(p: ShiftPoly, n: int, base: int = 0) -> YPolynomial:
    """Apply the Lambda -> Y rule to a polynomial in shifted Lambda symbols at z = a q^base."""
    out = YPolynomial()
    for m, c in p.terms.items():
        if c != int(c):
            raise ValueError("q-characters have integer coefficients")
        term = YPolynomial({(): int(c)})
        for (name, i, var, shift), e in m:
            if name != "L":
                raise ValueError(f"symbol {name} is not a Lambda")
            term = term * lambda_image(i, shift, n) ** e
        out = out + term
    return out.shift(base) if base else out


def forgetful(p: YPolynomial) -> dict:
    """Y_{i,a} -> y_i; returns {exponent tuple (sorted (i, e) pairs): coefficient}."""
    out: Counter = Counter()
    for m, c in p.terms.items():
        exps: dict = {}
        for (i, _), e in m:
            exps[i] = exps.get(i, 0) + e
            if not exps[i]:
                del exps[i]
        out[tuple(sorted(exps.items()))] += c
    return {k: v for k, v in out.items() if v}


def character_text(ch: Mapping, latex: bool = False, rank: int | None = None) -> str:
    def name(i):
        if rank == 1:
            return "y"
        return f"y_{{{i}}}" if latex else f"y{i}"
    return _render(ch, name, latex)


def qchar_eval_sl2(shift: int = 0) -> YPolynomial:
    """Y_a + Y_{aq^2}^-1 with a replaced by a q^shift."""
    return (YPolynomial.Y(1, 0) + YPolynomial.Y(1, 2, -1)).shift(shift)


def first_fundamental_character(n: int) -> dict:
    """Character of C^n in fundamental-weight variables.

    The weight eps_k pairs with the simple coroots as
    <eps_k, alpha_j> = delta_{kj} - delta_{k,j+1}, so
    y^{eps_k} = y_k y_{k-1}^-1 with y_0 = y_n = 1.
    """
    out: Counter = Counter()
    for k in range(1, n + 1):
        exps = {}
        for j in range(1, n):
            e = int(k == j) - int(k == j + 1)
            if e:
                exps[j] = e
        out[tuple(sorted(exps.items()))] += 1
    return dict(out)
