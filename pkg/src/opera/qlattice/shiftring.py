"""Laurent polynomials in shifted symbols.

A symbol is ``(name, index, var, shift)`` and stands for ``name_index(var q^(2 shift))``,
e.g. ``("L", 1, "z", 1)`` is Lambda_1(z q^2).  Coefficients are exact
(Fraction or ParamRational).
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Mapping

from ..coeffcore import as_coeff, coeff_latex

Symbol = tuple[str, int, str, int]
Mono = tuple[tuple[Symbol, int], ...]

_PRETTY = {"L": ("Λ", r"\Lambda"), "t": ("t", "t"), "rho": ("ρ", r"\rho"), "Q": ("Q", "Q")}


def sym(name: str, index: int = 1, shift: int = 0, var: str = "z") -> Symbol:
    return (name, index, var, shift)


def _mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for s, e in b:
        exps[s] = exps.get(s, 0) + e
        if not exps[s]:
            del exps[s]
    return tuple(sorted(exps.items()))


class ShiftPoly:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Mono, object] | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c != 0}
        self._hash = None

    @classmethod
    def const(cls, c) -> "ShiftPoly":
        return cls({(): as_coeff(c)})

    @classmethod
    def symbol(cls, s: Symbol, exp: int = 1) -> "ShiftPoly":
        return cls({((s, exp),): Fraction(1)})

    @classmethod
    def monomial(cls, mono: Mono, c=Fraction(1)) -> "ShiftPoly":
        return cls({tuple(sorted(mono)): c})

    @staticmethod
    def lift(x) -> "ShiftPoly":
        return x if isinstance(x, ShiftPoly) else ShiftPoly.const(x)

    # ring -------------------------------------------------------------
    def __add__(self, other):
        other = ShiftPoly.lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return ShiftPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return ShiftPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-ShiftPoly.lift(other))

    def __rsub__(self, other):
        return ShiftPoly.lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, ShiftPoly):
            c = as_coeff(other)
            return ShiftPoly({m: v * c for m, v in self.terms.items()})
        out: dict = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = _mono_mul(ma, mb)
                v = ca * cb
                out[m] = out[m] + v if m in out else v
        return ShiftPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = ShiftPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def inverse(self) -> "ShiftPoly":
        if len(self.terms) != 1:
            raise ZeroDivisionError("only monomials are invertible")
        (m, c), = self.terms.items()
        return ShiftPoly({tuple((s, -e) for s, e in m): Fraction(1) / c})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, ShiftPoly):
            return self.terms == other.terms
        try:
            return self.terms == ShiftPoly.const(other).terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # structure --------------------------------------------------------
    def symbols(self) -> set[Symbol]:
        return {s for m in self.terms for s, _ in m}

    def is_constant(self) -> bool:
        return all(not m for m in self.terms)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms.get((), Fraction(0))

    def map_symbols(self, fn: Callable[[Symbol], Symbol]) -> "ShiftPoly":
        out: dict = {}
        for m, c in self.terms.items():
            nm: dict = {}
            for s, e in m:
                t = fn(s)
                nm[t] = nm.get(t, 0) + e
                if not nm[t]:
                    del nm[t]
            key = tuple(sorted(nm.items()))
            out[key] = out[key] + c if key in out else c
        return ShiftPoly(out)

    def shift(self, k: int, var: str = "z") -> "ShiftPoly":
        """Replace var by var q^(2k) in every symbol."""
        if k == 0:
            return self
        return self.map_symbols(lambda s: (s[0], s[1], s[2], s[3] + k) if s[2] == var else s)

    def substitute(self, images: Callable[[Symbol], "ShiftPoly | None"]) -> "ShiftPoly":
        """Replace symbols by polynomials (``images`` returns None to keep a symbol)."""
        out = ShiftPoly()
        cache: dict = {}
        for m, c in self.terms.items():
            term = ShiftPoly.const(c)
            for s, e in m:
                if s not in cache:
                    cache[s] = images(s)
                img = cache[s]
                term = term * (ShiftPoly.symbol(s, e) if img is None else img ** e)
            out = out + term
        return out

    def map_coeffs(self, fn) -> "ShiftPoly":
        return ShiftPoly({m: fn(c) for m, c in self.terms.items()})

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"ShiftPoly({self})"


def symbol_text(s: Symbol, latex: bool = False, show_index: bool = True) -> str:
    name, index, var, shift = s
    pretty = _PRETTY.get(name, (name, name))[1 if latex else 0]
    if show_index:
        pretty += f"_{{{index}}}" if latex else str(index)
    if shift == 0:
        arg = var
    elif shift == 1:
        arg = f"{var}q^{{2}}" if latex else f"{var}q^2"
    else:
        arg = f"{var}q^{{{2 * shift}}}" if latex else f"{var}q^{2 * shift}"
    return f"{pretty}({arg})"


def _mono_text(m: Mono, latex: bool, show_index: bool) -> str:
    parts = []
    for s, e in m:
        base = symbol_text(s, latex, show_index)
        if e != 1:
            base += f"^{{{e}}}" if latex else f"^{e}"
        parts.append(base)
    return (" " if latex else "*").join(parts)


def render(p: ShiftPoly, latex: bool = False, show_index: bool = True) -> str:
    if not p.terms:
        return "0"
    out = []
    for m in sorted(p.terms, key=lambda m: (len(m), m)):
        c = p.terms[m]
        mono = _mono_text(m, latex, show_index)
        if isinstance(c, Fraction):
            neg, mag = c < 0, abs(c)
            if not mono:
                body = coeff_latex(mag) if latex else str(mag)
            elif mag == 1:
                body = mono
            else:
                body = (coeff_latex(mag) + " " if latex else f"{mag}*") + mono
        else:
            neg = False
            cs = rf"\left({coeff_latex(c)}\right)" if latex else f"({c})"
            body = cs + ((" " if latex else "*") + mono if mono else "")
        out.append(("-" if neg else "+", body))
    text = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text
