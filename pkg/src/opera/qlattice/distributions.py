"""Formal distributions in x = w/z and the q-Poisson brackets.

Atoms:
  ``("f", k)``  f(x q^k) with f(x) = sum_n (q^n - q^-n)/(q^n + q^-n) x^n
  ``("d", k)``  delta(x q^k) with delta(x) = sum_n x^n
  ``("x", j)``  x^j
Each term is coefficient * atom * monomial in shifted symbols of z and w.

Normalization collapses delta terms onto their support and rewrites f
atoms through f(xq^2) + f(x) = delta(xq^2) - delta(x), which is
multiplication of the coefficient generating polynomial by (y^2 - 1)/(y^2 + 1)
with y = q^n.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from ..coeffcore import ParamRational
from .shiftring import Mono, ShiftPoly, _mono_mul, render

q = ParamRational.gen("q")
Q_MINUS_QINV = q - 1 / q


def f_coefficient(n: int):
    """(q^n - q^-n)/(q^n + q^-n)."""
    return (q ** n - q ** (-n)) / (q ** n + q ** (-n))


def atom_coefficient(atom: tuple, n: int):
    kind, k = atom
    if kind == "f":
        return (q ** (k * n)) * f_coefficient(n) if n else Fraction(0)
    if kind == "d":
        return q ** (k * n)
    if kind == "x":
        return Fraction(int(n == k))
    raise ValueError(f"unknown atom {atom!r}")


def _swap_var(v: str) -> str:
    return {"z": "w", "w": "z"}.get(v, v)


class DistributionExpr:
    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {key: c for key, c in (terms or {}).items() if c != 0}

    @classmethod
    def atom(cls, kind: str, k: int, poly: ShiftPoly | None = None, coeff=Fraction(1)) -> "DistributionExpr":
        poly = ShiftPoly.const(1) if poly is None else poly
        return cls({((kind, k), m): c * coeff for m, c in poly.terms.items()})

    def _put(self, out, key, c):
        out[key] = out[key] + c if key in out else c

    def __add__(self, other: "DistributionExpr") -> "DistributionExpr":
        out = dict(self.terms)
        for key, c in other.terms.items():
            self._put(out, key, c)
        return DistributionExpr(out)

    def __neg__(self):
        return DistributionExpr({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "DistributionExpr":
        return DistributionExpr({k: v * c for k, v in self.terms.items()})

    def times(self, poly: ShiftPoly) -> "DistributionExpr":
        out: dict = {}
        for (atom, m), c in self.terms.items():
            for pm, pc in poly.terms.items():
                self._put(out, (atom, _mono_mul(m, pm)), c * pc)
        return DistributionExpr(out)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, DistributionExpr) and self.terms == other.terms

    __hash__ = None

    def swap(self) -> "DistributionExpr":
        """Exchange z and w (x -> 1/x), using that f is odd and delta even."""
        out: dict = {}
        for ((kind, k), m), c in self.terms.items():
            nm = ShiftPoly({m: Fraction(1)}).map_symbols(lambda s: (s[0], s[1], _swap_var(s[2]), s[3]))
            (mono, _), = nm.terms.items()
            if kind == "f":
                self._put(out, (("f", -k), mono), -c)
            elif kind == "d":
                self._put(out, (("d", -k), mono), c)
            else:
                self._put(out, (("x", -k), mono), c)
        return DistributionExpr(out)

    def groups(self) -> dict[Mono, list]:
        out: dict = {}
        for (atom, m), c in self.terms.items():
            out.setdefault(m, []).append((atom, c))
        return out

    def coefficient_table(self, window: int) -> dict:
        """Per monomial, the x^n coefficients for |n| <= window."""
        table = {}
        for m, atoms in self.groups().items():
            row = {}
            for n in range(-window, window + 1):
                total = Fraction(0)
                for atom, c in atoms:
                    total = total + c * atom_coefficient(atom, n)
                row[n] = total
            table[m] = row
        return table

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for ((kind, k), m), c in sorted(self.terms.items(), key=lambda kv: repr(kv[0])):
            name = {"f": "f", "d": "δ", "x": "x^"}[kind]
            arg = "x" if k == 0 else f"x*q^{k}"
            atom = f"x^{k}" if kind == "x" else f"{name}({arg})"
            mono = render(ShiftPoly({m: Fraction(1)}))
            parts.append(f"({c})*{atom}" + ("" if mono == "1" else f"*{mono}"))
        return " + ".join(parts)

    def __str__(self):
        return self.to_text()


# ---------------------------------------------------------------------------
# normalization


def _collapse(expr: DistributionExpr) -> DistributionExpr:
    """delta(x q^k) M(z, w) -> delta(x q^k) M(z, z q^-k) for even k."""
    out: dict = {}
    for ((kind, k), m), c in expr.terms.items():
        if kind == "d" and k % 2 == 0:
            moved = ShiftPoly({m: Fraction(1)}).map_symbols(
                lambda s: (s[0], s[1], "z", s[3] - k // 2) if s[2] == "w" else s)
            (m, mc), = moved.terms.items()
            c = c * mc
        key = ((kind, k), m)
        out[key] = out[key] + c if key in out else c
    return DistributionExpr(out)


def _laurent_divide_y2p1(coeffs: dict[int, object]) -> dict[int, object]:
    """Exact quotient of a Laurent polynomial in y by y^2 + 1."""
    if not coeffs:
        return {}
    lo = min(coeffs)
    poly = {k - lo: c for k, c in coeffs.items()}
    quot: dict[int, object] = {}
    top = max(poly)
    while poly and top >= 2:
        c = poly.pop(top)
        quot[top - 2] = c
        poly[top - 2] = poly.get(top - 2, Fraction(0)) - c
        if poly[top - 2] == 0:
            del poly[top - 2]
        top = max(poly) if poly else -1
    if any(c != 0 for c in poly.values()):
        raise ArithmeticError("polynomial is not divisible by y^2 + 1")
    return {k + lo: c for k, c in quot.items()}


def _reduce_f(expr: DistributionExpr) -> tuple[DistributionExpr, list]:
    """Rewrite f atoms per monomial into delta atoms plus f(x), f(xq) remainders.

    Returns the new expression and, for auditing, the list of
    (monomial, original f terms, replacement) triples.
    """
    keep: dict = {}
    audit = []
    groups: dict[Mono, dict[int, object]] = {}
    for ((kind, k), m), c in expr.terms.items():
        if kind == "f":
            g = groups.setdefault(m, {})
            g[k] = g.get(k, Fraction(0)) + c
        else:
            keep[((kind, k), m)] = c
    out = DistributionExpr(keep)
    for m, P in groups.items():
        P = {k: c for k, c in P.items() if c != 0}
        if not P:
            continue
        # remainder mod y^2 + 1: y^k = (-1)^floor(k/2) y^(k mod 2)
        rem = {0: Fraction(0), 1: Fraction(0)}
        for k, c in P.items():
            sign = -1 if (k // 2) % 2 else 1
            rem[k % 2] = rem[k % 2] + c * sign
        diff = dict(P)
        for k, c in rem.items():
            diff[k] = diff.get(k, Fraction(0)) - c
        diff = {k: c for k, c in diff.items() if c != 0}
        quot = _laurent_divide_y2p1(diff)
        repl = DistributionExpr()
        for k, c in quot.items():
            # Q(y) (y^2 - 1) -> delta(x q^(k+2)) - delta(x q^k)
            repl = repl + DistributionExpr({(("d", k + 2), m): c}) - DistributionExpr({(("d", k), m): c})
        for k, c in rem.items():
            if c != 0:
                repl = repl + DistributionExpr({(("f", k), m): c})
        original = DistributionExpr({(("f", k), m): c for k, c in P.items()})
        audit.append((m, original, repl))
        out = out + repl
    return out, audit


def dist_normalize(expr: DistributionExpr, window: int) -> tuple[DistributionExpr, dict, list]:
    """Normal form, residual coefficient table on |n| <= window, and reduction audit."""
    e = _collapse(expr)
    e, audit = _reduce_f(e)
    e = _collapse(e)
    return e, e.coefficient_table(window), audit


def audit_failures(audit: list, window: int) -> list:
    """f-to-delta rewrites whose coefficients disagree somewhere on the window."""
    bad = []
    for m, original, repl in audit:
        a = original.coefficient_table(window).get(m, {})
        b = repl.coefficient_table(window).get(m, {})
        for n in range(-window, window + 1):
            if a.get(n, Fraction(0)) != b.get(n, Fraction(0)):
                bad.append((m, n))
    return bad


# ---------------------------------------------------------------------------
# brackets


def lambda_bracket(a: ShiftPoly, b: ShiftPoly) -> DistributionExpr:
    """Leibniz extension of {Lambda(z'), Lambda(w')} = (q - 1/q) f(w'/z') Lambda(z') Lambda(w')."""
    out = DistributionExpr()
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            prod = _mono_mul(ma, mb)
            for sa, ea in ma:
                if sa[0] != "L":
                    continue
                for sb, eb in mb:
                    if sb[0] != "L":
                        continue
                    if sa[2] == sb[2]:
                        raise ValueError("bracket of symbols at the same point is not a distribution")
                    k = 2 * (sb[3] - sa[3])
                    c = ca * cb * ea * eb * Q_MINUS_QINV
                    if sa[2] == "z":
                        atom = ("f", k)
                    else:
                        # f(z q^2b / (w q^2a)) = f(x^-1 q^k) = -f(x q^-k)
                        atom, c = ("f", -k), -c
                    out = out + DistributionExpr({(atom, prod): c})
    return out


def t_series(var: str = "z") -> ShiftPoly:
    """t = Lambda(var) + Lambda(var q^2)^-1."""
    return (ShiftPoly.symbol(("L", 1, var, 0)) + ShiftPoly.symbol(("L", 1, var, 1), -1))


def t_bracket_claim() -> DistributionExpr:
    """(q - 1/q)( f(w/z) t(z) t(w) + delta(w/(z q^2)) - delta(w q^2/z) )."""
    tt = t_series("z") * t_series("w")
    return (DistributionExpr.atom("f", 0, tt) + DistributionExpr.atom("d", -2)
            - DistributionExpr.atom("d", 2)).scale(Q_MINUS_QINV)


def verify_t_bracket(window: int) -> dict:
    """Compare {t(z), t(w)} from the Lambda bracket with the closed form."""
    lhs = lambda_bracket(t_series("z"), t_series("w"))
    residual = lhs - t_bracket_claim()
    normal, table, audit = dist_normalize(residual, window)
    offending = [(render(ShiftPoly({m: Fraction(1)})), n) for m, row in table.items()
                 for n, c in row.items() if c != 0]
    lhs_normal, lhs_table, _ = dist_normalize(lhs, window)
    q1_failures = [(render(ShiftPoly({m: Fraction(1)})), n) for m, row in lhs_table.items()
                   for n, c in row.items() if _at_q1(c) != 0]
    return {
        "window": window,
        "residual": normal,
        "offending": offending,
        "audit_failures": audit_failures(audit, window),
        "lhs": lhs_normal,
        "q1_failures": q1_failures,
        "passed": not offending and normal.is_zero() and not audit_failures(audit, window),
    }


def _at_q1(c):
    if isinstance(c, ParamRational):
        return c.subs(q=Fraction(1))
    return c


def lambda_antisymmetry(window: int) -> bool:
    lam_z = ShiftPoly.symbol(("L", 1, "z", 0))
    lam_w = ShiftPoly.symbol(("L", 1, "w", 0))
    total = lambda_bracket(lam_z, lam_w) + lambda_bracket(lam_w, lam_z)
    normal, table, _ = dist_normalize(total, window)
    return normal.is_zero() and all(c == 0 for row in table.values() for c in row.values())
