"""Free-field realization of affine sl_2 at the critical level.

The Weyl algebra [a_n, a*_m] = delta_{n,-m} acts on polynomials in the
creation modes x_k = a_{-k} (k >= 1) and y_k = a*_{-k} (k >= 0):

    a_n  (n >= 0)  ->  d/dy_n          a*_m (m > 0)  ->  -d/dx_m

and the remaining modes multiply.  Coefficients are polynomials over Q in
the modes u_k of a Laurent polynomial u(z) = sum_{|k| <= K} u_k z^(-k-1).

Fields (z^(-n-1) modes):

    e_n = a_n
    h_n = -2 sum :a_k a*_(n-k): + u_n
    f_n = -sum :a_k a*_l a*_m: + sum u_k a*_(n-k) + 2 n a*_n
    S   = :ef: + :fe: + 1/2 :hh:

Every mode sum is enumerated only over index choices that can act
nontrivially on the given basis vector.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import flint

from .hampoisson import CartanData

Mono = tuple  # sorted ((kind, index), exponent) pairs; kind 0 -> x, 1 -> y
X, Y = 0, 1

# Frozen: S_n acts on every state as SUGAWARA_CONSTANT * v_n, where v_n is
# mode n of w^2 - w' for the Cartan coordinate w = u/2 of the connection
# (u(z) is the eigenvalue of h = alpha-check, so w pairs with alpha/2).
# Written in u itself this is 1/2 sum_{a+b=n} u_a u_b + (n+1) u_n; the
# literal u^2 - u' is not proportional to it.
SUGAWARA_CONSTANT = Fraction(2)
CARTAN_SCALE = Fraction(1, 2)

FIELDS = ("e", "h", "f", "S")


class WindowExceeded(ValueError):
    pass


@dataclass(frozen=True)
class FieldMode:
    tag: str
    n: int

    def __post_init__(self):
        if self.tag not in FIELDS:
            raise ValueError(f"unknown field {self.tag!r}")

    def __str__(self):
        return f"{self.tag}_{self.n}"


# ---------------------------------------------------------------------------
# sl_2 critical form


_SL2 = ("e", "h", "f")
_BRACKET = {("e", "f"): {"h": 1}, ("h", "e"): {"e": 2}, ("h", "f"): {"f": -2}}


def sl2_bracket(x: str, y: str) -> dict[str, int]:
    if (x, y) in _BRACKET:
        return dict(_BRACKET[(x, y)])
    if (y, x) in _BRACKET:
        return {k: -v for k, v in _BRACKET[(y, x)].items()}
    return {}


def critical_form(x: str, y: str) -> Fraction:
    """kappa_c(x, y) = -1/2 Tr(ad x ad y) on sl_2."""
    tr = 0
    for b in _SL2:
        for c, coef in sl2_bracket(y, b).items():
            tr += coef * sl2_bracket(x, c).get(b, 0)
    return Fraction(-tr, 2)


def critical_level() -> int:
    """The level -h^vee, read off from the Cartan data."""
    return -CartanData(1).dual_coxeter


# ---------------------------------------------------------------------------
# states


def _mono_get(m: Mono, key) -> int:
    for k, e in m:
        if k == key:
            return e
    return 0


def _mono_add(m: Mono, key, d: int) -> Mono:
    exps = dict(m)
    e = exps.get(key, 0) + d
    if e:
        exps[key] = e
    else:
        exps.pop(key, None)
    return tuple(sorted(exps.items()))


def conformal_degree(m: Mono) -> int:
    return sum(k * e for (_, k), e in m)


def state_degree(m: Mono) -> int:
    """Grading used for the cutoff: a_{-k} counts k, a*_{-k} counts k + 1."""
    return sum((k + kind) * e for (kind, k), e in m)


class FockState:
    """Finite linear combination of creation monomials applied to |0>."""

    __slots__ = ("terms", "ring")

    def __init__(self, ring, terms: dict | None = None):
        self.ring = ring
        self.terms = {m: c for m, c in (terms or {}).items() if c != 0}

    @classmethod
    def vacuum(cls, ring) -> "FockState":
        return cls(ring, {(): ring.from_dict({(0,) * ring.nvars(): 1})})

    @classmethod
    def basis(cls, ring, m: Mono) -> "FockState":
        return cls(ring, {m: ring.from_dict({(0,) * ring.nvars(): 1})})

    def __add__(self, other: "FockState") -> "FockState":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return FockState(self.ring, out)

    def __neg__(self):
        return FockState(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "FockState":
        if isinstance(c, Fraction):
            c = flint.fmpq(c.numerator, c.denominator)
        return FockState(self.ring, {m: v * c for m, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, FockState) and self.terms == other.terms

    __hash__ = None

    def max_conformal_degree(self) -> int:
        return max((conformal_degree(m) for m in self.terms), default=0)

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms):
            c = self.terms[m]
            parts.append(f"({c})*{monomial_text(m)}")
        return " + ".join(parts)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"FockState({self})"


def monomial_text(m: Mono) -> str:
    if not m:
        return "|0>"
    factors = []
    for (kind, k), e in m:
        name = f"a_{{-{k}}}" if kind == X else f"a*_{{{-k}}}"
        factors.append(name if e == 1 else f"{name}^{e}")
    return " ".join(factors) + "|0>"


def basis_monomials(degree: int) -> list[Mono]:
    """All creation monomials with state_degree <= degree."""
    gens = [(X, k) for k in range(1, degree + 1)] + [(Y, k) for k in range(0, degree)]
    weight = {g: g[1] + g[0] for g in gens}
    out: list[Mono] = []

    def rec(i: int, left: int, acc: list):
        if i == len(gens):
            out.append(tuple(sorted(acc)))
            return
        g = gens[i]
        e = 0
        while e * weight[g] <= left:
            rec(i + 1, left - e * weight[g], acc + ([(g, e)] if e else []))
            e += 1

    rec(0, degree, [])
    return sorted(out, key=lambda m: (state_degree(m), m))


# ---------------------------------------------------------------------------
# Weyl algebra modes


def _is_annihilator(kind: str, n: int) -> bool:
    return n >= 0 if kind == "a" else n > 0


def _act_single(kind: str, n: int, m: Mono) -> tuple[Mono, int] | None:
    """One Weyl mode on a monomial: (new monomial, integer factor) or None."""
    if kind == "a":
        if n < 0:
            return _mono_add(m, (X, -n), 1), 1
        e = _mono_get(m, (Y, n))
        return (_mono_add(m, (Y, n), -1), e) if e else None
    if n <= 0:
        return _mono_add(m, (Y, -n), 1), 1
    e = _mono_get(m, (X, n))
    return (_mono_add(m, (X, n), -1), -e) if e else None


def normal_ordered_action(ops: Iterable[tuple[str, int]], m: Mono) -> tuple[Mono, int] | None:
    """:op_1 ... op_k: on a monomial; annihilators act first."""
    ops = sorted(ops, key=lambda o: not _is_annihilator(*o))
    factor = 1
    for kind, n in ops:
        r = _act_single(kind, n, m)
        if r is None:
            return None
        m, f = r
        factor *= f
    return m, factor


def weyl_mode(kind: str, n: int, s: FockState) -> FockState:
    """a_n or a*_n on a state."""
    out: dict = {}
    for m, c in s.terms.items():
        r = _act_single(kind, n, m)
        if r is not None:
            nm, f = r
            out[nm] = out[nm] + c * f if nm in out else c * f
    return FockState(s.ring, out)


def _present(m: Mono, kind: int) -> list[int]:
    return [k for (kd, k), _ in m if kd == kind]


def _bilinear_candidates(n: int, m: Mono) -> set[int]:
    """k with :a_k a*_(n-k): possibly nonzero on m."""
    ks = set(_present(m, Y))
    ks.update(n - l for l in _present(m, X))
    ks.update(range(n, 0))
    return ks


def _astar_pairs(s: int, m: Mono) -> set[int]:
    """l with :a*_l a*_(s-l): possibly nonzero on m."""
    xs = _present(m, X)
    ls = set(xs)
    ls.update(s - l for l in xs)
    ls.update(range(s, 1))
    return ls


# ---------------------------------------------------------------------------
# the module


@dataclass
class WakimotoModule:
    """Critical-level sl_2 Wakimoto module with formal u_k, |k| <= u_range.

    ``u_range = -1`` switches u off.  ``deriv_coeff`` is the coefficient of
    d/dz a*(z) in f(z); the correct value is -2 and other values serve as
    negative controls.
    """

    window: int = 3
    degree: int = 4
    u_range: int = 2
    deriv_coeff: int = -2
    ring: object = field(init=False, repr=False)
    _cache: dict = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self):
        if self.window < 0 or self.degree < 0 or self.u_range < -1:
            raise ValueError("window and degree must be nonnegative, u_range at least -1")
        names = tuple(self.u_name(k) for k in range(-self.u_range, self.u_range + 1))
        self.ring = flint.fmpq_mpoly_ctx.get(names, "lex")
        self._gens = dict(zip(range(-self.u_range, self.u_range + 1), self.ring.gens()))

    @staticmethod
    def u_name(k: int) -> str:
        return f"u{k}" if k >= 0 else f"u_m{-k}"

    def u(self, k: int):
        """Coefficient u_k as a ring element (zero outside the range)."""
        g = self._gens.get(k)
        return g if g is not None else self.ring.from_dict({})

    def one(self):
        return self.ring.from_dict({(0,) * self.ring.nvars(): 1})

    def vacuum(self) -> FockState:
        return FockState.vacuum(self.ring)

    def basis_state(self, m: Mono) -> FockState:
        return FockState.basis(self.ring, m)

    def test_states(self) -> list[Mono]:
        return basis_monomials(self.degree)

    def miura_mode(self, n: int, scale=CARTAN_SCALE):
        """Mode n of w^2 - w' with w = scale * u, as v(z) = sum v_n z^(-n-2).

        scale = 1 gives sum_{a+b=n} u_a u_b + (n+1) u_n.
        """
        sc = flint.fmpq(Fraction(scale).numerator, Fraction(scale).denominator)
        total = self.u(n) * (n + 1) * sc
        for a in range(-self.u_range, self.u_range + 1):
            b = n - a
            if -self.u_range <= b <= self.u_range:
                total = total + self.u(a) * self.u(b) * sc * sc
        return total

    # field modes on basis monomials ---------------------------------------
    def _field_on_mono(self, tag: str, n: int, m: Mono) -> dict:
        key = (tag, n, m)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        out: dict = {}

        def put(r, c):
            if r is None:
                return
            nm, f = r
            v = c * f
            if nm in out:
                out[nm] = out[nm] + v
            else:
                out[nm] = v

        one = self.one()
        if tag == "e":
            put(_act_single("a", n, m), one)
        elif tag == "h":
            for k in _bilinear_candidates(n, m):
                put(normal_ordered_action((("a", k), ("a*", n - k)), m), one * -2)
            if self.u(n) != 0:
                put((m, 1), self.u(n))
        elif tag == "f":
            xmax = max(_present(m, X), default=0)
            ks = set(_present(m, Y)) | set(range(min(n - 2 * xmax, n), 0))
            for k in ks:
                s = n - k
                for l in _astar_pairs(s, m):
                    put(normal_ordered_action((("a", k), ("a*", l), ("a*", s - l)), m), -one)
            for k in range(-self.u_range, self.u_range + 1):
                put(_act_single("a*", n - k, m), self.u(k))
            if n:
                # -c d/dz a*(z) has z^(-n-1) mode  c n a*_n with c = deriv_coeff
                put(_act_single("a*", n, m), one * (-self.deriv_coeff * n))
        else:
            raise ValueError(f"no monomial action for {tag!r}")
        out = {k: v for k, v in out.items() if v != 0}
        self._cache[key] = out
        return out

    def _apply(self, tag: str, n: int, s: FockState) -> FockState:
        if tag == "S":
            return self._sugawara(n, s)
        out: dict = {}
        for m, c in s.terms.items():
            for nm, v in self._field_on_mono(tag, n, m).items():
                w = c * v
                out[nm] = out[nm] + w if nm in out else w
        return FockState(s.ring, out)

    def _check(self, mode: FieldMode, s: FockState):
        if abs(mode.n) > self.window:
            raise WindowExceeded(f"mode {mode} is outside the window |n| <= {self.window}")
        if any(state_degree(m) > self.degree for m in s.terms):
            raise WindowExceeded(f"state degree exceeds the cutoff {self.degree}")

    def apply_field_mode(self, mode: FieldMode, s: FockState) -> FockState:
        self._check(mode, s)
        return self._apply(mode.tag, mode.n, s)

    def commutator_on_state(self, x: FieldMode, y: FieldMode, s: FockState) -> FockState:
        self._check(x, s)
        self._check(y, s)
        return self._commutator(x.tag, x.n, y.tag, y.n, s)

    def _commutator(self, a: str, n: int, b: str, m: int, s: FockState) -> FockState:
        return self._apply(a, n, self._apply(b, m, s)) - self._apply(b, m, self._apply(a, n, s))

    # Sugawara ---------------------------------------------------------------
    def _normal_product(self, A: str, B: str, n: int, s: FockState) -> FockState:
        """:AB:_n = sum_{k<0} A_k B_(n-k) + sum_{k>=0} B_(n-k) A_k, finitely supported on s."""
        top = s.max_conformal_degree() + self.u_range
        out = FockState(s.ring)
        for k in range(min(n - top, 0), 0):
            out = out + self._apply(A, k, self._apply(B, n - k, s))
        for k in range(0, top + 1):
            out = out + self._apply(B, n - k, self._apply(A, k, s))
        return out

    def _sugawara(self, n: int, s: FockState) -> FockState:
        return (self._normal_product("e", "f", n, s) + self._normal_product("f", "e", n, s)
                + self._normal_product("h", "h", n, s).scale(Fraction(1, 2)))

    def sugawara_mode_apply(self, n: int, s: FockState) -> FockState:
        self._check(FieldMode("S", n), s)
        return self._sugawara(n, s)

    # expected right-hand sides ---------------------------------------------
    def expected_commutator(self, a: str, n: int, b: str, m: int, s: FockState) -> FockState:
        """[a_n, b_m] s from the affine relations at the critical form."""
        out = FockState(s.ring)
        for c, coef in sl2_bracket(a, b).items():
            out = out + self._apply(c, n + m, s).scale(Fraction(coef))
        if n + m == 0:
            k = critical_form(a, b)
            if k and n:
                out = out + s.scale(k * n)
        return out


# ---------------------------------------------------------------------------
# verification


@dataclass
class RelationCheck:
    id: str
    passed: bool
    tested: int
    counterexample: str = ""

    @property
    def detail(self) -> str:
        if self.passed:
            return f"{self.tested} cases"
        return f"{self.tested} cases; counterexample: {self.counterexample}"


def _relation(W: WakimotoModule, a: str, b: str, states: list[Mono], window: int) -> RelationCheck:
    tested = 0
    for n in range(-window, window + 1):
        for m in range(-window, window + 1):
            for mono in states:
                s = W.basis_state(mono)
                lhs = W._commutator(a, n, b, m, s)
                rhs = W.expected_commutator(a, n, b, m, s)
                tested += 1
                if lhs != rhs:
                    return RelationCheck(f"[{a},{b}]", False, tested,
                                         f"n={n}, m={m}, state {monomial_text(mono)}: "
                                         f"got {lhs}, expected {rhs}")
    return RelationCheck(f"[{a},{b}]", True, tested)


def verify_relations(window: int = 3, degree: int = 4, u_range: int = 2, deriv_coeff: int = -2,
                     sugawara_window: int | None = None, sugawara_degree: int | None = None) -> list[RelationCheck]:
    """Check the affine sl_2 relations and the Sugawara action on basis states.

    Relations use modes |n|, |m| <= window on states of degree <= degree.
    The Sugawara checks default to the same window and cutoff.
    """
    W = WakimotoModule(window=window, degree=degree, u_range=u_range, deriv_coeff=deriv_coeff)
    states = W.test_states()
    checks = [_relation(W, a, b, states, window)
              for a, b in (("e", "e"), ("h", "e"), ("h", "f"), ("e", "f"), ("h", "h"), ("f", "f"))]

    sw = window if sugawara_window is None else sugawara_window
    sd = degree if sugawara_degree is None else sugawara_degree
    s_states = [m for m in states if state_degree(m) <= sd]

    tested, bad = 0, ""
    for n in range(-sw, sw + 1):
        for tag in ("e", "h", "f"):
            for m in range(-sw, sw + 1):
                for mono in s_states:
                    tested += 1
                    r = W._commutator("S", n, tag, m, W.basis_state(mono))
                    if not r.is_zero():
                        bad = f"[S_{n},{tag}_{m}] on {monomial_text(mono)} = {r}"
                        break
                if bad:
                    break
            if bad:
                break
        if bad:
            break
    checks.append(RelationCheck("S central", not bad, tested, bad))

    tested, bad = 0, ""
    c = SUGAWARA_CONSTANT
    for n in range(-sw, sw + 1):
        scalar = W.miura_mode(n) * flint.fmpq(c.numerator, c.denominator)
        for mono in s_states:
            tested += 1
            s = W.basis_state(mono)
            got = W._sugawara(n, s)
            want = FockState(W.ring, {mono: scalar})
            if got != want:
                bad = f"S_{n} on {monomial_text(mono)} = {got}, expected {want}"
                break
        if bad:
            break
    checks.append(RelationCheck("S scalar = c*(w^2-w')_n, w=u/2", not bad, tested, bad))
    return checks


def sugawara_vacuum_scalar(n: int, u_range: int = 2):
    """The scalar by which S_n acts on |0>, or None if S_n|0> is not proportional to |0>."""
    W = WakimotoModule(window=max(abs(n), 0), degree=0, u_range=u_range)
    out = W._sugawara(n, W.vacuum())
    if set(out.terms) - {()}:
        return None
    return out.terms.get((), W.ring.from_dict({}))


def literal_miura_constant(window: int = 2, u_range: int = 2):
    """A constant c with S_n|0> = c (sum u_a u_b + (n+1) u_n)|0> for all |n| <= window, or None."""
    W = WakimotoModule(window=window, degree=0, u_range=u_range)
    found = None
    for n in range(-window, window + 1):
        got = W._sugawara(n, W.vacuum()).terms.get((), W.ring.from_dict({}))
        v = W.miura_mode(n, scale=1)
        if v == 0:
            if got != 0:
                return None
            continue
        ratio = _constant_ratio(got, v)
        if ratio is None or (found is not None and ratio != found):
            return None
        found = ratio
    return found


def _constant_ratio(a, b):
    """a / b if it is a rational constant, else None."""
    da, db = a.to_dict(), b.to_dict()
    if set(da) != set(db):
        return None
    ratios = {Fraction(int(da[k].p), int(da[k].q)) / Fraction(int(db[k].p), int(db[k].q)) for k in db}
    return ratios.pop() if len(ratios) == 1 else None
