"""Local Poisson structures given by matrix differential operators.

A bracket ``{w_a(t), w_b(s)} = P_ab(t, d_t) delta(t - s)`` is stored as the
matrix of differential operators ``P_ab``.  Mode brackets use
``w(t) = sum_n w_n t^(-n-Delta)`` and the residue pairing
``w_n = Res_t t^(n+Delta-1) w(t)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Sequence

from .coeffcore import solve_exact
from .jetring import (JetPolynomial, euler_derivative, frechet_coefficients, substitute,
                      total_derivative)
from .psdo import PseudoDiffOp, compose, conserved_density, lax_rhs

HEISENBERG_SCALE = Fraction(-1, 4)


# ---------------------------------------------------------------------------
# Cartan data


@dataclass(frozen=True)
class CartanData:
    """Type A_rank, roots normalized to (alpha, alpha) = 2."""

    rank: int

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be positive")

    @property
    def cartan_matrix(self) -> list[list[int]]:
        r = self.rank
        return [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(r)] for i in range(r)]

    def inner(self, i: int, j: int) -> Fraction:
        """(alpha_i, alpha_j) for 1-based indices."""
        return Fraction(self.cartan_matrix[i - 1][j - 1])

    @property
    def inner_product_matrix(self) -> list[list[Fraction]]:
        return [[self.inner(i, j) for j in range(1, self.rank + 1)] for i in range(1, self.rank + 1)]

    @property
    def dual_coxeter(self) -> int:
        return self.rank + 1

    @property
    def rho_vee(self) -> list[Fraction]:
        """Coefficients of rho-check in the simple coroots: i(n - i)/2."""
        n = self.rank + 1
        return [Fraction(i * (n - i), 2) for i in range(1, n)]

    def is_positive_definite(self) -> bool:
        # leading principal minors of the A_r matrix are 2, 3, ..., r + 1
        m = self.inner_product_matrix
        return all(_det([row[:k] for row in m[:k]]) > 0 for k in range(1, self.rank + 1))


def _det(m: list[list[Fraction]]) -> Fraction:
    m = [list(r) for r in m]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return det


# ---------------------------------------------------------------------------
# operators


def adjoint(P: PseudoDiffOp) -> PseudoDiffOp:
    """Formal adjoint of a differential operator: sum (-d)^k o a_k."""
    if not P.is_differential():
        raise ValueError("adjoint is taken of exact differential operators")
    out = PseudoDiffOp({})
    for k, a in P.coeffs.items():
        term = compose(PseudoDiffOp.d(k), PseudoDiffOp.scalar(a))
        out = out + (term if k % 2 == 0 else -term)
    return PseudoDiffOp(out.coeffs)


class NotSkewAdjoint(ValueError):
    pass


class HamiltonianOperator:
    """Square matrix of differential operators, skew-adjoint by construction."""

    def __init__(self, entries: Sequence[Sequence[PseudoDiffOp]], fields: Sequence[int] | None = None,
                 check: bool = True):
        self.entries = [[PseudoDiffOp(e.coeffs) if isinstance(e, PseudoDiffOp) else PseudoDiffOp.scalar(e)
                         for e in row] for row in entries]
        self.size = len(self.entries)
        if any(len(r) != self.size for r in self.entries):
            raise ValueError("operator matrix must be square")
        self.fields = list(fields) if fields is not None else list(range(1, self.size + 1))
        self.rewritten = True
        if check and not self.is_skew_adjoint():
            raise NotSkewAdjoint("operator matrix is not skew-adjoint")

    @classmethod
    def scalar(cls, op: PseudoDiffOp, field_index: int = 1, check: bool = True):
        return cls([[op]], [field_index], check)

    def adjoint(self) -> "HamiltonianOperator":
        n = self.size
        return HamiltonianOperator([[adjoint(self.entries[j][i]) for j in range(n)] for i in range(n)],
                                   self.fields, check=False)

    def is_skew_adjoint(self) -> bool:
        adj = self.adjoint()
        return all(adj.entries[i][j].coeffs == (-self.entries[i][j]).coeffs
                   for i in range(self.size) for j in range(self.size))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        if not isinstance(other, HamiltonianOperator):
            return NotImplemented
        return self.fields == other.fields and all(
            a.coeffs == b.coeffs for ra, rb in zip(self.entries, other.entries) for a, b in zip(ra, rb))

    __hash__ = None

    def apply(self, vector: Sequence[JetPolynomial]) -> list[JetPolynomial]:
        return [sum((self.entries[i][j].apply(vector[j]) for j in range(self.size)), JetPolynomial())
                for i in range(self.size)]

    def __str__(self):
        if self.size == 1:
            return str(self.entries[0][0])
        return "[" + "; ".join(", ".join(str(e) for e in row) for row in self.entries) + "]"


def heisenberg_operator(c: CartanData) -> HamiltonianOperator:
    """``-1/4 (alpha_i, alpha_j) d`` on the simple-root fields u_1..u_rank."""
    r = c.rank
    return HamiltonianOperator(
        [[PseudoDiffOp({1: HEISENBERG_SCALE * c.inner(i, j)}) for j in range(1, r + 1)] for i in range(1, r + 1)])


def heisenberg_diagonal(n: int) -> HamiltonianOperator:
    """Heisenberg structure in the diagonal coordinates u_1..u_{n-1} of a traceless diagonal.

    With the last entry eliminated by ``u_n = -sum u_i`` the bracket matrix
    is ``-(delta_kl - 1/n) d``; for n = 2 this is ``-1/2 d``.
    """
    m = n - 1
    return HamiltonianOperator(
        [[PseudoDiffOp({1: -(Fraction(int(k == l)) - Fraction(1, n))}) for l in range(m)] for k in range(m)])


# ---------------------------------------------------------------------------
# pushforward along a differential-polynomial map


def _weight(var, field_weights) -> int:
    (i, k) = var
    return field_weights[i] + k


def _poly_weights(p: JetPolynomial, field_weights) -> set[int]:
    out = set()
    for (zp, vs) in p.terms:
        out.add(sum(_weight(v, field_weights) * e for v, e in vs))
    return out


def _monomials_of_weight(w: int, field_weights: dict[int, int]) -> list[JetPolynomial]:
    """All monomials in jet variables of the given total weight."""
    atoms = []
    for i, wi in field_weights.items():
        for k in range(0, w - wi + 1):
            atoms.append((i, k))
    atoms.sort()
    results = []

    def rec(start: int, remaining: int, chosen: list):
        if remaining == 0:
            term = JetPolynomial.const(1)
            for v in chosen:
                term = term * JetPolynomial.var(*v)
            results.append(term)
            return
        for idx in range(start, len(atoms)):
            wt = _weight(atoms[idx], field_weights)
            if wt <= remaining:
                rec(idx, remaining - wt, chosen + [atoms[idx]])

    rec(0, w, [])
    return results


def rewrite_in_targets(c: JetPolynomial, mu: dict[int, JetPolynomial], target_weights: dict[int, int],
                       source_weights: dict[int, int]) -> JetPolynomial | None:
    """Find p with p(mu) = c by a weighted-homogeneous linear solve, or None."""
    if not c:
        return JetPolynomial()
    result = JetPolynomial()
    parts: dict[int, JetPolynomial] = {}
    for m, coeff in c.terms.items():
        w = sum(_weight(v, source_weights) * e for v, e in m[1])
        parts[w] = parts.get(w, JetPolynomial()) + JetPolynomial({m: coeff})
    for w, part in parts.items():
        if any(m[0] for m in part.terms):
            return None
        candidates = _monomials_of_weight(w, target_weights)
        images = [substitute(m, mu) for m in candidates]
        keys = sorted(set().union(*(im.terms for im in images), part.terms), key=repr)
        matrix = [[im.terms.get(k, Fraction(0)) for im in images] for k in keys]
        rhs = [part.terms.get(k, Fraction(0)) for k in keys]
        sol = solve_exact(matrix, rhs) if candidates else None
        if sol is None:
            return None
        for x, m in zip(sol, candidates):
            if x != 0:
                result = result + m * x
    return result


def frechet_matrix(mu: Sequence[JetPolynomial], source_fields: Sequence[int]) -> list[list[PseudoDiffOp]]:
    return [[PseudoDiffOp.differential(frechet_coefficients(p, i)) for i in source_fields] for p in mu]


def pushforward_structure(mu: Sequence[JetPolynomial], P: HamiltonianOperator,
                          target_weights: dict[int, int] | None = None,
                          source_weights: dict[int, int] | None = None) -> HamiltonianOperator:
    """``D_mu P D_mu^*`` re-expressed in the target fields when possible.

    ``mu[a]`` gives target field a+1 in terms of the source fields of P.
    The result's ``rewritten`` flag is False when some coefficient has no
    expression in the target fields; it is then left in the source fields.
    """
    D = frechet_matrix(mu, P.fields)
    rows, cols = len(mu), len(P.fields)
    Dstar = [[adjoint(D[b][j]) for b in range(rows)] for j in range(cols)]
    DP = [[sum((compose(D[a][i], P.entries[i][j]) for i in range(cols)), PseudoDiffOp({}))
           for j in range(cols)] for a in range(rows)]
    Q = [[PseudoDiffOp(sum((compose(DP[a][j], Dstar[j][b]) for j in range(cols)), PseudoDiffOp({})).coeffs)
          for b in range(rows)] for a in range(rows)]
    if target_weights is None:
        target_weights = {a + 1: a + 2 for a in range(rows)}
    if source_weights is None:
        source_weights = {i: 1 for i in P.fields}
    assign = {a + 1: mu[a] for a in range(rows)}
    rewritten = []
    ok = True
    for row in Q:
        new_row = []
        for op in row:
            coeffs = {}
            for k, c in op.coeffs.items():
                r = rewrite_in_targets(c, assign, target_weights, source_weights)
                if r is None:
                    ok = False
                    break
                coeffs[k] = r
            new_row.append(PseudoDiffOp(coeffs) if ok else op)
            if not ok:
                break
        rewritten.append(new_row)
        if not ok:
            break
    if ok:
        out = HamiltonianOperator(rewritten, list(range(1, rows + 1)), check=False)
    else:
        out = HamiltonianOperator(Q, list(range(1, rows + 1)), check=False)
        out.rewritten = False
    return out


def virasoro_operator() -> HamiltonianOperator:
    """``1/2 d^3 - 2 v d - v'`` in the field v = u1."""
    v = JetPolynomial.var(1)
    return HamiltonianOperator.scalar(PseudoDiffOp({3: Fraction(1, 2), 1: -2 * v, 0: -total_derivative(v)}))


# ---------------------------------------------------------------------------
# mode brackets


def falling(x: int, k: int) -> int:
    out = 1
    for r in range(k):
        out *= x - r
    return out


class NonlinearCoefficient(ValueError):
    pass


@dataclass
class ModeValue:
    """Linear combination of modes plus a central constant."""

    modes: dict = field(default_factory=dict)
    central: object = Fraction(0)

    def add_mode(self, key, c):
        v = self.modes.get(key, 0) + c
        if v == 0:
            self.modes.pop(key, None)
        else:
            self.modes[key] = v

    def __add__(self, other: "ModeValue") -> "ModeValue":
        out = ModeValue(dict(self.modes), self.central + other.central)
        for k, c in other.modes.items():
            out.add_mode(k, c)
        return out

    def scale(self, c) -> "ModeValue":
        out = ModeValue({}, self.central * c)
        for k, v in self.modes.items():
            out.add_mode(k, v * c)
        return out

    def is_zero(self) -> bool:
        return not self.modes and self.central == 0

    def __eq__(self, other):
        return isinstance(other, ModeValue) and self.modes == other.modes and self.central == other.central

    def __str__(self):
        parts = [f"{c}*w{a}_{n}" for (a, n), c in sorted(self.modes.items())]
        if self.central != 0 or not parts:
            parts.append(str(self.central))
        return " + ".join(parts)


class ModeBracketTable:
    """Mode brackets of a Hamiltonian operator with linear coefficients."""

    def __init__(self, P: HamiltonianOperator, weights: Sequence[int] | int, window: int):
        self.P = P
        self.weights = [weights] * P.size if isinstance(weights, int) else list(weights)
        self.window = window
        for row in P.entries:
            for op in row:
                for c in op.coeffs.values():
                    if c.degree() > 1 or any(m[0] for m in c.terms):
                        raise NonlinearCoefficient(f"mode brackets need coefficients linear in the fields, got {c}")
        self._cache: dict = {}

    def bracket(self, a: int, n: int, b: int, m: int) -> ModeValue:
        """{w_{a,n}, w_{b,m}} for 1-based field positions a, b."""
        key = (a, n, b, m)
        if key in self._cache:
            return self._cache[key]
        da, db = self.weights[a - 1], self.weights[b - 1]
        M = m + db - 1
        out = ModeValue()
        for k, coeff in self.P.entries[a - 1][b - 1].coeffs.items():
            ff = falling(M, k)
            if ff == 0:
                continue
            for (zp, vs), c in coeff.terms.items():
                if not vs:
                    # Res_t t^(n+da-1) t^(M-k)
                    if n + da - 1 + M - k == -1:
                        out.central = out.central + c * ff
                    continue
                ((j, r), _), = vs
                pos = self.P.fields.index(j) + 1
                dj = self.weights[pos - 1]
                p = n + da - 1 + M - k - r - dj + 1
                out.add_mode((pos, p), c * ff * falling(-p - dj, r))
        self._cache[key] = out
        return out

    def entries(self):
        W = self.window
        for a in range(1, self.P.size + 1):
            for b in range(1, self.P.size + 1):
                for n in range(-W, W + 1):
                    for m in range(-W, W + 1):
                        yield (a, n, b, m), self.bracket(a, n, b, m)

    def is_skew_symmetric(self) -> bool:
        return all(val + self.bracket(b, m, a, n) == ModeValue() for (a, n, b, m), val in self.entries())

    def bracket_with(self, value: ModeValue, b: int, m: int) -> ModeValue:
        """{value, w_{b,m}} extended linearly; central parts bracket to zero."""
        out = ModeValue()
        for (a, n), c in value.modes.items():
            out = out + self.bracket(a, n, b, m).scale(c)
        return out

    def jacobi_failures(self, a: int = 1) -> list[tuple[int, int, int]]:
        W = self.window
        bad = []
        rng = range(-W, W + 1)
        for x in rng:
            for y in rng:
                for z in rng:
                    total = (self.bracket_with(self.bracket(a, x, a, y), a, z)
                             + self.bracket_with(self.bracket(a, y, a, z), a, x)
                             + self.bracket_with(self.bracket(a, z, a, x), a, y))
                    if not total.is_zero():
                        bad.append((x, y, z))
        return bad


def mode_bracket(P: HamiltonianOperator, weights, window: int) -> ModeBracketTable:
    return ModeBracketTable(P, weights, window)


def virasoro_mode_value(n: int, m: int) -> ModeValue:
    """(n - m) v_{n+m} - 1/2 (n^3 - n) delta_{n,-m}."""
    out = ModeValue()
    if n != m:
        out.add_mode((1, n + m), Fraction(n - m))
    if n + m == 0:
        out.central = Fraction(-(n ** 3 - n), 2)
    return out


def heisenberg_mode_value(n: int, m: int) -> ModeValue:
    """1/2 n delta_{n,-m}."""
    return ModeValue({}, Fraction(n, 2) if n + m == 0 else Fraction(0))


def miura_linear_central_term(table: ModeBracketTable, n: int, m: int):
    """Central part of {(n+1) u_n, (m+1) u_m} under a Heisenberg table."""
    return table.bracket(1, n, 1, m).scale((n + 1) * (m + 1)).central


# ---------------------------------------------------------------------------
# flows


def hamiltonian_flow(P: HamiltonianOperator, H: JetPolynomial) -> list[JetPolynomial]:
    """``P (delta H / delta w)``."""
    grad = [euler_derivative(H, i) for i in P.fields]
    return P.apply(grad)


def evolve_under(mu: Sequence[JetPolynomial], source_flow: Sequence[JetPolynomial],
                 source_fields: Sequence[int]) -> list[JetPolynomial]:
    """Induced time derivative of mu given time derivatives of the source fields."""
    D = frechet_matrix(mu, source_fields)
    return [sum((D[a][i].apply(source_flow[i]) for i in range(len(source_fields))), JetPolynomial())
            for a in range(len(mu))]


def proportionality(a: Sequence[JetPolynomial], b: Sequence[JetPolynomial]):
    """Return c with a = c * b componentwise, or None."""
    c = None
    for x, y in zip(a, b):
        if not y:
            if x:
                return None
            continue
        m = next(iter(y.terms))
        ratio = x.terms.get(m, Fraction(0)) / y.terms[m]
        if c is None:
            c = ratio
        elif c != ratio:
            return None
        if x != y * ratio:
            return None
    return c


def kdv_miura_map() -> JetPolynomial:
    """v = u^2 - u' in the source field u = u1."""
    u = JetPolynomial.var(1)
    return u * u - total_derivative(u)


def modified_flow(n: int, m: int) -> list[JetPolynomial]:
    """Heisenberg flow of res L^(m/n) pulled back along the Miura map.

    Source fields are the diagonal coordinates u_1..u_{n-1}.
    """
    from .oper import miura_diagonal, miura_expand

    mu = miura_expand(miura_diagonal(n))
    H = substitute(conserved_density(n, m), {i + 1: p for i, p in enumerate(mu)})
    return hamiltonian_flow(heisenberg_diagonal(n), H)


def mkdv_flow(m: int) -> JetPolynomial:
    return modified_flow(2, m)[0]


def intertwining_constant(m: int):
    """c with D_mu(mKdV_m) = c * (KdV_m o mu), or None when not proportional."""
    mu = kdv_miura_map()
    lhs = evolve_under([mu], [mkdv_flow(m)], [1])
    rhs = [substitute(p, {1: mu}) for p in lax_rhs(2, m)]
    return proportionality(lhs, rhs)
