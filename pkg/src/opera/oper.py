"""Matrix opers for sl_n, gauge canonicalization and the Miura map.

Conventions.  A matrix operator is ``d + A`` with ``-1`` on the subdiagonal
and arbitrary differential polynomials on and above the diagonal.  Its
canonical form has nonzero entries only in the first row,
``A[0][j] = -v_j``, which corresponds to the scalar operator
``d^n - v_1 d^(n-2) - ... - v_{n-1}`` acting on the last component.  For
n = 2 this is ``d^2 - v``.  Gauge transformations act by
``A -> g A g^-1 - (dg) g^-1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .coeffcore import TruncatedSeries
from .jetring import JetPolynomial, evaluate, total_derivative
from .psdo import PseudoDiffOp, compose

Matrix = list[list[JetPolynomial]]

MINUS_ONE = JetPolynomial.const(-1)


class ShapeError(ValueError):
    pass


class ConstraintError(ValueError):
    pass


def _zero():
    return JetPolynomial()


def identity(n: int) -> Matrix:
    return [[JetPolynomial.const(1) if i == j else _zero() for j in range(n)] for i in range(n)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = _zero()
            for k in range(n):
                if a[i][k] and b[k][j]:
                    acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def mat_add(a: Matrix, b: Matrix, sign: int = 1) -> Matrix:
    return [[x + y * sign for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_derivative(a: Matrix) -> Matrix:
    return [[total_derivative(x) for x in row] for row in a]


def unipotent_inverse(g: Matrix) -> Matrix:
    """(I + N)^-1 = sum (-N)^k for strictly upper triangular N."""
    n = len(g)
    nil = mat_add(g, identity(n), -1)
    if any(nil[i][j] for i in range(n) for j in range(i + 1)):
        raise ShapeError("gauge matrix is not unipotent upper triangular")
    result, term = identity(n), identity(n)
    for k in range(1, n):
        term = mat_mul(term, nil)
        result = mat_add(result, term, -1 if k % 2 else 1)
    return result


@dataclass(frozen=True)
class MatrixOper:
    """``d + A`` with -1 on the subdiagonal and zeros below it."""

    n: int
    entries: tuple

    def __init__(self, entries: Sequence[Sequence]):
        rows = tuple(tuple(JetPolynomial.lift(x) for x in row) for row in entries)
        n = len(rows)
        if n < 2 or any(len(r) != n for r in rows):
            raise ShapeError("entries must form a square matrix of size >= 2")
        for i in range(1, n):
            if rows[i][i - 1] != MINUS_ONE:
                raise ShapeError(f"subdiagonal entry ({i + 1},{i}) must be -1, got {rows[i][i - 1]}")
            for j in range(i - 1):
                if rows[i][j]:
                    raise ShapeError(f"entry ({i + 1},{j + 1}) below the subdiagonal must vanish")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "entries", rows)

    def matrix(self) -> Matrix:
        return [list(r) for r in self.entries]

    def trace(self) -> JetPolynomial:
        return sum((self.entries[i][i] for i in range(self.n)), _zero())


@dataclass(frozen=True)
class CanonicalOper:
    n: int
    v: tuple

    def matrix_oper(self) -> MatrixOper:
        rows = [[_zero() for _ in range(self.n)] for _ in range(self.n)]
        for j, vj in enumerate(self.v, start=1):
            rows[0][j] = -vj
        for i in range(1, self.n):
            rows[i][i - 1] = MINUS_ONE
        return MatrixOper(rows)

    def scalar_operator(self) -> PseudoDiffOp:
        return PseudoDiffOp.from_scalar_lax(list(self.v), self.n)


@dataclass(frozen=True)
class MiuraData:
    n: int
    u: tuple

    def __init__(self, u: Sequence):
        u = tuple(JetPolynomial.lift(x) for x in u)
        if sum(u, _zero()):
            raise ConstraintError(f"diagonal entries must sum to zero, got {sum(u, _zero())}")
        object.__setattr__(self, "n", len(u))
        object.__setattr__(self, "u", u)

    def matrix_oper(self) -> MatrixOper:
        rows = [[_zero() for _ in range(self.n)] for _ in range(self.n)]
        for i in range(self.n):
            rows[i][i] = self.u[i]
            if i:
                rows[i][i - 1] = MINUS_ONE
        return MatrixOper(rows)


def miura_diagonal(n: int) -> list[JetPolynomial]:
    """Standard traceless diagonal in fields u1..u_{n-1}.

    For n = 2 it is ``(-u, u)`` so that ``(d - u)(d + u) = d^2 - (u^2 - u')``;
    for larger n it is ``(u_1, ..., u_{n-1}, -u_1 - ... - u_{n-1})``.
    """
    if n == 2:
        u = JetPolynomial.var(1)
        return [-u, u]
    us = [JetPolynomial.var(i) for i in range(1, n)]
    return us + [-sum(us, _zero())]


def gauge(g: Matrix, A: Matrix) -> Matrix:
    """``g A g^-1 - (dg) g^-1`` for unipotent upper-triangular g."""
    ginv = unipotent_inverse(g)
    return mat_add(mat_mul(mat_mul(g, A), ginv), mat_mul(mat_derivative(g), ginv), -1)


def gauge_oper(g: Matrix, M: MatrixOper) -> MatrixOper:
    return MatrixOper(gauge(g, M.matrix()))


def _elementary(n: int, p: int, q: int, c: JetPolynomial) -> Matrix:
    g = identity(n)
    g[p][q] = c
    return g


def canonicalize(M: MatrixOper) -> tuple[CanonicalOper, Matrix]:
    """Return the canonical form of M and the gauge g carrying M to it.

    Entries are moved up their diagonal one elementary gauge at a time:
    level d (entries (k, k+d)) is swept from the bottom row to the top
    before level d+1, using the -1 below row k as pivot.
    """
    n = M.n
    if M.trace():
        raise ShapeError(f"trace must vanish for an sl_n oper, got {M.trace()}")
    A = M.matrix()
    total = identity(n)
    for d in range(n):
        for k in range(n - 1 - d, 0, -1):
            entry = A[k][k + d]
            if not entry:
                continue
            g = _elementary(n, k - 1, k + d, -entry)
            A = gauge(g, A)
            total = mat_mul(g, total)
    for i in range(1, n):
        for j in range(i, n):
            if A[i][j]:
                raise AssertionError(f"canonicalization left entry ({i + 1},{j + 1}) = {A[i][j]}")
    if A[0][0]:
        raise AssertionError("canonicalization left a diagonal entry in the first row")
    return CanonicalOper(n, tuple(-A[0][j] for j in range(1, n))), total


def scalar_operator(M: MatrixOper) -> PseudoDiffOp:
    """Eliminate to the monic scalar operator satisfied by the last component.

    The last component is untouched by upper-triangular gauges, so this is
    a gauge invariant computed without any gauge fixing.
    """
    n = M.n
    A = M.entries
    # express psi_i = ops[i] applied to psi_{n}
    ops: dict[int, PseudoDiffOp] = {n - 1: PseudoDiffOp.scalar(1)}
    d = PseudoDiffOp.d()
    for i in range(n - 1, 0, -1):
        # row i: psi_i' + sum_{j>=i} A[i][j] psi_j - psi_{i-1} = 0
        acc = compose(d, ops[i])
        for j in range(i, n):
            if A[i][j]:
                acc = acc + compose(PseudoDiffOp.scalar(A[i][j]), ops[j])
        ops[i - 1] = acc
    top = compose(d, ops[0])
    for j in range(n):
        if A[0][j]:
            top = top + compose(PseudoDiffOp.scalar(A[0][j]), ops[j])
    return top


def scalar_coefficients(L: PseudoDiffOp, n: int) -> list[JetPolynomial]:
    """Read v_1..v_{n-1} off ``d^n - sum v_i d^(n-1-i)``."""
    if L[n] != JetPolynomial.const(1) or L[n - 1]:
        raise ShapeError("expected a monic operator with vanishing subprincipal term")
    if any(k > n for k in L.coeffs):
        raise ShapeError(f"operator order exceeds {n}")
    return [-L[n - 1 - i] for i in range(1, n)]


def miura_expand(u: Sequence) -> list[JetPolynomial]:
    """v_1..v_{n-1} of ``(d + u_1)...(d + u_n)``; the u_i must sum to zero."""
    data = MiuraData(u)
    d = PseudoDiffOp.d()
    prod = PseudoDiffOp.scalar(1)
    for ui in data.u:
        prod = compose(prod, d + PseudoDiffOp.scalar(ui))
    return scalar_coefficients(prod, data.n)


# ---------------------------------------------------------------------------
# coordinate changes on the formal disc


class NonInvertibleError(ValueError):
    pass


def _check_phi(phi: TruncatedSeries):
    if phi.order < 4:
        raise ValueError("need phi to at least order 4")
    if phi[0] != 0:
        raise ValueError("phi must fix the origin (zero constant term)")
    if phi[1] == 0:
        raise NonInvertibleError("phi'(0) vanishes; the coordinate change is not invertible")


def schwarzian(phi: TruncatedSeries) -> TruncatedSeries:
    """``phi'''/phi' - 3/2 (phi''/phi')^2``."""
    d1 = phi.derivative()
    if d1[0] == 0:
        raise NonInvertibleError("phi'(0) vanishes")
    d2 = d1.derivative()
    d3 = d2.derivative()
    inv = d1.inverse()
    r = d2 * inv
    return d3 * inv - r * r * Fraction(3, 2)


def reparameterize(obj: TruncatedSeries, phi: TruncatedSeries, kind: str, k: int = 2,
                   rho: Fraction = Fraction(1, 2)) -> TruncatedSeries:
    """Pull a local object back along s -> phi(s).

    kind ``projective-connection``: ``v(phi) phi'^2 - 1/2 {phi, s}``.
    kind ``connection``: ``u(phi) phi' + rho phi''/phi'``.
    kind ``differential``: ``v(phi) phi'^k``.
    """
    _check_phi(phi)
    pulled = obj.compose(phi)
    d1 = phi.derivative()
    if kind == "projective-connection":
        return pulled * d1 * d1 - schwarzian(phi) * Fraction(1, 2)
    if kind == "connection":
        return pulled * d1 + d1.derivative() * d1.inverse() * rho
    if kind == "differential":
        return pulled * (d1 ** k)
    raise ValueError(f"unknown transformation kind {kind!r}")


def jet_series(field: int, order: int, var: str = "s") -> TruncatedSeries:
    """Generic Taylor series sum u^{(k)}/k! s^k with symbolic jet coefficients."""
    out = {}
    fact = 1
    for k in range(order):
        if k:
            fact *= k
        out[k] = JetPolynomial.var(field, k) * Fraction(1, fact)
    return TruncatedSeries(var, order, out)


def evaluate_on_series(p: JetPolynomial, series: dict[int, TruncatedSeries]) -> TruncatedSeries:
    """Evaluate a differential polynomial on concrete series (d = d/ds)."""
    values = {}
    for (i, k) in p.variables():
        s = series[i]
        for _ in range(k):
            s = s.derivative()
        values[(i, k)] = s
    out = evaluate(p, values)
    if not isinstance(out, TruncatedSeries):
        order = min(s.order for s in series.values())
        var = next(iter(series.values())).var
        out = TruncatedSeries.constant(var, order, out)
    return out


# ---------------------------------------------------------------------------
# nilpotent opers on the punctured disc


def nilpotent_residue(modes: dict[int, object]):
    """For ``d^2 - v`` with ``v(t) = sum_{n<=-1} v_n t^(-n-2)`` return v_{-1}."""
    bad = sorted(n for n, c in modes.items() if n > -1 and c)
    if bad:
        raise ShapeError(f"modes {bad} are not allowed for a nilpotent oper (need n <= -1)")
    return modes.get(-1, Fraction(0))


def random_unipotent(rng, n: int, fields: Sequence[int], max_order: int = 2) -> Matrix:
    from .jetring import random_jet_polynomial

    g = identity(n)
    for i in range(n):
        for j in range(i + 1, n):
            g[i][j] = random_jet_polynomial(rng, fields, max_order=max_order, max_degree=2, terms=2)
    return g


def mobius_series(a, b, c, d, order: int, var: str = "s") -> TruncatedSeries:
    """Taylor series of (a s + b)/(c s + d) at s = 0 (d must be nonzero)."""
    if d == 0:
        raise ValueError("d must be nonzero for a Taylor expansion at 0")
    num = TruncatedSeries(var, order, {0: Fraction(b), 1: Fraction(a)})
    den = TruncatedSeries(var, order, {0: Fraction(d), 1: Fraction(c)})
    return num * den.inverse()


def schwarzian_cocycle_defect(phi: TruncatedSeries, psi: TruncatedSeries) -> TruncatedSeries:
    """{phi o psi} - ({phi} o psi) psi'^2 - {psi}; vanishes identically."""
    d_psi = psi.derivative()
    return schwarzian(phi.compose(psi)) - schwarzian(phi).compose(psi) * d_psi * d_psi - schwarzian(psi)


def miura_equivariance_defect(phi: TruncatedSeries, order: int,
                              rho: Fraction = Fraction(1, 2)) -> TruncatedSeries:
    """mu(u transformed as a connection) - (mu(u) transformed as a projective connection).

    u is a generic Taylor series with jet coefficients and mu(u) = u^2 - u'.
    The result is certified below ``order``; phi needs order >= order + 3.
    """
    if phi.order < order + 3:
        raise ValueError(f"phi must be known to order {order + 3}")
    u = jet_series(1, order + 3, var=phi.var)
    v = u * u - u.derivative()
    u_new = reparameterize(u, phi, "connection", rho=rho)
    lhs = u_new * u_new - u_new.derivative()
    rhs = reparameterize(v, phi, "projective-connection")
    diff = lhs - rhs
    return diff.truncate(min(order, diff.order))
