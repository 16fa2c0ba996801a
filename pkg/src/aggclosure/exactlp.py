"""Exact rational linear programming.

``simplex_max`` is a dense two-phase tableau simplex with Bland's rule,
solving ``max c x  s.t.  A x <= b, x >= 0`` (``b`` may have negative
entries).  The single-row solvers give the closed-form optimum for one
sign-pattern constraint and are checked against the simplex in the tests.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .model import (DimensionMismatch, ModelError, Objective, SignPatternPolyhedron,
                    as_matrix, as_vector, leq_form, magnitudes)

OPTIMAL = "Optimal"
UNBOUNDED = "Unbounded"
INFEASIBLE = "Infeasible"

ZERO = Fraction(0)


class NotSignCompatible(ModelError):
    pass


class NotSingleRow(ModelError):
    pass


@dataclass(frozen=True)
class LpSolution:
    status: str
    value: Optional[Fraction] = None
    primal: Optional[tuple[Fraction, ...]] = None
    dual: Optional[tuple[Fraction, ...]] = None
    ray: Optional[tuple[Fraction, ...]] = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _dot(u, v) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), ZERO)


def check_solution(A, b, c, sol: LpSolution) -> list[str]:
    """Independently re-verify an LP certificate; returns the list of failures."""
    A, b, c = as_matrix(A), as_vector(b), as_vector(c)
    m, n = len(b), len(c)
    cols = [[A[i][j] for i in range(m)] for j in range(n)]
    problems = []
    if sol.status == OPTIMAL:
        x, y = sol.primal, sol.dual
        if any(v < 0 for v in x):
            problems.append("primal has a negative entry")
        if any(_dot(A[i], x) > b[i] for i in range(m)):
            problems.append("primal violates a row")
        if any(v < 0 for v in y):
            problems.append("dual has a negative entry")
        if any(_dot(cols[j], y) < c[j] for j in range(n)):
            problems.append("dual violates A^T y >= c")
        if _dot(c, x) != sol.value:
            problems.append("reported value differs from c x")
        if _dot(b, y) != sol.value:
            problems.append("strong duality fails: b y != c x")
    elif sol.status == UNBOUNDED:
        d = sol.ray
        if any(v < 0 for v in d):
            problems.append("ray has a negative entry")
        if any(_dot(A[i], d) > 0 for i in range(m)):
            problems.append("ray is not a recession direction")
        if _dot(c, d) <= 0:
            problems.append("ray does not improve the objective")
    return problems


def _solve_square(M: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    k = len(rhs)
    aug = [list(M[i]) + [rhs[i]] for i in range(k)]
    for col in range(k):
        piv = next(r for r in range(col, k) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(k):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * bb for a, bb in zip(aug[r], aug[col])]
    return [aug[i][k] for i in range(k)]


class _Tableau:
    def __init__(self, rows, basis):
        self.T = rows            # each row: coefficients..., rhs
        self.basis = basis

    def pivot(self, r: int, j: int):
        T = self.T
        p = T[r][j]
        T[r] = [v / p for v in T[r]]
        pr = T[r]
        for i, row in enumerate(T):
            if i != r and row[j] != 0:
                f = row[j]
                T[i] = [a - f * bb for a, bb in zip(row, pr)]
        self.basis[r] = j

    def run(self, cost: list[Fraction], ncols: int):
        """Bland's-rule primal simplex over columns ``0..ncols-1``; returns None or the unbounded column."""
        T, basis = self.T, self.basis
        while True:
            cb = [cost[k] for k in basis]
            enter = None
            for j in range(ncols):
                r = cost[j] - sum((cb[i] * T[i][j] for i in range(len(T)) if T[i][j] != 0), ZERO)
                if r > 0:
                    enter = j
                    break
            if enter is None:
                return None
            best = None
            for i, row in enumerate(T):
                if row[enter] > 0:
                    key = (row[-1] / row[enter], basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return enter
            self.pivot(best[1], enter)


def simplex_max(A, b, c) -> LpSolution:
    """Solve ``max c x  s.t.  A x <= b, x >= 0`` exactly."""
    A, b, c = as_matrix(A), as_vector(b), as_vector(c)
    m, n = len(b), len(c)
    if len(A) != m or any(len(row) != n for row in A):
        raise DimensionMismatch(f"expected a {m}x{n} matrix")

    nart = sum(1 for v in b if v < 0)
    width = n + m + nart
    rows, basis = [], []
    a = n + m
    for i in range(m):
        row = list(A[i]) + [ZERO] * (m + nart) + [b[i]]
        row[n + i] = Fraction(1)
        if b[i] < 0:
            row = [-v for v in row]
            row[a] = Fraction(1)
            basis.append(a)
            a += 1
        else:
            basis.append(n + i)
        rows.append(row)
    tab = _Tableau(rows, basis)

    if nart:
        phase1 = [ZERO] * (n + m) + [Fraction(-1)] * nart
        tab.run(phase1, width)
        if any(tab.T[i][-1] != 0 for i in range(m) if tab.basis[i] >= n + m):
            return LpSolution(INFEASIBLE)
        for i in range(m):
            if tab.basis[i] >= n + m:
                j = next(j for j in range(n + m) if tab.T[i][j] != 0)
                tab.pivot(i, j)
        tab.T = [row[:n + m] + [row[-1]] for row in tab.T]

    cost = list(c) + [ZERO] * m
    enter = tab.run(cost, n + m)
    if enter is not None:
        d = [ZERO] * (n + m)
        d[enter] = Fraction(1)
        for i, k in enumerate(tab.basis):
            d[k] = -tab.T[i][enter]
        return LpSolution(UNBOUNDED, ray=tuple(d[:n]))

    full = [list(A[i]) + [Fraction(int(k == i)) for k in range(m)] for i in range(m)]
    x = [ZERO] * (n + m)
    for i, k in enumerate(tab.basis):
        x[k] = tab.T[i][-1]
    if m:
        B_T = [[full[i][k] for i in range(m)] for k in tab.basis]
        y = _solve_square(B_T, [cost[k] for k in tab.basis])
    else:
        y = []
    primal = tuple(x[:n])
    return LpSolution(OPTIMAL, value=_dot(c, primal), primal=primal, dual=tuple(y))


def lp_solve(P, obj: Objective) -> LpSolution:
    """LP relaxation of any polyhedron type; the value is in the objective's own sense."""
    A, b = leq_form(P)
    if obj.maximize:
        return simplex_max(A, b, obj.c)
    sol = simplex_max(A, b, [-v for v in obj.c])
    if sol.optimal:
        return LpSolution(OPTIMAL, value=-sol.value, primal=sol.primal, dual=sol.dual)
    return sol


# ---------------------------------------------------------------------------
# closed form for a single sign-pattern row

def _single_row_data(row: SignPatternPolyhedron, obj) -> tuple[tuple[Fraction, ...], Fraction, tuple[Fraction, ...]]:
    if row.m != 1:
        raise NotSingleRow(f"expected one constraint, got {row.m}")
    c = obj.c if isinstance(obj, Objective) else as_vector(obj)
    if isinstance(obj, Objective) and not obj.maximize:
        raise NotSignCompatible("single-row formulas assume maximization")
    if len(c) != row.n:
        raise DimensionMismatch(f"objective has length {len(c)}, expected {row.n}")
    if any(c[j] < 0 for j in row.jplus) or any(c[j] > 0 for j in row.jminus):
        raise NotSignCompatible("objective does not share the constraint's sign pattern")
    return magnitudes(row), row.b[0], c


def _unbounded_ray(row, a, c) -> Optional[tuple[Fraction, ...]]:
    n = row.n
    for j in sorted(row.jplus):
        if a[j] == 0 and c[j] > 0:
            return tuple(Fraction(int(k == j)) for k in range(n))
    ratios = [(c[j] / a[j], j) for j in sorted(row.jplus) if a[j] > 0]
    if not ratios:
        return None
    top, jstar = max(ratios, key=lambda t: (t[0], -t[1]))
    for k in sorted(row.jminus):
        if a[k] > 0 and -c[k] / a[k] < top:
            d = [ZERO] * n
            d[jstar], d[k] = a[k], a[jstar]
            return tuple(d)
    return None


def single_row_boundedness(row: SignPatternPolyhedron, obj) -> bool:
    """Ratio test: max over J+ of c_j/a_j must not exceed min over J- of -c_j/a_j."""
    a, _, c = _single_row_data(row, obj)
    return _unbounded_ray(row, a, c) is None


def _argmax_ratio(row, a, c) -> Optional[int]:
    best = None
    for j in sorted(row.jplus):
        if a[j] > 0 and c[j] > 0:
            r = c[j] / a[j]
            if best is None or r > best[0]:
                best = (r, j)
    return None if best is None else best[1]


def single_row_lp_opt(row: SignPatternPolyhedron, obj) -> LpSolution:
    a, b, c = _single_row_data(row, obj)
    ray = _unbounded_ray(row, a, c)
    if ray is not None:
        return LpSolution(UNBOUNDED, ray=ray)
    n = row.n
    jstar = _argmax_ratio(row, a, c)
    if jstar is None:
        return LpSolution(OPTIMAL, value=ZERO, primal=(ZERO,) * n, dual=(ZERO,))
    x = [ZERO] * n
    x[jstar] = b / a[jstar]
    y = c[jstar] / a[jstar]
    return LpSolution(OPTIMAL, value=c[jstar] * x[jstar], primal=tuple(x), dual=(y,))


def single_row_argmax(row: SignPatternPolyhedron, obj) -> Optional[int]:
    """Smallest index attaining the best positive ratio c_j/a_j over J+, or None."""
    a, _, c = _single_row_data(row, obj)
    return _argmax_ratio(row, a, c)
