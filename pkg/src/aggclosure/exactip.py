"""Exact integer optimisation for small systems.

Bounds in :class:`IpResult` are always in the objective's own sense:
``lower <= z_IP <= upper``.  For a maximisation the incumbent value is
``lower``; for a minimisation it is ``upper``.
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .exactlp import INFEASIBLE, UNBOUNDED, simplex_max, single_row_argmax, single_row_lp_opt
from .model import (CoveringPolyhedron, DimensionMismatch, ModelError, Objective, PackingPolyhedron,
                    SignPatternPolyhedron, leq_form, magnitudes)

BOX_CERTIFIED = "BoxCertified"
BNB_CLOSED = "BnbClosed"
ROUNDING_BOUND = "RoundingBound"
ANALYTIC_CASE = "AnalyticCase"

DEFAULT_BUDGET = 10 ** 8
DEFAULT_NODE_LIMIT = 10 ** 5
_CHUNK = 1 << 18

INF = math.inf


class BoxTooLarge(ModelError):
    pass


class InvalidObjectiveSign(ModelError):
    pass


class RootUnbounded(ModelError):
    pass


class UnboundedRow(ModelError):
    pass


class OddM(ModelError):
    pass


class RangeTooSmall(ModelError):
    pass


@dataclass(frozen=True)
class Box:
    upper: tuple[int, ...]
    certified: bool
    warnings: tuple[str, ...] = ()

    @property
    def size(self) -> int:
        return math.prod(u + 1 for u in self.upper)


@dataclass(frozen=True)
class IpResult:
    best_point: Optional[tuple[Fraction, ...]]
    lower: object
    upper: object
    exact: bool
    certificate: Optional[str]
    sense: str = "max"
    nodes: int = 0
    notes: dict = field(default_factory=dict, compare=False)

    @property
    def value(self):
        """Objective value of the incumbent (None when there is none)."""
        if self.best_point is None:
            return None
        return self.lower if self.sense == "max" else self.upper


def box_for_packing(P: PackingPolyhedron) -> Box:
    upper, warnings = [], []
    for j in range(P.n):
        caps = [P.b[i] // P.A[i][j] for i in range(P.m) if P.A[i][j] > 0]
        if caps:
            upper.append(int(min(caps)))
        else:
            upper.append(0)
            warnings.append(f"ZeroColumn({j + 1})")
    return Box(tuple(upper), certified=not warnings, warnings=tuple(warnings))


def box_for_covering(P: CoveringPolyhedron, obj: Objective) -> Box:
    # clamping x_j to U_j keeps every row with A_ij > 0 satisfied and cannot raise a c >= 0 cost
    if any(v < 0 for v in obj.c):
        raise InvalidObjectiveSign("covering boxes need a non-negative cost vector")
    upper = []
    for j in range(P.n):
        caps = [-(-P.b[i] // P.A[i][j]) for i in range(P.m) if P.A[i][j] > 0]
        upper.append(int(max(caps)) if caps else 0)
    return Box(tuple(upper), certified=True)


def _integer_rows(A, b):
    rows, rhs = [], []
    for row, v in zip(A, b):
        scale = math.lcm(*(q.denominator for q in row), v.denominator)
        rows.append([int(q * scale) for q in row])
        rhs.append(int(v * scale))
    return rows, rhs


def _max_form(P, obj: Objective):
    if len(obj.c) != P.n:
        raise DimensionMismatch(f"objective has length {len(obj.c)}, expected {P.n}")
    A, b = leq_form(P)
    c = obj.c if obj.maximize else tuple(-v for v in obj.c)
    return A, b, c


def _result(sense, point, best, bound, exact, cert, nodes=0, notes=None):
    """Build an IpResult from max-form incumbent ``best`` and max-form ``bound``."""
    if sense == "max":
        lower, upper = best, bound
    else:
        lower, upper = -bound, -best
    return IpResult(point, lower, upper, exact, cert, sense, nodes, notes or {})


def enumerate_ip(P, obj: Objective, box: Box, budget: int = DEFAULT_BUDGET) -> IpResult:
    """Scan every lattice point of the box; ties go to the lexicographically smallest point."""
    n = P.n
    if len(box.upper) != n:
        raise DimensionMismatch(f"box has {len(box.upper)} bounds, expected {n}")
    if box.size > budget:
        raise BoxTooLarge(f"box holds {box.size} lattice points, budget is {budget}")
    A, b, c = _max_form(P, obj)
    Ai, bi = _integer_rows(A, b)
    cscale = math.lcm(*(q.denominator for q in c)) if c else 1
    ci = [int(q * cscale) for q in c]

    U = list(box.upper)
    magnitude = max([sum(abs(a) * u for a, u in zip(row, U)) + abs(r) for row, r in zip(Ai, bi)]
                    + [sum(abs(a) * u for a, u in zip(ci, U))] + [1])
    dtype = np.int64 if magnitude < 2 ** 62 else object

    split = n
    while split > 0 and math.prod(u + 1 for u in U[split - 1:]) <= _CHUNK:
        split -= 1
    tail_shape = tuple(u + 1 for u in U[split:])
    tail = np.indices(tail_shape, dtype=np.int64).reshape(len(tail_shape), -1)
    if dtype is object:
        tail = tail.astype(object)
    A_tail = np.array([row[split:] for row in Ai], dtype=dtype).reshape(len(Ai), n - split)
    c_tail = np.array(ci[split:], dtype=dtype)
    lhs_tail = A_tail @ tail if Ai else None
    val_tail = c_tail @ tail if n - split else np.zeros(tail.shape[1], dtype=dtype)

    best_val, best_pt = None, None
    for head in itertools.product(*(range(u + 1) for u in U[:split])):
        slack = [r - sum(a * h for a, h in zip(row[:split], head)) for row, r in zip(Ai, bi)]
        if lhs_tail is not None:
            mask = np.all(lhs_tail <= np.array(slack, dtype=dtype).reshape(-1, 1), axis=0)
        else:
            mask = np.ones(tail.shape[1], dtype=bool)
        if not mask.any():
            continue
        vals = np.where(mask, val_tail, 0)
        idx = np.flatnonzero(mask)
        k = idx[np.argmax(vals[idx])]
        v = int(vals[k]) + sum(a * h for a, h in zip(ci[:split], head))
        if best_val is None or v > best_val:
            best_val = v
            best_pt = tuple(Fraction(int(t)) for t in (*head, *tail[:, k]))

    if best_val is None:
        best, bound = -INF, (-INF if box.certified else INF)
        return _result(obj.sense, None, best, bound, box.certified, BOX_CERTIFIED if box.certified else None)
    best = Fraction(best_val, cscale)
    bound = best if box.certified else INF
    return _result(obj.sense, best_pt, best, bound, box.certified, BOX_CERTIFIED if box.certified else None,
                   notes={} if box.certified else {"box": "not certified"})


def _node_lp(A, b, c, lo, hi):
    n = len(c)
    rows, rhs = [list(r) for r in A], list(b)
    for j in range(n):
        if hi[j] is not None:
            rows.append([Fraction(int(k == j)) for k in range(n)])
            rhs.append(Fraction(hi[j]))
        if lo[j] > 0:
            rows.append([Fraction(-int(k == j)) for k in range(n)])
            rhs.append(Fraction(-lo[j]))
    return simplex_max(rows, rhs, c)


def _most_fractional(x) -> Optional[int]:
    best = None
    for j, v in enumerate(x):
        frac = v - math.floor(v)
        if frac == 0:
            continue
        dist = min(frac, 1 - frac)
        if best is None or dist > best[0]:
            best = (dist, j)
    return None if best is None else best[1]


def _floor_point(A, b, x, hi) -> Optional[tuple[Fraction, ...]]:
    """The rounded-down LP point when it satisfies every row (it already respects the node bounds)."""
    y = tuple(Fraction(math.floor(v)) for v in x)
    if all(h is None or v <= h for v, h in zip(y, hi)) and \
            all(sum(a * v for a, v in zip(row, y)) <= r for row, r in zip(A, b)):
        return y
    return None


def branch_and_bound(P, obj: Objective, box: Optional[Box] = None,
                     node_limit: int = DEFAULT_NODE_LIMIT) -> IpResult:
    """Best-bound LP-based branch and bound, branching on the most fractional variable.

    Integer points give objective values on the grid (1/d)Z, d the lcm of the cost
    denominators, so node bounds are rounded down to that grid before pruning.
    """
    A, b, c = _max_form(P, obj)
    n = P.n
    if box is not None and len(box.upper) != n:
        raise DimensionMismatch(f"box has {len(box.upper)} bounds, expected {n}")
    d = math.lcm(*(q.denominator for q in c)) if c else 1

    def grid(v):
        return Fraction(math.floor(v * d), d)

    lo0 = tuple([0] * n)
    hi0 = tuple(box.upper) if box is not None else tuple([None] * n)

    root = _node_lp(A, b, c, lo0, hi0)
    nodes = 1
    if root.status == UNBOUNDED:
        raise RootUnbounded("the LP relaxation at the root is unbounded")
    if root.status == INFEASIBLE:
        return _result(obj.sense, None, -INF, -INF, True, BNB_CLOSED, nodes)

    inc_val, inc_pt = -INF, None
    counter = itertools.count()
    heap = [(-grid(root.value), next(counter), lo0, hi0, root)]
    closed = True
    while heap:
        bound = -heap[0][0]
        if bound <= inc_val:
            heap = []
            break
        if nodes >= node_limit:
            closed = False
            break
        _, _, lo, hi, sol = heapq.heappop(heap)
        j = _most_fractional(sol.primal)
        if j is None:
            if sol.value > inc_val:
                inc_val, inc_pt = sol.value, sol.primal
            continue
        rounded = _floor_point(A, b, sol.primal, hi)
        if rounded is not None:
            v = sum((cj * xj for cj, xj in zip(c, rounded)), Fraction(0))
            if v > inc_val:
                inc_val, inc_pt = v, rounded
            if grid(sol.value) <= inc_val:
                continue
        v = sol.primal[j]
        down_hi = hi[:j] + (math.floor(v),) + hi[j + 1:]
        up_lo = lo[:j] + (math.ceil(v),) + lo[j + 1:]
        for clo, chi in ((lo, down_hi), (up_lo, hi)):
            child = _node_lp(A, b, c, clo, chi)
            nodes += 1
            if child.optimal and grid(child.value) > inc_val:
                heapq.heappush(heap, (-grid(child.value), next(counter), clo, chi, child))

    if closed:
        bound = inc_val
    else:
        bound = max(inc_val, -heap[0][0])
    notes = {}
    certified_box = box is None or box.certified
    if not certified_box:
        free = _node_lp(A, b, c, lo0, tuple([None] * n))
        bound = INF if free.status == UNBOUNDED else max(grid(free.value), inc_val)
        notes["box"] = "not certified"
    exact = closed and certified_box
    return _result(obj.sense, inc_pt, inc_val, bound, exact, BNB_CLOSED if exact else None, nodes, notes)


def single_row_ip_lower_bound(row: SignPatternPolyhedron, obj) -> Fraction:
    """Objective value of the rounded-down closed-form LP optimum (never below the origin's 0)."""
    if single_row_lp_opt(row, obj).status == UNBOUNDED:
        raise UnboundedRow("the single-row LP is unbounded")
    jstar = single_row_argmax(row, obj)
    if jstar is None:
        return Fraction(0)
    c = obj.c if isinstance(obj, Objective) else tuple(Fraction(v) for v in obj)
    a = magnitudes(row)[jstar]
    return max(Fraction(0), c[jstar] * (row.b[0] // a))


def family2_slices(M: int, x1_max: int) -> dict[int, tuple[Fraction, tuple[int, int, int]]]:
    """Per-x1 optimum of the reduced aggregated problem, with an attaining (x1, x2, x3)."""
    h = M // 2
    out = {}
    for x1 in range(x1_max + 1):
        best = None
        for x3 in range(0, -(-x1 // h) + 2):
            if x1 > 1 + h + h * x3:
                continue
            x2 = max(0, -(-(x1 - 1 - h * x3) // M))
            cost = h * (x2 + x3)
            if best is None or cost < best[0]:
                best = (cost, (x1, x2, x3))
        out[x1] = (Fraction(x1 - best[0]), best[1])
    return out


def family2_case(M: int, x1: int) -> str:
    h = M // 2
    if x1 == 0:
        return "x1=0"
    if x1 == 1:
        return "x1=1"
    if x1 <= h + 1:
        return "2<=x1<=M/2+1"
    return f"band k={(x1 - 2) // h}"


def family2_aggregated_ip(M: int, x1_max: Optional[int] = None) -> IpResult:
    """Optimum of the family-2 system aggregated with (1,1,0,0) and (0,0,1,1), by per-x1 case scan.

    x3 and x4 are interchangeable in that system, so x4 is dropped.  The scan
    covers x1 <= x1_max and checks the per-case bounds on every slice; larger x1
    is covered by the analytic band argument, which the notes record.
    """
    if M < 2 or M % 2:
        raise OddM(f"M must be an even integer >= 2, got {M}")
    if x1_max is None:
        x1_max = 4 * M + 2
    if x1_max < M + 2:
        raise RangeTooSmall(f"x1_max must be at least M+2 = {M + 2}")
    slices = family2_slices(M, x1_max)
    cases: dict[str, Fraction] = {}
    for x1, (v, _) in slices.items():
        tag = family2_case(M, x1)
        cases[tag] = max(cases.get(tag, v), v)
    bounds_hold = cases["x1=0"] <= 0 and cases["x1=1"] == 1 and all(
        v <= 1 for tag, v in cases.items() if tag not in ("x1=0", "x1=1"))
    value = max(v for v, _ in slices.values())
    x1, x2, x3 = next(pt for v, pt in slices.values() if v == value)
    point = tuple(Fraction(t) for t in (x1, x2, x3, 0))
    notes = {
        "slice_max": {x1: v for x1, (v, _) in slices.items()},
        "case_max": cases,
        "case_bounds_hold": bounds_hold,
        "x1_max": x1_max,
        "beyond_range": "x1 > x1_max covered by the analytic band argument, not by enumeration",
    }
    return IpResult(point, value, value, True, ANALYTIC_CASE, "max", 0, notes)
