"""Certified objective-value intervals for aggregation and row closures.

Closures are never built as inequality systems.  Upper bounds come from
integer optima (or valid branch-and-bound bounds) of explicit relaxations;
lower bounds come from points with integer-hull membership certificates,
integer incumbents, or the factor-2 bound for single aggregations.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .exactip import RootUnbounded, branch_and_bound
from .exactlp import OPTIMAL, lp_solve, simplex_max
from .families import family1_lambda_star, family2, family2_lambda_bar, family2_mu_bar, recognize_family
from .model import (AggregationWeights, ModelError, Objective, PackingPolyhedron, SignPatternPolyhedron,
                    aggregate_k, as_vector, format_rational, is_feasible, is_integral)

INF = math.inf


class CertificateError(ModelError):
    pass


class SupportPointInfeasible(CertificateError):
    def __init__(self, k: int):
        self.k = k
        super().__init__(f"SupportPointInfeasible({k + 1})")


class SupportPointFractional(CertificateError):
    def __init__(self, k: int):
        self.k = k
        super().__init__(f"SupportPointFractional({k + 1})")


class NoConvexCombination(CertificateError):
    pass


class BadSubset(ModelError):
    pass


@dataclass(frozen=True)
class BoundInterval:
    lower: object
    upper: object
    lower_witness: str = ""
    upper_witness: str = ""
    certificates: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.lower > self.upper:
            raise ModelError(f"empty interval [{self.lower}, {self.upper}]")

    @property
    def collapsed(self) -> bool:
        return self.lower == self.upper


@dataclass(frozen=True)
class HullMembershipCertificate:
    target: tuple[Fraction, ...]
    support_points: tuple[tuple[Fraction, ...], ...]
    weights: tuple[Fraction, ...]
    rows: Optional[tuple[int, ...]] = None

    def verify(self, relaxation) -> bool:
        """Re-check every condition from scratch."""
        if len(self.weights) != len(self.support_points):
            return False
        if any(w < 0 for w in self.weights) or sum(self.weights) != 1:
            return False
        n = len(self.target)
        for j in range(n):
            if sum((w * p[j] for w, p in zip(self.weights, self.support_points)), Fraction(0)) != self.target[j]:
                return False
        return all(is_integral(p) and is_feasible(relaxation, p) for p in self.support_points)

    def to_json(self) -> dict:
        return {
            "rows": None if self.rows is None else [i + 1 for i in self.rows],
            "target": [format_rational(v) for v in self.target],
            "support_points": [[format_rational(v) for v in p] for p in self.support_points],
            "weights": [format_rational(w) for w in self.weights],
        }


def hull_membership(target, relaxation, support, rows=None) -> HullMembershipCertificate:
    """Express ``target`` as a convex combination of the given integer points of ``relaxation``."""
    target = as_vector(target)
    support = [as_vector(p) for p in support]
    if not support:
        raise NoConvexCombination("no support points supplied")
    for k, p in enumerate(support):
        if not is_integral(p):
            raise SupportPointFractional(k)
        if not is_feasible(relaxation, p):
            raise SupportPointInfeasible(k)
    s, n = len(support), len(target)
    A, b = [], []
    for j in range(n):
        row = [p[j] for p in support]
        A += [row, [-v for v in row]]
        b += [target[j], -target[j]]
    A += [[Fraction(1)] * s, [Fraction(-1)] * s]
    b += [Fraction(1), Fraction(-1)]
    sol = simplex_max(A, b, [Fraction(0)] * s)
    if sol.status != OPTIMAL:
        raise NoConvexCombination("target is not a convex combination of the support points")
    return HullMembershipCertificate(target, tuple(support), sol.primal,
                                     None if rows is None else tuple(rows))


def cube_candidates(target) -> list[tuple[Fraction, ...]]:
    """Lattice points obtained by rounding each fractional coordinate down or up."""
    choices = [(v,) if v.denominator == 1 else (Fraction(math.floor(v)), Fraction(math.ceil(v)))
               for v in as_vector(target)]
    if sum(len(c) > 1 for c in choices) > 12:
        raise ModelError("too many fractional coordinates for the rounding-cube search")
    return [tuple(p) for p in itertools.product(*choices)]


def find_hull_certificate(target, relaxation, candidates=None, rows=None) -> HullMembershipCertificate:
    """Search a small candidate set (default: the rounding cube) for a certificate."""
    if candidates is None:
        candidates = cube_candidates(target)
    support = [p for p in candidates if is_feasible(relaxation, p)]
    cert = hull_membership(target, relaxation, support, rows)
    keep = [(p, w) for p, w in zip(cert.support_points, cert.weights) if w != 0]
    return HullMembershipCertificate(cert.target, tuple(p for p, _ in keep), tuple(w for _, w in keep), cert.rows)


def family2_support_points(K, M: int) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """The two integer points whose midpoint is (M+1, 1/2, 1/2, 1/2) for the row pair K of family 2.

    K holds 0-based row indices; row 3 is the bound row ``x1 <= M+1``.  With the
    bound row in K, the shared index is the smallest variable carrying a negative
    coefficient in K; otherwise it is the variable common to both rows.
    """
    K = sorted(set(K))
    if len(K) != 2 or not all(0 <= i <= 3 for i in K):
        raise BadSubset(f"K must be two distinct rows among 0..3, got {K}")
    P, _ = family2(M)
    negative = [{j for j in range(1, 4) if P.A[i][j] < 0} for i in K]
    if 3 in K:
        l = min(negative[0] | negative[1])
    else:
        (l,) = negative[0] & negative[1]
    low = [Fraction(M + 1), Fraction(0), Fraction(0), Fraction(0)]
    high = [Fraction(M + 1), Fraction(1), Fraction(1), Fraction(1)]
    low[l] += 1
    high[l] -= 1
    return tuple(low), tuple(high)


# ---------------------------------------------------------------------------
# bounds

def _ip_upper(Q, obj: Objective, node_limit: int):
    try:
        return branch_and_bound(Q, obj, node_limit=node_limit).upper
    except RootUnbounded:
        return INF


def _lp_value(P, obj):
    sol = lp_solve(P, obj)
    if sol.status == OPTIMAL:
        return sol.value
    return INF if sol.status == "Unbounded" else -INF


def original_krow_upper(P, obj: Objective, k: int, node_limit: int = 2000):
    """min over k-row subsystems of an IP upper bound, capped by the LP value of P."""
    if not 1 <= k <= P.m:
        raise ModelError(f"k must lie in 1..{P.m}")
    return _krow_upper(P, obj, k, node_limit)[0]


def _krow_upper(P, obj, k, node_limit):
    best, witness = _lp_value(P, obj), "LP relaxation of P (the k-row subsets cover every row)"
    for S in itertools.combinations(range(P.m), k):
        v = _ip_upper(P.rows(S), obj, node_limit)
        if v < best:
            best, witness = v, f"integer optimum over rows {[i + 1 for i in S]}"
    return best, witness


def krow_certificates(P, k: int, point, support: Optional[Callable] = None):
    """Certificates that ``point`` lies in every k-row integer hull, or None if any subset fails."""
    certs = []
    for S in itertools.combinations(range(P.m), k):
        relax = P.rows(S)
        try:
            if support is not None:
                certs.append(hull_membership(point, relax, support(S), rows=S))
            else:
                certs.append(find_hull_certificate(point, relax, rows=S))
        except CertificateError:
            return None
    return certs


def original_krow_lower(P, obj: Objective, k: int, points, support: Optional[Callable] = None):
    best = -INF
    for pt in points:
        if krow_certificates(P, k, pt, support) is not None:
            best = max(best, obj.value(as_vector(pt)))
    return best


def original_krow_interval(P, obj: Objective, k: int, points=(), support: Optional[Callable] = None,
                           node_limit: int = 2000) -> BoundInterval:
    if not 1 <= k <= P.m:
        raise ModelError(f"k must lie in 1..{P.m}")
    upper, up_w = _krow_upper(P, obj, k, node_limit)
    lower, low_w, certs = -INF, "none", ()
    try:
        ip = branch_and_bound(P, obj, node_limit=node_limit)
        if ip.best_point is not None:
            lower, low_w = ip.value, "integer feasible point of P"
    except RootUnbounded:
        pass
    for pt in points:
        found = krow_certificates(P, k, pt, support)
        if found is not None and obj.value(as_vector(pt)) > lower:
            lower = obj.value(as_vector(pt))
            low_w = f"point with {len(found)} hull-membership certificates"
            certs = tuple(found)
    return BoundInterval(lower, upper, low_w, up_w, certs)


def as_sign_pattern(P) -> SignPatternPolyhedron:
    if isinstance(P, SignPatternPolyhedron):
        return P
    if isinstance(P, PackingPolyhedron):
        return SignPatternPolyhedron(P.A, P.b, frozenset(range(P.n)), frozenset(), P.n)
    raise ModelError(f"{P.kind} systems are not aggregated as <= rows")


def default_multipliers(P, k: int = 1) -> list[tuple[tuple[Fraction, ...], ...]]:
    """Unit vectors and pairwise row sums (k-subsets of those for k > 1), plus family-specific choices."""
    m = P.m
    singles = []
    for i in range(m):
        singles.append(tuple(Fraction(int(t == i)) for t in range(m)))
    for i, j in itertools.combinations(range(m), 2):
        singles.append(tuple(Fraction(int(t in (i, j))) for t in range(m)))
    tuples = [tuple(c) for c in itertools.combinations(singles, k)]
    fam = recognize_family(P) if isinstance(P, SignPatternPolyhedron) else None
    if fam is not None:
        name, M = fam
        if name == "family1" and k == 1:
            tuples.append((family1_lambda_star(M),))
        if name == "family2":
            if k == 1:
                tuples.append((tuple(Fraction(1, 4) for _ in range(4)),))
            if k == 2:
                tuples.append((family2_lambda_bar(), family2_mu_bar()))
    return tuples


def _as_tuple(entry) -> tuple:
    entry = tuple(entry)
    if entry and not isinstance(entry[0], (tuple, list, AggregationWeights)):
        return (entry,)
    return entry


def aggregation_closure_interval(P, obj: Objective, multipliers, k: Optional[int] = None,
                                 node_limit: int = 2000, ip_upper: Optional[Callable] = None) -> BoundInterval:
    """Interval for the optimum over the (k-)aggregation closure.

    ``multipliers`` is a list of k-tuples of weight vectors (a bare vector counts
    as a 1-tuple).  ``ip_upper`` optionally overrides how the integer optimum of an
    aggregated system is bounded from above.
    """
    SP = as_sign_pattern(P)
    tuples = [_as_tuple(t) for t in multipliers]
    if k is None:
        k = len(tuples[0]) if tuples else 1
    if any(len(t) != k for t in tuples):
        raise ModelError(f"every multiplier tuple must have {k} vectors")

    upper, up_w = _lp_value(SP, obj), "LP relaxation of P"
    for t in tuples:
        weights = [AggregationWeights(w) for w in t]
        if all(w.degenerate for w in weights):
            continue
        Q = aggregate_k(SP, weights)
        v = ip_upper(Q, obj) if ip_upper is not None else _ip_upper(Q, obj, node_limit)
        if v <= upper:
            upper = v
            up_w = "integer optimum of aggregation " + "; ".join(
                "(" + ", ".join(format_rational(x) for x in w.lam) + ")" for w in weights)

    lower, low_w = -INF, "none"
    try:
        ip = branch_and_bound(SP, obj, node_limit=node_limit)
        if ip.best_point is not None:
            lower, low_w = ip.value, "integer feasible point of P"
    except RootUnbounded:
        pass
    if k == 1 and obj.maximize:
        lp = _lp_value(SP, obj)
        if lp != INF and lp / 2 >= lower:
            lower, low_w = lp / 2, "half the LP value (factor-2 approximation by P)"
    return BoundInterval(lower, upper, low_w, up_w)
