"""Deterministic instance families and seeded random samplers.

Random draws use :class:`random.Random` (MT19937) and only its ``random()``
method, whose output stream Python guarantees across versions.  Per-instance
streams are seeded with the string ``"<seed>:<index>"`` so that instance *i* of
a suite does not depend on how many draws instance *i-1* consumed.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .model import (CoveringPolyhedron, ModelError, Objective, PackingPolyhedron,
                    SignPatternPolyhedron, validate_sign_pattern)


class BadM(ModelError):
    pass


class BadParams(ModelError):
    pass


class Rng:
    """Thin wrapper fixing the integer-draw algorithm on top of MT19937 ``random()``."""

    def __init__(self, seed, index=None):
        key = f"{seed}" if index is None else f"{seed}:{index}"
        self._r = random.Random(key)

    def randint(self, lo: int, hi: int) -> int:
        return lo + min(int(self._r.random() * (hi - lo + 1)), hi - lo)

    def coin(self) -> bool:
        return self._r.random() < 0.5


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def provenance(self) -> dict:
        return {"kind": self.kind, **self.params}


def family1(M: int) -> tuple[SignPatternPolyhedron, Objective]:
    """max x1 - (M-1) x2  s.t.  x1 - M(M-1) x2 <= 1,  x1 <= M+1."""
    if not isinstance(M, int) or M < 2:
        raise BadM(f"family1 needs an integer M >= 2, got {M!r}")
    P = validate_sign_pattern([[1, -M * (M - 1)], [1, 0]], [1, M + 1], {0}, {1})
    return P, Objective((1, -(M - 1)))


def family2(M: int) -> tuple[SignPatternPolyhedron, Objective]:
    """Four-row family: three rows x1 - M x_a - M x_b <= 1 over pairs of {x2,x3,x4}, plus x1 <= M+1."""
    if not isinstance(M, int) or M < 2 or M % 2:
        raise BadM(f"family2 needs an even integer M >= 2, got {M!r}")
    A = [[1, -M, -M, 0],
         [1, -M, 0, -M],
         [1, 0, -M, -M],
         [1, 0, 0, 0]]
    P = validate_sign_pattern(A, [1, 1, 1, M + 1], {0}, {1, 2, 3})
    h = M // 2
    return P, Objective((1, -h, -h, -h))


def family2_lambda_bar() -> tuple[Fraction, ...]:
    return (Fraction(1), Fraction(1), Fraction(0), Fraction(0))


def family2_mu_bar() -> tuple[Fraction, ...]:
    return (Fraction(0), Fraction(0), Fraction(1), Fraction(1))


def family1_lambda_star(M: int) -> tuple[Fraction, ...]:
    return (Fraction(1, M), Fraction(M - 1, M))


def recognize_family(P: SignPatternPolyhedron):
    """Return ("family1", M) / ("family2", M) when P is structurally a family instance, else None."""
    if P.n == 2 and P.m == 2 and P.b[0] == 1:
        M = int(P.b[1]) - 1
        if P.b[1].denominator == 1 and M >= 2 and family1(M)[0] == P:
            return "family1", M
    if P.n == 4 and P.m == 4 and P.b[3].denominator == 1:
        M = int(P.b[3]) - 1
        if M >= 2 and M % 2 == 0 and family2(M)[0] == P:
            return "family2", M
    return None


def _check_counts(**kw):
    for name, v in kw.items():
        if not isinstance(v, int) or v < 1:
            raise BadParams(f"{name} must be a positive integer, got {v!r}")


def random_sign_pattern(n: int, m: int, seed, max_coeff: int = 10, max_rhs: int = 10,
                        index=None) -> SignPatternPolyhedron:
    _check_counts(n=n, m=m, max_coeff=max_coeff, max_rhs=max_rhs)
    rng = Rng(seed, index)
    signs = [rng.coin() for _ in range(n)]
    if not any(signs):
        signs[rng.randint(0, n - 1)] = True
    jplus = {j for j in range(n) if signs[j]}
    jminus = set(range(n)) - jplus
    b = [rng.randint(1, max_rhs) for _ in range(m)]
    A = [[rng.randint(0, b[i]) if j in jplus else -rng.randint(0, max_coeff) for j in range(n)]
         for i in range(m)]
    return validate_sign_pattern(A, b, jplus, jminus)


def random_sign_compatible_objective(P: SignPatternPolyhedron, rng: Rng, max_coeff: int = 10) -> Objective:
    return Objective(tuple(rng.randint(0, max_coeff) if j in P.jplus else -rng.randint(0, max_coeff)
                           for j in range(P.n)))


def _random_nonneg_rows(n: int, rng: Rng, max_rhs: int):
    b = [rng.randint(1, max_rhs) for _ in range(2)]
    A = []
    for i in range(2):
        row = [rng.randint(0, b[i]) for _ in range(n)]
        while not any(row):
            row = [rng.randint(0, b[i]) for _ in range(n)]
        A.append(row)
    return A, b


def random_packing_2row(n: int, seed, index=None, max_rhs: int = 100) -> PackingPolyhedron:
    _check_counts(n=n, max_rhs=max_rhs)
    A, b = _random_nonneg_rows(n, Rng(seed, index), max_rhs)
    return PackingPolyhedron.build(A, b)


def random_covering_2row(n: int, seed, index=None, max_rhs: int = 100) -> CoveringPolyhedron:
    _check_counts(n=n, max_rhs=max_rhs)
    rng = Rng(seed, index)
    while True:
        A, b = _random_nonneg_rows(n, rng, max_rhs)
        if all(A[0][j] or A[1][j] for j in range(n)):
            return CoveringPolyhedron.build(A, b)


def random_packing(n: int, m: int, seed, index=None, max_rhs: int = 100) -> PackingPolyhedron:
    """General m-row packing sampler (every row and every column gets a positive entry)."""
    _check_counts(n=n, m=m, max_rhs=max_rhs)
    rng = Rng(seed, index)
    while True:
        b = [rng.randint(1, max_rhs) for _ in range(m)]
        A = [[rng.randint(0, b[i]) for _ in range(n)] for i in range(m)]
        if all(any(r) for r in A) and all(any(A[i][j] for i in range(m)) for j in range(n)):
            return PackingPolyhedron.build(A, b)
