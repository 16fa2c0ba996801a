"""Exact polyhedron representations and the basic operations on them.

All scalars are :class:`fractions.Fraction`.  Column indices are 0-based in
the Python API; the JSON instance format and human-readable messages use
1-based indices.

Coefficients of a sign-pattern system are stored *signed*: a column in
``jminus`` holds non-positive entries.  :func:`magnitudes` gives the
unsigned view ``a_j = |A_ij|``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(text) -> Fraction:
    """Parse an integer or ``p/q`` literal (no decimals, no floats)."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"not a rational literal: {text!r}")
    match = _RATIONAL_RE.match(text)
    if match is None:
        raise ValueError(f"not a rational literal: {text!r}")
    num, den = match.groups()
    if den is not None and int(den) == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den else 1)


def format_rational(q) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floating-point data is not accepted; use Fraction or 'p/q'")
    if isinstance(value, str):
        return parse_rational(value)
    return Fraction(value)


def as_vector(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(as_rational(v) for v in values)


def as_matrix(rows: Iterable[Iterable]) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(as_vector(r) for r in rows)


# ---------------------------------------------------------------------------
# errors

class ModelError(ValueError):
    pass


class DimensionMismatch(ModelError):
    pass


class IndexOutOfRange(ModelError):
    pass


class EmptyList(ModelError):
    pass


class NegativeWeight(ModelError):
    pass


class Violation(ModelError):
    """A single violated structural condition of a polyhedron."""


class SignViolation(Violation):
    def __init__(self, i: int, j: int):
        self.i, self.j = i, j
        super().__init__(f"SignViolation({i + 1}, {j + 1}): A[{i + 1}][{j + 1}] has the wrong sign for its column class")


class RhsViolation(Violation):
    def __init__(self, i: int):
        self.i = i
        super().__init__(f"RhsViolation({i + 1}): right-hand side b[{i + 1}] out of range")


class MagnitudeViolation(Violation):
    def __init__(self, i: int, j: int):
        self.i, self.j = i, j
        super().__init__(f"MagnitudeViolation({i + 1}, {j + 1}): A[{i + 1}][{j + 1}] exceeds b[{i + 1}]")


class PartitionError(Violation):
    def __init__(self, detail: str):
        super().__init__(f"PartitionError: {detail}")


class InvalidPolyhedron(ModelError):
    """Raised with every violated condition collected in ``violations``."""

    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


def _check_dims(A, b) -> tuple[int, int]:
    m = len(A)
    if len(b) != m:
        raise DimensionMismatch(f"A has {m} rows but b has {len(b)} entries")
    n = len(A[0]) if m else 0
    for i, row in enumerate(A):
        if len(row) != n:
            raise DimensionMismatch(f"row {i + 1} has {len(row)} entries, expected {n}")
    return m, n


# ---------------------------------------------------------------------------
# polyhedra

@dataclass(frozen=True)
class SignPatternPolyhedron:
    """``{x >= 0 : A x <= b}`` where each column is wholly >= 0 (jplus) or <= 0 (jminus)."""

    A: tuple[tuple[Fraction, ...], ...]
    b: tuple[Fraction, ...]
    jplus: frozenset[int]
    jminus: frozenset[int]
    n: int

    sense = "<="
    kind = "sign_pattern"

    def __post_init__(self):
        m, n = _check_dims(self.A, self.b)
        if m and n != self.n:
            raise DimensionMismatch(f"rows have {n} entries, expected {self.n}")
        violations = sign_pattern_violations(self.A, self.b, self.jplus, self.jminus, self.n)
        if violations:
            raise InvalidPolyhedron(violations)

    @property
    def m(self) -> int:
        return len(self.b)

    def rows(self, subset: Iterable[int]) -> "SignPatternPolyhedron":
        """Subsystem made of the given (0-based) rows."""
        idx = list(subset)
        for i in idx:
            if not 0 <= i < self.m:
                raise IndexOutOfRange(f"row {i + 1} not in 1..{self.m}")
        return SignPatternPolyhedron(tuple(self.A[i] for i in idx), tuple(self.b[i] for i in idx),
                                     self.jplus, self.jminus, self.n)


def sign_pattern_violations(A, b, jplus, jminus, n) -> list[Violation]:
    out: list[Violation] = []
    if jplus & jminus:
        out.append(PartitionError(f"columns {sorted(j + 1 for j in jplus & jminus)} are in both classes"))
    if (jplus | jminus) != frozenset(range(n)):
        out.append(PartitionError(f"classes do not cover exactly the columns 1..{n}"))
    for i, row in enumerate(A):
        if b[i] < 0:
            out.append(RhsViolation(i))
        for j, a in enumerate(row):
            if j in jplus:
                if a < 0:
                    out.append(SignViolation(i, j))
                elif a > b[i]:
                    out.append(MagnitudeViolation(i, j))
            elif j in jminus and a > 0:
                out.append(SignViolation(i, j))
    return out


def validate_sign_pattern(A, b, jplus, jminus) -> SignPatternPolyhedron:
    """Build a sign-pattern polyhedron; raises :class:`InvalidPolyhedron` listing every violation."""
    A, b = as_matrix(A), as_vector(b)
    m, n = _check_dims(A, b)
    if m == 0:
        n = len(jplus) + len(jminus)
    return SignPatternPolyhedron(A, b, frozenset(jplus), frozenset(jminus), n)


@dataclass(frozen=True)
class _NonnegativeSystem:
    A: tuple[tuple[Fraction, ...], ...]
    b: tuple[Fraction, ...]

    def __post_init__(self):
        _check_dims(self.A, self.b)
        out: list[Violation] = []
        for i, row in enumerate(self.A):
            if self.b[i] <= 0:
                out.append(RhsViolation(i))
            for j, a in enumerate(row):
                if a < 0:
                    out.append(SignViolation(i, j))
                elif a > self.b[i]:
                    out.append(MagnitudeViolation(i, j))
        if out:
            raise InvalidPolyhedron(out)

    @property
    def m(self) -> int:
        return len(self.b)

    @property
    def n(self) -> int:
        return len(self.A[0]) if self.A else 0

    def rows(self, subset: Iterable[int]):
        idx = list(subset)
        for i in idx:
            if not 0 <= i < self.m:
                raise IndexOutOfRange(f"row {i + 1} not in 1..{self.m}")
        return type(self)(tuple(self.A[i] for i in idx), tuple(self.b[i] for i in idx))

    @classmethod
    def build(cls, A, b):
        return cls(as_matrix(A), as_vector(b))


class PackingPolyhedron(_NonnegativeSystem):
    """``{x >= 0 : A x <= b}`` with ``0 <= A_ij <= b_i`` and ``b > 0``."""

    sense = "<="
    kind = "packing"


class CoveringPolyhedron(_NonnegativeSystem):
    """``{x >= 0 : A x >= b}`` with ``0 <= A_ij <= b_i`` and ``b > 0``."""

    sense = ">="
    kind = "covering"


# ---------------------------------------------------------------------------
# objectives, weights, points

@dataclass(frozen=True)
class Objective:
    c: tuple[Fraction, ...]
    sense: str = "max"

    def __post_init__(self):
        if self.sense not in ("max", "min"):
            raise ValueError(f"sense must be 'max' or 'min', got {self.sense!r}")
        object.__setattr__(self, "c", as_vector(self.c))

    @property
    def maximize(self) -> bool:
        return self.sense == "max"

    def value(self, x: Sequence) -> Fraction:
        return sum((cj * xj for cj, xj in zip(self.c, x)), Fraction(0))

    def sign_compatible(self, P: SignPatternPolyhedron) -> bool:
        return all(self.c[j] >= 0 for j in P.jplus) and all(self.c[j] <= 0 for j in P.jminus)


@dataclass(frozen=True)
class AggregationWeights:
    """A non-negative multiplier vector over the rows."""

    lam: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "lam", as_vector(self.lam))
        if any(w < 0 for w in self.lam):
            raise NegativeWeight(f"multipliers must be >= 0, got {[format_rational(w) for w in self.lam]}")

    @property
    def degenerate(self) -> bool:
        return all(w == 0 for w in self.lam)

    def __len__(self):
        return len(self.lam)


def _weights(w) -> AggregationWeights:
    return w if isinstance(w, AggregationWeights) else AggregationWeights(w)


def unit_weights(m: int, i: int) -> AggregationWeights:
    return AggregationWeights(tuple(Fraction(int(k == i)) for k in range(m)))


# ---------------------------------------------------------------------------
# operations

def aggregate(P: SignPatternPolyhedron, weights) -> SignPatternPolyhedron:
    """The one-row relaxation ``(lam A) x <= lam b``."""
    return aggregate_k(P, [weights])


def aggregate_k(P: SignPatternPolyhedron, weights_list) -> SignPatternPolyhedron:
    weights_list = [_weights(w) for w in weights_list]
    if not weights_list:
        raise EmptyList("at least one multiplier vector is required")
    rows, rhs = [], []
    for w in weights_list:
        if len(w) != P.m:
            raise DimensionMismatch(f"multiplier has length {len(w)}, expected {P.m}")
        rows.append(tuple(sum((w.lam[i] * P.A[i][j] for i in range(P.m)), Fraction(0))
                          for j in range(P.n)))
        rhs.append(sum((w.lam[i] * P.b[i] for i in range(P.m)), Fraction(0)))
    return SignPatternPolyhedron(tuple(rows), tuple(rhs), P.jplus, P.jminus, P.n)


def leq_form(P) -> tuple[tuple[tuple[Fraction, ...], ...], tuple[Fraction, ...]]:
    """Return ``(A, b)`` such that ``P = {x >= 0 : A x <= b}``."""
    if P.sense == ">=":
        return tuple(tuple(-a for a in row) for row in P.A), tuple(-v for v in P.b)
    return P.A, P.b


def is_feasible(P, x: Sequence) -> bool:
    if len(x) != P.n:
        raise DimensionMismatch(f"point has length {len(x)}, expected {P.n}")
    x = as_vector(x)
    if any(v < 0 for v in x):
        return False
    A, b = leq_form(P)
    return all(sum(a * v for a, v in zip(row, x)) <= rhs for row, rhs in zip(A, b))


def is_integral(x: Sequence) -> bool:
    return all(Fraction(v).denominator == 1 for v in x)


def recession_direction_check(P: SignPatternPolyhedron, j: int) -> bool:
    """True iff the unit vector e_j is a recession direction of P."""
    if not 0 <= j < P.n:
        raise IndexOutOfRange(f"column {j + 1} not in 1..{P.n}")
    return all(row[j] <= 0 for row in P.A)


def magnitudes(P: SignPatternPolyhedron, i: int = 0) -> tuple[Fraction, ...]:
    return tuple(abs(a) for a in P.A[i])
