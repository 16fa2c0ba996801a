"""JSON instance files.

    {"n": 2, "m": 2, "kind": "sign_pattern", "Jplus": [1], "Jminus": [2],
     "A": [["1", "-12"], ["1", "0"]], "b": ["1", "5"]}

Indices in ``Jplus``/``Jminus`` are 1-based.  Rationals are written as
integer or ``p/q`` strings in lowest terms.  Optional keys: ``objective``
(``{"c": [...], "sense": "max"|"min"}``) and ``provenance``.
"""
from __future__ import annotations

import json
from pathlib import Path

from .model import (CoveringPolyhedron, ModelError, Objective, PackingPolyhedron, SignPatternPolyhedron,
                    format_rational, parse_rational, validate_sign_pattern)

KINDS = ("sign_pattern", "packing", "covering")


class InstanceError(ModelError):
    def __init__(self, message: str, literal=None):
        super().__init__(message)
        self.literal = literal


def _rational(value, where: str):
    try:
        return parse_rational(value)
    except ValueError as exc:
        raise InstanceError(f"{where}: {exc}", literal=value) from None


def polyhedron_to_json(P, objective: Objective | None = None, provenance: dict | None = None) -> dict:
    doc = {"n": P.n, "m": P.m, "kind": P.kind}
    if isinstance(P, SignPatternPolyhedron):
        doc["Jplus"] = sorted(j + 1 for j in P.jplus)
        doc["Jminus"] = sorted(j + 1 for j in P.jminus)
    doc["A"] = [[format_rational(a) for a in row] for row in P.A]
    doc["b"] = [format_rational(v) for v in P.b]
    if objective is not None:
        doc["objective"] = {"c": [format_rational(v) for v in objective.c], "sense": objective.sense}
    if provenance is not None:
        doc["provenance"] = provenance
    return doc


def polyhedron_from_json(doc: dict):
    for key in ("n", "m", "kind", "A", "b"):
        if key not in doc:
            raise InstanceError(f"missing field {key!r}")
    kind = doc["kind"]
    if kind not in KINDS:
        raise InstanceError(f"kind: expected one of {KINDS}, got {kind!r}")
    n, m = doc["n"], doc["m"]
    if not isinstance(n, int) or not isinstance(m, int) or n < 0 or m < 0:
        raise InstanceError("n and m must be non-negative integers")
    A = doc["A"]
    if not isinstance(A, list) or len(A) != m:
        raise InstanceError(f"A: expected {m} rows")
    rows = []
    for i, row in enumerate(A):
        if not isinstance(row, list) or len(row) != n:
            raise InstanceError(f"A[{i + 1}]: expected {n} entries")
        rows.append([_rational(v, f"A[{i + 1}][{j + 1}]") for j, v in enumerate(row)])
    if not isinstance(doc["b"], list) or len(doc["b"]) != m:
        raise InstanceError(f"b: expected {m} entries")
    b = [_rational(v, f"b[{i + 1}]") for i, v in enumerate(doc["b"])]
    if kind == "sign_pattern":
        try:
            jplus = {int(j) - 1 for j in doc["Jplus"]}
            jminus = {int(j) - 1 for j in doc["Jminus"]}
        except (KeyError, TypeError, ValueError):
            raise InstanceError("sign_pattern instances need integer arrays Jplus and Jminus") from None
        if m == 0:
            return SignPatternPolyhedron((), (), frozenset(jplus), frozenset(jminus), n)
        return validate_sign_pattern(rows, b, jplus, jminus)
    cls = PackingPolyhedron if kind == "packing" else CoveringPolyhedron
    return cls.build(rows, b)


def objective_from_json(doc: dict) -> Objective | None:
    obj = doc.get("objective")
    if obj is None:
        return None
    c = [_rational(v, f"objective.c[{j + 1}]") for j, v in enumerate(obj["c"])]
    return Objective(tuple(c), obj.get("sense", "max"))


def load_instance(path):
    """Read an instance file; returns ``(polyhedron, objective or None)``."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise InstanceError(f"{path}: top level must be an object")
    try:
        return polyhedron_from_json(doc), objective_from_json(doc)
    except InstanceError as exc:
        line = _line_of(text, exc.literal)
        where = f"{path}: line {line}" if line else str(path)
        raise InstanceError(f"{where}: {exc}", exc.literal) from None


def _line_of(text: str, literal) -> int | None:
    if literal is None:
        return None
    needle = json.dumps(literal)
    for k, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return k
    return None


def dumps_instance(P, objective=None, provenance=None) -> str:
    return json.dumps(polyhedron_to_json(P, objective, provenance), indent=2) + "\n"
