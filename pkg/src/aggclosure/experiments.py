"""Verification suites that emit machine-checkable reports.

Every suite is a pure function of its parameters and seed.  Records are
ordered by instance index, so running instances in worker processes
(``jobs > 1``) yields the same report as a serial run.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from typing import Callable, Optional

from . import closures
from .closures import krow_certificates, hull_membership, family2_support_points
from .exactip import (RootUnbounded, box_for_covering, box_for_packing, branch_and_bound,
                      family2_aggregated_ip, single_row_ip_lower_bound)
from .exactlp import OPTIMAL, UNBOUNDED, lp_solve, simplex_max, single_row_boundedness, single_row_lp_opt
from .families import (Rng, family1, family1_lambda_star, family2, family2_lambda_bar, family2_mu_bar,
                       random_covering_2row, random_packing_2row, random_sign_compatible_objective,
                       random_sign_pattern)
from .model import (AggregationWeights, Objective, aggregate, aggregate_k, format_rational, is_feasible)

SCHEMA_VERSION = "1.0"
INF = math.inf


def jsonable(value):
    """Convert rationals (and infinities) to strings, recursively."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if hasattr(value, "to_json"):
        return value.to_json()
    return str(value)


@dataclass
class ExperimentReport:
    experiment: str
    parameters: dict
    records: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    runtime: float = 0.0
    timestamp: Optional[str] = None

    @property
    def violations(self) -> int:
        return sum(1 for r in self.records if r.get("violation"))

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self, reproducible: bool = False) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "experiment": self.experiment,
            "parameters": jsonable(self.parameters),
            "summary": jsonable({**self.summary, "violations": self.violations}),
            "records": jsonable(self.records),
        }
        if not reproducible:
            out["runtime_seconds"] = round(self.runtime, 6)
            out["timestamp"] = self.timestamp
            out["environment"] = {"python": platform.python_version()}
        return out

    def to_json(self, reproducible: bool = False) -> str:
        return json.dumps(self.to_dict(reproducible), indent=2) + "\n"

    def to_csv(self, reproducible: bool = False) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["experiment", "key", "value"])
        d = self.to_dict(reproducible)
        for key, value in d["summary"].items():
            w.writerow([self.experiment, key, json.dumps(value) if isinstance(value, (dict, list)) else value])
        if not reproducible:
            w.writerow([self.experiment, "runtime_seconds", d["runtime_seconds"]])
        return buf.getvalue()


def _run(name: str, params: dict, body: Callable[[], tuple[list, dict]]) -> ExperimentReport:
    start = time.perf_counter()
    records, summary = body()
    return ExperimentReport(name, params, records, summary, time.perf_counter() - start,
                            datetime.now(timezone.utc).isoformat(timespec="seconds"))


def _map(fn, args, jobs: int):
    if jobs <= 1:
        return [fn(*a) for a in args]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, *zip(*args))) if args else []


def _ratio(num, den):
    return None if den == 0 else Fraction(num) / Fraction(den)


# ---------------------------------------------------------------------------
# factor-2 suite for single aggregations

def _random_lambda(rng: Rng, m: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(rng.randint(0, 4), rng.randint(1, 4)) if rng.randint(0, 3) else Fraction(0)
                 for _ in range(m))


def _thm1_instance(index: int, seed, lambdas: int, objectives: int, n_max: int, m_max: int,
                   cross_check: bool) -> dict:
    dims = Rng(f"thm1-dims-{seed}", index)
    n, m = dims.randint(1, n_max), dims.randint(1, m_max)
    P = random_sign_pattern(n, m, f"thm1-{seed}", index=index)
    rng = Rng(f"thm1-draws-{seed}", index)
    rec = {"index": index, "n": n, "m": m, "checks": 0, "degenerate_lambdas": 0, "unbounded": 0,
           "bound_violations": 0, "oracle_mismatches": 0, "max_ratio": None}
    for _ in range(lambdas):
        lam = _random_lambda(rng, m)
        objs = [random_sign_compatible_objective(P, rng) for _ in range(objectives)]
        w = AggregationWeights(lam)
        if w.degenerate:
            rec["degenerate_lambdas"] += 1
            continue
        row = aggregate(P, w)
        for obj in objs:
            bounded = single_row_boundedness(row, obj)
            sol = single_row_lp_opt(row, obj)
            if cross_check:
                ref = simplex_max(row.A, row.b, obj.c)
                if ref.status != sol.status or (ref.optimal and ref.value != sol.value) \
                        or bounded != (ref.status != UNBOUNDED):
                    rec["oracle_mismatches"] += 1
            if not bounded:
                rec["unbounded"] += 1
                continue
            rec["checks"] += 1
            lb = single_row_ip_lower_bound(row, obj)
            if sol.value > 2 * lb:
                rec["bound_violations"] += 1
            r = _ratio(sol.value, lb)
            if r is not None and (rec["max_ratio"] is None or r > rec["max_ratio"]):
                rec["max_ratio"] = r
    rec["violation"] = bool(rec["bound_violations"] or rec["oracle_mismatches"])
    return rec


def thm1_suite(instance_count: int = 500, lambdas_per_instance: int = 20, objectives_per_lambda: int = 5,
               seed=1, n_max: int = 6, m_max: int = 4, cross_check: bool = True, jobs: int = 1) -> ExperimentReport:
    """Check z_LP <= 2 * (rounded-down LP optimum value) on random single aggregations."""
    params = {"instance_count": instance_count, "lambdas_per_instance": lambdas_per_instance,
              "objectives_per_lambda": objectives_per_lambda, "seed": seed, "n_max": n_max, "m_max": m_max,
              "cross_check": cross_check}

    def body():
        args = [(i, seed, lambdas_per_instance, objectives_per_lambda, n_max, m_max, cross_check)
                for i in range(instance_count)]
        records = _map(_thm1_instance, args, jobs)
        ratios = [r["max_ratio"] for r in records if r["max_ratio"] is not None]
        summary = {
            "checks": sum(r["checks"] for r in records),
            "degenerate_lambdas_skipped": sum(r["degenerate_lambdas"] for r in records),
            "unbounded_skipped": sum(r["unbounded"] for r in records),
            "bound_violations": sum(r["bound_violations"] for r in records),
            "oracle_mismatches": sum(r["oracle_mismatches"] for r in records),
            "max_observed_ratio": max(ratios) if ratios else None,
        }
        return records, summary

    return _run("thm1", params, body)


# ---------------------------------------------------------------------------
# family 1: aggregation closure vs 2-aggregation closure

def thm2_experiment(M: int, alpha=None) -> ExperimentReport:
    P, obj = family1(M)

    def body():
        lp = lp_solve(P, obj)
        ip = branch_and_bound(P, obj)
        lam = family1_lambda_star(M)
        row = aggregate(P, lam)
        row_ip = branch_and_bound(row, obj)
        z_a2 = ip.value                         # two rows only, so the 2-aggregation closure is P^I
        a_lower, a_upper = lp.value / 2, min(lp.value, row_ip.upper)
        ratio_lb = a_lower / z_a2
        rec = {
            "M": M,
            "z_lp": lp.value,
            "lp_primal": lp.primal,
            "z_ip": ip.value,
            "ip_point": ip.best_point,
            "ip_certificate": ip.certificate,
            "bnb_nodes": ip.nodes,
            "z_A2": z_a2,
            "A_interval": [a_lower, a_upper],
            "aggregation": lam,
            "aggregated_row": {"A": row.A[0], "b": row.b[0]},
            "aggregated_row_ip": row_ip.upper,
            "ratio_lower_bound": ratio_lb,
        }
        rec["matches_expected"] = (lp.value == M and ip.exact and ip.value == 2 and ratio_lb == Fraction(M, 4))
        rec["violation"] = not (ip.exact and a_lower <= a_upper)
        summary = {"z_lp": lp.value, "z_ip": ip.value, "z_A2": z_a2, "ratio_lower_bound": ratio_lb,
                   "bnb_closed": ip.exact}
        if alpha is not None:
            summary["alpha"] = Fraction(alpha)
            summary["separates_alpha"] = ratio_lb > Fraction(alpha)
        return [rec], summary

    return _run("thm2", {"M": M, "alpha": alpha}, body)


# ---------------------------------------------------------------------------
# family 2: original 2-row closure vs 2-aggregation closure

def thm3_experiment(M: int, x1_max: Optional[int] = None) -> ExperimentReport:
    P, obj = family2(M)
    h = Fraction(1, 2)
    target = (Fraction(M + 1), h, h, h)

    def body():
        records = []
        for K in itertools.combinations(range(4), 2):
            relax = P.rows(K)
            support = family2_support_points(K, M)
            cert = hull_membership(target, relax, support, rows=K)
            ok = cert.verify(relax)
            records.append({"kind": "certificate", "rows": [i + 1 for i in K], "certificate": cert,
                            "valid": ok, "violation": not ok})
        n_valid = sum(r["valid"] for r in records)
        lp = lp_solve(P, obj)
        z2a_lower = obj.value(target) if n_valid == 6 else None
        z2a_upper = lp.value                    # the six row pairs cover all four rows

        agg = family2_aggregated_ip(M, x1_max)
        Q = aggregate_k(P, [family2_lambda_bar(), family2_mu_bar()])
        bnb = branch_and_bound(Q, obj)
        one = (Fraction(1), Fraction(0), Fraction(0), Fraction(0))
        za2_lower = obj.value(one) if is_feasible(P, one) else None
        za2_upper = agg.upper
        records.append({
            "kind": "aggregated_ip",
            "value": agg.value,
            "point": agg.best_point,
            "certificate": agg.certificate,
            "case_max": agg.notes["case_max"],
            "case_bounds_hold": agg.notes["case_bounds_hold"],
            "x1_max": agg.notes["x1_max"],
            "beyond_range": agg.notes["beyond_range"],
            "bnb_value": bnb.value if bnb.exact else None,
            "violation": not (agg.notes["case_bounds_hold"] and bnb.exact and bnb.value == agg.value),
        })
        exact = z2a_lower is not None and z2a_lower == z2a_upper and za2_lower == za2_upper
        ratio = z2a_lower / za2_upper if exact else None
        summary = {
            "valid_certificates": n_valid,
            "z_lp": lp.value,
            "z_2A": [z2a_lower, z2a_upper],
            "z_A2": [za2_lower, za2_upper],
            "ratio": ratio,
            "ratio_exact": exact,
            "expected_ratio": Fraction(M, 4) + 1,
        }
        return records, summary

    return _run("thm3", {"M": M, "x1_max": x1_max if x1_max is not None else 4 * M + 2}, body)


# ---------------------------------------------------------------------------
# packing / covering with two rows

COVERING_CASES = (
    (1, lambda a, b: a >= 1 and b >= 1, Fraction(2)),
    (2, lambda a, b: Fraction(2, 5) <= a < 1 and b >= 1, Fraction(5, 2)),
    (3, lambda a, b: a >= 1 and Fraction(2, 5) <= b < 1, Fraction(5, 2)),
    (4, lambda a, b: a < Fraction(2, 5) and b >= 1, Fraction(5, 2)),
    (5, lambda a, b: a >= 1 and b < Fraction(2, 5), Fraction(5, 2)),
    (6, lambda a, b: a < 1 and b < 1, Fraction(2)),
)


def covering_case_matches(x1, x2) -> list[int]:
    return [cid for cid, pred, _ in COVERING_CASES if pred(x1, x2)]


def classify_covering_case(x1, x2) -> int:
    """Case id (1..6) for an LP optimum whose two positive entries are x1, x2 (in index order)."""
    hits = covering_case_matches(x1, x2)
    if len(hits) != 1:
        raise ValueError(f"({x1}, {x2}) matches cases {hits}")
    return hits[0]


def case_bound(case_id) -> Fraction:
    if case_id == "single":
        return Fraction(2)
    return next(b for cid, _, b in COVERING_CASES if cid == case_id)


def covering_rounding(x, support: list[int], case_id) -> tuple[Fraction, ...]:
    """The integer point built from the LP optimum in the case analysis."""
    out = [Fraction(0)] * len(x)
    if case_id == "single":
        (j,) = support
        out[j] = Fraction(math.ceil(x[j]))
        return tuple(out)
    i, j = support
    if case_id in (1, 2, 3, 6):
        out[i], out[j] = Fraction(math.ceil(x[i])), Fraction(math.ceil(x[j]))
    elif case_id == 4:
        out[j] = Fraction(math.ceil(x[j] / (1 - x[i])))
    elif case_id == 5:
        out[i] = Fraction(math.ceil(x[i] / (1 - x[j])))
    return tuple(out)


def _costs(rng: Rng, n: int, lo: int = 1, hi: int = 20) -> tuple[int, ...]:
    return tuple(rng.randint(lo, hi) for _ in range(n))


def _packing_instance(index: int, n: int, seed) -> dict:
    P = random_packing_2row(n, f"pack-{seed}", index=index)
    rng = Rng(f"pack-obj-{seed}", index)
    c = [Fraction(v) if any(P.A[i][j] for i in range(2)) else Fraction(0)
         for j, v in enumerate(_costs(rng, n))]
    obj = Objective(tuple(c))
    lp = lp_solve(P, obj)
    box = box_for_packing(P)
    ip = branch_and_bound(P, obj, box=box if box.certified else None)
    ratio = _ratio(lp.value, ip.value)
    ok = ip.exact and lp.value <= 3 * ip.value
    return {"kind": "packing", "index": index, "z_lp": lp.value, "z_ip": ip.value, "ip_exact": ip.exact,
            "ratio": ratio, "violation": not ok}


def _covering_instance(index: int, n: int, seed) -> dict:
    P = random_covering_2row(n, f"cover-{seed}", index=index)
    rng = Rng(f"cover-obj-{seed}", index)
    obj = Objective(_costs(rng, n), sense="min")
    lp = lp_solve(P, obj)
    ip = branch_and_bound(P, obj, box=box_for_covering(P, obj))
    x = lp.primal
    support = [j for j in range(n) if x[j] > 0]
    if len(support) == 1:
        case = "single"
    elif len(support) == 2:
        case = classify_covering_case(x[support[0]], x[support[1]])
    else:
        case = None
    rec = {"kind": "covering", "index": index, "z_lp": lp.value, "z_ip": ip.value, "ip_exact": ip.exact,
           "ratio": _ratio(ip.value, lp.value), "lp_support": [j + 1 for j in support],
           "lp_support_values": [x[j] for j in support], "case": case}
    ok = ip.exact and ip.value <= Fraction(5, 2) * lp.value and case is not None
    if case is not None:
        rounded = covering_rounding(x, support, case)
        feasible = is_feasible(P, rounded)
        rval = obj.value(rounded)
        rec["rounded_point"] = rounded
        rec["rounded_feasible"] = feasible
        rec["rounding_ratio"] = _ratio(rval, lp.value)
        ok = ok and feasible and rval <= case_bound(case) * lp.value and ip.value <= case_bound(case) * lp.value
    rec["violation"] = not ok
    return rec


def packcover_suite(instance_count: int = 500, n: int = 5, seed=3, jobs: int = 1) -> ExperimentReport:
    """Two-row packing (factor 3) and covering (factor 2.5, per-case) bounds on random instances."""
    params = {"instance_count": instance_count, "n": n, "seed": seed}

    def body():
        args = [(i, n, seed) for i in range(instance_count)]
        packing = _map(_packing_instance, args, jobs)
        covering = _map(_covering_instance, args, jobs)
        per_case = {}
        for r in covering:
            if r["case"] is None:
                continue
            key = str(r["case"])
            entry = per_case.setdefault(key, {"count": 0, "max_ip_ratio": None, "max_rounding_ratio": None,
                                              "bound": case_bound(r["case"])})
            entry["count"] += 1
            for field_, src in (("max_ip_ratio", "ratio"), ("max_rounding_ratio", "rounding_ratio")):
                if r[src] is not None and (entry[field_] is None or r[src] > entry[field_]):
                    entry[field_] = r[src]
        pr = [r["ratio"] for r in packing if r["ratio"] is not None]
        cr = [r["ratio"] for r in covering if r["ratio"] is not None]
        summary = {
            "packing_violations": sum(r["violation"] for r in packing),
            "covering_violations": sum(r["violation"] for r in covering),
            "packing_max_ratio": max(pr) if pr else None,
            "covering_max_ratio": max(cr) if cr else None,
            "covering_cases": dict(sorted(per_case.items())),
        }
        return packing + covering, summary

    return _run("packcover", params, body)


# ---------------------------------------------------------------------------
# exploratory probe of three-row sign-pattern systems

def probe_instance(P, obj: Objective, node_limit: int = 200) -> dict:
    """Certified lower bound on the 2-row closure optimum over an upper bound on the 2-aggregation one."""
    lp = lp_solve(P, obj)
    if lp.status != OPTIMAL:
        return {"status": lp.status, "ratio": None}
    lower, witness = -INF, "none"
    try:
        ip = branch_and_bound(P, obj, node_limit=node_limit)
        if ip.best_point is not None:
            lower, witness = ip.value, "integer point of P"
    except RootUnbounded:
        pass
    if lp.value > lower and krow_certificates(P, 2, lp.primal) is not None:
        lower, witness = lp.value, "LP optimum certified in every 2-row hull"
    upper = closures.aggregation_closure_interval(P, obj, closures.default_multipliers(P, 2), k=2,
                                                  node_limit=node_limit).upper
    ratio = lower / upper if upper not in (INF, -INF) and upper > 0 and lower != -INF else None
    return {"status": OPTIMAL, "z_lp": lp.value, "z_2A_lower": lower, "lower_witness": witness,
            "z_A2_upper": upper, "ratio": ratio}


def _probe_random(index: int, seed, n_max: int) -> dict:
    n = Rng(f"m3-dims-{seed}", index).randint(2, n_max)
    P = random_sign_pattern(n, 3, f"m3-{seed}", index=index)
    obj = random_sign_compatible_objective(P, Rng(f"m3-obj-{seed}", index))
    rec = {"index": index, "n": n, **probe_instance(P, obj)}
    rec["violation"] = False
    return rec


def probe_m3_gap(instance_count: int, seed, alpha_target=None, n_max: int = 4, extra=(),
                 jobs: int = 1) -> ExperimentReport:
    """Evidence gathering only; no outcome here settles the three-row sign-pattern case."""
    params = {"instance_count": instance_count, "seed": seed, "alpha_target": alpha_target, "n_max": n_max}

    def body():
        records = _map(_probe_random, [(i, seed, n_max) for i in range(instance_count)], jobs)
        for label, P, obj in extra:
            records.append({"index": label, "n": P.n, **probe_instance(P, obj), "violation": False})
        ratios = [r["ratio"] for r in records if r.get("ratio") is not None]
        summary = {
            "instances": len(records),
            "max_certified_ratio": max(ratios) if ratios else None,
            "note": "exploratory evidence only",
        }
        if alpha_target is not None:
            summary["exceeding_alpha_target"] = sum(r > Fraction(alpha_target) for r in ratios)
        return records, summary

    return _run("m3probe", params, body)
