"""Command-line entry point.

Exit codes: 0 success, 1 bound violation or certificate failure, 2 usage or
data error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import closures, experiments, families
from .exactip import (Box, box_for_covering, box_for_packing, branch_and_bound, enumerate_ip,
                      DEFAULT_BUDGET, DEFAULT_NODE_LIMIT)
from .exactlp import lp_solve
from .experiments import jsonable
from .instances import InstanceError, dumps_instance, load_instance
from .model import (CoveringPolyhedron, InvalidPolyhedron, ModelError, Objective, PackingPolyhedron,
                    aggregate_k, format_rational, parse_rational)

EXIT_OK, EXIT_VIOLATION, EXIT_DATA = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    instance: Optional[str] = None
    generator: Optional[dict] = None
    objective: Optional[Objective] = None
    options: dict = field(default_factory=dict)
    output: Optional[str] = None
    format: str = "json"
    seed: Optional[int] = None
    reproducible: bool = False


class UsageError(Exception):
    pass


def parse_vector(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(parse_rational(t) for t in text.split(","))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit(text: str, cfg: RunConfig):
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(doc, cfg: RunConfig):
    _emit(json.dumps(jsonable(doc), indent=2) + "\n", cfg)


def _objective(P, cfg: RunConfig, file_obj: Optional[Objective]) -> Objective:
    if cfg.objective is not None:
        c = cfg.objective.c
        if len(c) != P.n:
            raise UsageError(f"--obj has {len(c)} entries, the instance has {P.n} variables")
        return Objective(c, "min" if isinstance(P, CoveringPolyhedron) else "max")
    if file_obj is not None:
        return file_obj
    raise UsageError("an objective is required (--obj c1,c2,...)")


# ---------------------------------------------------------------------------
# commands

def cmd_validate(args, cfg):
    P, _ = load_instance(args.file)
    _emit_json({"valid": True, "kind": P.kind, "n": P.n, "m": P.m}, cfg)
    return EXIT_OK


def cmd_lp(args, cfg):
    P, fobj = load_instance(args.file)
    obj = _objective(P, cfg, fobj)
    sol = lp_solve(P, obj)
    _emit_json({"status": sol.status, "sense": obj.sense, "value": sol.value, "primal": sol.primal,
                "dual": sol.dual, "ray": sol.ray}, cfg)
    return EXIT_OK


def _box(P, obj, spec: Optional[str]) -> Optional[Box]:
    if spec is None:
        return None
    if spec == "auto":
        if isinstance(P, PackingPolyhedron):
            return box_for_packing(P)
        if isinstance(P, CoveringPolyhedron):
            return box_for_covering(P, obj)
        raise UsageError("--box auto is only available for packing and covering instances")
    try:
        upper = tuple(int(t) for t in spec.split(","))
    except ValueError:
        raise UsageError(f"--box expects 'auto' or integers U1,U2,..., got {spec!r}") from None
    return Box(upper, certified=False)


def cmd_ip(args, cfg):
    P, fobj = load_instance(args.file)
    obj = _objective(P, cfg, fobj)
    box = _box(P, obj, args.box)
    if args.method == "enumerate":
        if box is None:
            raise UsageError("enumeration needs --box")
        res = enumerate_ip(P, obj, box, budget=args.budget)
    else:
        res = branch_and_bound(P, obj, box=box, node_limit=args.node_limit)
    _emit_json({"sense": res.sense, "value": res.value, "best_point": res.best_point, "lower": res.lower,
                "upper": res.upper, "exact": res.exact, "certificate": res.certificate, "nodes": res.nodes,
                "box": None if box is None else {"upper": box.upper, "certified": box.certified,
                                                 "warnings": box.warnings},
                "notes": res.notes}, cfg)
    return EXIT_OK


def cmd_aggregate(args, cfg):
    P, _ = load_instance(args.file)
    weights = [parse_vector(t) for t in args.weights]
    Q = aggregate_k(closures.as_sign_pattern(P), weights)
    _emit(dumps_instance(Q, provenance={"aggregated_from": args.file,
                                        "lambda": [[format_rational(w) for w in v] for v in weights]}), cfg)
    return EXIT_OK


def _load_multipliers(path):
    with open(path) as fh:
        doc = json.load(fh)
    out = []
    for entry in doc:
        if entry and not isinstance(entry[0], list):
            entry = [entry]
        out.append(tuple(tuple(parse_rational(v) for v in w) for w in entry))
    return out


def cmd_closure(args, cfg):
    P, fobj = load_instance(args.file)
    obj = _objective(P, cfg, fobj)
    kind = args.kind
    if kind in ("A", "Ak"):
        k = 1 if kind == "A" else (args.k or 2)
        mult = _load_multipliers(args.multipliers) if args.multipliers else closures.default_multipliers(P, k)
        iv = closures.aggregation_closure_interval(P, obj, mult, k=k, node_limit=args.node_limit)
    else:
        k = 1 if kind == "1A" else (args.k or 2)
        iv = closures.original_krow_interval(P, obj, k, node_limit=args.node_limit)
    _emit_json({"kind": kind, "k": k, "lower": iv.lower, "upper": iv.upper, "lower_witness": iv.lower_witness,
                "upper_witness": iv.upper_witness, "certificates": list(iv.certificates)}, cfg)
    return EXIT_OK


def cmd_generate(args, cfg):
    kind = args.kind
    obj = None
    if kind == "family1":
        P, obj = families.family1(args.M)
        prov = {"kind": kind, "M": args.M}
    elif kind == "family2":
        P, obj = families.family2(args.M)
        prov = {"kind": kind, "M": args.M}
    else:
        if args.seed is None:
            raise UsageError(f"--seed is required for {kind}")
        if kind == "random_sign_pattern":
            P = families.random_sign_pattern(args.n, args.m, args.seed)
            prov = {"kind": kind, "n": args.n, "m": args.m, "seed": args.seed}
        elif kind == "random_packing_2row":
            P = families.random_packing_2row(args.n, args.seed)
            prov = {"kind": kind, "n": args.n, "seed": args.seed}
        else:
            P = families.random_covering_2row(args.n, args.seed)
            prov = {"kind": kind, "n": args.n, "seed": args.seed}
    _emit(dumps_instance(P, obj, prov), cfg)
    return EXIT_OK


def cmd_verify(args, cfg):
    which = args.experiment
    if which in ("thm2", "thm3") and args.M is None:
        raise UsageError(f"verify {which} needs --M")
    if which == "thm1":
        rep = experiments.thm1_suite(args.instances or 500, args.lambdas, args.objectives, args.seed,
                                     jobs=args.jobs)
    elif which == "thm2":
        rep = experiments.thm2_experiment(args.M, alpha=args.alpha)
    elif which == "thm3":
        rep = experiments.thm3_experiment(args.M, x1_max=args.x1_max)
    elif which == "packcover":
        rep = experiments.packcover_suite(args.instances or 500, args.n, args.seed if args.seed is not None else 3,
                                          jobs=args.jobs)
    else:
        rep = experiments.probe_m3_gap(args.instances if args.instances is not None else 20,
                                       args.seed if args.seed is not None else 1, args.alpha, jobs=args.jobs)
    text = rep.to_csv(cfg.reproducible) if cfg.format == "csv" else rep.to_json(cfg.reproducible)
    _emit(text, cfg)
    failed = rep.violations > 0
    if which == "thm3" and not (rep.summary["ratio_exact"] and rep.summary["valid_certificates"] == 6):
        failed = True
    if which == "thm2" and not rep.summary["bnb_closed"]:
        failed = True
    return EXIT_VIOLATION if failed else EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="write to this file instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--reproducible", action="store_true", help="omit timestamps and environment info")

    objective = argparse.ArgumentParser(add_help=False)
    objective.add_argument("--obj", help="comma-separated rational objective (max for <= systems, min for covering)")
    objective.add_argument("--node-limit", type=int, default=DEFAULT_NODE_LIMIT)

    p = argparse.ArgumentParser(prog="aggclosure", description="Exact aggregation-closure experiments")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check an instance file")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("lp", parents=[common, objective], help="solve the LP relaxation exactly")
    s.add_argument("file")
    s.set_defaults(func=cmd_lp)

    s = sub.add_parser("ip", parents=[common, objective], help="solve the integer program")
    s.add_argument("file")
    s.add_argument("--box", help="'auto' or U1,U2,... (upper bounds; a manual box is not certified)")
    s.add_argument("--method", choices=("bnb", "enumerate"), default="bnb")
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.set_defaults(func=cmd_ip)

    s = sub.add_parser("aggregate", parents=[common], help="aggregate rows with multipliers")
    s.add_argument("file")
    s.add_argument("--lambda", dest="weights", action="append", required=True,
                   help="comma-separated multipliers; repeat for several aggregated rows")
    s.set_defaults(func=cmd_aggregate)

    s = sub.add_parser("closure", parents=[common, objective], help="bound the optimum over a closure")
    s.add_argument("file")
    s.add_argument("--kind", choices=("A", "Ak", "1A", "kA"), required=True)
    s.add_argument("--k", type=int)
    s.add_argument("--multipliers", help="JSON list of multiplier tuples")
    s.set_defaults(func=cmd_closure)

    s = sub.add_parser("generate", parents=[common], help="emit an instance file")
    s.add_argument("--kind", required=True, choices=("family1", "family2", "random_sign_pattern",
                                                     "random_packing_2row", "random_covering_2row"))
    s.add_argument("--M", type=int)
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--m", type=int, default=2)
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("verify", parents=[common], help="run a verification experiment")
    s.add_argument("experiment", choices=("thm1", "thm2", "thm3", "packcover", "m3probe"))
    s.add_argument("--M", type=int)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--instances", type=int)
    s.add_argument("--lambdas", type=int, default=20)
    s.add_argument("--objectives", type=int, default=5)
    s.add_argument("--n", type=int, default=5)
    s.add_argument("--alpha", type=parse_rational)
    s.add_argument("--x1-max", type=int)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_verify)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_DATA if exc.code else EXIT_OK
    cfg = RunConfig(command=args.command, instance=getattr(args, "file", None),
                    output=args.output, format=args.format, reproducible=args.reproducible,
                    seed=getattr(args, "seed", None))
    if args.command == "verify" and args.experiment == "thm1" and args.seed is None:
        args.seed = 1
    try:
        if getattr(args, "obj", None):
            cfg.objective = Objective(parse_vector(args.obj))
        return args.func(args, cfg)
    except InvalidPolyhedron as exc:
        for v in exc.violations:
            print(str(v), file=sys.stderr)
        return EXIT_DATA
    except (UsageError, InstanceError, ModelError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
