"""Exact sign-pattern integer programs and aggregation closures."""
from .model import (AggregationWeights, CoveringPolyhedron, InvalidPolyhedron, ModelError, Objective,
                    PackingPolyhedron, SignPatternPolyhedron, aggregate, aggregate_k, validate_sign_pattern)
from .exactlp import LpSolution, lp_solve, simplex_max, single_row_boundedness, single_row_lp_opt
from .exactip import IpResult, branch_and_bound, enumerate_ip, family2_aggregated_ip
from .closures import BoundInterval, HullMembershipCertificate, hull_membership

__version__ = "0.1.0"

__all__ = [
    "AggregationWeights", "BoundInterval", "CoveringPolyhedron", "HullMembershipCertificate", "InvalidPolyhedron",
    "IpResult", "LpSolution", "ModelError", "Objective", "PackingPolyhedron", "SignPatternPolyhedron",
    "aggregate", "aggregate_k", "branch_and_bound", "enumerate_ip", "family2_aggregated_ip", "hull_membership",
    "lp_solve", "simplex_max", "single_row_boundedness", "single_row_lp_opt", "validate_sign_pattern",
]
