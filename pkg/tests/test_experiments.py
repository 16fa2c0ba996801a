import json
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from aggclosure.experiments import (ExperimentReport, case_bound, classify_covering_case, covering_case_matches,
                                    covering_rounding, jsonable, packcover_suite, probe_instance, probe_m3_gap,
                                    thm1_suite, thm2_experiment, thm3_experiment)
from aggclosure.families import family2, random_packing
from aggclosure.model import Objective, validate_sign_pattern


# --- factor-2 suite ----------------------------------------------------------

def test_thm1_small_run_is_clean():
    rep = thm1_suite(40, 10, 3, seed=1)
    assert rep.violations == 0
    assert rep.summary["oracle_mismatches"] == 0 and rep.summary["checks"] > 0
    assert rep.summary["max_observed_ratio"] <= 2


def test_thm1_counts_degenerate_multipliers():
    rep = thm1_suite(30, 20, 1, seed=2)
    assert rep.summary["degenerate_lambdas_skipped"] > 0


def test_thm1_parallel_matches_serial():
    a = thm1_suite(12, 5, 2, seed=9, jobs=1).to_json(reproducible=True)
    b = thm1_suite(12, 5, 2, seed=9, jobs=2).to_json(reproducible=True)
    assert a == b


# --- separations -------------------------------------------------------------

@pytest.mark.parametrize("M,ratio", [(2, F(1, 2)), (4, F(1)), (10, F(5, 2)), (100, F(25))])
def test_thm2_examples(M, ratio):
    s = thm2_experiment(M).summary
    assert s["ratio_lower_bound"] == ratio and s["z_A2"] == 2 and s["bnb_closed"]


@pytest.mark.parametrize("M", range(3, 101))
def test_thm2_values(M):
    rep = thm2_experiment(M)
    assert rep.summary["z_lp"] == M and rep.summary["z_A2"] == 2 and rep.passed
    assert rep.records[0]["matches_expected"]


def test_thm2_alpha():
    s = thm2_experiment(20, alpha=4).summary
    assert s["separates_alpha"] and thm2_experiment(8, alpha=4).summary["separates_alpha"] is False


@pytest.mark.parametrize("M", range(2, 41, 2))
def test_thm3_every_even_M(M):
    rep = thm3_experiment(M)
    s = rep.summary
    assert s["valid_certificates"] == 6 and s["ratio_exact"]
    assert s["ratio"] == F(M, 4) + 1 == s["expected_ratio"]
    assert s["z_A2"] == [1, 1] and rep.passed


@pytest.mark.parametrize("M,ratio", [(4, 2), (8, 3), (20, 6)])
def test_thm3_examples(M, ratio):
    assert thm3_experiment(M).summary["ratio"] == ratio


# --- covering case analysis --------------------------------------------------

def test_case_six_example():
    assert classify_covering_case(F(1, 2), F(9, 10)) == 6 and case_bound(6) == 2


@pytest.mark.parametrize("x1,x2,case", [
    (F(1), F(3), 1), (F(1, 2), F(1), 2), (F(7, 5), F(2, 5), 3), (F(39, 100), F(5), 4), (F(2), F(1, 10), 5),
    (F(1, 10), F(99, 100), 6),
])
def test_case_boundaries(x1, x2, case):
    assert classify_covering_case(x1, x2) == case


@settings(max_examples=500)
@given(st.builds(F, st.integers(1, 400), st.integers(1, 100)), st.builds(F, st.integers(1, 400), st.integers(1, 100)))
def test_cases_partition_positive_quadrant(x1, x2):
    assert len(covering_case_matches(x1, x2)) == 1


def test_single_variable_rounding():
    assert covering_rounding((0, F(3, 2), 0), [1], "single") == (0, 2, 0) and case_bound("single") == 2


def test_case_four_rounding():
    assert covering_rounding((F(1, 5), F(12, 5)), [0, 1], 4) == (0, 3)
    assert covering_rounding((F(12, 5), F(1, 5)), [0, 1], 5) == (3, 0)


def test_packcover_small_run():
    rep = packcover_suite(40, n=5, seed=3)
    s = rep.summary
    assert rep.violations == 0 and s["packing_violations"] == 0 and s["covering_violations"] == 0
    assert s["packing_max_ratio"] <= 3 and s["covering_max_ratio"] <= F(5, 2)
    for entry in s["covering_cases"].values():
        assert entry["max_rounding_ratio"] <= entry["bound"]


# --- three-row probe ---------------------------------------------------------

def test_probe_empty():
    rep = probe_m3_gap(0, seed=1)
    assert rep.records == [] and rep.summary["instances"] == 0


def test_probe_family2_without_bound_row():
    P, obj = family2(4)
    Q = P.rows([0, 1, 2])
    rep = probe_m3_gap(0, seed=1, extra=[("family2-M4-no-bound-row", Q, obj)])
    (rec,) = rep.records
    assert rec["index"] == "family2-M4-no-bound-row"


@pytest.mark.parametrize("seed", range(5))
def test_probe_packing_three_rows_ratio_at_most_three(seed):
    P = random_packing(3, 3, seed, max_rhs=8)
    SP = validate_sign_pattern(P.A, P.b, {0, 1, 2}, set())
    rec = probe_instance(SP, Objective((3, 2, 1)))
    assert rec["ratio"] is None or rec["ratio"] <= 3


# --- reports -----------------------------------------------------------------

def test_jsonable():
    assert jsonable({"a": F(3, 4), "b": [1, F(2)], "c": float("inf"), "d": True}) == \
        {"a": "3/4", "b": [1, "2"], "c": "inf", "d": True}


def test_report_reproducible_and_csv():
    rep = ExperimentReport("x", {"seed": 1}, [{"violation": True}], {"k": F(1, 2)}, 0.5, "now")
    d = json.loads(rep.to_json(reproducible=True))
    assert "timestamp" not in d and "runtime_seconds" not in d and d["summary"]["violations"] == 1
    assert "timestamp" in json.loads(rep.to_json())
    assert rep.to_csv(reproducible=True) == "experiment,key,value\nx,k,1/2\nx,violations,1\n"
    assert not rep.passed


def test_reports_rerun_identically():
    assert thm3_experiment(8).to_json(True) == thm3_experiment(8).to_json(True)
    assert packcover_suite(10, seed=5).to_json(True) == packcover_suite(10, seed=5).to_json(True)
