import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from aggclosure.closures import (BadSubset, HullMembershipCertificate, NoConvexCombination,
                                 SupportPointFractional, SupportPointInfeasible, aggregation_closure_interval,
                                 as_sign_pattern, default_multipliers, find_hull_certificate, hull_membership,
                                 krow_certificates, original_krow_interval, original_krow_lower,
                                 original_krow_upper, family2_support_points)
from aggclosure.exactip import branch_and_bound, box_for_packing
from aggclosure.exactlp import lp_solve
from aggclosure.families import (family1, family1_lambda_star, family2, family2_lambda_bar, family2_mu_bar,
                                 random_packing, random_sign_compatible_objective, random_sign_pattern, Rng)
from aggclosure.model import Objective, is_feasible, is_integral

HALF = F(1, 2)
TARGET4 = (5, HALF, HALF, HALF)


def reverify(cert, relaxation):
    """Re-check a certificate without calling its own verify()."""
    assert all(w >= 0 for w in cert.weights) and sum(cert.weights) == 1
    for j, t in enumerate(cert.target):
        assert sum(w * p[j] for w, p in zip(cert.weights, cert.support_points)) == t
    for p in cert.support_points:
        assert is_integral(p) and is_feasible(relaxation, p)


# --- hull membership -------------------------------------------------------

def test_hull_membership_examples():
    P, _ = family2(4)
    cert = hull_membership(TARGET4, P.rows([0, 1]), [(5, 1, 0, 0), (5, 0, 1, 1)])
    assert cert.weights == (HALF, HALF) and cert.verify(P.rows([0, 1]))
    cert = hull_membership(TARGET4, P.rows([2, 3]), [(5, 0, 1, 0), (5, 1, 0, 1)])
    assert cert.weights == (HALF, HALF)
    cert = hull_membership((5, 1, 0, 0), P.rows([0, 1]), [(5, 1, 0, 0)])
    assert cert.weights == (1,)


def test_hull_membership_errors():
    P, _ = family2(4)
    pair = P.rows([0, 1])
    with pytest.raises(SupportPointFractional) as exc:
        hull_membership(TARGET4, pair, [(5, 1, 0, 0), TARGET4])
    assert exc.value.k == 1 and str(exc.value) == "SupportPointFractional(2)"
    with pytest.raises(SupportPointInfeasible):
        hull_membership(TARGET4, pair, [(6, 0, 0, 0)])
    with pytest.raises(NoConvexCombination):
        hull_membership(TARGET4, pair, [(5, 1, 0, 0)])
    with pytest.raises(NoConvexCombination):
        hull_membership(TARGET4, pair, [])


def test_verify_rejects_tampering():
    P, _ = family2(4)
    cert = hull_membership(TARGET4, P.rows([0, 1]), [(5, 1, 0, 0), (5, 0, 1, 1)])
    bad = HullMembershipCertificate(cert.target, cert.support_points, (F(1, 3), F(2, 3)))
    assert not bad.verify(P.rows([0, 1]))
    assert not cert.verify(P)  # (5,1,0,0) violates row 3 of the full system


def test_family2_support_points_examples():
    assert family2_support_points({0, 1}, 4) == ((5, 1, 0, 0), (5, 0, 1, 1))
    assert family2_support_points({0, 2}, 4) == ((5, 0, 1, 0), (5, 1, 0, 1))
    assert family2_support_points({1, 3}, 4) == ((5, 1, 0, 0), (5, 0, 1, 1))
    with pytest.raises(BadSubset):
        family2_support_points({0}, 4)


@pytest.mark.parametrize("M", range(2, 41, 2))
def test_six_certificates(M):
    P, _ = family2(M)
    target = (M + 1, HALF, HALF, HALF)
    for K in itertools.combinations(range(4), 2):
        cert = hull_membership(target, P.rows(K), family2_support_points(K, M), rows=K)
        reverify(cert, P.rows(K))


def test_rounding_cube_search():
    P, _ = family2(4)
    cert = find_hull_certificate(TARGET4, P.rows([0, 3]))
    reverify(cert, P.rows([0, 3]))
    assert all(w > 0 for w in cert.weights)


def test_target_not_in_full_hull():
    P, _ = family2(4)
    with pytest.raises(NoConvexCombination):
        find_hull_certificate(TARGET4, P)


# --- original k-row closure --------------------------------------------------

def test_family2_two_row_closure_collapses_at_lp():
    P, obj = family2(4)
    iv = original_krow_interval(P, obj, 2, points=[TARGET4], support=lambda K: family2_support_points(K, 4))
    assert iv.lower == iv.upper == 2 and len(iv.certificates) == 6
    for cert in iv.certificates:
        reverify(cert, P.rows(cert.rows))


def test_family1_two_row_closure_is_integer_hull():
    P, obj = family1(4)
    iv = original_krow_interval(P, obj, 2)
    assert iv.lower == iv.upper == 2


def test_k_equals_m_gives_ip():
    P, obj = family2(6)
    iv = original_krow_interval(P, obj, 4)
    assert iv.collapsed and iv.lower == branch_and_bound(P, obj).value


def test_krow_upper_and_lower_helpers():
    P, obj = family2(4)
    assert original_krow_upper(P, obj, 2) == 2
    assert original_krow_lower(P, obj, 2, [TARGET4], lambda K: family2_support_points(K, 4)) == 2
    assert krow_certificates(P, 4, TARGET4) is None


# --- aggregation closures ----------------------------------------------------

def test_family1_single_aggregation_interval():
    P, obj = family1(4)
    iv = aggregation_closure_interval(P, obj, [(family1_lambda_star(4),)])
    assert (iv.lower, iv.upper) == (2, 4)


def test_family2_pair_aggregation_interval():
    P, obj = family2(4)
    iv = aggregation_closure_interval(P, obj, [(family2_lambda_bar(), family2_mu_bar())])
    assert (iv.lower, iv.upper) == (1, 1)


def test_empty_multiplier_list():
    P, obj = family1(4)
    iv = aggregation_closure_interval(P, obj, [])
    assert iv.upper == lp_solve(P, obj).value == 4 and iv.lower == 2


def test_default_multipliers_include_family_choices():
    P, _ = family2(4)
    assert (family2_lambda_bar(), family2_mu_bar()) in default_multipliers(P, 2)
    P, _ = family1(10)
    assert (family1_lambda_star(10),) in default_multipliers(P, 1)


def test_packing_is_aggregated_as_sign_pattern():
    P = random_packing(3, 2, 4)
    assert as_sign_pattern(P).jplus == {0, 1, 2}


# --- properties --------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 3), st.integers(1, 3))
def test_interval_nesting(seed, n, m):
    P = random_sign_pattern(n, m, seed, max_coeff=5, max_rhs=6)
    obj = random_sign_compatible_objective(P, Rng(seed, "obj"), max_coeff=5)
    lp = lp_solve(P, obj)
    if not lp.optimal:
        return
    ip = branch_and_bound(P, obj, node_limit=3000)
    if not ip.exact:
        return
    iv = aggregation_closure_interval(P, obj, default_multipliers(P, 1), k=1)
    assert ip.value <= iv.lower <= iv.upper <= lp.value
    assert lp.value / 2 <= ip.value


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 3))
def test_more_multipliers_never_raise_the_upper_bound(seed, n):
    P = random_sign_pattern(n, 3, seed, max_coeff=5, max_rhs=6)
    obj = random_sign_compatible_objective(P, Rng(seed, "obj"), max_coeff=5)
    if not lp_solve(P, obj).optimal:
        return
    mults = default_multipliers(P, 1)
    first = aggregation_closure_interval(P, obj, mults[:2], k=1)
    more = aggregation_closure_interval(P, obj, mults, k=1)
    assert more.upper <= first.upper


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_packing_aggregation_upper_vs_ip(seed):
    P = random_packing(3, 2, seed, max_rhs=10)
    obj = Objective((1, 2, 3))
    ip = branch_and_bound(P, obj, box=box_for_packing(P))
    iv = aggregation_closure_interval(P, obj, default_multipliers(P, 2), k=2)
    assert ip.value <= iv.lower <= iv.upper
    assert iv.upper == ip.value  # with k = m = 2 the unit pair reproduces P itself
