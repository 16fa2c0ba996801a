from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from aggclosure.exactip import branch_and_bound
from aggclosure.exactlp import lp_solve
from aggclosure.families import (BadM, BadParams, GeneratorSpec, Rng, family1, family1_lambda_star, family2,
                                 random_covering_2row, random_packing, random_packing_2row, random_sign_pattern,
                                 recognize_family)
from aggclosure.model import is_feasible, validate_sign_pattern


def test_family1_examples():
    P, obj = family1(4)
    assert P.A == ((1, -12), (1, 0)) and P.b == (1, 5) and obj.c == (1, -3)
    P, obj = family1(2)
    assert P.A == ((1, -2), (1, 0)) and P.b == (1, 3) and obj.c == (1, -1)
    with pytest.raises(BadM):
        family1(1)


def test_family2_examples():
    P, obj = family2(4)
    assert P.A[0] == (1, -4, -4, 0) and P.A[3] == (1, 0, 0, 0) and P.b == (1, 1, 1, 5)
    assert obj.c == (1, -2, -2, -2)
    assert family2(2)[1].c == (1, -1, -1, -1)
    with pytest.raises(BadM):
        family2(3)


@pytest.mark.parametrize("M", range(3, 101))
def test_family1_lp_and_ip(M):
    P, obj = family1(M)
    assert lp_solve(P, obj).value == M
    assert branch_and_bound(P, obj).value == 2


@pytest.mark.parametrize("M", range(2, 41, 2))
def test_family2_fractional_point(M):
    P, obj = family2(M)
    x = (M + 1, F(1, 2), F(1, 2), F(1, 2))
    assert is_feasible(P, x) and obj.value(x) == F(M, 4) + 1


def test_lambda_star():
    assert family1_lambda_star(4) == (F(1, 4), F(3, 4))


def test_recognize_family():
    assert recognize_family(family1(7)[0]) == ("family1", 7)
    assert recognize_family(family2(6)[0]) == ("family2", 6)
    assert recognize_family(random_sign_pattern(2, 2, 5)) is None


def test_random_examples():
    P = random_sign_pattern(2, 1, 7)
    validate_sign_pattern(P.A, P.b, P.jplus, P.jminus)
    assert random_sign_pattern(2, 1, 7) == P
    P = random_sign_pattern(3, 2, 11)
    assert all(P.A[i][j] <= P.b[i] for i in range(P.m) for j in P.jplus)


def test_rng_frozen_stream():
    # pins the integer-draw algorithm on top of MT19937 random()
    r = Rng(1, 0)
    assert [r.randint(0, 9) for _ in range(8)] == [7, 4, 3, 5, 8, 1, 5, 1]


def test_random_instance_frozen():
    P = random_sign_pattern(3, 2, 11)
    assert P.A == ((-8, -3, 0), (-8, -6, 4)) and P.b == (1, 9) and P.jplus == {2}


def test_rng_substreams_independent():
    a, again, b = Rng(3, 5), Rng(3, 5), Rng(3, 6)
    assert [a.randint(0, 100) for _ in range(5)] == [again.randint(0, 100) for _ in range(5)]
    assert [a.randint(0, 10 ** 9) for _ in range(4)] != [b.randint(0, 10 ** 9) for _ in range(4)]


def test_bad_params():
    with pytest.raises(BadParams):
        random_sign_pattern(0, 1, 1)
    with pytest.raises(BadParams):
        random_packing_2row(3, 1, max_rhs=0)


def test_generator_spec():
    assert GeneratorSpec("family1", {"M": 4}).provenance() == {"kind": "family1", "M": 4}


@settings(max_examples=300)
@given(st.integers(0, 10 ** 9), st.integers(1, 6), st.integers(1, 4))
def test_random_sign_pattern_valid(seed, n, m):
    P = random_sign_pattern(n, m, seed)
    validate_sign_pattern(P.A, P.b, P.jplus, P.jminus)
    assert P.jplus


@settings(max_examples=300)
@given(st.integers(0, 10 ** 9), st.integers(1, 6))
def test_random_two_row_samplers(seed, n):
    P = random_packing_2row(n, seed)
    C = random_covering_2row(n, seed)
    for Q in (P, C):
        assert Q.m == 2 and all(0 <= Q.A[i][j] <= Q.b[i] for i in range(2) for j in range(n))
    assert all(C.A[0][j] > 0 or C.A[1][j] > 0 for j in range(n))


@settings(max_examples=100)
@given(st.integers(0, 10 ** 9), st.integers(1, 5), st.integers(1, 4))
def test_random_packing_has_no_zero_column(seed, n, m):
    P = random_packing(n, m, seed)
    assert all(any(P.A[i][j] for i in range(m)) for j in range(n))
