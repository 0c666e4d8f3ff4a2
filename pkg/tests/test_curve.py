import random

import pytest
from hypothesis import given, settings, strategies as st

from isovolcano.arith import fundamental_part, is_fundamental
from isovolcano.curve import (CurveModel, add, curve_from_j, division_polynomial, mul,
                              point_count, quadratic_twist, random_point, rational_points,
                              solve_norm_equation)
from isovolcano.errors import InvalidArgument, SupersingularError
from isovolcano.ff_poly import PrimeField, peval

from oracles import legendre_count

PRIMES = [1009, 4451, 10007, 65537, 99991]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(PRIMES), st.integers(0, 10**9))
def test_curve_from_j_round_trip(p, j):
    ctx = PrimeField(p)
    assert curve_from_j(ctx, j % p).j == j % p


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(PRIMES), st.integers(2, 10**9))
def test_point_count_matches_legendre_sum(p, j):
    ctx = PrimeField(p)
    E = curve_from_j(ctx, j % p)
    assert point_count(E, random.Random(j)) == legendre_count(p, E.a, E.b)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(PRIMES + [1000003, 2**31 - 1]), st.integers(2, 10**9))
def test_twist_counts_add_to_2p_plus_2(p, j):
    ctx = PrimeField(p)
    E = curve_from_j(ctx, j % p)
    T = quadratic_twist(E)
    assert T.j == E.j
    assert point_count(E) + point_count(T) == 2 * p + 2


def test_large_prime_count_annihilates_points():
    p = 2**31 - 1
    ctx = PrimeField(p)
    rng = random.Random(7)
    E = curve_from_j(ctx, 123456789)
    N = point_count(E, rng)
    assert abs(p + 1 - N) <= 2 * int(p**0.5) + 1
    for _ in range(5):
        assert mul(E, N, random_point(E, rng)) is None


def test_group_law_on_tiny_curve():
    ctx = PrimeField(13)
    E = CurveModel(ctx, 1, 6)
    pts = rational_points(E)
    assert len(pts) == legendre_count(13, 1, 6)
    for P in pts:
        for Q in pts:
            assert E.is_on_curve(add(E, P, Q))
        assert mul(E, len(pts), P) is None


def test_singular_curve_rejected():
    with pytest.raises(InvalidArgument):
        CurveModel(PrimeField(7), 0, 0)


def test_norm_equation_example():
    ne = solve_norm_equation(411751, 52)
    assert (ne.v, ne.D_K) == (90, -203)
    ne = solve_norm_equation(4451, 52)
    assert (ne.v, ne.D_K) == (10, -151)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(PRIMES), st.integers(1, 600))
def test_norm_equation_properties(q, t):
    if t * t >= 4 * q:
        return
    ne = solve_norm_equation(q, t)
    assert 4 * q == t * t - ne.v**2 * ne.D_K
    assert is_fundamental(ne.D_K)
    assert fundamental_part(t * t - 4 * q) == (ne.D_K, ne.v)


def test_norm_equation_rejects_supersingular_and_hasse():
    with pytest.raises(SupersingularError):
        solve_norm_equation(4451, 0)
    with pytest.raises(InvalidArgument):
        solve_norm_equation(4451, 200)


@pytest.mark.parametrize("n", [2, 3, 5, 7])
def test_division_polynomial_vanishes_on_torsion(n):
    p = 1009
    ctx = PrimeField(p)
    E = curve_from_j(ctx, 500)
    psi = division_polynomial(E, n)
    expected_degree = 3 if n == 2 else (n * n - 1) // 2
    assert psi.degree == expected_degree
    for P in rational_points(E):
        if P is None:
            continue
        is_torsion = mul(E, n, P) is None
        if n == 2:
            is_torsion = P[1] == 0
        assert (peval(ctx, psi.coeffs, P[0]) == 0) == is_torsion
