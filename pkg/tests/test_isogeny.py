import random

import pytest

from isovolcano.curve import add, curve_from_j, mul, point_count, random_point
from isovolcano.errors import InvalidArgument
from isovolcano.ff_poly import PrimeField
from isovolcano.isogeny import (KernelSubgroup, cyclic_subgroup_generators, evaluate,
                                kernel_from_point, rational_isogenous_j, rational_kernels,
                                rational_torsion_point, torsion_basis, velu_isogeny)


def _curves(seed, count, primes=(1009, 4451, 7919)):
    rng = random.Random(seed)
    for _ in range(count):
        p = rng.choice(primes)
        ctx = PrimeField(p)
        j = rng.randrange(2, p)
        if j == 1728 % p:
            continue
        yield curve_from_j(ctx, j), rng


@pytest.mark.parametrize("ell", [2, 3, 5, 7])
def test_velu_codomain_is_isogenous_and_map_is_homomorphism(ell):
    checked = 0
    for E, rng in _curves(ell, 40):
        for ker in rational_kernels(E, ell, rng):
            step = velu_isogeny(E, ker)
            F = step.target
            assert point_count(F) == point_count(E)
            for _ in range(3):
                P, Q = random_point(E, rng), random_point(E, rng)
                phiP, phiQ = evaluate(step, P), evaluate(step, Q)
                assert F.is_on_curve(phiP) and F.is_on_curve(phiQ)
                assert evaluate(step, add(E, P, Q)) == add(F, phiP, phiQ)
            checked += 1
    assert checked > 10


@pytest.mark.parametrize("ell", [3, 5, 7])
def test_kernel_from_rational_point_is_killed(ell):
    checked = 0
    for E, rng in _curves(10 + ell, 80):
        P = rational_torsion_point(E, ell, rng)
        if P is None:
            continue
        ker = kernel_from_point(E, P, ell)
        step = velu_isogeny(E, ker)
        for k in range(1, ell):
            assert evaluate(step, mul(E, k, P)) is None
        assert ker.kernel_poly in {k.kernel_poly for k in rational_kernels(E, ell, rng)}
        checked += 1
    assert checked >= 3


def test_two_isogeny_count_matches_cubic_roots():
    for E, rng in _curves(2, 30):
        n_two_torsion = sum(1 for x in range(E.p) if E.rhs(x) == 0)
        assert len(rational_kernels(E, 2, rng)) == n_two_torsion


def test_torsion_basis_gives_all_subgroups():
    # p = 4451, t = 52 gives full rational 2-torsion: look for a curve with full E[5]
    rng = random.Random(5)
    for E, _ in _curves(50, 400, primes=(4451,)):
        N = point_count(E)
        if N % 25:
            continue
        basis = torsion_basis(E, 5, rng, N)
        if basis is None:
            continue
        gens = cyclic_subgroup_generators(E, 5, basis)
        kers = {kernel_from_point(E, P, 5).kernel_poly for P in gens}
        assert len(gens) == 6
        if len(kers) == 6:
            assert kers == {k.kernel_poly for k in rational_kernels(E, 5, rng)}
            return
    pytest.fail("no curve with rational 5-torsion basis found")


def test_isogenous_j_multiset_symmetry():
    ctx = PrimeField(4451)
    E = curve_from_j(ctx, 901)
    js = rational_isogenous_j(E, 5)
    assert len(js) == 6
    for j2 in set(js):
        assert 901 in rational_isogenous_j(curve_from_j(ctx, j2), 5)


def test_invalid_kernels_rejected():
    ctx = PrimeField(1009)
    E = curve_from_j(ctx, 5)
    with pytest.raises(InvalidArgument):
        KernelSubgroup(E, 5, (1, 2, 3, 1))
    with pytest.raises(InvalidArgument):
        velu_isogeny(E, KernelSubgroup(E, 5, (17, 3, 1)))
    with pytest.raises(InvalidArgument):
        rational_kernels(E, 4)
