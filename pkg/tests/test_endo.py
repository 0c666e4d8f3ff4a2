import random

import pytest

from isovolcano.census import isogeny_class
from isovolcano.curve import curve_from_j, point_count, solve_norm_equation
from isovolcano import endo
from isovolcano.endo import (SmoothRelation, endo_ring_full, endo_ring_small,
                             find_discriminating_relation, relation_closures)
from isovolcano.errors import InvalidArgument
from isovolcano.ff_poly import PrimeField
from isovolcano.hilbert import find_curve_with_trace

# (p, t, ell, relation) with ell exactly dividing v and Phi_ell available,
# so the relation verdict can be compared with the floor distance
RELATION_CASES = [
    (2003, 24, 13, "3:3:+"),  # v = 26, D_K = -11
    (2081, 54, 13, "3:2:+"),  # v = 26, D_K = -8
]


def _norm_data(ctx, j):
    t = ctx.p + 1 - point_count(curve_from_j(ctx, j), random.Random(j))
    return solve_norm_equation(ctx.p, t)


def test_example_curves_mod_4451(phis):
    ctx = PrimeField(4451)
    ne = _norm_data(ctx, 901)
    assert abs(ne.t) == 52 and ne.v == 10 and ne.D_K == -151
    top = endo_ring_small(phis, ctx, 901, ne)
    assert top.u == 1 and top.levels == {2: 1, 5: 1} and top.complete
    assert top.D_end == -151
    low = endo_ring_small(phis, ctx, 3188, _norm_data(ctx, 3188))
    assert low.u == 5 and low.D_end == -25 * 151


def test_trivial_v_gives_maximal_order(phis):
    ctx = PrimeField(4451)
    rng = random.Random(3)
    for j in range(2, 400):
        ne = _norm_data(ctx, j)
        if ne.v == 1:
            assert endo_ring_small(phis, ctx, j, ne).u == 1
            assert endo_ring_full(phis, ctx, j, ne, rng=rng).u == 1
            return
    pytest.fail("no curve with v = 1 found")


def test_budget_leaves_primes_unresolved(phis):
    ctx = PrimeField(4451)
    ne = _norm_data(ctx, 901)
    res = endo_ring_small(phis, ctx, 901, ne, budget=3)
    assert res.unresolved == (5,) and not res.complete and res.u == 1


def test_relation_text_round_trip():
    rel = SmoothRelation.parse("3:18:+, 11:2:-", -8)
    assert rel.entries == ((3, 18, False), (11, 2, True))
    assert rel.to_text() == "3:18:+,11:2:-"
    assert len(list(rel.conjugate_variants())) == 4
    for bad in ("3:0:+", "3:2:x", "3-2-+", "5:1:+"):
        with pytest.raises(InvalidArgument):
            SmoothRelation.parse(bad, -8)  # 5 is inert in Q(sqrt(-2))


@pytest.mark.parametrize("p,t,ell,text", RELATION_CASES)
def test_relation_separates_the_order_lattice(p, t, ell, text):
    ne = solve_norm_equation(p, t)
    rel = SmoothRelation.parse(text, ne.D_K)
    assert find_discriminating_relation(ne.D_K, ne.v, ell, [2, 3, 5, 7], max_entries=2) == rel
    for d in (k for k in range(1, ne.v + 1) if ne.v % k == 0):
        D = d * d * ne.D_K
        if d % ell:
            assert rel.holds_in(D), d
        else:
            assert not any(var.holds_in(D) for var in rel.conjugate_variants()), d


@pytest.mark.parametrize("p,t,ell,text", RELATION_CASES)
def test_relation_verdicts_match_floor_distances(phis, p, t, ell, text):
    ctx = PrimeField(p)
    rng = random.Random(p)
    ne = solve_norm_equation(p, t)
    rel = SmoothRelation.parse(text, ne.D_K)
    E = find_curve_with_trace(ctx, t, rng)
    js = isogeny_class({q: phis[q] for q in (2, 3, 5, 7, 11, 13)}, ctx, E.j, rng)
    seen_u = set()
    for j in js:
        truth = endo_ring_small(phis, ctx, j, ne, rng=rng)
        fast = endo_ring_full(phis, ctx, j, ne, {ell: rel}, budget=ell - 1, rng=rng)
        assert fast.complete and fast.u == truth.u, j
        seen_u.add(truth.u)
    assert {u % ell == 0 for u in seen_u} == {True, False}


def test_trivial_relation_always_closes(phis):
    ctx = PrimeField(2003)
    E = find_curve_with_trace(ctx, 24, random.Random(1))
    rel = SmoothRelation(((3, 1, False), (3, 1, True)), -11)
    assert endo.test_relation(phis, ctx, E.j, rel)
    assert relation_closures(phis, ctx, E.j, rel) >= 2


def test_relations_decide_only_exactly_dividing_primes(phis):
    ctx = PrimeField(4451)
    with pytest.raises(InvalidArgument):
        find_discriminating_relation(-151, 10, 3, [7])
    rel = SmoothRelation(((7, 1, False),), None)
    ne = _norm_data(ctx, 428)  # v = 25
    assert ne.v == 25
    with pytest.raises(InvalidArgument):
        endo_ring_full(phis, ctx, 428, ne, {5: rel}, budget=1)
