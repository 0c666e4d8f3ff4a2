import random

import pytest
from hypothesis import assume, given, settings, strategies as st

from isovolcano.arith import kronecker
from isovolcano.classgroup import (QuadraticForm, class_number, compose, conductor,
                                   enumerate_exponent_vectors, form_order, kronecker_class_number,
                                   lift_class, minimal_generator_norm, optimal_presentation,
                                   power, prime_form, principal, reduce, reduced_forms,
                                   split_primes)
from isovolcano.errors import InvalidArgument

from oracles import class_number_by_forms, hurwitz_style_count

discs = st.integers(3, 4000).map(lambda n: -n).filter(lambda D: D % 4 in (0, 1))


@settings(max_examples=80, deadline=None)
@given(discs)
def test_class_number_matches_direct_count(D):
    assert class_number(D) == class_number_by_forms(D)


@settings(max_examples=60, deadline=None)
@given(discs, st.data())
def test_composition_is_an_abelian_group_law(D, data):
    forms = reduced_forms(D)
    f, g, k = (data.draw(st.sampled_from(forms)) for _ in range(3))
    one = principal(D)
    assert compose(f, one) == f
    assert compose(f, g) == compose(g, f)
    assert compose(compose(f, g), k) == compose(f, compose(g, k))
    assert compose(f, f.conjugate()) == one
    assert power(f, form_order(f)) == one
    assert power(f, -3) == power(f.conjugate(), 3)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 200), st.integers(-300, 300), st.integers(1, 400))
def test_reduce_is_canonical(a, b, c):
    D = b * b - 4 * a * c
    assume(D < 0)
    f = reduce(QuadraticForm(a, b, c))
    assert f.is_reduced() and f.disc == D
    # an equivalent form (x -> x + 3y) reduces to the same representative
    g = QuadraticForm(a, b + 6 * a, 9 * a + 3 * b + c)
    assert reduce(g) == f


def _pairs(n, seed=11):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        D = -rng.randrange(5, 3000)
        ell = rng.choice([2, 3, 5, 7, 11, 13])
        if D % 4 in (0, 1) and conductor(D) % ell:
            out.append((D, ell))
    return out


@pytest.mark.parametrize("D,ell", _pairs(30))
def test_class_number_of_suborder(D, ell):
    assert class_number(ell * ell * D) == (ell - kronecker(D, ell)) * class_number(D)


def test_kronecker_class_number_example():
    assert kronecker_class_number(52 * 52 - 4 * 411751) == 1008
    assert kronecker_class_number(52 * 52 - 4 * 4451) == 70


@pytest.mark.parametrize("delta", [-151 * 4, -23 * 9, -700, -1156, -3 * 49])
def test_kronecker_class_number_matches_sum_over_orders(delta):
    assert kronecker_class_number(delta) == hurwitz_style_count(delta)


@settings(max_examples=40, deadline=None)
@given(discs, st.sampled_from([2, 3, 5, 7, 11, 13]))
def test_prime_forms(D, ell):
    f = prime_form(D, ell)
    invertible = kronecker(D, ell) != -1 and conductor(D) % ell != 0
    assert (f is not None) == invertible
    if f is not None:
        assert f.disc == D and f.is_reduced()
        a, b, c = f
        assert any(a * x * x + b * x * y + c * y * y == ell
                   for x in range(-ell, ell + 1) for y in range(0, ell + 1))


def test_lift_class_is_a_homomorphism():
    D = -151
    for m in (2, 5, 10):
        forms = reduced_forms(m * m * D)
        for f in forms[:12]:
            for g in forms[:12]:
                lhs = lift_class(compose(f, g), D)
                assert lhs == compose(lift_class(f, D), lift_class(g, D))
        images = {lift_class(f, D) for f in forms}
        assert len(images) == class_number(D)


@pytest.mark.parametrize("D", [-151, -203, -3775, -79447, -23 * 4 * 9])
def test_presentation_is_a_bijection(D):
    pres = optimal_presentation(D)
    assert pres.order == class_number(D)
    seen = {}
    steps = 0
    for idx, vec, src, gen in enumerate_exponent_vectors(pres):
        cls = pres.element(vec)
        assert pres.discrete_log(cls) == vec
        seen[cls] = vec
        if src is not None:
            steps += 1
    assert len(seen) == pres.order and steps == pres.order - 1
    for i, (g, r, rel) in enumerate(zip(pres.generators, pres.relative_orders,
                                        pres.power_relations)):
        assert power(g, r) == pres.element(tuple(rel) + (0,) * (len(pres.norms) - len(rel)))


def test_presentation_example_at_79447():
    pres = optimal_presentation(-79447)
    assert class_number(-79447) == 100
    assert pres.norms == [2, 13]
    assert pres.relative_orders == [20, 5]
    assert pres.power_relations[1] == (18,)
    assert minimal_generator_norm(-79447) == 19
    orders = {ell: form_order(f) for ell, f in split_primes(-79447, 30)}
    assert orders == {2: 20, 13: 50, 19: 100, 23: 100, 29: 25}
    steps = [gen for _, _, _, gen in enumerate_exponent_vectors(pres) if gen is not None]
    assert steps.count(0) == 95


def test_invalid_discriminants():
    for D in (5, -5, 0, -6):
        with pytest.raises(InvalidArgument):
            principal(D)
