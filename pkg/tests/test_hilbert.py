import random

import pytest

from isovolcano.classgroup import class_number, reduced_forms
from isovolcano.curve import point_count
from isovolcano.errors import InvalidArgument
from isovolcano.ff_poly import PrimeField, pfrom_roots
from isovolcano.hilbert import (crt_lift, find_curve_with_trace, height_estimate,
                                hilbert_class_polynomial, hilbert_mod_p, select_crt_primes)

from oracles import hilbert_by_complex_cm

SURFACE = [351, 701, 901, 1582, 2215, 2501, 2872]

# classical values
H15 = [-121287375, 191025, 1]
H23 = [12771880859375, -5151296875, 3491750, 1]


@pytest.mark.parametrize("D,expected", [(-15, H15), (-23, H23)])
def test_small_class_polynomials(phis, D, expected):
    assert hilbert_class_polynomial(D, phis).coefficients == expected


def test_degenerate_discriminants(phis):
    assert hilbert_class_polynomial(-3, phis).coefficients == [0, 1]
    assert hilbert_class_polynomial(-4, phis).coefficients == [-1728, 1]
    assert hilbert_class_polynomial(-7, phis).coefficients == [3375, 1]
    assert hilbert_class_polynomial(-8, phis).coefficients == [-8000, 1]


def test_h151_mod_4451_is_the_figure_surface(phis):
    H = hilbert_class_polynomial(-151, phis)
    assert H.degree == 7
    assert H.reduce(4451).coefficients == pfrom_roots(PrimeField(4451), SURFACE)
    direct = hilbert_mod_p(-151, (4451, 52, 10), phis, random.Random(0))
    assert direct == pfrom_roots(PrimeField(4451), SURFACE)


def test_independent_plans_agree(phis):
    a = hilbert_class_polynomial(-151, phis, parity=0)
    b = hilbert_class_polynomial(-151, phis, parity=1)
    assert a.coefficients == b.coefficients


@pytest.mark.parametrize("D", [-71, -104, -231, -356])
def test_degree_and_plan_lift(phis, D):
    bound = height_estimate(D)
    plan = select_crt_primes(D, bound + 8, ells=tuple(phis))
    for p, t, v in plan.primes:
        assert 4 * p == t * t - v * v * D
    residues = [hilbert_mod_p(D, e, phis, random.Random(e[0])) for e in plan.primes]
    lifted = crt_lift(plan, residues)
    assert lifted.degree == class_number(D)
    assert lifted.coefficients == hilbert_class_polynomial(D, phis).coefficients
    # both plans select disjoint primes
    even = {e[0] for e in select_crt_primes(D, bound, ells=tuple(phis), parity=0).primes}
    odd = {e[0] for e in select_crt_primes(D, bound, ells=tuple(phis), parity=1).primes}
    assert not even & odd


def test_curve_with_trace():
    ctx = PrimeField(411751)
    rng = random.Random(3)
    for t in (52, -52, 1, 1000):
        E = find_curve_with_trace(ctx, t, rng)
        assert ctx.p + 1 - point_count(E) == t
    with pytest.raises(InvalidArgument):
        find_curve_with_trace(ctx, 2000, rng)


def test_bad_plan_entry_rejected(phis):
    with pytest.raises(InvalidArgument):
        hilbert_mod_p(-151, (4451, 50, 10), phis)
    with pytest.raises(InvalidArgument):
        hilbert_class_polynomial(-5, phis)


@pytest.mark.parametrize("D", [-420, -3315, -1151, -151 * 4, -23 * 25, -3 * 49])
def test_matches_complex_multiplication_values(phis, D):
    """Cyclic and non-cyclic class groups, against complex-analytic j-values."""
    H = hilbert_class_polynomial(D, phis, rng=random.Random(D))
    assert H.coefficients == hilbert_by_complex_cm(D, reduced_forms(D))
