"""Hilbert class polynomials H_D over Z by the CRT.

For each prime p = (t^2 - v^2 D)/4 a curve with trace t is found, moved up
the ell-volcanoes for ell | v until its endomorphism ring has discriminant D,
and the CM torsor is enumerated along the surfaces named by a polycyclic
presentation of cl(D).  H_D mod p is the product of X - j over the torsor.
"""

import random
from dataclasses import dataclass, field
from math import log, pi, sqrt

from .arith import factor, is_prime, isqrt, valuation
from .classgroup import (class_number, conductor, presentation_from_generators,
                         reduced_forms, split_primes)
from .crt import CrtAccumulator
from .curve import curve_from_j, mul as ec_mul, point_count, quadratic_twist, random_point
from .errors import AmbiguityError, InternalError, InvalidArgument, ResourceError
from .ff_poly import PrimeField, pfrom_roots
from .volcano import Navigator, shortest_path_to_floor, walk_surface_gcd, walk_surface_path

CURVE_SEARCH_FACTOR = 40
MAX_V = 64


@dataclass
class CrtPrimePlan:
    D: int
    primes: list
    bound: int

    @property
    def bits(self):
        total = 1
        for p, _, _ in self.primes:
            total *= p
        return total.bit_length()


@dataclass
class HilbertResult:
    D: int
    coefficients: list
    modulus: int = field(default=None)

    @property
    def degree(self):
        return len(self.coefficients) - 1

    def reduce(self, m):
        return HilbertResult(self.D, [c % m for c in self.coefficients], m)


def _check_disc(D):
    if D >= 0 or D % 4 not in (0, 1):
        raise InvalidArgument(f"{D} is not a negative discriminant")


def height_estimate(D):
    """Heuristic bit size of the largest coefficient of H_D."""
    s = sum(1.0 / f.a for f in reduced_forms(D))
    return int(pi * sqrt(-D) * s / log(2)) + 2 * len(reduced_forms(D)) + 16


def _smooth(n, ells):
    for q in factor(n) if n > 1 else ():
        if q not in ells:
            return False
    return True


def _candidate_primes(D, ells, exclude=()):
    """Yield (p, t, v) with 4p = t^2 - v^2 D, roughly in increasing order of p."""
    vs = [v for v in range(1, MAX_V + 1) if _smooth(v, ells)]
    seen = set(exclude)
    pmin = 4 * max(ells)
    lo, width = 0, max(256, -D)
    while lo < 1 << 40:
        hi = lo + width
        batch = []
        for v in vs:
            base = -v * v * D
            if base >= 4 * hi:
                break
            t = max(1, isqrt(max(0, 4 * lo - base)) - 1)
            while t * t + base < 4 * hi:
                num = t * t + base
                if num % 4 == 0:
                    p = num // 4
                    if p >= max(lo, pmin) and p not in seen and D % p and t % p and is_prime(p):
                        seen.add(p)
                        batch.append((p, t, v))
                t += 1
        yield from sorted(batch)
        lo, width = hi, 2 * width
    raise ResourceError(f"candidate primes for D={D} exhausted")


def select_crt_primes(D, bound, ells=(2,), exclude=(), parity=None):
    """Primes p = (t^2 - v^2 D)/4 with v smooth over ``ells`` until the
    product has at least ``bound`` bits.

    ``parity`` (0 or 1) keeps every other candidate, which yields disjoint
    plans for independent lifts.
    """
    _check_disc(D)
    primes, bits = [], 0
    for k, (p, t, v) in enumerate(_candidate_primes(D, set(ells), exclude)):
        if parity is not None and k % 2 != parity:
            continue
        primes.append((p, t, v))
        bits += log(p, 2)
        if bits >= bound:
            return CrtPrimePlan(D, primes, bound)
    raise ResourceError(f"not enough CRT primes for D={D}")


def find_curve_with_trace(ctx, t, rng=None, max_tries=None):
    """A curve over F_p with exactly p + 1 - t points."""
    p = ctx.p
    if t * t > 4 * p:
        raise InvalidArgument(f"|t| = {abs(t)} violates the Hasse bound")
    rng = rng if rng is not None else random.Random(p ^ t)
    N1, N2 = p + 1 - t, p + 1 + t
    max_tries = max_tries or CURVE_SEARCH_FACTOR * p + 1000
    for _ in range(max_tries):
        j = rng.randrange(p)
        if j in (0, 1728 % p):
            continue
        E = curve_from_j(ctx, j)
        Q = random_point(E, rng)
        hit1 = ec_mul(E, N1, Q) is None
        hit2 = ec_mul(E, N2, Q) is None
        if not (hit1 or hit2):
            continue
        n = point_count(E, rng)
        if n == N1:
            return E
        if n == N2:
            return quadratic_twist(E)
    raise ResourceError(f"no curve with trace {t} over F_{p} after {max_tries} tries")


def _ascend(phis, ctx, j, ell, levels_up, rng):
    """Move ``levels_up`` levels toward the surface of the ell-volcano of j."""
    nav = Navigator(phis[ell], ctx, rng)
    for _ in range(levels_up):
        delta = shortest_path_to_floor(None, ctx, j, nav=nav).delta
        for w in sorted(set(nav.neighbors(j))):
            if shortest_path_to_floor(None, ctx, w, nav=nav).delta == delta + 1:
                j = w
                break
        else:
            raise InternalError(f"no ascending {ell}-isogeny from {j}")
    return j


def climb_to_order(phis, ctx, j, v, rng, f=1):
    """Move j to the vertex whose order has discriminant f^2 D_K.

    The Frobenius order has index f*v, so for each ell | f*v the target sits
    nu_ell(v) levels above the floor of the ell-volcano.
    """
    n = f * v
    for ell in sorted(factor(n)) if n > 1 else ():
        if ell not in phis:
            raise InvalidArgument(f"Phi_{ell} needed to move on the {ell}-volcano")
        nav = Navigator(phis[ell], ctx, rng)
        path = shortest_path_to_floor(None, ctx, j, nav=nav).vertices
        delta, target = len(path) - 1, valuation(v, ell)
        if delta >= target:
            j = path[delta - target]
        else:
            j = _ascend(phis, ctx, j, ell, target - delta, rng)
    return j


def presentation_for(D, phis):
    """Optimal presentation of cl(D) restricted to generator norms we have Phi for."""
    gens = ((ell, f) for ell, f in split_primes(D, max(phis) + 1) if ell in phis)
    return presentation_from_generators(D, gens)


def enumerate_torsor(phis, ctx, j0, pres, v, rng, use_gcd=True):
    """All j in the CM torsor of j0, walking surfaces of each generator."""
    depths = [valuation(v, ell) for ell in pres.norms]
    navs = {ell: Navigator(phis[ell], ctx, rng) for ell in set(pres.norms)}
    k = len(pres.norms)

    def run(i, start):
        ell = pres.norms[i]
        return walk_surface_path(None, ctx, start, pres.relative_orders[i] - 1, depths[i],
                                 nav=navs[ell])

    def walk(i, start):
        # elements reachable with exponents e_0..e_i, e_i fastest last
        if i < 0:
            return [start]
        chain = run(i, start)
        if i == 0:
            return chain
        out = []
        inner_prev = None
        for z in chain:
            inner = None
            if use_gcd and i == 1 and inner_prev is not None:
                try:
                    inner = walk_surface_gcd(phis[pres.norms[0]], phis[pres.norms[1]], ctx,
                                             inner_prev, z)
                except AmbiguityError:
                    inner = None
            if inner is None:
                inner = walk(i - 1, z)
            out.extend(inner)
            inner_prev = inner
        return out

    if k == 0:
        return [j0]
    return walk(k - 1, j0)


def hilbert_mod_p(D, entry, phis, rng=None, pres=None):
    """H_D mod p as a coefficient list (constant term first)."""
    _check_disc(D)
    p, t, v = entry
    if 4 * p != t * t - v * v * D:
        raise InvalidArgument("plan entry does not satisfy 4p = t^2 - v^2 D")
    ctx = PrimeField(p)
    if D == -3:
        return [0, 1]
    if D == -4:
        return [ctx.neg(1728 % p), 1]
    rng = rng if rng is not None else random.Random(p)
    pres = pres if pres is not None else presentation_for(D, phis)
    E = find_curve_with_trace(ctx, t, rng)
    j0 = climb_to_order(phis, ctx, E.j, v, rng, conductor(D))
    js = enumerate_torsor(phis, ctx, j0, pres, v, rng)
    h = pres.order
    if len(set(js)) != h or len(js) != h:
        raise InternalError(f"torsor enumeration gave {len(set(js))} of {h} j-invariants mod {p}")
    return pfrom_roots(ctx, js)


def crt_lift(plan, residues, m=None):
    """Combine H_D mod p over the plan primes into integer coefficients."""
    degs = {len(r) for r in residues}
    if len(degs) != 1:
        raise InvalidArgument("residue polynomials have different degrees")
    acc = CrtAccumulator()
    for (p, _, _), r in zip(plan.primes, residues):
        acc.add(p, dict(enumerate(r)))
    lifted = acc.lift()
    coeffs = [lifted.get(i, 0) for i in range(degs.pop())]
    result = HilbertResult(plan.D, coeffs)
    return result.reduce(m) if m else result


def hilbert_class_polynomial(D, phis, rng=None, parity=None, stable=2, exclude=()):
    """H_D over Z, adding primes until the lift is stable and exceeds the height estimate."""
    _check_disc(D)
    if D == -3:
        return HilbertResult(D, [0, 1])
    if D == -4:
        return HilbertResult(D, [-1728, 1])
    rng = rng if rng is not None else random.Random(-D)
    bound = height_estimate(D) + 1
    pres = presentation_for(D, phis)
    if pres.order != class_number(D):
        raise InternalError("presentation order differs from the class number")
    acc = CrtAccumulator()
    bits = 0.0
    for k, entry in enumerate(_candidate_primes(D, set(phis), exclude)):
        if parity is not None and k % 2 != parity:
            continue
        residue = hilbert_mod_p(D, entry, phis, rng, pres)
        acc.add(entry[0], dict(enumerate(residue)))
        bits += log(entry[0], 2)
        if bits >= bound and acc.stable_rounds >= stable:
            lifted = acc.lift()
            h = len(residue) - 1
            return HilbertResult(D, [lifted.get(i, 0) for i in range(h + 1)])
        if bits > 4 * bound + 256:
            raise InternalError(f"CRT lift for D={D} never stabilised; residues are inconsistent")
    raise ResourceError(f"ran out of CRT primes for D={D}")
