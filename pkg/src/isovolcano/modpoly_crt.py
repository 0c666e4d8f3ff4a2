"""Computing classical modular polynomials Phi_ell over Z by the CRT.

Two independent routes are provided.  The main one maps the two levels of
ell-volcanoes over suitable primes and interpolates; the other (used for
ell = 2 and as a cross-check) reads Phi_ell(j, Y) off the rational
ell-isogenies computed by Velu's formulas at random split nodes.
"""

import random
from collections import Counter
from dataclasses import dataclass, field
from math import log

from .arith import is_prime, isqrt, kronecker, valuation
from .classgroup import class_number, conductor, form_order, power, prime_form, split_primes
from .crt import CrtAccumulator
from .curve import curve_from_j, point_count, quadratic_twist
from .errors import InternalError, InvalidArgument, ResourceError
from .ff_poly import PrimeField, interpolate, pfrom_roots, roots
from .hilbert import hilbert_class_polynomial
from .isogeny import (cyclic_subgroup_generators, kernel_from_point, rational_isogenous_j,
                      torsion_basis, velu_isogeny)
from .modpoly import ModularPolynomial
from .volcano import Navigator, VolcanoChart, walk_surface_path

ORACLE_PRIME_BITS = 28
MAX_CRT_PRIMES = 400


def _phi_coefficients_from_nodes(ctx, ell, nodes, rows):
    """Assemble {(i, k): c} from Phi(x_n, Y) = rows[n] at ell+2 nodes."""
    n = ell + 2
    cols = []
    for k in range(n):
        ys = [row[k] if k < len(row) else 0 for row in rows]
        cols.append(interpolate(ctx, nodes, ys) + [0] * n)
    out = {}
    for i in range(n):
        for k in range(i + 1):
            a, b = cols[k][i], cols[i][k]
            if a != b:
                raise InternalError(f"interpolated Phi_{ell} is not symmetric at ({i}, {k})")
            if a:
                out[(i, k)] = a
    return out


def velu_phi_mod_p(ell, p, rng):
    """Phi_ell mod p from ell+2 nodes whose ell-isogenies are all rational."""
    ctx = PrimeField(p)
    nodes, rows, seen = [], [], set()
    attempts = 0
    while len(nodes) < ell + 2:
        attempts += 1
        if attempts > 200 * ell ** 4:
            raise ResourceError(f"too few split nodes for ell={ell} mod {p}")
        j = rng.randrange(p)
        if j in seen or j in (0, 1728 % p):
            continue
        seen.add(j)
        E = curve_from_j(ctx, j)
        if ell > 2:
            # Frobenius must act as a scalar on E[ell]
            t = p + 1 - point_count(E, rng)
            if (t * t - 4 * p) % (ell * ell):
                continue
        nb = rational_isogenous_j(E, ell, rng)
        if len(nb) != ell + 1:
            continue
        nodes.append(j)
        rows.append(pfrom_roots(ctx, nb))
    return _phi_coefficients_from_nodes(ctx, ell, nodes, rows)


def _random_prime(rng, bits, avoid, ell):
    """Random prime p = 1 mod ell, so that t^2 = 4p mod ell^2 is possible."""
    while True:
        p = rng.randrange(1 << (bits - 1), 1 << bits)
        p -= (p - 1) % (2 * ell)
        if p not in avoid and is_prime(p):
            return p


def velu_modular_polynomial(ell, rng=None, bits=ORACLE_PRIME_BITS, stable=2):
    """Phi_ell over Z via Velu-computed neighbours at many primes."""
    rng = rng if rng is not None else random.Random(ell)
    acc = CrtAccumulator()
    used = set()
    while acc.stable_rounds < stable:
        if len(used) >= MAX_CRT_PRIMES:
            raise ResourceError("CRT lift did not stabilize")
        p = _random_prime(rng, bits, used, ell)
        used.add(p)
        acc.add(p, velu_phi_mod_p(ell, p, rng))
    return ModularPolynomial(ell, acc.lift())


# ---------------------------------------------------------------------------
# the volcano-mapping pipeline

AUX_SEARCH_LIMIT = 20000


@dataclass
class ModPolyPrimePlan:
    ell: int
    D: int
    generator_norm: int
    primes: list = field(default_factory=list)


@dataclass
class TwoLevelChart:
    """Surface cycle and floor of the ell-volcanoes over one prime.

    ``surface`` lists Ell_O(F_p) in the order of the generator walk,
    ``horizontal`` maps each surface vertex to its horizontal ell-neighbours
    (with multiplicity) and ``children`` to its descendants on the floor.
    """

    ell: int
    p: int
    D: int
    surface: list
    floor: list
    horizontal: dict
    children: dict

    def neighbors(self, j):
        return sorted(self.horizontal[j] + self.children[j])

    def to_volcano_chart(self):
        levels = {j: 0 for j in self.surface}
        levels.update({w: 1 for w in self.floor})
        edges = []
        for s in self.surface:
            for w, m in Counter(self.horizontal[s]).items():
                edges.append((s, w, m))
            for w in self.children[s]:
                edges.append((s, w, 1))
                edges.append((w, s, 1))
        return VolcanoChart(self.ell, self.p, levels, sorted(edges), 1, sorted(self.surface))


def _generates(f, h):
    return form_order(f) == h


def auxiliary_generator(D, ell, max_norm=None):
    """Smallest prime norm < ell whose class generates cl(D) and cl(ell^2 D), or None."""
    if D in (-3, -4) or conductor(D) % ell == 0:
        return None
    h = class_number(D)
    if h <= ell + 1:
        return None
    D2 = ell * ell * D
    h2 = class_number(D2)
    limit = ell if max_norm is None else min(ell, max_norm + 1)
    for l1, f in split_primes(D, limit):
        if _generates(f, h) and _generates(prime_form(D2, l1), h2):
            return l1
    return None


def choose_auxiliary_discriminant(ell, norms=None):
    """Smallest |D| with h(D) > ell + 1 and a single small generator (see above).

    ``norms`` restricts the generator to primes whose Phi is available.
    """
    for n in range(3, AUX_SEARCH_LIMIT):
        D = -n
        if D % 4 not in (0, 1):
            continue
        l1 = auxiliary_generator(D, ell)
        if l1 is not None and (norms is None or l1 in norms):
            return D, l1
    raise ResourceError(f"no auxiliary discriminant for ell={ell}")


def _modpoly_candidates(ell, D, max_v=8):
    """(p, t, v) with 4p = t^2 - ell^2 v^2 D, ell not dividing v, p = 1 mod ell."""
    lo, width = 0, max(1024, -ell * ell * D)
    seen = set()
    while lo < 1 << 50:
        hi = lo + width
        batch = []
        for v in range(1, max_v + 1):
            if v % ell == 0:
                continue
            base = -ell * ell * v * v * D
            if base >= 4 * hi:
                break
            t = max(1, isqrt(max(0, 4 * lo - base)) - 1)
            while t * t + base < 4 * hi:
                num = t * t + base
                if num % 4 == 0:
                    p = num // 4
                    if p >= lo and p % ell == 1 and p not in seen and p > 4 * ell \
                            and D % p and t % p and is_prime(p):
                        seen.add(p)
                        batch.append((p, t, v))
                t += 1
        yield from sorted(batch)
        lo, width = hi, 2 * width
    raise ResourceError("modular polynomial prime search exhausted")


def select_modpoly_primes(ell, bound, D=None, generator_norm=None, norms=None):
    """Plan with product of primes of at least ``bound`` bits."""
    if ell == 2 or not is_prime(ell):
        raise InvalidArgument("the volcano pipeline needs an odd prime ell")
    if D is None:
        D, generator_norm = choose_auxiliary_discriminant(ell, norms)
    elif generator_norm is None:
        generator_norm = auxiliary_generator(D, ell)
        if generator_norm is None:
            raise InvalidArgument(f"D={D} is not admissible for ell={ell}")
    plan = ModPolyPrimePlan(ell, D, generator_norm)
    bits = 0.0
    for entry in _modpoly_candidates(ell, D):
        plan.primes.append(entry)
        bits += log(entry[0], 2)
        if bits >= bound:
            return plan
    raise ResourceError("not enough primes")


def _curve_with_scalar_frobenius(ctx, j, t, ell, rng):
    """Model of j whose trace is = 2 mod ell, so that E[ell] is rational."""
    E = curve_from_j(ctx, j)
    N = point_count(E, rng)
    tr = ctx.p + 1 - N
    if abs(tr) != abs(t):
        raise InternalError(f"j={j} has trace {tr}, expected +-{t}")
    if (tr - 2) % ell:
        E = quadratic_twist(E)
        N = 2 * ctx.p + 2 - N
    return E, N


def _descend(ctx, j, t, ell, surface_set, rng):
    """A floor neighbour of surface vertex j via a Velu step.

    Kernels are tried in random order; landing back in the surface set means
    the step was horizontal and the next kernel is used.
    """
    E, N = _curve_with_scalar_frobenius(ctx, j, t, ell, rng)
    basis = torsion_basis(E, ell, rng, order=N)
    if basis is None:
        raise InternalError(f"E[{ell}] is not rational on j={j}")
    gens = cyclic_subgroup_generators(E, ell, basis)
    rng.shuffle(gens)
    for P in gens:
        target = velu_isogeny(E, kernel_from_point(E, P, ell), check=False).target.j
        if target not in surface_set:
            return target
    raise InternalError(f"every {ell}-isogeny from {j} was horizontal")


def _cycle_walk(phi, ctx, start, length, depth, rng):
    nav = Navigator(phi, ctx, rng)
    path = walk_surface_path(None, ctx, start, length - 1, depth, nav=nav) if length > 1 else [start]
    if len(set(path)) != length:
        raise InternalError("surface walk revisited a vertex early")
    return path


def map_two_level_volcano(entry, D, ell, phis, hilbert_coeffs, generator_norm=None, rng=None):
    """Surface, floor and parent/child structure of the ell-volcanoes mod p."""
    p, t, v = entry
    if 4 * p != t * t - ell * ell * v * v * D or v % ell == 0 or p % ell != 1:
        raise InvalidArgument("plan entry does not meet the prime conditions")
    l1 = generator_norm or auxiliary_generator(D, ell)
    if l1 is None:
        raise InvalidArgument(f"D={D} has no single small generator for ell={ell}")
    rng = rng if rng is not None else random.Random(p)
    ctx = PrimeField(p)
    h = class_number(D)
    chi = kronecker(D, ell)
    m = ell - chi
    depth = valuation(v, l1)

    rts = roots(ctx, [c % p for c in hilbert_coeffs], rng=rng)
    if len(rts) != h:
        raise InternalError(f"H_D does not split completely mod {p}")
    surface = _cycle_walk(phis[l1], ctx, rts[0], h, depth, rng)
    surface_set = set(surface)
    if surface_set != set(rts):
        raise InternalError("surface walk does not cover the roots of H_D")

    # horizontal edges: gamma = alpha^c in the cyclic group
    horizontal = {s: [] for s in surface}
    gamma = prime_form(D, ell)
    if gamma is not None:
        alpha = prime_form(D, l1)
        c = next(k for k in range(h) if power(alpha, k) == gamma)
        for k, s in enumerate(surface):
            horizontal[s].append(surface[(k + c) % h])
            if chi == 1:
                horizontal[s].append(surface[(k - c) % h])

    anchors = {s: _descend(ctx, s, t, ell, surface_set, rng) for s in surface}
    floor = _cycle_walk(phis[l1], ctx, anchors[surface[0]], h * m, depth, rng)
    pos = {w: k for k, w in enumerate(floor)}
    children, used = {}, set()
    for s in surface:
        w = anchors[s]
        if w not in pos:
            raise InternalError(f"anchor {w} of {s} is not on the floor cycle")
        r = pos[w] % h
        if r in used:
            raise InternalError("two parents claim the same sibling class")
        used.add(r)
        children[s] = sorted(floor[r + h * i] for i in range(m))
    return TwoLevelChart(ell, p, D, surface, floor, horizontal, children)


def interpolate_phi_mod_p(chart):
    """Phi_ell mod p as {(i, k): c} from ell+2 surface vertices of the chart."""
    ell = chart.ell
    if len(chart.surface) < ell + 2:
        raise InvalidArgument("need ell + 2 surface vertices")
    ctx = PrimeField(chart.p)
    nodes = chart.surface[:ell + 2]
    rows = []
    for s in nodes:
        nb = chart.neighbors(s)
        if len(nb) != ell + 1:
            raise InternalError(f"vertex {s} has {len(nb)} neighbours")
        rows.append(pfrom_roots(ctx, nb))
    return _phi_coefficients_from_nodes(ctx, ell, nodes, rows)


def modpoly_crt_lift(plan, residues):
    """Symmetric CRT of per-prime Phi_ell residues."""
    acc = CrtAccumulator()
    for (p, _, _), r in zip(plan.primes, residues):
        acc.add(p, r)
    return ModularPolynomial(plan.ell, acc.lift())


def height_bits(ell):
    """Rough size of the largest coefficient of Phi_ell, in bits."""
    return int(6 * (ell + 1) * log(ell, 2)) + 48


def modular_polynomial(ell, phis, hilbert=None, rng=None, stable=2, D=None, exclude=()):
    """Phi_ell over Z by mapping volcanoes over many primes.

    ``phis`` must contain Phi_{ell1} for the generator norm of the auxiliary
    discriminant; ``hilbert`` is an optional callable D -> H_D coefficients.
    """
    if ell == 2:
        raise InvalidArgument("Phi_2 comes from the Velu oracle")
    rng = rng if rng is not None else random.Random(ell)
    if D is None:
        D, l1 = choose_auxiliary_discriminant(ell, set(phis))
    else:
        l1 = auxiliary_generator(D, ell)
        if l1 is None or l1 not in phis:
            raise InvalidArgument(f"D={D} is not admissible for ell={ell}")
    if hilbert is None:
        H = hilbert_class_polynomial(D, phis).coefficients
    else:
        H = hilbert(D)
    acc = CrtAccumulator()
    bits, target = 0.0, height_bits(ell)
    for entry in _modpoly_candidates(ell, D):
        if entry[0] in exclude:
            continue
        chart = map_two_level_volcano(entry, D, ell, phis, H, l1, rng)
        acc.add(entry[0], interpolate_phi_mod_p(chart))
        bits += log(entry[0], 2)
        if bits >= target and acc.stable_rounds >= stable:
            return ModularPolynomial(ell, acc.lift())
        if acc.modulus.bit_length() > 64 * target:
            break
    raise ResourceError(f"CRT lift of Phi_{ell} did not stabilize")
