"""Endomorphism rings of ordinary curves.

Small primes dividing v are handled by measuring the distance to the floor
of the corresponding volcano.  Large primes are decided by smooth relations:
a relation that holds in the order of index v/ell but not in the order of
index ell holds on j(E) exactly when End(E) is maximal at ell.
"""

import random
from dataclasses import dataclass, field
from itertools import combinations, product

from .arith import factor, kronecker
from .classgroup import class_number, compose, power, prime_form, principal
from .errors import InvalidArgument
from .volcano import Navigator, shortest_path_to_floor

SMALL_PRIME_BUDGET = 60
MAX_CONJUGATE_FLAGS = 12


@dataclass(frozen=True)
class SmoothRelation:
    """Multiset of (prime, multiplicity, conjugate) with conjugate meaning p-bar."""

    entries: tuple
    D_K: int = None

    def __post_init__(self):
        for p, r, _ in self.entries:
            if r <= 0:
                raise InvalidArgument("multiplicities must be positive")
            if self.D_K is not None and kronecker(self.D_K, p) == -1:
                raise InvalidArgument(f"{p} is inert in Q(sqrt({self.D_K}))")

    @property
    def primes(self):
        return [p for p, _, _ in self.entries]

    def class_in(self, D):
        """Class of the relation's ideal product in cl(D)."""
        g = principal(D)
        for p, r, conj in self.entries:
            f = prime_form(D, p)
            if f is None:
                raise InvalidArgument(f"no invertible ideal of norm {p} in disc {D}")
            g = compose(g, power(f, -r if conj else r))
        return g

    def holds_in(self, D):
        return self.class_in(D) == principal(D)

    def conjugate_variants(self):
        for flags in product((False, True), repeat=len(self.entries)):
            yield SmoothRelation(tuple((p, r, c) for (p, r, _), c in zip(self.entries, flags)),
                                 self.D_K)

    def to_text(self):
        return ",".join(f"{p}:{r}:{'-' if c else '+'}" for p, r, c in self.entries)

    @classmethod
    def parse(cls, text, D_K=None):
        entries = []
        for item in text.strip().split(","):
            try:
                p, r, s = item.strip().split(":")
                entries.append((int(p), int(r), {"+": False, "-": True}[s]))
            except (ValueError, KeyError):
                raise InvalidArgument(f"bad relation entry {item!r}") from None
        return cls(tuple(entries), D_K)


@dataclass
class OrderAssignment:
    u: int
    D_K: int
    unresolved: tuple = field(default=())
    levels: dict = field(default_factory=dict)

    @property
    def D_end(self):
        return self.u * self.u * self.D_K

    @property
    def complete(self):
        return not self.unresolved


def endo_ring_small(phis, ctx, j, ne, budget=SMALL_PRIME_BUDGET, rng=None):
    """Conductor index u of End(E) from the floor distances for ell | v.

    Primes above the budget or without Phi_ell are reported as unresolved and
    contribute nothing to u.
    """
    rng = rng if rng is not None else random.Random(j)
    u, unresolved, levels = 1, [], {}
    if ne.v == 1:
        return OrderAssignment(1, ne.D_K)
    for ell, e in sorted(factor(ne.v).items()):
        if ell > budget or ell not in phis:
            unresolved.append(ell)
            continue
        nav = Navigator(phis[ell], ctx, rng)
        delta = shortest_path_to_floor(None, ctx, j, nav=nav).delta
        if delta > e:
            raise InvalidArgument(f"distance {delta} to the {ell}-floor exceeds nu_ell(v) = {e}")
        levels[ell] = delta
        u *= ell ** (e - delta)
    return OrderAssignment(u, ne.D_K, tuple(unresolved), levels)


def _walk_cycle(nav, start, steps, flip):
    """Walk ``steps`` edges around a depth-0 cycle, choosing the direction by ``flip``."""
    x, prev = start, None
    for k in range(steps):
        nb = nav.neighbors(x)
        distinct = sorted(set(nb), key=nav.ctx.key)
        if len(nb) > 2:
            raise InvalidArgument(f"vertex {x} has degree {len(nb)}; the volcano is not a cycle")
        if not distinct:
            raise InvalidArgument(f"vertex {x} is isolated in G_{nav.ell}")
        if k == 0:
            nxt = distinct[1] if flip and len(distinct) > 1 else distinct[0]
        else:
            others = [y for y in distinct if y != prev]
            nxt = others[0] if others else prev
        prev, x = x, nxt
    return x


def relation_closures(phis, ctx, j, relation, rng=None):
    """Number of conjugate-flag assignments whose walk returns to j."""
    s = len(relation.entries)
    if s > MAX_CONJUGATE_FLAGS:
        raise InvalidArgument(f"relation has {s} entries; at most {MAX_CONJUGATE_FLAGS} allowed")
    rng = rng if rng is not None else random.Random(0)
    navs = {}
    for p in set(relation.primes):
        if p not in phis:
            raise InvalidArgument(f"Phi_{p} is needed to walk the relation")
        navs[p] = Navigator(phis[p], ctx, rng)
    hits = 0
    for flags in product((False, True), repeat=s):
        x = j
        for (p, r, conj), flip in zip(relation.entries, flags):
            x = _walk_cycle(navs[p], x, r, conj ^ flip)
        if x == j:
            hits += 1
    return hits


def test_relation(phis, ctx, j, relation, rng=None):
    """True if some choice of walking directions closes the relation's loop at j."""
    return relation_closures(phis, ctx, j, relation, rng) > 0


def endo_ring_full(phis, ctx, j, ne, relations=None, budget=SMALL_PRIME_BUDGET, rng=None):
    """Combine floor distances for small primes with relation tests for large ones.

    ``relations`` maps a prime ell | v to a relation holding in the order of
    index v/ell but not in the order of index ell.
    """
    relations = relations or {}
    if ne.v == 1:
        return OrderAssignment(1, ne.D_K)
    small = endo_ring_small(phis, ctx, j, ne, budget, rng)
    u, unresolved = small.u, []
    fac = factor(ne.v)
    for ell in small.unresolved:
        rel = relations.get(ell)
        if rel is None:
            unresolved.append(ell)
            continue
        if fac[ell] != 1:
            raise InvalidArgument(f"relations decide only primes exactly dividing v (ell={ell})")
        if not test_relation(phis, ctx, j, rel, rng):
            u *= ell
    return OrderAssignment(u, ne.D_K, tuple(unresolved), small.levels)


def find_discriminating_relation(D_K, v, ell, norms, max_entries=3, max_exp=None):
    """Brute-force a relation holding at index v/ell and failing at index ell.

    Only primes in ``norms`` that split in K and do not divide v are used.
    Every conjugate variant must fail at index ell, so the verdict does not
    depend on walking directions.  This is a small-scale test utility.
    """
    if v % ell:
        raise InvalidArgument(f"{ell} does not divide v={v}")
    big = (v // ell) ** 2 * D_K
    small = ell * ell * D_K
    usable = [p for p in norms if v % p and kronecker(D_K, p) == 1]
    bound = max_exp or class_number(big)
    for size in range(1, max_entries + 1):
        for combo in combinations(usable, size):
            for exps in product(range(1, bound + 1), repeat=size):
                for flags in product((False, True), repeat=size):
                    if flags[0]:
                        continue  # the overall conjugate gives the same verdicts
                    rel = SmoothRelation(tuple(zip(combo, exps, flags)), D_K)
                    if not rel.holds_in(big):
                        continue
                    if any(var.holds_in(small) for var in rel.conjugate_variants()):
                        continue
                    return rel
    return None

