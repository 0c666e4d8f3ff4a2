"""Navigating ell-volcanoes: descending to the floor, altimetry, surface walks,
supersingularity testing and full component mapping.
"""

import json
import random
from collections import Counter, deque
from dataclasses import dataclass, field
from math import ceil, log

from .arith import fundamental_part, is_square, isqrt, kronecker, valuation
from .errors import (AmbiguityError, InvalidArgument, ResourceError,
                     SupersingularError)
from .ff_poly import pdivmod, pgcd, roots

MAP_CAP = 10**6


def step_bound(p, ell):
    """Longest descent an ordinary vertex can need, plus a safety margin."""
    return ceil(log(2 * p) / log(ell)) + 2


class Navigator:
    """Neighbour oracle for G_ell over one field, with memoized degrees.

    ``neighbors`` may be supplied to reuse a precomputed adjacency (the census
    does this); otherwise Phi_ell is instantiated and factored on demand.
    """

    def __init__(self, phi, ctx, rng=None, neighbors=None):
        self.phi = phi
        self.ctx = ctx
        self.ell = phi.ell if phi is not None else None
        self.rng = rng if rng is not None else random.Random(0)
        self._lookup = neighbors
        self._memo = {}

    def neighbors(self, j):
        out = self._memo.get(j)
        if out is None:
            if self._lookup is not None:
                out = self._lookup(j)
            else:
                out = self.phi.neighbors(self.ctx, j, rng=self.rng)
            self._memo[j] = out
        return out

    def degree(self, j):
        return len(self.neighbors(j))

    def is_floor(self, j):
        return self.degree(j) <= 2

    def step(self, prev, cur):
        """Random neighbour of ``cur`` along an edge other than the one from ``prev``.

        Edges are counted with multiplicity, so a multiple edge back to
        ``prev`` remains available.  Returns None at a dead end.
        """
        nb = list(self.neighbors(cur))
        if prev is not None and prev in nb:
            nb.remove(prev)
        choices = sorted(set(nb), key=self.ctx.key)
        if not choices:
            return None
        return choices[self.rng.randrange(len(choices))]


def _nav(phi, ctx, rng, nav=None):
    return nav if nav is not None else Navigator(phi, ctx, rng)


@dataclass
class PathToFloor:
    vertices: list

    @property
    def delta(self):
        return len(self.vertices) - 1

    @property
    def end(self):
        return self.vertices[-1]


def _remaining_roots(nav, v_prev, v):
    """Neighbours of v other than along the edge from v_prev.

    One factor Y - v_prev is divided out of Phi(v, Y) before root finding.
    Returns (1, rest), or (0, all roots) if v_prev is not a neighbour.
    """
    ctx = nav.ctx
    f = nav.phi.instantiate_coeffs(ctx, v)
    q, r = pdivmod(ctx, f, [ctx.neg(v_prev), ctx.one])
    e = 0 if r else 1
    if e:
        f = q
    rest = [x for x, m in roots(ctx, f, multiplicity=True, rng=nav.rng) for _ in range(m)]
    return e, rest


def find_floor(phi, ctx, v0, rng=None, nav=None):
    """Random non-backtracking walk from v0 down to a floor vertex."""
    nav = _nav(phi, ctx, rng, nav)
    limit = step_bound(ctx.p, nav.ell)
    if nav.is_floor(v0):
        return PathToFloor([v0])
    path = [v0]
    # the first step must leave v0; after that we never walk back
    nxt = nav.step(None, v0)
    path.append(nxt)
    while True:
        if len(path) - 1 > limit:
            raise SupersingularError(f"no floor within {limit} steps; j={v0} looks supersingular")
        v_prev, v = path[-2], path[-1]
        if nav._lookup is None and nav.phi is not None:
            e, rest = _remaining_roots(nav, v_prev, v)
            if e + len(rest) <= 2:
                return PathToFloor(path)
            choices = sorted(set(rest), key=ctx.key)
        else:
            if nav.is_floor(v):
                return PathToFloor(path)
            path.append(nav.step(v_prev, v))
            continue
        path.append(choices[nav.rng.randrange(len(choices))])


def shortest_path_to_floor(phi, ctx, v0, rng=None, nav=None):
    """Path of length exactly delta(v0) using at most three parallel descents."""
    nav = _nav(phi, ctx, rng, nav)
    limit = step_bound(ctx.p, nav.ell)
    if nav.is_floor(v0):
        return PathToFloor([v0])
    firsts = sorted(set(nav.neighbors(v0)), key=ctx.key)
    if len(firsts) > 3:
        firsts = nav.rng.sample(firsts, 3)
    paths = [[v0, n] for n in firsts]
    while True:
        for path in paths:
            if nav.is_floor(path[-1]):
                return PathToFloor(path)
        if len(paths[0]) - 1 >= limit:
            raise SupersingularError(f"no floor within {limit} steps; j={v0} looks supersingular")
        for path in paths:
            path.append(nav.step(path[-2], path[-1]))


def level_of(phi, ctx, v0, depth, rng=None, nav=None):
    return depth - shortest_path_to_floor(phi, ctx, v0, rng, nav).delta


def depth_from_norm_equation(ne, D0, ell):
    """nu_ell((t^2 - 4q)/D0) / 2 for the volcano whose surface has discriminant D0."""
    num = ne.t * ne.t - 4 * ne.q
    if D0 == 0 or num % D0:
        raise InvalidArgument(f"{D0} does not divide t^2-4q")
    cof = num // D0
    if not is_square(cof):
        raise InvalidArgument("(t^2-4q)/D0 is not a square")
    return valuation(isqrt(cof), ell)


def is_supersingular(phi2, ctx2, j, rng=None):
    """Supersingularity test in G_2 over F_{p^2}.

    ``ctx2`` must be a degree-2 field context; ``j`` an element of it (F_p
    values are embedded).  Three non-backtracking walks race to the floor;
    none arriving within the step bound means supersingular.
    """
    if ctx2.degree != 2:
        raise InvalidArgument("the supersingularity probe runs over F_{p^2}")
    if phi2.ell != 2:
        raise InvalidArgument("the probe uses Phi_2")
    if isinstance(j, int):
        j = ctx2(j)
    nav = Navigator(phi2, ctx2, rng if rng is not None else random.Random(0))
    try:
        shortest_path_to_floor(phi2, ctx2, j, nav=nav)
    except SupersingularError:
        return True
    return False


# ---------------------------------------------------------------------------
# surface walks

def walk_surface_path(phi, ctx, v0, n, depth, rng=None, nav=None):
    """Path v0..vn along the surface of the ell-volcano containing v0."""
    if n < 0:
        raise InvalidArgument("n must be non-negative")
    nav = _nav(phi, ctx, rng, nav)
    if n == 0:
        return [v0]
    distinct = set(nav.neighbors(v0))
    if len(distinct) == 1:
        if n > 2:
            raise InvalidArgument("n exceeds the surface size")
        v1 = next(iter(distinct))
        return [v0, v1] if n == 1 else [v0, v1, v0]
    if not distinct:
        raise InvalidArgument("isolated vertex has no surface path")
    d = depth
    path = [v0]

    def extend(upto):
        while len(path) < upto + 1:
            prev = path[-2] if len(path) > 1 else None
            nxt = nav.step(prev, path[-1])
            if nxt is None:
                raise InvalidArgument("walk reached a dead end; is v0 on the surface?")
            path.append(nxt)

    extend(max(d, 1))
    tried = {0: {path[1]}}  # tried[i]: candidates for v_{i+1} already used
    i = 0
    while True:
        while d > 0 and nav.degree(path[i + d]) == 1:
            # the probe bottomed out early, so v_{i+1} went down: retry from v_i
            del path[i + 1:]
            prev = path[i - 1] if i > 0 else None
            options = sorted({x for x in nav.neighbors(path[i]) if x != prev} - tried[i],
                             key=ctx.key)
            if not options:
                raise InvalidArgument("no surface continuation; is v0 on the surface?")
            choice = options[nav.rng.randrange(len(options))]
            tried[i].add(choice)
            path.append(choice)
            extend(i + d)
        extend(i + d + 1)
        i += 1
        tried[i] = {path[i + 1]} if len(path) > i + 1 else set()
        if path[i] == v0 and i < n:
            raise InvalidArgument("n exceeds the surface size")
        if i == n:
            return path[:n + 1]


def walk_surface_gcd(phi_l, phi_lp, ctx, path, v0p):
    """Transport an ell-surface path to a parallel one using gcds.

    ``path`` is a path v0..vn on an ell-surface (``phi_l``) and ``v0p`` is
    ell'-isogenous to v0 (``phi_lp``).  Returns v0'..vn' where v_{i+1}' is
    the unique common root of Phi_ell(v_i', Y) and Phi_ell'(v_{i+1}, Y).
    """
    out = [v0p]
    for v_next in path[1:]:
        f = phi_l.instantiate_coeffs(ctx, out[-1])
        g = phi_lp.instantiate_coeffs(ctx, v_next)
        h = pgcd(ctx, f, g)
        if len(h) != 2:
            raise AmbiguityError(f"gcd has degree {len(h) - 1} at step {len(out)}")
        out.append(ctx.neg(h[0]))
    return out


# ---------------------------------------------------------------------------
# full charts

@dataclass
class VolcanoChart:
    ell: int
    p: int
    levels: dict
    edges: list
    depth: int
    surface: list = field(default_factory=list)

    @property
    def vertices(self):
        return sorted(self.levels)

    @property
    def surface_size(self):
        return len(self.surface)

    def level_sets(self):
        out = [[] for _ in range(self.depth + 1)]
        for j, lv in self.levels.items():
            out[lv].append(j)
        return [sorted(s) for s in out]

    def adjacency(self):
        adj = {j: [] for j in self.levels}
        for a, b, m in self.edges:
            adj[a].extend([b] * m)
        return adj

    def children(self, j):
        lv = self.levels[j]
        return sorted(b for a, b, _ in self.edges if a == j and self.levels[b] == lv + 1)

    def to_json(self):
        data = {
            "ell": self.ell,
            "p": self.p,
            "depth": self.depth,
            "vertices": [{"j": j, "level": self.levels[j]} for j in sorted(self.levels)],
            "edges": [{"from": a, "to": b, "multiplicity": m} for a, b, m in sorted(self.edges)],
        }
        return json.dumps(data, indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        levels = {v["j"]: v["level"] for v in data["vertices"]}
        edges = [(e["from"], e["to"], e["multiplicity"]) for e in data["edges"]]
        surface = sorted(j for j, lv in levels.items() if lv == 0)
        return cls(data["ell"], data["p"], levels, edges, data["depth"], surface)

    def to_dot(self):
        lines = [f"digraph volcano_{self.ell}_{self.p} {{", "  rankdir=TB;"]
        for lv, js in enumerate(self.level_sets()):
            names = " ".join(f'"{j}"' for j in js)
            lines.append(f"  {{ rank=same; {names} }}")
        for a, b, m in sorted(self.edges):
            label = f' [label="{m}"]' if m > 1 else ""
            lines.append(f'  "{a}" -> "{b}"{label};')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def definition_violations(self):
        """Shape problems relative to the volcano definition (empty when fine)."""
        bad = []
        adj = self.adjacency()
        d = self.depth
        for j, lv in self.levels.items():
            nb = adj[j]
            same = [x for x in nb if self.levels[x] == lv]
            up = [x for x in nb if self.levels[x] == lv - 1]
            if lv == 0:
                if len(same) > 2:
                    bad.append(f"surface vertex {j} has {len(same)} horizontal edges")
            elif len(up) != 1 or same:
                bad.append(f"vertex {j} at level {lv} has {len(up)} parents, {len(same)} siblings")
            if lv < d and len(nb) != self.ell + 1:
                bad.append(f"vertex {j} above the floor has degree {len(nb)}")
            if any(abs(self.levels[x] - lv) > 1 for x in nb):
                bad.append(f"vertex {j} has an edge skipping a level")
        degs = {len([x for x in adj[j] if self.levels[x] == 0]) for j in self.surface}
        if len(degs) > 1:
            bad.append(f"surface is not regular: degrees {sorted(degs)}")
        return bad


def map_volcano(phi, ctx, v0, rng=None, nav=None, cap=MAP_CAP):
    """Map the whole connected component of v0 with levels measured from the floor."""
    nav = _nav(phi, ctx, rng, nav)
    seen = {v0}
    queue = deque([v0])
    while queue:
        v = queue.popleft()
        for w in nav.neighbors(v):
            if w not in seen:
                seen.add(w)
                if len(seen) > cap:
                    raise ResourceError(f"component exceeds {cap} vertices")
                queue.append(w)
    edges = []
    for v in seen:
        for w, m in Counter(nav.neighbors(v)).items():
            edges.append((v, w, m))
    # distance to the floor by multi-source BFS
    floor = [v for v in seen if nav.degree(v) <= 2]
    dist = {v: 0 for v in floor}
    queue = deque(floor)
    while queue:
        v = queue.popleft()
        for w in nav.neighbors(v):
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    if len(dist) != len(seen):
        raise SupersingularError(f"component of {v0} has no floor")
    depth = max(dist.values())
    levels = {v: depth - dist[v] for v in seen}
    surface = sorted((v for v in seen if levels[v] == 0), key=ctx.key)
    return VolcanoChart(nav.ell, ctx.p, levels, sorted(edges), depth, surface)


def kohel_violations(chart, D0, ne, form_order):
    """Check the structure theorem predictions for a chart with surface order D0.

    ``form_order(D, ell)`` returns the order of the norm-ell prime form class
    in cl(D) (or None when there is none).
    """
    ell = chart.ell
    bad = []
    chi = kronecker(D0, ell)
    adj = chart.adjacency()
    for j in chart.surface:
        horiz = sum(1 for x in adj[j] if chart.levels[x] == 0)
        if horiz != 1 + chi:
            bad.append(f"surface vertex {j}: {horiz} horizontal edges, expected {1 + chi}")
    expected_v0 = form_order(D0, ell) if chi >= 0 else 1
    if expected_v0 is None:
        expected_v0 = 1
    if chart.surface_size != expected_v0:
        bad.append(f"|V0| = {chart.surface_size}, expected {expected_v0}")
    d = depth_from_norm_equation(ne, D0, ell)
    if chart.depth != d:
        bad.append(f"depth {chart.depth}, expected {d}")
    if fundamental_part(D0)[1] % ell == 0:
        bad.append("ell divides the conductor of the surface order")
    return bad
