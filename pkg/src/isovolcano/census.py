"""Component censuses of G_ell(F_p).

The full sweep instantiates Phi_ell at every j in F_p, joins components
with a union-find, and classifies each component by the Frobenius trace of
a representative curve.  The trace census restricts attention to one
isogeny class Ell_t(F_p), found by exploring from a single curve of trace
t with every available Phi, and reports the shape of each ell-volcano
together with the index of its surface order.
"""

import random
from collections import Counter, deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .arith import factor
from .classgroup import kronecker_class_number
from .curve import curve_from_j, point_count, solve_norm_equation
from .endo import endo_ring_small
from .errors import InternalError, InvalidArgument, ResourceError
from .ff_poly import PrimeField, field as make_field
from .hilbert import find_curve_with_trace
from .volcano import Navigator, is_supersingular, map_volcano

SWEEP_LIMIT = 1 << 22


@dataclass(frozen=True)
class VolcanoShape:
    depth: int
    surface: int
    size: int
    conductor: int = None

    def as_dict(self):
        return {"depth": self.depth, "surface": self.surface, "size": self.size,
                "conductor": self.conductor}


@dataclass
class CensusReport:
    p: int
    ell: int
    components: int = 0
    ordinary: int = 0
    supersingular: int = 0
    isogeny_classes: int = 0
    supersingular_vertices: int = 0
    trace: int = None
    vertices: int = 0
    inventory: dict = field(default_factory=dict)

    def shapes(self, t):
        """Counter of VolcanoShape for |t| (or for the restricted trace)."""
        return self.inventory.get(abs(t), Counter())

    def as_dict(self):
        inv = {}
        for t in sorted(self.inventory):
            inv[str(t)] = [dict(shape.as_dict(), count=n)
                           for shape, n in sorted(self.inventory[t].items(), key=_shape_key)]
        return {
            "p": self.p, "ell": self.ell, "trace": self.trace, "vertices": self.vertices,
            "components": self.components, "ordinary": self.ordinary,
            "supersingular": self.supersingular, "isogeny_classes": self.isogeny_classes,
            "supersingular_vertices": self.supersingular_vertices, "inventory": inv,
        }

    def summary_lines(self, traces=None):
        head = f"G_{self.ell}(F_{self.p})"
        if self.trace is not None:
            head += f" restricted to trace {self.trace}"
        lines = [head, f"  vertices             {self.vertices}",
                 f"  components           {self.components}"]
        if self.trace is None:
            lines += [f"  ordinary components  {self.ordinary}",
                      f"  supersingular        {self.supersingular}",
                      f"  ordinary classes     {self.isogeny_classes}"]
        shown = sorted(self.inventory) if traces is None else [abs(t) for t in traces]
        for t in shown:
            lines.append(f"  |t| = {t}:")
            for shape, n in sorted(self.shapes(t).items(), key=_shape_key):
                cond = "" if shape.conductor is None else f"  index {shape.conductor}"
                lines.append(f"    {n:6d} x depth {shape.depth}  |V0| {shape.surface:4d}"
                             f"  size {shape.size:6d}{cond}")
        return lines


def _shape_key(item):
    shape, _ = item
    return (shape.depth, shape.surface, shape.size, shape.conductor or 0)


# ---------------------------------------------------------------------------
# full sweep

def _adjacency_chunk(args):
    phi, p, lo, hi, seed = args
    ctx = PrimeField(p)
    rng = random.Random(seed * 7919 + lo)
    return [phi.neighbors(ctx, j, rng) for j in range(lo, hi)]


def adjacency(phi, p, threads=1, seed=0, chunk=8192):
    """Neighbour lists of every j in F_p, indexed by j."""
    jobs = [(phi, p, lo, min(lo + chunk, p), seed) for lo in range(0, p, chunk)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_adjacency_chunk, jobs))
    else:
        parts = [_adjacency_chunk(job) for job in jobs]
    return [nb for part in parts for nb in part]


def _components(adj):
    parent = list(range(len(adj)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, nb in enumerate(adj):
        for b in nb:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups = {}
    for x in range(len(adj)):
        groups.setdefault(find(x), []).append(x)
    return list(groups.values())


def run_census(p, phi, threads=1, seed=0, phi2=None):
    """Census of all of G_ell(F_p).

    Supersingular components are those whose curves have trace 0; when
    ``phi2`` is given each of them is also confirmed over F_{p^2}.
    """
    if p > SWEEP_LIMIT:
        raise ResourceError(f"p = {p} exceeds the sweep limit {SWEEP_LIMIT}")
    if p < 5 or p == phi.ell:
        raise InvalidArgument("the census needs a prime p >= 5 different from ell")
    ctx = PrimeField(p)
    rng = random.Random(seed)
    adj = adjacency(phi, p, threads, seed)
    nav = Navigator(phi, ctx, rng, neighbors=adj.__getitem__)
    report = CensusReport(p, phi.ell, vertices=p)
    ctx2 = make_field(p, 2) if phi2 is not None else None
    traces = set()
    total = 0
    for comp in _components(adj):
        total += len(comp)
        rep = comp[0]
        report.components += 1
        t = abs(p + 1 - point_count(curve_from_j(ctx, rep), rng))
        if t == 0:
            report.supersingular += 1
            report.supersingular_vertices += len(comp)
            if ctx2 is not None and not is_supersingular(phi2, ctx2, rep, rng):
                raise InternalError(f"trace-0 vertex {rep} failed the supersingularity test")
            continue
        report.ordinary += 1
        traces.add(t)
        chart = map_volcano(phi, ctx, rep, nav=nav)
        shape = VolcanoShape(chart.depth, chart.surface_size, len(chart.levels))
        report.inventory.setdefault(t, Counter())[shape] += 1
    if total != p:
        raise InternalError("component sizes do not add up to p")
    report.isogeny_classes = len(traces)
    return report


# ---------------------------------------------------------------------------
# one isogeny class

def isogeny_class(phis, ctx, j0, rng=None, cap=10**6):
    """All j-invariants isogenous to j0 reachable through the given Phi's."""
    rng = rng if rng is not None else random.Random(0)
    navs = [Navigator(phi, ctx, rng) for _, phi in sorted(phis.items())]
    seen = {j0}
    queue = deque([j0])
    while queue:
        x = queue.popleft()
        for nav in navs:
            for y in nav.neighbors(x):
                if y not in seen:
                    seen.add(y)
                    if len(seen) > cap:
                        raise ResourceError(f"isogeny class exceeds {cap} vertices")
                    queue.append(y)
    return seen


def run_trace_census(p, ell, t, phis, seed=0):
    """Census of the ell-volcanoes on Ell_t(F_p) with surface-order indices."""
    if ell not in phis:
        raise InvalidArgument(f"Phi_{ell} is not available")
    if t % p == 0:
        raise InvalidArgument("the trace census covers ordinary classes only")
    ctx = PrimeField(p)
    rng = random.Random(seed)
    ne = solve_norm_equation(p, t)
    E = find_curve_with_trace(ctx, t, rng)
    vertices = isogeny_class(phis, ctx, E.j, rng)
    expected = kronecker_class_number(t * t - 4 * p)
    if len(vertices) != expected:
        raise ResourceError(f"reached {len(vertices)} of {expected} vertices of Ell_{t}; "
                            "more modular polynomials are needed to connect the class")
    nav = Navigator(phis[ell], ctx, rng)
    resolvable = all(q in phis for q in factor(ne.v)) if ne.v > 1 else True
    report = CensusReport(p, ell, trace=abs(t), vertices=len(vertices), isogeny_classes=1)
    inv = Counter()
    done = set()
    for j in sorted(vertices):
        if j in done:
            continue
        chart = map_volcano(phis[ell], ctx, j, nav=nav)
        done.update(chart.levels)
        cond = None
        if resolvable:
            cond = endo_ring_small(phis, ctx, chart.surface[0], ne, rng=rng).u
        inv[VolcanoShape(chart.depth, chart.surface_size, len(chart.levels), cond)] += 1
        report.components += 1
    report.ordinary = report.components
    report.inventory[abs(t)] = inv
    return report
