"""Short Weierstrass curves y^2 = x^3 + a x + b over F_p and F_{p^2}.

Points are ``None`` (the point at infinity) or affine tuples ``(x, y)`` of
raw field values.  Point counting is exhaustive for tiny p and otherwise
uses baby-step giant-step on random points of the curve and its quadratic
twist, which pins down ``#E`` inside the Hasse interval for p > 229.
"""

import random
from dataclasses import dataclass, field as dc_field
from math import gcd

from .arith import fundamental_part, isqrt, kronecker
from .errors import InternalError, InvalidArgument, SupersingularError
from .ff_poly import Poly, pmul, pscale, psub

EXHAUSTIVE_LIMIT = 1 << 10
COUNT_ATTEMPTS = 200


@dataclass(frozen=True)
class CurveModel:
    ctx: object
    a: object
    b: object
    _cache: dict = dc_field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        ctx = self.ctx
        a3 = ctx.mul(ctx.mul(self.a, self.a), self.a)
        disc = ctx.add(ctx.mul(ctx(4), a3), ctx.mul(ctx(27), ctx.mul(self.b, self.b)))
        if ctx.is_zero(disc):
            raise InvalidArgument(f"singular curve a={self.a} b={self.b}")

    @property
    def p(self):
        return self.ctx.p

    def rhs(self, x):
        ctx = self.ctx
        return ctx.add(ctx.mul(ctx.add(ctx.mul(x, x), self.a), x), self.b)

    def is_on_curve(self, P):
        if P is None:
            return True
        x, y = P
        return self.ctx.mul(y, y) == self.rhs(x)

    def point(self, x, y):
        ctx = self.ctx
        P = (ctx(x), ctx(y))
        if not self.is_on_curve(P):
            raise InvalidArgument(f"{P} is not on the curve")
        return P

    @property
    def j(self):
        if "j" not in self._cache:
            self._cache["j"] = j_invariant(self)
        return self._cache["j"]


@dataclass(frozen=True)
class NormEquationData:
    """``4q = t^2 - v^2 D_K`` with ``D_K`` fundamental."""

    q: int
    t: int
    v: int
    D_K: int

    def __post_init__(self):
        if 4 * self.q != self.t**2 - self.v**2 * self.D_K:
            raise InvalidArgument("norm equation does not hold")

    @property
    def disc(self):
        """Discriminant ``t^2 - 4q`` of Z[pi]."""
        return self.t**2 - 4 * self.q


# ---------------------------------------------------------------------------
# j-invariants and models

def j_invariant(E):
    ctx = E.ctx
    a3 = ctx.mul(ctx.mul(E.a, E.a), E.a)
    num = ctx.mul(ctx(4), a3)
    den = ctx.add(num, ctx.mul(ctx(27), ctx.mul(E.b, E.b)))
    return ctx.div(ctx.mul(ctx(1728), num), den)


def curve_from_j(ctx, j):
    j = ctx(j) if not isinstance(j, tuple) else j
    if ctx.is_zero(j):
        return CurveModel(ctx, ctx.zero, ctx.one)
    if j == ctx(1728):
        return CurveModel(ctx, ctx.one, ctx.zero)
    k = ctx.sub(ctx(1728), j)
    a = ctx.mul(ctx(3), ctx.mul(j, k))
    b = ctx.mul(ctx(2), ctx.mul(j, ctx.mul(k, k)))
    return CurveModel(ctx, a, b)


def nonresidue(ctx):
    """The smallest quadratic nonresidue of F_p."""
    return next(n for n in range(2, ctx.p) if kronecker(n, ctx.p) == -1)


def quadratic_twist(E):
    """Twist by a nonresidue d: ``(d^2 a, d^3 b)``."""
    if E.ctx.degree != 1:
        raise InvalidArgument("twists are only provided over F_p")
    p = E.ctx.p
    d = nonresidue(E.ctx)
    return CurveModel(E.ctx, d * d * E.a % p, d * d * d * E.b % p)


# ---------------------------------------------------------------------------
# group law (affine)

def neg(E, P):
    if P is None:
        return None
    return (P[0], E.ctx.neg(P[1]))


def add(E, P, Q):
    if P is None:
        return Q
    if Q is None:
        return P
    ctx = E.ctx
    if ctx.degree == 1:
        return _add_fp(E.ctx.p, E.a, P, Q)
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if ctx.is_zero(ctx.add(y1, y2)):
            return None
        num = ctx.add(ctx.mul(ctx(3), ctx.mul(x1, x1)), E.a)
        lam = ctx.div(num, ctx.mul(ctx(2), y1))
    else:
        lam = ctx.div(ctx.sub(y2, y1), ctx.sub(x2, x1))
    x3 = ctx.sub(ctx.sub(ctx.mul(lam, lam), x1), x2)
    y3 = ctx.sub(ctx.mul(lam, ctx.sub(x1, x3)), y1)
    return (x3, y3)


def _add_fp(p, a, P, Q):
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + a) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return (x3, (lam * (x1 - x3) - y1) % p)


def mul(E, n, P):
    if n < 0:
        n, P = -n, neg(E, P)
    R = None
    while n:
        if n & 1:
            R = add(E, R, P)
        P = add(E, P, P)
        n >>= 1
    return R


def random_point(E, rng):
    """A random affine point (F_p curves only)."""
    ctx = E.ctx
    while True:
        x = ctx.random(rng)
        r = E.rhs(x)
        y = ctx.sqrt(r)
        if y is not None:
            if rng.randrange(2):
                y = ctx.neg(y)
            return (x, y)


def rational_points(E):
    """All points of E(F_p), for tiny p."""
    ctx = E.ctx
    pts = [None]
    for x in ctx.elements():
        y = ctx.sqrt(E.rhs(x))
        if y is None:
            continue
        pts.append((x, y))
        if y:
            pts.append((x, ctx.neg(y)))
    return pts


# ---------------------------------------------------------------------------
# point counting

def _count_exhaustive(E):
    p = E.ctx.p
    a, b = E.a, E.b
    total = p + 1
    for x in range(p):
        total += kronecker((x * x * x + a * x + b) % p, p)
    return total


def _annihilators(E, P, lo, hi):
    """All N in [lo, hi] with N*P = 0, by baby-step giant-step."""
    width = hi - lo
    m = isqrt(width) + 1
    baby = {}
    R = None
    for j in range(m):
        if R is None and j:
            return [N for N in range(lo, hi + 1) if N % j == 0]
        baby.setdefault(R, j)
        R = add(E, R, P)
    step = R
    G = mul(E, lo, P)
    found = []
    for i in range(m + 1):
        j = baby.get(neg(E, G))
        if j is not None:
            N = lo + i * m + j
            if N <= hi:
                found.append(N)
        G = add(E, G, step)
    return found


def point_count(E, rng=None):
    """``#E(F_p)``."""
    if E.ctx.degree != 1:
        raise InvalidArgument("point counting is only provided over F_p")
    cached = E._cache.get("count")
    if cached is not None:
        return cached
    p = E.ctx.p
    if p < EXHAUSTIVE_LIMIT:
        n = _count_exhaustive(E)
        E._cache["count"] = n
        return n
    rng = rng or random.Random(E.a * 1000003 + E.b)
    r = isqrt(4 * p)
    lo, hi = p + 1 - r, p + 1 + r
    twist = quadratic_twist(E)
    candidates = set(range(lo, hi + 1))
    for attempt in range(COUNT_ATTEMPTS):
        if attempt % 2 == 0:
            P = random_point(E, rng)
            candidates &= set(_annihilators(E, P, lo, hi))
        else:
            P = random_point(twist, rng)
            candidates &= {2 * p + 2 - N for N in _annihilators(twist, P, lo, hi)}
        if len(candidates) == 1:
            n = candidates.pop()
            E._cache["count"] = n
            return n
        if not candidates:
            break
    raise InternalError(f"point count of {E} could not be disambiguated")


def trace(E):
    return E.ctx.p + 1 - point_count(E)


# ---------------------------------------------------------------------------
# norm equation

def solve_norm_equation(q, t):
    """Write ``4q - t^2 = v^2 |D_K|`` with ``D_K`` fundamental."""
    if t * t >= 4 * q:
        raise InvalidArgument("need t^2 < 4q")

    if gcd(t, q) != 1:
        raise SupersingularError(f"t={t} is not prime to q={q}: supersingular")
    D_K, v = fundamental_part(t * t - 4 * q)
    return NormEquationData(q, t, v, D_K)


# ---------------------------------------------------------------------------
# division polynomials

def _division_table(E, n):
    """Raw division polynomials ``f_k`` for ``k <= n``.

    ``f_k = psi_k`` for odd k and ``psi_k / y`` for even k, as coefficient
    lists in x.
    """
    ctx = E.ctx
    table = E._cache.setdefault("divpoly", {})
    if n in table:
        return table
    a, b = E.a, E.b
    c = ctx
    F = [b, a, c.zero, c.one]
    F2 = pmul(ctx, F, F)
    if not table:
        a2 = c.mul(a, a)
        table[0] = []
        table[1] = [c.one]
        table[2] = [c(2)]
        table[3] = _trim_any(ctx, [c.neg(a2), c.mul(c(12), b), c.mul(c(6), a), c.zero, c(3)])
        table[4] = pscale(ctx, _trim_any(ctx, [
            c.sub(c.neg(c.mul(c(8), c.mul(b, b))), c.mul(a2, a)),
            c.neg(c.mul(c(4), c.mul(a, b))),
            c.neg(c.mul(c(5), a2)),
            c.mul(c(20), b),
            c.mul(c(5), a),
            c.zero,
            c.one,
        ]), c(4))
    half = ctx.inv(ctx(2))
    k = max(table) + 1
    while k <= n:
        m = k // 2
        f = table
        if k % 2:
            t1 = pmul(ctx, f[m + 2], pmul(ctx, f[m], pmul(ctx, f[m], f[m])))
            t2 = pmul(ctx, f[m - 1], pmul(ctx, f[m + 1], pmul(ctx, f[m + 1], f[m + 1])))
            if m % 2 == 0:
                t1 = pmul(ctx, F2, t1)
            else:
                t2 = pmul(ctx, F2, t2)
            table[k] = psub(ctx, t1, t2)
        else:
            inner = psub(ctx,
                         pmul(ctx, f[m + 2], pmul(ctx, f[m - 1], f[m - 1])),
                         pmul(ctx, f[m - 2], pmul(ctx, f[m + 1], f[m + 1])))
            table[k] = pscale(ctx, pmul(ctx, f[m], inner), half)
        k += 1
    return table


def _trim_any(ctx, c):
    z = ctx.zero
    while c and c[-1] == z:
        c.pop()
    return c


def division_polynomial(E, n):
    """Polynomial in x whose roots are the x-coordinates of nonzero n-torsion.

    For odd n this is the classical psi_n; for even n it is
    ``(x^3 + a x + b) * psi_n / (2y)``, which for n = 2 is the monic cubic.
    """
    if not 1 <= n <= 100:
        raise InvalidArgument("division polynomials are provided for 1 <= n <= 100")
    ctx = E.ctx
    f = _division_table(E, n)[n]
    if n % 2:
        return Poly._raw(ctx, f)
    F = [E.b, E.a, ctx.zero, ctx.one]
    return Poly._raw(ctx, pscale(ctx, pmul(ctx, F, f), ctx.inv(ctx(2))))


def multiple_x_numden(E, k):
    """``x(kP)`` as ``(num, den)`` polynomials in ``x(P)``."""
    ctx = E.ctx
    f = _division_table(E, k + 1)
    F = [E.b, E.a, ctx.zero, ctx.one]
    x = [ctx.zero, ctx.one]
    if k % 2:
        prod = pmul(ctx, F, pmul(ctx, f[k - 1], f[k + 1]))
        den = pmul(ctx, f[k], f[k])
    else:
        prod = pmul(ctx, f[k - 1], f[k + 1])
        den = pmul(ctx, F, pmul(ctx, f[k], f[k]))
    return psub(ctx, pmul(ctx, x, den), prod), den
