"""Arithmetic in F_p and F_{p^2}, and univariate polynomials over them.

Field elements are plain Python values owned by a field context: an ``int``
in ``[0, p)`` for F_p, and a pair ``(a, b)`` meaning ``a + b*s`` with
``s**2 = nonresidue`` for F_{p^2}.  Polynomial kernels work on coefficient
lists (constant term first, no trailing zeros, ``[]`` is zero); the
:class:`Poly` wrapper carries the context for the public API.

The F_p kernels are written out with inline ``% p`` because they dominate
the running time of every navigation routine; the generic kernels go
through the context's methods.
"""

import random as _random

from .arith import is_prime, kronecker, sqrt_mod
from .errors import InternalError, InvalidArgument

SPLIT_ATTEMPTS = 64


class PrimeField:
    """The prime field F_p."""

    degree = 1
    zero = 0
    one = 1

    def __init__(self, p):
        if not (3 < p < 2**62) or not is_prime(p):
            raise InvalidArgument(f"p={p} must be a prime with 3 < p < 2^62")
        self.p = p
        self.q = p

    def __repr__(self):
        return f"PrimeField({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __call__(self, x):
        return x % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def div(self, a, b):
        return a * self.inv(b) % self.p

    def pow(self, a, e):
        return pow(a, e, self.p)

    def is_zero(self, a):
        return a == 0

    def random(self, rng):
        return rng.randrange(self.p)

    def elements(self):
        return range(self.p)

    def is_square(self, a):
        return a == 0 or kronecker(a, self.p) == 1

    def sqrt(self, a):
        return sqrt_mod(a, self.p)

    def in_prime_field(self, a):
        return True

    def canonical(self, a):
        return a

    def key(self, a):
        return a


class QuadraticField:
    """F_{p^2} = F_p[s]/(s^2 - nonresidue)."""

    degree = 2
    zero = (0, 0)
    one = (1, 0)

    def __init__(self, p, nonresidue=None):
        if not (3 < p < 2**62) or not is_prime(p):
            raise InvalidArgument(f"p={p} must be a prime with 3 < p < 2^62")
        if nonresidue is None:
            nonresidue = next(n for n in range(2, p) if kronecker(n, p) == -1)
        if pow(nonresidue, (p - 1) // 2, p) != p - 1:
            raise InvalidArgument(f"{nonresidue} is not a nonresidue mod {p}")
        self.p = p
        self.q = p * p
        self.nonresidue = nonresidue

    def __repr__(self):
        return f"QuadraticField({self.p}, nonresidue={self.nonresidue})"

    def __eq__(self, other):
        return (isinstance(other, QuadraticField) and other.p == self.p
                and other.nonresidue == self.nonresidue)

    def __hash__(self):
        return hash(("Fp2", self.p, self.nonresidue))

    def __call__(self, x):
        if isinstance(x, tuple):
            return (x[0] % self.p, x[1] % self.p)
        return (x % self.p, 0)

    def add(self, a, b):
        p = self.p
        return ((a[0] + b[0]) % p, (a[1] + b[1]) % p)

    def sub(self, a, b):
        p = self.p
        return ((a[0] - b[0]) % p, (a[1] - b[1]) % p)

    def neg(self, a):
        p = self.p
        return (-a[0] % p, -a[1] % p)

    def mul(self, a, b):
        p = self.p
        a0, a1 = a
        b0, b1 = b
        return ((a0 * b0 + self.nonresidue * a1 * b1) % p, (a0 * b1 + a1 * b0) % p)

    def inv(self, a):
        p = self.p
        a0, a1 = a
        norm = (a0 * a0 - self.nonresidue * a1 * a1) % p
        if norm == 0:
            raise ZeroDivisionError("inverse of zero")
        ni = pow(norm, -1, p)
        return (a0 * ni % p, -a1 * ni % p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e):
        if e < 0:
            a, e = self.inv(a), -e
        result = self.one
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def is_zero(self, a):
        return a == (0, 0)

    def random(self, rng):
        return (rng.randrange(self.p), rng.randrange(self.p))

    def elements(self):
        return ((a, b) for b in range(self.p) for a in range(self.p))

    def is_square(self, a):
        # every element of F_p embeds as a square; use the norm map in general
        if a == (0, 0):
            return True
        return self.pow(a, (self.q - 1) // 2) == self.one

    def sqrt(self, a):
        raise NotImplementedError("square roots in F_{p^2} are not needed")

    def in_prime_field(self, a):
        return a[1] == 0

    def canonical(self, a):
        return a

    def key(self, a):
        return (a[1], a[0])


def field(p, degree=1, nonresidue=None):
    """Build a field context for F_p (``degree=1``) or F_{p^2}."""
    if degree == 1:
        return PrimeField(p)
    if degree == 2:
        return QuadraticField(p, nonresidue)
    raise InvalidArgument("extension degree must be 1 or 2")


def embed(ctx2, x):
    """Map an F_p value into the quadratic context ``ctx2``."""
    return ctx2(x)


# ---------------------------------------------------------------------------
# coefficient-list kernels

def _trim(c):
    while c and not c[-1]:
        c.pop()
    return c


def _trim_generic(ctx, c):
    z = ctx.zero
    while c and c[-1] == z:
        c.pop()
    return c


def padd(ctx, a, b):
    if len(a) < len(b):
        a, b = b, a
    if ctx.degree == 1:
        p = ctx.p
        r = [(x + y) % p for x, y in zip(a, b)] + list(a[len(b):])
        return _trim(r)
    r = [ctx.add(x, y) for x, y in zip(a, b)] + list(a[len(b):])
    return _trim_generic(ctx, r)


def pneg(ctx, a):
    return [ctx.neg(x) for x in a]


def psub(ctx, a, b):
    return padd(ctx, a, pneg(ctx, b))


def pscale(ctx, a, s):
    if ctx.degree == 1:
        p = ctx.p
        return _trim([x * s % p for x in a])
    return _trim_generic(ctx, [ctx.mul(x, s) for x in a])


def pmul(ctx, a, b):
    if not a or not b:
        return []
    if ctx.degree == 1:
        p = ctx.p
        r = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    r[i + j] += x * y
        return _trim([v % p for v in r])
    r = [ctx.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            r[i + j] = ctx.add(r[i + j], ctx.mul(x, y))
    return _trim_generic(ctx, r)


def pdivmod(ctx, a, b):
    """Quotient and remainder of ``a`` by nonzero ``b``."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    db = len(b) - 1
    if len(a) - 1 < db:
        return [], list(a)
    if ctx.degree == 1:
        p = ctx.p
        r = list(a)
        lead_inv = pow(b[-1], -1, p)
        q = [0] * (len(a) - db)
        for k in range(len(a) - 1 - db, -1, -1):
            c = r[k + db] * lead_inv % p
            q[k] = c
            if c:
                for j in range(db):
                    r[k + j] = (r[k + j] - c * b[j]) % p
            r[k + db] = 0
        return _trim(q), _trim(r[:db])
    r = list(a)
    lead_inv = ctx.inv(b[-1])
    q = [ctx.zero] * (len(a) - db)
    for k in range(len(a) - 1 - db, -1, -1):
        c = ctx.mul(r[k + db], lead_inv)
        q[k] = c
        for j in range(db):
            r[k + j] = ctx.sub(r[k + j], ctx.mul(c, b[j]))
        r[k + db] = ctx.zero
    return _trim_generic(ctx, q), _trim_generic(ctx, r[:db])


def prem(ctx, a, b):
    if ctx.degree == 1 and b and b[-1] == 1:
        return _rem_monic_fp(ctx.p, a, b)
    return pdivmod(ctx, a, b)[1]


def _rem_monic_fp(p, a, b):
    db = len(b) - 1
    if len(a) - 1 < db:
        return list(a)
    r = list(a)
    for k in range(len(a) - 1 - db, -1, -1):
        c = r[k + db] % p
        if c:
            for j in range(db):
                r[k + j] -= c * b[j]
    return _trim([v % p for v in r[:db]])


def pmulmod(ctx, a, b, m):
    return prem(ctx, pmul(ctx, a, b), m)


def pmonic(ctx, a):
    if not a:
        return []
    if a[-1] == ctx.one:
        return list(a)
    return pscale(ctx, a, ctx.inv(a[-1]))


def ppowmod(ctx, base, e, m):
    """``base**e mod m`` by left-to-right square-and-multiply."""
    m = pmonic(ctx, m)
    if len(m) == 1:
        return []
    base = prem(ctx, base, m)
    result = [ctx.one]
    for bit in bin(e)[2:]:
        result = pmulmod(ctx, result, result, m)
        if bit == "1":
            result = pmulmod(ctx, result, base, m)
    return result


def pgcd(ctx, a, b):
    """Monic gcd."""
    a, b = list(a), list(b)
    while b:
        a, b = b, prem(ctx, a, b)
    return pmonic(ctx, a)


def pderiv(ctx, a):
    if ctx.degree == 1:
        p = ctx.p
        return _trim([i * c % p for i, c in enumerate(a)][1:])
    return _trim_generic(ctx, [ctx.mul(ctx(i), c) for i, c in enumerate(a)][1:])


def peval(ctx, a, x):
    if ctx.degree == 1:
        p = ctx.p
        r = 0
        for c in reversed(a):
            r = (r * x + c) % p
        return r
    r = ctx.zero
    for c in reversed(a):
        r = ctx.add(ctx.mul(r, x), c)
    return r


def pfrom_roots(ctx, roots):
    r = [ctx.one]
    for x in roots:
        r = pmul(ctx, r, [ctx.neg(x), ctx.one])
    return r


def interpolate(ctx, xs, ys):
    """Polynomial of degree < len(xs) through the points (xs[k], ys[k]) (Newton form)."""
    n = len(xs)
    if len(set(map(ctx.key, xs))) != n:
        raise InternalError("interpolation nodes are not distinct")
    coef = list(ys)
    for k in range(1, n):
        for i in range(n - 1, k - 1, -1):
            coef[i] = ctx.div(ctx.sub(coef[i], coef[i - 1]), ctx.sub(xs[i], xs[i - k]))
    out = [coef[-1]]
    for i in range(n - 2, -1, -1):
        out = padd(ctx, pmul(ctx, out, [ctx.neg(xs[i]), ctx.one]), [coef[i]])
    return out


def _frobenius(ctx, f):
    """``Y**q mod f`` for monic ``f`` of positive degree."""
    return ppowmod(ctx, [ctx.zero, ctx.one], ctx.q, f)


def _linear_part(ctx, f):
    """``gcd(Y**q - Y, f)``: the product of the distinct rational linear factors."""
    f = pmonic(ctx, f)
    if len(f) <= 1:
        return [ctx.one]
    yq = _frobenius(ctx, f)
    return pgcd(ctx, f, psub(ctx, yq, [ctx.zero, ctx.one]))


def _split(ctx, g, rng):
    """Split a squarefree, fully split, monic ``g`` of degree >= 2 nontrivially."""
    e = (ctx.q - 1) // 2
    for _ in range(SPLIT_ATTEMPTS):
        delta = ctx.random(rng)
        h = ppowmod(ctx, [delta, ctx.one], e, g)
        h = psub(ctx, h, [ctx.one])
        d = pgcd(ctx, g, h)
        if 1 < len(d) < len(g):
            return d, pdivmod(ctx, g, d)[0]
    raise InternalError("equal-degree splitting did not converge")


def _roots_of_split(ctx, g, rng):
    if len(g) == 1:
        return []
    if len(g) == 2:
        return [ctx.neg(g[0])]
    if len(g) == 3 and ctx.degree == 1:
        # monic quadratic with two distinct rational roots
        p = ctx.p
        b, c = g[1], g[0]
        s = sqrt_mod(b * b - 4 * c, p)
        inv2 = (p + 1) // 2
        return [(-b + s) * inv2 % p, (-b - s) * inv2 % p]
    a, b = _split(ctx, g, rng)
    return _roots_of_split(ctx, a, rng) + _roots_of_split(ctx, b, rng)


def _multiplicity(ctx, f, r):
    # valid because deg f < p
    m = 0
    while f and ctx.is_zero(peval(ctx, f, r)):
        f = pderiv(ctx, f)
        m += 1
    return m


# ---------------------------------------------------------------------------
# public API

class Poly:
    """Univariate polynomial over a field context."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx, coeffs):
        self.ctx = ctx
        c = [ctx(x) for x in coeffs]
        self.coeffs = tuple(_trim_generic(ctx, c) if ctx.degree == 2 else _trim(c))

    @classmethod
    def _raw(cls, ctx, coeffs):
        obj = cls.__new__(cls)
        obj.ctx = ctx
        obj.coeffs = tuple(coeffs)
        return obj

    @classmethod
    def from_roots(cls, ctx, roots):
        return cls._raw(ctx, pfrom_roots(ctx, roots))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def __repr__(self):
        return f"Poly({self.ctx!r}, {list(self.coeffs)})"

    def __eq__(self, other):
        return (isinstance(other, Poly) and self.ctx == other.ctx
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.ctx, self.coeffs))

    def __call__(self, x):
        return peval(self.ctx, self.coeffs, x)

    def __add__(self, other):
        return Poly._raw(self.ctx, padd(self.ctx, self.coeffs, other.coeffs))

    def __sub__(self, other):
        return Poly._raw(self.ctx, psub(self.ctx, self.coeffs, other.coeffs))

    def __mul__(self, other):
        return Poly._raw(self.ctx, pmul(self.ctx, self.coeffs, other.coeffs))

    def __divmod__(self, other):
        q, r = pdivmod(self.ctx, self.coeffs, other.coeffs)
        return Poly._raw(self.ctx, q), Poly._raw(self.ctx, r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self):
        return Poly._raw(self.ctx, pmonic(self.ctx, self.coeffs))

    def derivative(self):
        return Poly._raw(self.ctx, pderiv(self.ctx, self.coeffs))

    def gcd(self, other):
        return Poly._raw(self.ctx, pgcd(self.ctx, self.coeffs, other.coeffs))

    def powmod(self, e, modulus):
        return Poly._raw(self.ctx, ppowmod(self.ctx, self.coeffs, e, modulus.coeffs))


def frobenius_powmod(f):
    """Return ``Y**q mod f`` where q is the size of ``f``'s field."""
    if f.degree < 1:
        raise InvalidArgument("modulus must have positive degree")
    return Poly._raw(f.ctx, _frobenius(f.ctx, pmonic(f.ctx, f.coeffs)))


def roots(ctx, coeffs, multiplicity=False, rng=None):
    """Kernel form of :func:`poly_roots` on a raw coefficient list."""
    if not coeffs:
        raise InvalidArgument("zero polynomial has every element as a root")
    rng = rng or _random.Random(0)
    g = _linear_part(ctx, coeffs)
    found = sorted(_roots_of_split(ctx, g, rng), key=ctx.key)
    if not multiplicity:
        return found
    return [(r, _multiplicity(ctx, list(coeffs), r)) for r in found]


def poly_roots(f, want_multiplicity=False, rng=None):
    """All roots of ``f`` in its field, sorted canonically.

    With ``want_multiplicity`` the result is a list of ``(root, multiplicity)``.
    """
    return roots(f.ctx, list(f.coeffs), want_multiplicity, rng)


def random_root(ctx, coeffs, rng):
    """Kernel form of :func:`poly_random_root`."""
    if not coeffs:
        raise InvalidArgument("zero polynomial has every element as a root")
    g = _linear_part(ctx, coeffs)
    while len(g) > 2:
        a, b = _split(ctx, g, rng)
        # keep a side with probability proportional to its root count
        g = a if rng.randrange(len(g) - 1) < len(a) - 1 else b
    if len(g) == 1:
        return None
    return ctx.neg(g[0])


def poly_random_root(f, rng):
    """One uniformly random root of ``f`` in its field, or None."""
    return random_root(f.ctx, list(f.coeffs), rng)


def pinvmod(ctx, a, m):
    """Inverse of ``a`` modulo ``m`` (extended Euclid); ``a`` must be a unit."""
    r0, r1 = list(m), prem(ctx, a, m)
    s0, s1 = [], [ctx.one]
    while r1:
        q, r = pdivmod(ctx, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, psub(ctx, s0, pmul(ctx, q, s1))
    if len(r0) != 1:
        raise ZeroDivisionError("not invertible modulo m")
    return prem(ctx, pscale(ctx, s0, ctx.inv(r0[0])), m)


def distinct_degree_part(ctx, f, m):
    """Product of the monic irreducible factors of degree exactly ``m``.

    ``f`` must be squarefree; factors of degree below ``m`` are assumed to
    have been removed already.
    """
    f = pmonic(ctx, f)
    x = [ctx.zero, ctx.one]
    h = list(x)
    for _ in range(m):
        h = ppowmod(ctx, h, ctx.q, f)
    return pgcd(ctx, f, psub(ctx, h, x))


def equal_degree_factors(ctx, g, m, rng):
    """Split ``g`` (a product of distinct irreducibles of degree ``m``)."""
    g = pmonic(ctx, g)
    if len(g) - 1 == m:
        return [g]
    if len(g) <= 1:
        return []
    e = (ctx.q**m - 1) // 2
    for _ in range(SPLIT_ATTEMPTS):
        a = [ctx.random(rng) for _ in range(len(g) - 1)]
        a = _trim_generic(ctx, a) if ctx.degree == 2 else _trim(a)
        if len(a) < 2:
            continue
        h = psub(ctx, ppowmod(ctx, a, e, g), [ctx.one])
        d = pgcd(ctx, g, h)
        if 1 < len(d) < len(g):
            return (equal_degree_factors(ctx, d, m, rng)
                    + equal_degree_factors(ctx, pdivmod(ctx, g, d)[0], m, rng))
    raise InternalError("equal-degree factorization did not converge")
