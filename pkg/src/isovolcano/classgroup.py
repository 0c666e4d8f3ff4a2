"""Class groups of imaginary quadratic orders via binary quadratic forms.

A form ``(a, b, c)`` stands for ``a x^2 + b xy + c y^2`` with discriminant
``b^2 - 4ac < 0``.  Everything here is exhaustive: class groups are small at
the scales this package targets.
"""

from dataclasses import dataclass, field
from itertools import product
from math import gcd, isqrt, log
from typing import NamedTuple

from .arith import fundamental_part, is_prime, kronecker
from .errors import InvalidArgument, ResourceError

CLASS_NUMBER_BOUND = 10**8


class QuadraticForm(NamedTuple):
    a: int
    b: int
    c: int

    @property
    def disc(self):
        return self.b * self.b - 4 * self.a * self.c

    def conjugate(self):
        return reduce(QuadraticForm(self.a, -self.b, self.c))

    def is_reduced(self):
        a, b, c = self
        return abs(b) <= a <= c and not (b < 0 and (abs(b) == a or a == c))


def _check_disc(D):
    if D >= 0 or D % 4 not in (0, 1):
        raise InvalidArgument(f"{D} is not a negative discriminant")


def reduce(f):
    """Canonical reduced representative of the class of ``f``."""
    a, b, c = f
    if b * b - 4 * a * c >= 0 or a <= 0:
        raise InvalidArgument(f"{f} is not positive definite")
    while True:
        if b > a or b <= -a:
            # normalize b into (-a, a]
            k = (a - b) // (2 * a)
            c = c + k * (b + k * a)
            b = b + 2 * k * a
        if a > c:
            a, b, c = c, -b, a
            continue
        break
    if b < 0 and (a == c or -b == a):
        b = -b
    return QuadraticForm(a, b, c)


def principal(D):
    _check_disc(D)
    if D % 4 == 0:
        return QuadraticForm(1, 0, -D // 4)
    return QuadraticForm(1, 1, (1 - D) // 4)


def _xgcd(a, b):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def compose(f, g):
    """Reduced composition (Gauss / Shanks)."""
    D = f.disc
    if g.disc != D:
        raise InvalidArgument("forms have different discriminants")
    a1, b1, c1 = f
    a2, b2, c2 = g
    if a1 > a2:
        a1, b1, c1, a2, b2, c2 = a2, b2, c2, a1, b1, c1
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, x2, y2 = _xgcd(s, d)
        y2 = -y2
    v1, v2 = a1 // d1, a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (b3 * b3 - D) // (4 * a3)
    return reduce(QuadraticForm(a3, b3, c3))


def power(f, n):
    D = f.disc
    if n < 0:
        f, n = QuadraticForm(f.a, -f.b, f.c), -n
    result = principal(D)
    base = reduce(f)
    while n:
        if n & 1:
            result = compose(result, base)
        base = compose(base, base)
        n >>= 1
    return result


def form_order(f):
    one = principal(f.disc)
    g, k = reduce(f), 1
    while g != one:
        g = compose(g, f)
        k += 1
    return k


def reduced_forms(D):
    """All primitive reduced forms of discriminant D."""
    _check_disc(D)
    if -D > CLASS_NUMBER_BOUND:
        raise ResourceError(f"|D| = {-D} exceeds the enumeration bound")
    out = []
    amax = isqrt(-D // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (b < 0 and a == c):
                continue
            if gcd(gcd(a, b), c) != 1:
                continue
            out.append(QuadraticForm(a, b, c))
    return out


def class_number(D):
    return len(reduced_forms(D))


def conductor(D):
    return fundamental_part(D)[1]


def kronecker_class_number(delta):
    """Sum of h(O) over the orders containing the order of discriminant delta."""
    _check_disc(delta)
    D_K, v = fundamental_part(delta)
    return sum(class_number(f * f * D_K) for f in range(1, v + 1) if v % f == 0)


def prime_form(D, ell):
    """Reduced form of the norm-ell ideal with ``b >= 0``, or None."""
    _check_disc(D)
    if not is_prime(ell):
        raise InvalidArgument(f"{ell} is not prime")
    if kronecker(D, ell) == -1 or conductor(D) % ell == 0:
        return None
    for b in range(0, ell + 1):
        if (b - D) % 2 == 0 and (b * b - D) % (4 * ell) == 0:
            return reduce(QuadraticForm(ell, b, (b * b - D) // (4 * ell)))
    return None


def _representative_coprime(f, m):
    """An equivalent form whose first coefficient is prime to m."""
    a, b, c = f
    if gcd(a, m) == 1:
        return f
    for size in range(1, 100):
        for x in range(-size, size + 1):
            for y in (size - abs(x), abs(x) - size):
                if gcd(x, y) != 1:
                    continue
                val = a * x * x + b * x * y + c * y * y
                if gcd(val, m) != 1:
                    continue
                # complete (x, y) to a unimodular matrix [[x, r], [y, s]]
                g, s_, r_ = _xgcd(x, -y)  # x*s_ - y*r_ = g = +-1
                s, r = s_ * g, r_ * g
                b2 = 2 * a * x * r + b * (x * s + y * r) + 2 * c * y * s
                c2 = a * r * r + b * r * s + c * s * s
                return QuadraticForm(val, b2, c2)
    raise InvalidArgument(f"no representative of {f} prime to {m}")


def rho(f, D):
    """Image under cl(f^2 D) -> cl(D) of the class of ``f`` (ideal extension)."""
    _check_disc(D)
    D2 = f.disc
    if D2 % D or not _is_square(D2 // D):
        raise InvalidArgument("source discriminant is not a square multiple of D")
    m = isqrt(D2 // D)
    a, b, c = _representative_coprime(f, m)
    if a < 0:
        raise InvalidArgument("form is not positive definite")
    # b0 = D (mod 2), m*b0 = b (mod 2a)
    for b0 in range(0, 2 * a):
        if (b0 - D) % 2 == 0 and (m * b0 - b) % (2 * a) == 0:
            num = b0 * b0 - D
            if num % (4 * a) == 0:
                return reduce(QuadraticForm(a, b0, num // (4 * a)))
    raise InvalidArgument(f"cannot extend {f} to discriminant {D}")


lift_class = rho


def _is_square(n):
    return n >= 0 and isqrt(n) ** 2 == n


# ---------------------------------------------------------------------------
# polycyclic presentations

@dataclass
class ClassPresentation:
    D: int
    generators: list
    norms: list
    relative_orders: list
    power_relations: list
    _log: dict = field(default_factory=dict, repr=False)

    @property
    def order(self):
        h = 1
        for r in self.relative_orders:
            h *= r
        return h

    def discrete_log(self, f):
        """Exponent vector of the class of ``f``."""
        return self._log[reduce(f)]

    def element(self, exps):
        g = principal(self.D)
        for gen, e in zip(self.generators, exps):
            g = compose(g, power(gen, e))
        return g


def presentation_from_generators(D, norms_and_forms, h=None):
    """Build a polycyclic presentation from a sequence of (norm, form) pairs.

    Generators that add nothing to the subgroup so far are skipped.
    """
    h = class_number(D) if h is None else h
    one = principal(D)
    log = {one: ()}
    gens, norms, rel, relations = [], [], [], []
    for ell, g in norms_and_forms:
        if len(log) == h:
            break
        if g in log:
            continue
        k = len(gens)
        # relative order: smallest r with g^r in the current subgroup
        r, x = 1, g
        while x not in log:
            x = compose(x, g)
            r += 1
        relations.append(log[x])
        new = {}
        for cls, vec in log.items():
            y = cls
            for e in range(r):
                new[y] = vec + (0,) * (k - len(vec)) + (e,)
                y = compose(y, g)
        log = new
        gens.append(g)
        norms.append(ell)
        rel.append(r)
    if len(log) != h:
        raise ResourceError(f"generators do not span cl({D})")
    k = len(gens)
    log = {cls: vec + (0,) * (k - len(vec)) for cls, vec in log.items()}
    relations = [vec + (0,) * (i - len(vec)) for i, vec in enumerate(relations)]
    return ClassPresentation(D, gens, norms, rel, relations, log)


def split_primes(D, limit=None):
    """Primes ell (in increasing order) with an invertible norm-ell ideal."""
    ell = 2
    while limit is None or ell < limit:
        if is_prime(ell):
            f = prime_form(D, ell)
            if f is not None:
                yield ell, f
        ell += 1


def optimal_presentation(D, norm_limit=None):
    """Greedy presentation minimizing each generator norm in turn.

    With ``norm_limit`` only primes below the limit are used (ResourceError
    if they do not generate).
    """
    h = class_number(D)
    if h == 1:
        return ClassPresentation(D, [], [], [], [], {principal(D): ()})
    return presentation_from_generators(D, split_primes(D, norm_limit), h)


def minimal_generator_norm(D, limit=None):
    """Smallest prime norm whose class alone generates cl(D), or None if cl(D) is not
    cyclic (or no such prime lies below ``limit``)."""
    h = class_number(D)
    if h == 1:
        return None
    if limit is None:
        limit = max(64, 6 * int(log(abs(D)) ** 2))
    for ell, f in split_primes(D, limit):
        if form_order(f) == h:
            return ell
    return None


def enumerate_exponent_vectors(pres):
    """Walk all classes in reverse-lexicographic order of exponent vectors.

    Yields ``(index, vector, source_index, generator_index)``: element
    ``index`` is obtained from element ``source_index`` by one application of
    generator ``generator_index`` (``None`` for the starting element).  Each
    run of e_i starts from the first element of the previous run.
    """
    k = len(pres.generators)
    ranges = [range(r) for r in reversed(pres.relative_orders)]
    position = {}
    for idx, rev in enumerate(product(*ranges)):
        vec = rev[::-1]
        position[vec] = idx
        if idx == 0:
            yield 0, vec, None, None
            continue
        i = next(t for t in range(k) if vec[t])
        prev = list(vec)
        prev[i] -= 1
        yield idx, vec, position[tuple(prev)], i
