"""Integer helpers: primality, factoring, Kronecker symbols, CRT."""

from functools import reduce

import gmpy2
from sympy import factorint

from .errors import InvalidArgument


def is_prime(n):
    return n > 1 and bool(gmpy2.is_prime(n, 40))


def kronecker(a, n):
    return int(gmpy2.kronecker(a, n))


def factor(n):
    """Prime factorization of ``n > 0`` as a dict ``{prime: exponent}``."""
    if n <= 0:
        raise InvalidArgument(f"cannot factor {n}")
    return {int(p): int(e) for p, e in factorint(n).items()}


def valuation(n, ell):
    if n == 0:
        raise InvalidArgument("valuation of zero")
    e = 0
    while n % ell == 0:
        n //= ell
        e += 1
    return e


def divisors(n):
    divs = [1]
    for p, e in factor(n).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def is_fundamental(d):
    """True for fundamental discriminants (of either sign, excluding 1)."""
    if d in (0, 1):
        return False
    if d % 4 == 1:
        return _squarefree(abs(d))
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and _squarefree(abs(m))
    return False


def _squarefree(n):
    return all(e == 1 for e in factor(n).values()) if n > 1 else True


def fundamental_part(d):
    """Split a discriminant ``d`` as ``f**2 * d_k`` with ``d_k`` fundamental.

    Returns ``(d_k, f)``.
    """
    if d % 4 not in (0, 1):
        raise InvalidArgument(f"{d} is not a discriminant")
    sign = -1 if d < 0 else 1
    core, f = 1, 1
    for p, e in factor(abs(d)).items():
        f *= p ** (e // 2)
        if e % 2:
            core *= p
    core *= sign
    if core % 4 != 1:
        # core is squarefree; need 4 | d_k
        core *= 4
        if f % 2:
            raise InvalidArgument(f"{d} is not a discriminant")
        f //= 2
    return core, f


def isqrt(n):
    return int(gmpy2.isqrt(n))


def is_square(n):
    return n >= 0 and bool(gmpy2.is_square(n))


def crt_pair(r1, m1, r2, m2):
    """Combine ``x = r1 mod m1`` and ``x = r2 mod m2`` for coprime moduli."""
    t = (r2 - r1) * pow(m1, -1, m2) % m2
    return r1 + m1 * t, m1 * m2


def crt(residues, moduli):
    """CRT lift of residues to ``[0, prod(moduli))``."""
    r, m = reduce(lambda acc, rm: crt_pair(acc[0], acc[1], rm[0], rm[1]),
                  zip(residues, moduli), (0, 1))
    return r % m, m


def symmetric(r, m):
    """Representative of ``r mod m`` in ``(-m/2, m/2]``."""
    r %= m
    return r - m if 2 * r > m else r


def sqrt_mod(a, p):
    """Square root of ``a`` modulo an odd prime ``p`` (Tonelli-Shanks), or None."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r
