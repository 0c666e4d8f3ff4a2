"""Explicit isogenies from kernel polynomials (Velu / Kohel) and enumeration
of rational ell-isogenies without modular polynomials.
"""

from dataclasses import dataclass
import random

from .curve import (CurveModel, _division_table, add as ec_add, division_polynomial,
                    multiple_x_numden, mul as ec_mul, random_point, point_count)
from .errors import InvalidArgument
from .ff_poly import (distinct_degree_part, equal_degree_factors, padd, pderiv, pdivmod,
                      peval, pfrom_roots, pinvmod, pmonic, pmul, prem, psub,
                      pscale, roots)
from .arith import is_prime


@dataclass(frozen=True)
class KernelSubgroup:
    """A kernel given by its monic x-coordinate polynomial (one root per +-pair)."""

    E: CurveModel
    ell: int
    kernel_poly: tuple

    def __post_init__(self):
        n = 1 if self.ell == 2 else (self.ell - 1) // 2
        if len(self.kernel_poly) - 1 != n or self.kernel_poly[-1] != self.E.ctx.one:
            raise InvalidArgument(f"kernel polynomial must be monic of degree {n}")


@dataclass(frozen=True)
class IsogenyStep:
    source: CurveModel
    target: CurveModel
    ell: int
    kernel: KernelSubgroup


def _power_sums(ctx, h):
    """First three power sums of the roots of monic ``h``."""
    n = len(h) - 1
    coef = lambda k: h[n - k] if n - k >= 0 else ctx.zero
    s1 = ctx.neg(coef(1))
    s2 = coef(2)
    s3 = ctx.neg(coef(3))
    p1 = s1
    p2 = ctx.sub(ctx.mul(s1, s1), ctx.mul(ctx(2), s2))
    p3 = ctx.add(ctx.sub(ctx.mul(s1, ctx.mul(s1, s1)), ctx.mul(ctx(3), ctx.mul(s1, s2))),
                 ctx.mul(ctx(3), s3))
    return p1, p2, p3


def _check_kernel(kernel):
    E, ell, h = kernel.E, kernel.ell, list(kernel.kernel_poly)
    ctx = E.ctx
    if ell == 2:
        cubic = [E.b, E.a, ctx.zero, ctx.one]
        ok = not prem(ctx, cubic, h)
    else:
        psi = list(division_polynomial(E, ell).coeffs)
        ok = not prem(ctx, psi, h)
    if not ok:
        raise InvalidArgument("kernel polynomial does not divide the division polynomial")


def velu_isogeny(E, kernel, check=True):
    """Codomain of the separable isogeny with the given kernel."""
    if check:
        _check_kernel(kernel)
    ctx = E.ctx
    a, b = E.a, E.b
    h = list(kernel.kernel_poly)
    if kernel.ell == 2:
        x0 = ctx.neg(h[0])
        t = ctx.add(ctx.mul(ctx(3), ctx.mul(x0, x0)), a)
        w = ctx.mul(x0, t)
    else:
        n = len(h) - 1
        p1, p2, p3 = _power_sums(ctx, h)
        t = ctx.add(ctx.mul(ctx(6), p2), ctx.mul(ctx(2 * n), a))
        w = ctx.add(ctx.add(ctx.mul(ctx(10), p3), ctx.mul(ctx(6), ctx.mul(a, p1))),
                    ctx.mul(ctx(4 * n), b))
    A = ctx.sub(a, ctx.mul(ctx(5), t))
    B = ctx.sub(b, ctx.mul(ctx(7), w))
    return IsogenyStep(E, CurveModel(ctx, A, B), kernel.ell, kernel)


def evaluate(step, P):
    """Image of an affine point P (not in the kernel) under the normalized isogeny."""
    if P is None:
        return None
    E = step.source
    ctx = E.ctx
    x, y = P
    h = list(step.kernel.kernel_poly)
    if step.ell == 2:
        x0 = ctx.neg(h[0])
        t = ctx.add(ctx.mul(ctx(3), ctx.mul(x0, x0)), E.a)
        d = ctx.sub(x, x0)
        if ctx.is_zero(d):
            return None
        di = ctx.inv(d)
        X = ctx.add(x, ctx.mul(t, di))
        Y = ctx.mul(y, ctx.sub(ctx.one, ctx.mul(t, ctx.mul(di, di))))
        return (X, Y)
    n = len(h) - 1
    p1 = _power_sums(ctx, h)[0]
    f = [E.b, E.a, ctx.zero, ctx.one]
    fd = pderiv(ctx, f)
    hd = pderiv(ctx, h)
    hdd = pderiv(ctx, hd)
    h2 = pmul(ctx, h, h)
    lin = [ctx.mul(ctx(2), ctx.neg(p1)), ctx(2 * n + 1)]
    num = psub(ctx,
               pmul(ctx, lin, h2),
               pmul(ctx, pscale(ctx, fd, ctx(2)), pmul(ctx, hd, h)))
    num = psub(ctx, num,
               pmul(ctx, pscale(ctx, f, ctx(4)), psub(ctx, pmul(ctx, h, hdd), pmul(ctx, hd, hd))))
    hx = peval(ctx, h, x)
    if ctx.is_zero(hx):
        return None
    # X = num/h^2 and Y = y * X'(x)
    numd = pderiv(ctx, num)
    hi = ctx.inv(hx)
    X = ctx.mul(peval(ctx, num, x), ctx.mul(hi, hi))
    dX = ctx.mul(ctx.sub(ctx.mul(peval(ctx, numd, x), hx),
                         ctx.mul(ctx(2), ctx.mul(peval(ctx, num, x), peval(ctx, hd, x)))),
                 ctx.mul(hi, ctx.mul(hi, hi)))
    return (X, ctx.mul(y, dX))


def kernel_from_point(E, P, ell):
    """Kernel polynomial of <P> for a rational point P of prime order ell."""
    ctx = E.ctx
    if ell == 2:
        xs = [P[0]]
    else:
        xs, Q = [], P
        for _ in range((ell - 1) // 2):
            xs.append(Q[0])
            Q = ec_add(E, Q, P)
    return KernelSubgroup(E, ell, tuple(pfrom_roots(ctx, xs)))


def _kernels_from_factor(E, ell, g):
    """Galois-stable kernel polynomial containing the roots of ``g``, or None.

    Works in F_q[x]/(g): the x-coordinates of kP are rational functions of
    x(P), and the kernel polynomial is rational exactly when its coefficients
    reduce to constants there.
    """
    ctx = E.ctx
    n = (ell - 1) // 2
    xs = []
    for k in range(1, n + 1):
        if k == 1:
            xs.append(prem(ctx, [ctx.zero, ctx.one], g))
            continue
        num, den = multiple_x_numden(E, k)
        xs.append(prem(ctx, pmul(ctx, prem(ctx, num, g), pinvmod(ctx, den, g)), g))
    # expand prod (Z - X_k) with coefficients in F_q[x]/(g)
    coeffs = [[ctx.one]]
    for X in xs:
        nxt = [[] for _ in range(len(coeffs) + 1)]
        for i, c in enumerate(coeffs):
            nxt[i + 1] = padd(ctx, nxt[i + 1], c)
            nxt[i] = padd(ctx, nxt[i], prem(ctx, pmul(ctx, c, [ctx.neg(v) for v in X]), g))
        coeffs = nxt
    out = []
    for c in coeffs:
        if len(c) > 1:
            return None
        out.append(c[0] if c else ctx.zero)
    return tuple(out)


def rational_kernels(E, ell, rng=None):
    """All F_q-rational kernel subgroups of order ell, as KernelSubgroups."""
    if not is_prime(ell):
        raise InvalidArgument(f"{ell} is not prime")
    if ell == E.ctx.p:
        raise InvalidArgument("ell must differ from the characteristic")
    ctx = E.ctx
    rng = rng or random.Random(0)
    if ell == 2:
        cubic = [E.b, E.a, ctx.zero, ctx.one]
        return [KernelSubgroup(E, 2, (ctx.neg(r), ctx.one)) for r in roots(ctx, cubic, rng=rng)]
    n = (ell - 1) // 2
    psi = pmonic(ctx, list(_division_table(E, ell)[ell]))
    found = {}
    rest = psi
    for m in range(1, n + 1):
        if len(rest) <= 1:
            break
        part = distinct_degree_part(ctx, rest, m)
        if len(part) <= 1:
            continue
        rest = pdivmod(ctx, rest, part)[0]
        if n % m:
            continue
        for g in equal_degree_factors(ctx, part, m, rng):
            ker = _kernels_from_factor(E, ell, g)
            if ker is not None:
                found[ker] = KernelSubgroup(E, ell, ker)
    return [found[k] for k in sorted(found, key=lambda c: [ctx.key(x) for x in c])]


def rational_isogenous_j(E, ell, rng=None):
    """Sorted multiset of j-invariants ell-isogenous to j(E) over the base field."""
    out = [velu_isogeny(E, k, check=False).target.j for k in rational_kernels(E, ell, rng)]
    return sorted(out, key=E.ctx.key)


def rational_torsion_point(E, ell, rng, order=None):
    """A random rational point of exact order ell, or None if E(F_p)[ell] = 0."""
    N = order if order is not None else point_count(E)
    if N % ell:
        return None
    cof = N
    while cof % ell == 0:
        cof //= ell
    for _ in range(64):
        Q = ec_mul(E, cof, random_point(E, rng))
        if Q is None:
            continue
        while True:
            R = ec_mul(E, ell, Q)
            if R is None:
                return Q
            Q = R
    return None


def _order_exponent(E, P, ell):
    k = 0
    while P is not None:
        P = ec_mul(E, ell, P)
        k += 1
    return k


def torsion_basis(E, ell, rng, order=None, samples=32):
    """A basis (P, Q) of E[ell] when it is fully rational, else None.

    Points are drawn from the ell-Sylow subgroup; Q is reduced against the
    largest-order sample so that its ell-part leaves <P>.
    """
    N = order if order is not None else point_count(E)
    if N % (ell * ell):
        return None
    a = 0
    cof = N
    while cof % ell == 0:
        cof //= ell
        a += 1
    sylow = lambda: ec_mul(E, cof, random_point(E, rng))
    pool = [sylow() for _ in range(4)]
    g = max(pool, key=lambda P: _order_exponent(E, P, ell))
    kg = _order_exponent(E, g, ell)
    if kg == 0:
        return None
    P = ec_mul(E, ell ** (kg - 1), g)
    multiples = [None]
    for _ in range(ell - 1):
        multiples.append(ec_add(E, multiples[-1], P))
    for _ in range(samples):
        x = sylow()
        while x is not None:
            kx = _order_exponent(E, x, ell)
            top = ec_mul(E, ell ** (kx - 1), x)
            if top not in multiples:
                return P, top
            # top = i*P: strip that component and try again at lower order
            i = multiples.index(top)
            x = ec_add(E, x, ec_mul(E, -i * ell ** (kg - kx), g))
    return None


def cyclic_subgroup_generators(E, ell, basis):
    """One generator for each of the ell+1 subgroups of order ell in <P, Q>."""
    P, Q = basis
    gens = [Q]
    R = P
    for _ in range(ell):
        gens.append(R)
        R = ec_add(E, R, Q)
    return gens
