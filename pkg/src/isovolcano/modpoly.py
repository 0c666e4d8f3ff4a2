"""Classical modular polynomials: storage, instantiation and neighbours in G_ell.

Coefficients live over Z in a sparse map ``{(i, j): c}`` with ``i >= j``;
the symmetric half is implied.  Reductions modulo a field characteristic are
cached per prime.
"""

import os
from pathlib import Path

from filelock import FileLock

from .arith import is_prime
from .errors import FormatError, InvalidArgument
from .ff_poly import Poly, roots

HEADER = "modpoly ell="


class ModularPolynomial:
    """Phi_ell(X, Y) over Z, immutable after construction."""

    def __init__(self, ell, coefficients):
        if not is_prime(ell):
            raise InvalidArgument(f"{ell} is not prime")
        self.ell = ell
        coeffs = {}
        for (i, j), c in coefficients.items():
            if i < j:
                i, j = j, i
            if not (0 <= j <= i <= ell + 1):
                raise InvalidArgument(f"exponent pair ({i}, {j}) out of range")
            if c:
                if coeffs.get((i, j), c) != c:
                    raise InvalidArgument(f"asymmetric coefficient at ({i}, {j})")
                coeffs[(i, j)] = int(c)
        if coeffs.get((ell + 1, 0)) != 1:
            raise InvalidArgument("Phi must contain X^(ell+1) with coefficient 1")
        self._coeffs = coeffs
        self._reduced = {}

    @property
    def coefficients(self):
        return dict(self._coeffs)

    def coefficient(self, i, j):
        return self._coeffs.get((max(i, j), min(i, j)), 0)

    def __eq__(self, other):
        return isinstance(other, ModularPolynomial) and self.ell == other.ell \
            and self._coeffs == other._coeffs

    def __hash__(self):
        return hash((self.ell, tuple(sorted(self._coeffs.items()))))

    def __repr__(self):
        return f"ModularPolynomial(ell={self.ell}, terms={len(self._coeffs)})"

    def _matrix(self, p):
        """Full (ell+2)x(ell+2) coefficient matrix reduced mod p."""
        m = self._reduced.get(p)
        if m is None:
            n = self.ell + 2
            m = [[0] * n for _ in range(n)]
            for (i, j), c in self._coeffs.items():
                m[i][j] = m[j][i] = c % p
            self._reduced[p] = m
        return m

    def evaluate(self, ctx, x, y):
        phi_x = self.instantiate(ctx, x)
        return phi_x(y)

    def instantiate(self, ctx, j):
        """Phi_ell(j, Y) as a Poly over ``ctx``."""
        return Poly(ctx, self.instantiate_coeffs(ctx, j))

    def instantiate_coeffs(self, ctx, j):
        if ctx.p == self.ell:
            raise InvalidArgument("ell must differ from the characteristic")
        m = self._matrix(ctx.p)
        n = self.ell + 2
        if ctx.degree == 1:
            p = ctx.p
            powers = [1] * n
            for i in range(1, n):
                powers[i] = powers[i - 1] * j % p
            return [sum(m[i][k] * powers[i] for i in range(n)) % p for k in range(n)]
        powers = [ctx.one] * n
        for i in range(1, n):
            powers[i] = ctx.mul(powers[i - 1], j)
        out = []
        for k in range(n):
            acc = ctx.zero
            for i in range(n):
                if m[i][k]:
                    acc = ctx.add(acc, ctx.mul(ctx(m[i][k]), powers[i]))
            out.append(acc)
        return out

    def neighbors(self, ctx, j, rng=None):
        """Out-neighbours of j in G_ell with multiplicity, sorted."""
        out = []
        for r, e in roots(ctx, self.instantiate_coeffs(ctx, j), multiplicity=True, rng=rng):
            out.extend([r] * e)
        return out


def dumps(phi):
    lines = [f"{HEADER}{phi.ell}"]
    for (i, j) in sorted(phi._coeffs):
        lines.append(f"{i} {j} {phi._coeffs[(i, j)]}")
    return "\n".join(lines) + "\n"


def loads(text):
    ell, coeffs, seen_header = None, {}, False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not seen_header:
            if not line.startswith(HEADER):
                raise FormatError(f"expected '{HEADER}<ell>'", lineno)
            try:
                ell = int(line[len(HEADER):])
            except ValueError:
                raise FormatError("malformed ell", lineno) from None
            if not is_prime(ell):
                raise FormatError(f"ell={ell} is not prime", lineno)
            seen_header = True
            continue
        parts = line.split()
        if len(parts) != 3:
            raise FormatError("expected '<i> <j> <coefficient>'", lineno)
        try:
            i, j, c = (int(x) for x in parts)
        except ValueError:
            raise FormatError("non-integer field", lineno) from None
        if not (0 <= j <= i <= ell + 1):
            raise FormatError(f"exponent pair ({i}, {j}) invalid", lineno)
        if (i, j) in coeffs:
            raise FormatError(f"duplicate entry ({i}, {j})", lineno)
        coeffs[(i, j)] = c
    if not seen_header:
        raise FormatError("empty file", 1)
    try:
        return ModularPolynomial(ell, coeffs)
    except InvalidArgument as exc:
        raise FormatError(str(exc)) from None


def store(path, phi):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(dumps(phi), encoding="ascii")
    os.replace(tmp, path)


def load(path):
    return loads(Path(path).read_text(encoding="ascii"))


# ---------------------------------------------------------------------------
# on-disk cache

def default_cache_dir():
    env = os.environ.get("ISOVOLCANO_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "isovolcano"


def cache_path(cache_dir, ell):
    return Path(cache_dir) / f"phi_{ell}.txt"


def cached(ell, cache_dir=None, build=None):
    """Load Phi_ell from the cache, building and storing it if absent.

    ``build`` is a zero-argument callable returning a ModularPolynomial;
    writers serialize on an advisory lock, readers do not lock.
    """
    cache_dir = Path(cache_dir) if cache_dir else default_cache_dir()
    path = cache_path(cache_dir, ell)
    if path.exists():
        return load(path)
    if build is None:
        raise InvalidArgument(f"Phi_{ell} not cached in {cache_dir}")
    cache_dir.mkdir(parents=True, exist_ok=True)
    with FileLock(str(path) + ".lock"):
        if path.exists():
            return load(path)
        phi = build()
        if phi.ell != ell:
            raise InvalidArgument("builder returned the wrong level")
        store(path, phi)
    return phi
