"""On-demand construction of the modular polynomials used by the pipelines.

Phi_2 comes from the Velu interpolation route.  Each odd Phi_ell is
computed by the volcano route, which needs Phi for smaller primes: one
generates the class group of the auxiliary discriminant, and the others
let the Hilbert class polynomial use more CRT primes.  These are obtained
recursively.  Results are cached on disk.
"""

import random

from .arith import is_prime
from .errors import InvalidArgument
from .modpoly import cached
from .modpoly_crt import choose_auxiliary_discriminant, modular_polynomial, velu_modular_polynomial

DEFAULT_ELLS = (2, 3, 5, 7, 11, 13)


def build_phi(ell, cache_dir=None, seed=0):
    """Phi_ell from the cache, building it (and its prerequisites) if needed."""
    if not is_prime(ell):
        raise InvalidArgument(f"{ell} is not prime")

    def build():
        rng = random.Random(seed * 1000003 + ell)
        if ell == 2:
            return velu_modular_polynomial(2, rng)
        D, _ = choose_auxiliary_discriminant(ell)
        phis = {q: build_phi(q, cache_dir, seed) for q in range(2, ell) if is_prime(q)}
        return modular_polynomial(ell, phis, rng=rng, D=D)

    return cached(ell, cache_dir, build)


def load_phis(ells=DEFAULT_ELLS, cache_dir=None, seed=0):
    return {ell: build_phi(ell, cache_dir, seed) for ell in ells}
