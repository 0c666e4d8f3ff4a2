"""Incremental coefficient-wise Chinese remaindering."""

from .arith import symmetric


class CrtAccumulator:
    """Coefficient-wise CRT with a stability test on the symmetric lift."""

    def __init__(self):
        self.modulus = 1
        self.residues = {}
        self._last = None
        self.stable_rounds = 0

    def add(self, p, values):
        """Fold in ``values`` (dict key -> residue mod p); missing keys mean 0."""
        M = self.modulus
        keys = set(self.residues) | set(values)
        inv = pow(M, -1, p)
        for k in keys:
            r = self.residues.get(k, 0)
            v = values.get(k, 0)
            self.residues[k] = r + M * ((v - r) * inv % p)
        self.modulus = M * p
        lifted = self.lift()
        if lifted == self._last:
            self.stable_rounds += 1
        else:
            self.stable_rounds = 0
        self._last = lifted
        return lifted

    def lift(self):
        out = {}
        for k, r in self.residues.items():
            v = symmetric(r, self.modulus)
            if v:
                out[k] = v
        return out
