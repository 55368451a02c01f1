"""Exact arithmetic over a prime field Z_p.

Residues are plain ints kept canonical in [0, p).  The modulus is capped
below 2**31 so a product of two canonical residues always fits a 64-bit
signed intermediate, which keeps the numpy batch engines exact.
"""

from dataclasses import dataclass

MAX_MODULUS = 2**31

# Deterministic Miller-Rabin witness set, valid for all n < 3,215,031,751
# (covers the full supported range p < 2**31).
_MR_WITNESSES = (2, 3, 5, 7)

Residue = int


class NotPrimeError(ValueError):
    """Raised when a modulus fails the primality gate."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3,215,031,751."""
    if n < 2:
        return False
    for w in _MR_WITNESSES:
        if n == w:
            return True
        if n % w == 0:
            return False
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for w in _MR_WITNESSES:
        x = pow(w, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True, slots=True)
class PrimeModulus:
    p: int

    def __post_init__(self):
        if not (3 <= self.p < MAX_MODULUS):
            raise NotPrimeError(
                f"modulus must satisfy 3 <= p < 2**31, got {self.p}"
            )
        if not is_prime(self.p):
            raise NotPrimeError(f"modulus {self.p} is not prime")


def make_modulus(p: int) -> PrimeModulus:
    return PrimeModulus(p)


def mod_add(x: Residue, y: Residue, m: PrimeModulus) -> Residue:
    return (x + y) % m.p


def mod_sub(x: Residue, y: Residue, m: PrimeModulus) -> Residue:
    return (x - y) % m.p


def mod_mul(x: Residue, y: Residue, m: PrimeModulus) -> Residue:
    return x * y % m.p
