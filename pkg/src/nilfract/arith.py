"""Integer arithmetic shared by every module: prime supports, the rings
Z[1/P] used as scalars for localized groups, and sets of naturals."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, prod
from typing import Iterable, Union

from sympy import factorint, isprime

Scalar = Union[int, Fraction]


@lru_cache(maxsize=4096)
def prime_factors(n: int) -> tuple[int, ...]:
    """Sorted distinct primes dividing ``n`` (n != 0)."""
    if n == 0:
        raise ValueError("0 has no finite prime support")
    return tuple(sorted(factorint(abs(n))))


def coprime_part(n: int, primes: Iterable[int]) -> int:
    """Largest divisor of ``n`` coprime to every prime in ``primes``."""
    n = abs(n)
    for p in primes:
        while n % p == 0:
            n //= p
    return n


def is_smooth(n: int, primes: Iterable[int]) -> bool:
    return n != 0 and coprime_part(n, primes) == 1


def norm(x: Scalar) -> Scalar:
    """Collapse integral fractions to ``int``."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x.numerator)
    return x


def residue(x: Scalar, d: int) -> int:
    """Residue of an element of Z[1/P] modulo ``d`` (d coprime to P)."""
    if isinstance(x, Fraction):
        return x.numerator * pow(x.denominator, -1, d) % d
    return x % d


def exact_div(a: Scalar, b: int) -> Scalar:
    if isinstance(a, int) and a % b == 0:
        return a // b
    return norm(Fraction(a) / b)


@dataclass(frozen=True)
class LocalizedRing:
    """The subring Z[1/P] of the rationals, P a finite set of primes."""

    inverted_primes: tuple[int, ...] = ()

    def __post_init__(self):
        ps = tuple(sorted(set(int(p) for p in self.inverted_primes)))
        for p in ps:
            if not isprime(p):
                raise ValueError(f"{p} is not prime")
        object.__setattr__(self, "inverted_primes", ps)

    def contains(self, x: Scalar) -> bool:
        if isinstance(x, Fraction):
            return is_smooth(x.denominator, self.inverted_primes)
        return isinstance(x, int)

    def is_unit(self, n: int) -> bool:
        return is_smooth(n, self.inverted_primes)

    def strip(self, n: int) -> int:
        """Non-unit part of an integer; 0 stays 0."""
        if n == 0:
            return 0
        return coprime_part(n, self.inverted_primes)

    def divides(self, d: int, x: Scalar) -> bool:
        """Whether x / d lies in the ring (d != 0)."""
        num = x.numerator if isinstance(x, Fraction) else x
        return num % self.strip(d) == 0

    def invert(self, primes: Iterable[int]) -> LocalizedRing:
        return LocalizedRing(tuple(set(self.inverted_primes) | set(primes)))

    def issubring(self, other: LocalizedRing) -> bool:
        return set(self.inverted_primes) <= set(other.inverted_primes)

    def __str__(self):
        if not self.inverted_primes:
            return "Z"
        return f"Z[1/{prod(self.inverted_primes)}]"


ZZ = LocalizedRing()


@dataclass(frozen=True)
class NumSet:
    """Finite enumeration S(0), ..., S(N-1) of positive naturals."""

    entries: tuple[int, ...] = ()

    def __post_init__(self):
        es = tuple(int(e) for e in self.entries)
        for e in es:
            if e == 0:
                raise ValueError("NumSet entries must be nonzero: x -> x^0 is constant")
            if e < 0:
                raise ValueError(f"NumSet entries must be naturals, got {e}")
        object.__setattr__(self, "entries", es)

    @property
    def prime_set(self) -> tuple[int, ...]:
        return tuple(sorted({p for e in self.entries if e > 1 for p in prime_factors(e)}))

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, n: int) -> int:
        # finite prefixes extend periodically to N -> N
        if not self.entries:
            raise IndexError("empty NumSet has no terms")
        return self.entries[n % len(self.entries)]

    def union(self, other: NumSet) -> NumSet:
        return NumSet(self.entries + other.entries)


def pairwise_coprime(a: Iterable[int], b: Iterable[int]):
    """First index pair (i, j) with gcd(a_i, b_j) != 1, or None."""
    b = list(b)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if gcd(x, y) != 1:
                return i, j
    return None
