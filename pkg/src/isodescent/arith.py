"""Exact integer kernel: primality, factorization, square classes, Jacobi symbols.

Primality and factorization are delegated to sympy.  ``sympy.isprime`` is a
deterministic Miller-Rabin test below 2**64 and a strong BPSW test above
(no known counterexample; the error model is "BPSW pseudoprime").  Inputs at
the scale this package works at are far below that.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import isqrt
from typing import Iterable

import sympy

from .errors import InvalidInput


def is_prime(n: int) -> bool:
    """Return True iff ``n`` is prime (deterministic for n < 2**64)."""
    if n <= 1:
        return False
    return bool(sympy.isprime(n))


@dataclass(frozen=True)
class FactoredInteger:
    sign: int
    factors: tuple[tuple[int, int], ...]

    @property
    def value(self) -> int:
        n = self.sign
        for p, k in self.factors:
            n *= p**k
        return n

    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]


@lru_cache(maxsize=4096)
def factor(n: int) -> FactoredInteger:
    if n == 0:
        raise InvalidInput("cannot factor 0")
    sign = -1 if n < 0 else 1
    fs = sympy.factorint(abs(n))
    return FactoredInteger(sign, tuple(sorted((int(p), int(k)) for p, k in fs.items())))


def prime_divisors(n: int) -> list[int]:
    return factor(n).primes()


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise InvalidInput("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


@dataclass(frozen=True, order=True)
class SquareClass:
    """A class in Q^x / (Q^x)^2, stored as its signed squarefree representative."""

    rep: int

    def __post_init__(self):
        if self.rep == 0:
            raise InvalidInput("0 is not a square class")
        if squarefree_part(self.rep) != self.rep:
            raise InvalidInput(f"{self.rep} is not squarefree")

    def __mul__(self, other: SquareClass) -> SquareClass:
        return SquareClass(squarefree_part(self.rep * other.rep))

    def __int__(self) -> int:
        return self.rep

    def __str__(self) -> str:
        return str(self.rep)

    def is_trivial(self) -> bool:
        return self.rep == 1


def squarefree_part(n: int) -> int:
    if n == 0:
        raise InvalidInput("0 has no squarefree part")
    f = factor(n)
    out = f.sign
    for p, k in f.factors:
        if k % 2:
            out *= p
    return out


def squarefree_class(n: int) -> SquareClass:
    return SquareClass(squarefree_part(n))


def is_squarefree(n: int) -> bool:
    return n != 0 and all(k == 1 for _, k in factor(n).factors)


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n >= 1, via quadratic reciprocity."""
    if n <= 0 or n % 2 == 0:
        raise InvalidInput(f"Jacobi symbol needs an odd positive modulus, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol extending Jacobi to even and negative n."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    return result * jacobi(a, n) if n > 1 else result


def fundamental_discriminant(D: int) -> int:
    """Discriminant of Q(sqrt(D)) for squarefree D != 0, 1."""
    if D in (0, 1) or not is_squarefree(D):
        raise InvalidInput(f"{D} is not a squarefree integer other than 0, 1")
    return D if D % 4 == 1 else 4 * D


def primes_from(start: int, stop: int | None = None) -> Iterable[int]:
    """Ascending primes p with start <= p (< stop if given)."""
    p = sympy.nextprime(start - 1)
    while stop is None or p < stop:
        yield int(p)
        p = sympy.nextprime(p)


def sqrt_mod_prime(a: int, p: int) -> int:
    """A square root of a modulo an odd prime p (a must be a residue)."""
    a %= p
    if a == 0:
        return 0
    if jacobi(a, p) != 1:
        raise InvalidInput(f"{a} is not a square mod {p}")
    # Tonelli-Shanks
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while jacobi(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r
