"""
Integer arithmetic: Kronecker symbols, factorization with an effort budget,
square parts and fundamental discriminants.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Dict, List, Tuple

from sympy import isprime, jacobi_symbol, primerange

import config
from errors import FactorizationTimeout

logger = logging.getLogger("isolab.numtheory.arith")

SMALL_PRIMES = tuple(primerange(2, 1000))


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: Tuple[Tuple[int, int], ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        product = reduce(lambda acc, pe: acc * pe[0] ** pe[1], self.factors, 1)
        if product != self.n:
            raise ValueError(f"factors {self.factors} do not multiply to {self.n}")
        primes = [p for p, _ in self.factors]
        if primes != sorted(set(primes)):
            raise ValueError(f"primes must be strictly increasing: {primes}")
        composite = [p for p in primes if not isprime(p)]
        if composite:
            raise ValueError(f"factors {composite} are not prime")

    def primes(self) -> List[int]:
        return [p for p, _ in self.factors]

    def exponent(self, p: int) -> int:
        for prime, e in self.factors:
            if prime == p:
                return e
        return 0

    def to_dict(self) -> Dict:
        return {"n": self.n, "factors": [list(pe) for pe in self.factors]}


# ------------------------------------------------------
# Symbols
# ------------------------------------------------------
def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n) for n >= 1."""
    if n < 1:
        raise ValueError(f"kronecker symbol needs n >= 1, got {n}")
    result = 1
    twos = (n & -n).bit_length() - 1
    if twos:
        if D % 2 == 0:
            return 0
        if D % 8 in (3, 5) and twos % 2 == 1:
            result = -result
        n >>= twos
    if n == 1:
        return result
    return result * jacobi_symbol(D % n, n)


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0 is undefined")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# ------------------------------------------------------
# Factorization
# ------------------------------------------------------
def _pollard_brent(n: int, budget: List[int], c: int) -> int:
    """Return a nontrivial factor of composite n or n itself on a bad cycle."""
    y, m, g, r, q = 2, 128, 1, 1, 1
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            budget[0] -= min(m, r - k)
            if budget[0] < 0:
                raise FactorizationTimeout(f"Pollard rho budget exhausted on {n}")
            g = math.gcd(q, n)
            k += m
        r *= 2
    if g == n:
        while True:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
            if g > 1:
                break
    return g


def _split(n: int, out: Dict[int, int], effort: int) -> None:
    if n == 1:
        return
    if isprime(n):
        out[n] = out.get(n, 0) + 1
        return
    root = math.isqrt(n)
    if root * root == n:
        _split(root, out, effort)
        _split(root, out, effort)
        return
    budget = [effort]
    for c in range(1, 64):
        d = _pollard_brent(n, budget, c)
        if 1 < d < n:
            _split(d, out, effort)
            _split(n // d, out, effort)
            return
    raise FactorizationTimeout(f"no factor found for {n}")


def factor_int(n: int, effort: int = None) -> Factorization:
    """Trial division by small primes, then Pollard-Brent with an effort budget per factor."""
    if n < 1:
        raise ValueError(f"factor_int needs n >= 1, got {n}")
    effort = config.factor_effort if effort is None else effort
    out: Dict[int, int] = {}
    rest = n
    for p in SMALL_PRIMES:
        if p * p > rest:
            break
        while rest % p == 0:
            out[p] = out.get(p, 0) + 1
            rest //= p
    _split(rest, out, effort)
    return Factorization(n, tuple(sorted(out.items())))


def largest_prime_factor(fac: Factorization) -> int:
    """P(n), with P(1) = 1."""
    return fac.factors[-1][0] if fac.factors else 1


def square_part(n: int, effort: int = None) -> Tuple[int, int]:
    """Return (c, d) with n = c^2 * d, d squarefree and c maximal."""
    c, d = 1, 1
    for p, e in factor_int(n, effort).factors:
        c *= p ** (e // 2)
        d *= p ** (e % 2)
    return c, d


def is_squarefree(n: int, effort: int = None) -> bool:
    return square_part(abs(n), effort)[0] == 1


def fundamental_discriminant(D: int, effort: int = None) -> Tuple[int, int]:
    """
    Split a negative discriminant as D = c^2 * d_K with d_K fundamental.

    Returns (c, d_K).
    """
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a negative discriminant")
    c, d0 = square_part(-D, effort)
    if d0 % 4 == 3:
        return c, -d0
    # -d0 is not 1 mod 4: the factor 4 moves into d_K
    if c % 2:
        raise ValueError(f"{D} is not a discriminant")
    return c // 2, -4 * d0


def is_fundamental(D: int) -> bool:
    try:
        return fundamental_discriminant(D)[0] == 1
    except ValueError:
        return False


def is_discriminant(D: int) -> bool:
    return D < 0 and D % 4 in (0, 1)


def primes_upto(m: int) -> List[int]:
    return list(primerange(2, m + 1))
