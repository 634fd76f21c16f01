"""
Finite fields F_p and F_{p^2}, and dense univariate polynomials over them.

Prime-field elements are plain ints in [0, p); quadratic-extension elements
are pairs (a, b) standing for a + b*sqrt(r) with r the smallest non-residue.
"""

import logging
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from sympy import isprime, sqrt_mod

import config
from utils import rand_below

logger = logging.getLogger("isolab.numtheory.fields")


# ------------------------------------------------------
# Prime Field
# ------------------------------------------------------
class PrimeField:
    degree = 1

    def __init__(self, p: int) -> None:
        if p <= 3 or p > config.max_modulus or not isprime(p):
            raise ValueError(f"{p} is not an odd prime > 3 within the modulus cap")
        self.p = p
        self.order = p
        self.zero = 0
        self.one = 1
        self._nonresidue: Optional[int] = None

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("Fp", self.p))

    def from_int(self, n: int) -> int:
        return n % self.p

    def add(self, x: int, y: int) -> int:
        return (x + y) % self.p

    def sub(self, x: int, y: int) -> int:
        return (x - y) % self.p

    def neg(self, x: int) -> int:
        return -x % self.p

    def mul(self, x: int, y: int) -> int:
        return x * y % self.p

    def inv(self, x: int) -> int:
        if x % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, -1, self.p)

    def div(self, x: int, y: int) -> int:
        return x * self.inv(y) % self.p

    def pow(self, x: int, e: int) -> int:
        if e < 0:
            return pow(self.inv(x), -e, self.p)
        return pow(x, e, self.p)

    def is_square(self, x: int) -> bool:
        return x == 0 or pow(x, (self.p - 1) // 2, self.p) == 1

    def sqrt(self, x: int) -> Optional[int]:
        if x == 0:
            return 0
        if not self.is_square(x):
            return None
        return int(sqrt_mod(x, self.p))

    @property
    def nonresidue(self) -> int:
        if self._nonresidue is None:
            r = 2
            while self.is_square(r):
                r += 1
            self._nonresidue = r
        return self._nonresidue

    def random(self, rng: np.random.Generator) -> int:
        return rand_below(rng, self.p)

    def elements(self) -> Iterator[int]:
        return iter(range(self.p))

    def to_int(self, x: int) -> int:
        return x


# ------------------------------------------------------
# Quadratic Extension
# ------------------------------------------------------
class QuadExtField:
    """F_{p^2} = F_p(sqrt(r)) with r the smallest quadratic non-residue mod p."""

    degree = 2

    def __init__(self, base: PrimeField) -> None:
        self.base = base
        self.p = base.p
        self.order = base.p ** 2
        self.r = base.nonresidue
        self.zero = (0, 0)
        self.one = (1, 0)
        self._tonelli: Optional[Tuple[int, int, Tuple[int, int]]] = None

    def __repr__(self) -> str:
        return f"QuadExtField({self.p})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, QuadExtField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("Fp2", self.p))

    def from_int(self, n: int) -> Tuple[int, int]:
        return (n % self.p, 0)

    def embed(self, x: int) -> Tuple[int, int]:
        return (x % self.p, 0)

    def add(self, x, y):
        p = self.p
        return ((x[0] + y[0]) % p, (x[1] + y[1]) % p)

    def sub(self, x, y):
        p = self.p
        return ((x[0] - y[0]) % p, (x[1] - y[1]) % p)

    def neg(self, x):
        p = self.p
        return (-x[0] % p, -x[1] % p)

    def mul(self, x, y):
        p = self.p
        a, b = x
        c, d = y
        return ((a * c + b * d * self.r) % p, (a * d + b * c) % p)

    def inv(self, x):
        a, b = x
        p = self.p
        norm = (a * a - self.r * b * b) % p
        if norm == 0:
            raise ZeroDivisionError("inverse of zero")
        ninv = pow(norm, -1, p)
        return (a * ninv % p, -b * ninv % p)

    def div(self, x, y):
        return self.mul(x, self.inv(y))

    def pow(self, x, e: int):
        if e < 0:
            x, e = self.inv(x), -e
        result = self.one
        while e:
            if e & 1:
                result = self.mul(result, x)
            x = self.mul(x, x)
            e >>= 1
        return result

    def is_square(self, x) -> bool:
        return x == self.zero or self.pow(x, (self.order - 1) // 2) == self.one

    @property
    def nonresidue(self):
        if self._tonelli is None:
            k = 0
            while self.is_square((k, 1)):
                k += 1
            z = (k, 1)
            s, t = 0, self.order - 1
            while t % 2 == 0:
                s, t = s + 1, t // 2
            self._tonelli = (s, t, z)
        return self._tonelli[2]

    def sqrt(self, x):
        """Tonelli-Shanks over F_{p^2}."""
        if x == self.zero:
            return self.zero
        if not self.is_square(x):
            return None
        z = self.nonresidue
        s, t, _ = self._tonelli
        m = s
        c = self.pow(z, t)
        tt = self.pow(x, t)
        root = self.pow(x, (t + 1) // 2)
        while tt != self.one:
            i, sq = 0, tt
            while sq != self.one:
                sq = self.mul(sq, sq)
                i += 1
            b = c
            for _ in range(m - i - 1):
                b = self.mul(b, b)
            m = i
            c = self.mul(b, b)
            tt = self.mul(tt, c)
            root = self.mul(root, b)
        return root

    def random(self, rng: np.random.Generator):
        return (rand_below(rng, self.p), rand_below(rng, self.p))

    def elements(self):
        return ((a, b) for a in range(self.p) for b in range(self.p))

    def in_base(self, x) -> bool:
        return x[1] == 0

    def to_int(self, x) -> int:
        if x[1] != 0:
            raise ValueError(f"{x} is not in the prime field")
        return x[0]


def field_element_str(field, x) -> str:
    """Render an element for reports: 'a' over F_p, 'a+b*s' over F_{p^2}."""
    if field.degree == 1:
        return str(x)
    return str(x[0]) if x[1] == 0 else f"{x[0]}+{x[1]}*s"


# ------------------------------------------------------
# Polynomials
# ------------------------------------------------------
class Poly:
    """Dense polynomial, coefficients in ascending degree, no trailing zeros."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs: Sequence) -> None:
        coeffs = list(coeffs)
        zero = field.zero
        while coeffs and coeffs[-1] == zero:
            coeffs.pop()
        self.field = field
        self.coeffs = tuple(coeffs)

    @classmethod
    def from_ints(cls, field, ints: Sequence[int]) -> "Poly":
        return cls(field, [field.from_int(c) for c in ints])

    @classmethod
    def x(cls, field) -> "Poly":
        return cls(field, [field.zero, field.one])

    @classmethod
    def const(cls, field, c) -> "Poly":
        return cls(field, [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self):
        return self.coeffs[-1] if self.coeffs else self.field.zero

    def __repr__(self) -> str:
        return f"Poly({self.field!r}, {list(self.coeffs)})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Poly) and self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __call__(self, x):
        f = self.field
        acc = f.zero
        for c in reversed(self.coeffs):
            acc = f.add(f.mul(acc, x), c)
        return acc

    def __add__(self, other: "Poly") -> "Poly":
        f = self.field
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = f.add(out[i], c)
        return Poly(f, out)

    def __neg__(self) -> "Poly":
        f = self.field
        return Poly(f, [f.neg(c) for c in self.coeffs])

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        f = self.field
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly(f, [])
        if f.degree == 1:
            out = [0] * (len(a) + len(b) - 1)
            for i, ai in enumerate(a):
                if ai:
                    for j, bj in enumerate(b):
                        out[i + j] += ai * bj
            return Poly(f, [c % f.p for c in out])
        out = [f.zero] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai != f.zero:
                for j, bj in enumerate(b):
                    out[i + j] = f.add(out[i + j], f.mul(ai, bj))
        return Poly(f, out)

    def scale(self, c) -> "Poly":
        f = self.field
        return Poly(f, [f.mul(c, a) for a in self.coeffs])

    def shift(self, n: int) -> "Poly":
        return Poly(self.field, [self.field.zero] * n + list(self.coeffs))

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self.scale(self.field.inv(self.lc))

    def derivative(self) -> "Poly":
        f = self.field
        return Poly(f, [f.mul(f.from_int(i), c) for i, c in enumerate(self.coeffs)][1:])

    def divmod(self, divisor: "Poly") -> Tuple["Poly", "Poly"]:
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        f = self.field
        rem = list(self.coeffs)
        dd = divisor.degree
        dc = divisor.coeffs
        inv_lc = f.inv(divisor.lc)
        quot = [f.zero] * max(len(rem) - dd, 0)
        for i in range(len(rem) - dd - 1, -1, -1):
            coef = rem[i + dd]
            if coef == f.zero:
                continue
            coef = f.mul(coef, inv_lc)
            quot[i] = coef
            for j in range(dd + 1):
                rem[i + j] = f.sub(rem[i + j], f.mul(coef, dc[j]))
        return Poly(f, quot), Poly(f, rem[:dd] if dd > 0 else [])

    def __floordiv__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    def powmod(self, e: int, modulus: "Poly") -> "Poly":
        result = Poly.const(self.field, self.field.one)
        base = self % modulus
        while e:
            if e & 1:
                result = (result * base) % modulus
            base = (base * base) % modulus
            e >>= 1
        return result


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd; gcd(0, 0) is the zero polynomial."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def _random_poly(field, degree_below: int, rng: np.random.Generator) -> Poly:
    return Poly(field, [field.random(rng) for _ in range(degree_below)])


def _split_linear(g: Poly, rng: np.random.Generator) -> List:
    """Roots of a monic squarefree product of distinct linear factors."""
    f = g.field
    if g.degree <= 0:
        return []
    if g.degree == 1:
        return [f.neg(g.coeffs[0])]
    half = (f.order - 1) // 2
    x = Poly.x(f)
    while True:
        shift = Poly.const(f, f.random(rng))
        half_power = (x + shift).powmod(half, g) - Poly.const(f, f.one)
        d = poly_gcd(g, half_power)
        if 0 < d.degree < g.degree:
            return _split_linear(d, rng) + _split_linear(g // d, rng)


def poly_roots(poly: Poly, rng: np.random.Generator) -> List:
    """All roots in the coefficient field, repeated by multiplicity, sorted."""
    if poly.is_zero():
        raise ValueError("the zero polynomial has every element as a root")
    f = poly.field
    if poly.degree <= 0:
        return []
    g = poly.monic()
    x = Poly.x(f)
    frob = x.powmod(f.order, g)
    distinct = _split_linear(poly_gcd(g, frob - x), rng)
    roots = []
    for r in distinct:
        linear = Poly(f, [f.neg(r), f.one])
        rest = g
        while True:
            quot, rem = rest.divmod(linear)
            if not rem.is_zero():
                break
            roots.append(r)
            rest = quot
    return sorted(roots)


def distinct_degree_factor(poly: Poly) -> List[Tuple[Poly, int]]:
    """Split a monic squarefree polynomial into products of same-degree irreducibles."""
    f = poly.field
    x = Poly.x(f)
    rest = poly.monic()
    out = []
    h = x
    d = 0
    while rest.degree >= 2 * (d + 1):
        d += 1
        h = h.powmod(f.order, rest)
        g = poly_gcd(rest, h - x)
        if g.degree > 0:
            out.append((g, d))
            rest = rest // g
            h = h % rest
    if rest.degree > 0:
        out.append((rest, rest.degree))
    return out


def equal_degree_factor(poly: Poly, d: int, rng: np.random.Generator) -> List[Poly]:
    """Cantor-Zassenhaus splitting of a product of degree-d irreducibles."""
    if poly.degree == d:
        return [poly.monic()]
    f = poly.field
    exponent = (f.order ** d - 1) // 2
    one = Poly.const(f, f.one)
    while True:
        a = _random_poly(f, poly.degree, rng)
        if a.degree < 1:
            continue
        c = poly_gcd(poly, a.powmod(exponent, poly) - one)
        if 0 < c.degree < poly.degree:
            return equal_degree_factor(c, d, rng) + equal_degree_factor(poly // c, d, rng)


def factor_squarefree(poly: Poly, rng: np.random.Generator) -> List[Poly]:
    """Monic irreducible factors of a squarefree polynomial, ordered by (degree, coefficients)."""
    g = poly.monic()
    if poly_gcd(g, g.derivative()).degree > 0:
        raise ValueError("factor_squarefree needs a squarefree polynomial")
    factors = []
    for block, d in distinct_degree_factor(g):
        factors.extend(equal_degree_factor(block, d, rng))
    return sorted(factors, key=lambda h: (h.degree, h.coeffs))
