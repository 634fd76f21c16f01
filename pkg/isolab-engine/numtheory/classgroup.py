"""
Class groups of imaginary quadratic orders via reduced binary quadratic forms.

Covers reduction and composition, enumeration with a cyclic decomposition,
characters, prime forms, the Cayley graph on the class group and the
lattice-point counts that give the theta coefficients.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np
from sympy import isprime, sqrt_mod

try:
    from sympy.core.intfunc import igcdex
except ImportError:  # SymPy < 1.13
    from sympy.core.numbers import igcdex

import config
from errors import AssertionFailed, ClassNumberTooLarge, DiscriminantMismatch
from numtheory.arith import factor_int, fundamental_discriminant, is_discriminant, kronecker, primes_upto

logger = logging.getLogger("isolab.numtheory.classgroup")


# ------------------------------------------------------
# Forms
# ------------------------------------------------------
@dataclass(frozen=True, order=True)
class QuadForm:
    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        return b >= 0 if (abs(b) == a or a == c) else True

    def inverse(self) -> "QuadForm":
        return reduce_form(QuadForm(self.a, -self.b, self.c))

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def to_list(self) -> List[int]:
        return [self.a, self.b, self.c]


def _normalize(a: int, b: int, c: int) -> Tuple[int, int, int]:
    if -a < b <= a:
        return a, b, c
    r = (a - b) // (2 * a)
    return a, b + 2 * r * a, a * r * r + b * r + c


def reduce_form(f: QuadForm) -> QuadForm:
    """Unique reduced representative of the class of a positive definite form."""
    if f.discriminant >= 0 or f.a <= 0:
        raise ValueError(f"{f} is not positive definite")
    a, b, c = _normalize(f.a, f.b, f.c)
    while a > c or (a == c and b < 0):
        s = (c + b) // (2 * c)
        a, b, c = c, -b + 2 * s * c, c * s * s - b * s + a
    a, b, c = _normalize(a, b, c)
    return QuadForm(a, b, c)


def _solve_mod(a: int, b: int, m: int) -> Tuple[int, int]:
    """Solve a x = b (mod m); returns (x0, step) with all solutions x0 + step * n."""
    x, _, g = (int(v) for v in igcdex(a, m))
    q, r = divmod(b, g)
    if r:
        raise ValueError(f"no solution to {a} x = {b} mod {m}")
    return (q * x) % m, m // g


def compose(f: QuadForm, g: QuadForm) -> QuadForm:
    """Gauss composition of primitive forms of one discriminant, reduced."""
    D = f.discriminant
    if g.discriminant != D:
        raise DiscriminantMismatch(f"{f} has discriminant {D}, {g} has {g.discriminant}")
    a1, b1, c1 = f.a, f.b, f.c
    a2, b2, c2 = g.a, g.b, g.c
    gg = (b1 + b2) // 2
    h = (b2 - b1) // 2
    w = math.gcd(a1, a2, gg)
    s, t, u = a1 // w, a2 // w, gg // w
    k_temp, step = _solve_mod(t * u, h * u + s * c1, s * t)
    n, _ = _solve_mod(t * step, h - t * k_temp, s)
    k = k_temp + step * n
    l = (t * k - h) // s
    m = (t * u * k - h * u - s * c1) // (s * t)
    a3 = s * t
    b3 = w * u - (k * t + l * s)
    c3 = k * l - w * m
    return reduce_form(QuadForm(a3, b3, c3))


def principal_form(D: int) -> QuadForm:
    b = D % 2
    return QuadForm(1, b, (b * b - D) // 4)


# ------------------------------------------------------
# Class group
# ------------------------------------------------------
def unit_count(D: int) -> int:
    """Number of units e of the order of discriminant D."""
    return {-3: 6, -4: 4}.get(D, 2)


def reduced_forms(D: int, bound: Optional[int] = None) -> List[QuadForm]:
    """Primitive reduced forms of discriminant D, ordered by (a, b)."""
    bound = config.class_number_bound if bound is None else bound
    forms = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (a == c and b < 0):
                continue
            if math.gcd(a, b, c) != 1:
                continue
            forms.append(QuadForm(a, b, c))
            if len(forms) > bound:
                raise ClassNumberTooLarge(f"class number of {D} exceeds {bound}")
        a += 1
    return forms


@dataclass
class ClassGroup:
    D: int
    elements: List[QuadForm]
    generators: List[QuadForm]
    orders: List[int]
    vectors: np.ndarray
    e: int
    index: Dict[QuadForm, int] = field(repr=False, default_factory=dict)
    _by_vector: Dict[Tuple[int, ...], int] = field(repr=False, default_factory=dict)

    @property
    def h(self) -> int:
        return len(self.elements)

    @property
    def conductor(self) -> int:
        return fundamental_discriminant(self.D)[0]

    @property
    def structure(self) -> List[Tuple[QuadForm, int]]:
        return list(zip(self.generators, self.orders))

    def index_of(self, f: QuadForm) -> int:
        return self.index[reduce_form(f)]

    def vector_index(self, vector) -> int:
        key = tuple(int(v) % n for v, n in zip(vector, self.orders))
        return self._by_vector[key]

    def product_index(self, i: int, j: int) -> int:
        return self.vector_index(self.vectors[i] + self.vectors[j])

    def ratio_index(self, i: int, j: int) -> int:
        """Index of the class c_i^-1 c_j."""
        return self.vector_index(self.vectors[j] - self.vectors[i])

    def inverse_index(self, i: int) -> int:
        return self.vector_index(-self.vectors[i])

    def translation(self, g: int) -> np.ndarray:
        """perm[v] = index of c_v * c_g."""
        return np.array([self.product_index(v, g) for v in range(self.h)], dtype=np.int64)

    def to_dict(self) -> Dict:
        return {
            "discriminant": self.D,
            "h": self.h,
            "e": self.e,
            "structure": [{"generator": g.to_list(), "order": n} for g, n in self.structure],
            "elements": [f.to_list() for f in self.elements],
        }


def _decompose(D: int, elements: List[QuadForm], index: Dict[QuadForm, int]):
    """
    Cyclic decomposition: repeatedly take an element of maximal order modulo
    the current subgroup H and correct it by an element of H so that its
    order in G equals its order in G / H.
    """
    h = len(elements)
    identity = index[principal_form(D)]

    def mul(i: int, j: int) -> int:
        return index[compose(elements[i], elements[j])]

    gens: List[int] = []
    orders: List[int] = []
    member: Dict[int, Tuple[int, ...]] = {identity: ()}
    while len(member) < h:
        # label cosets of H
        coset = [-1] * h
        reps = []
        for x in range(h):
            if coset[x] >= 0:
                continue
            cid = len(reps)
            reps.append(x)
            for y in member:
                coset[mul(x, y)] = cid
        # element of maximal order in G / H
        best, best_order, best_power = None, 0, None
        seen_order: Dict[int, int] = {}
        for x in reps:
            if coset[x] in seen_order:
                continue
            k, y = 1, x
            powers = [x]
            while y not in member:
                y = mul(y, x)
                k += 1
                powers.append(y)
            for jpow, z in enumerate(powers[:-1], start=1):
                seen_order.setdefault(coset[z], k // math.gcd(jpow, k))
            if k > best_order:
                best, best_order, best_power = x, k, y
        # x^k lies in H with exponent vector v; divide v by k inside H
        v = member[best_power]
        correction = []
        for vi, ni in zip(v, orders):
            g = math.gcd(best_order, ni)
            if vi % g:
                raise AssertionFailed(f"class group of {D}: cannot lift element of order {best_order}")
            sol, _ = _solve_mod(best_order, vi, ni)
            correction.append(sol)
        lifted = best
        for gi, ci, ni in zip(gens, correction, orders):
            lifted = mul(lifted, _power(mul, gi, (ni - ci) % ni, identity))
        gens.append(lifted)
        orders.append(best_order)
        new_member: Dict[int, Tuple[int, ...]] = {}
        for y, vec in member.items():
            z = y
            for jpow in range(best_order):
                new_member[z] = vec + (jpow,)
                z = mul(z, lifted)
        if len(new_member) != len(member) * best_order:
            raise AssertionFailed(f"class group of {D}: lifted generator is not independent")
        member = new_member
    return gens, orders, member


def _power(mul, x: int, k: int, identity: int) -> int:
    result = identity
    for _ in range(k):
        result = mul(result, x)
    return result


@lru_cache(maxsize=256)
def enumerate_class_group(D: int) -> ClassGroup:
    """All reduced forms of discriminant D with a cyclic decomposition."""
    if not is_discriminant(D):
        raise ValueError(f"{D} is not a negative discriminant")
    elements = reduced_forms(D)
    index = {f: i for i, f in enumerate(elements)}
    gens, orders, member = _decompose(D, elements, index)
    h = len(elements)
    vectors = np.zeros((h, len(orders)), dtype=np.int64)
    by_vector = {}
    for i, vec in member.items():
        vectors[i] = vec
        by_vector[tuple(vec)] = i
    G = ClassGroup(
        D=D,
        elements=elements,
        generators=[elements[g] for g in gens],
        orders=orders,
        vectors=vectors,
        e=unit_count(D),
        index=index,
        _by_vector=by_vector,
    )
    logger.debug(f"Cl({D}): h={h}, structure {orders}")
    return G


# ------------------------------------------------------
# Characters
# ------------------------------------------------------
@dataclass(frozen=True)
class ClassCharacter:
    index: Tuple[int, ...]
    values: np.ndarray

    def __call__(self, i: int) -> complex:
        return complex(self.values[i])

    def is_trivial(self) -> bool:
        return not any(self.index)


def character_table(G: ClassGroup) -> np.ndarray:
    """X[c, v] = chi_c(class v); row 0 is the trivial character."""
    orders = np.array(G.orders, dtype=np.float64)
    if len(G.orders) == 0:
        return np.ones((1, 1), dtype=np.complex128)
    J = np.array(list(itertools.product(*[range(n) for n in G.orders])), dtype=np.float64)
    phases = (J / orders) @ G.vectors.T.astype(np.float64)
    return np.exp(2j * np.pi * phases)


def characters(G: ClassGroup) -> List[ClassCharacter]:
    table = character_table(G)
    indices = list(itertools.product(*[range(n) for n in G.orders])) or [()]
    return [ClassCharacter(tuple(idx), table[c]) for c, idx in enumerate(indices)]


# ------------------------------------------------------
# Prime forms & Cayley graph
# ------------------------------------------------------
def prime_form(D: int, ell: int) -> Optional[Tuple[QuadForm, int]]:
    """
    Reduced form of a prime ideal of norm ell, with 2 if ell splits (the
    ideal and its conjugate) or 1 if it ramifies; None for inert primes and
    for primes dividing the conductor.
    """
    if not isprime(ell):
        raise ValueError(f"{ell} is not prime")
    conductor = fundamental_discriminant(D)[0]
    if conductor % ell == 0:
        return None
    symbol = kronecker(D, ell)
    if symbol == -1:
        return None
    if ell == 2:
        b = {1: 1, 0: 0, 4: 2}[D % 8]
    else:
        root = int(sqrt_mod(D % ell, ell))
        b = root if (root - D) % 2 == 0 else ell - root
    c = (b * b - D) // (4 * ell)
    return reduce_form(QuadForm(ell, b, c)), (2 if symbol == 1 else 1)


@dataclass(frozen=True)
class GeneratorSlot:
    ell: int
    form: QuadForm
    index: int
    paired: bool


@dataclass
class CayleyGraph:
    D: int
    m: int
    vertices: List[QuadForm]
    generators: List[GeneratorSlot]
    adjacency: np.ndarray

    @property
    def k(self) -> int:
        return len(self.generators)

    @property
    def h(self) -> int:
        return len(self.vertices)

    def to_dict(self) -> Dict:
        return {
            "kind": "cayley",
            "discriminant": self.D,
            "m": self.m,
            "vertices": [f.to_list() for f in self.vertices],
            "generators": [
                {"ell": s.ell, "form": s.form.to_list(), "paired": s.paired} for s in self.generators
            ],
            "adjacency": self.adjacency.tolist(),
        }


def generator_slots(G: ClassGroup, m: int, primes: Optional[List[int]] = None) -> List[GeneratorSlot]:
    """
    Edge slots for every admissible prime <= m: a split prime gives the
    class of a prime ideal and of its conjugate, a ramified prime one slot.
    """
    slots = []
    for ell in (primes if primes is not None else primes_upto(m)):
        found = prime_form(G.D, ell)
        if found is None:
            continue
        form, mult = found
        i = G.index_of(form)
        if mult == 2:
            slots.append(GeneratorSlot(ell, form, i, True))
            slots.append(GeneratorSlot(ell, G.elements[G.inverse_index(i)], G.inverse_index(i), True))
        else:
            slots.append(GeneratorSlot(ell, form, i, False))
    return slots


def build_cayley_graph(D: int, m: int, primes: Optional[List[int]] = None) -> CayleyGraph:
    """
    Cayley graph on Cl(D): A[v, v*g] += 1 for every generator slot g.

    A principal ramified generator contributes 1 to the diagonal, a
    principal split pair contributes 2, so every row sums to the degree.
    """
    G = enumerate_class_group(D)
    slots = generator_slots(G, m, primes)
    A = np.zeros((G.h, G.h), dtype=np.int64)
    rows = np.arange(G.h)
    for slot in slots:
        np.add.at(A, (rows, G.translation(slot.index)), 1)
    logger.info(f"Cayley graph D={D} m={m}: h={G.h}, degree {len(slots)}")
    return CayleyGraph(D=D, m=m, vertices=list(G.elements), generators=slots, adjacency=A)


# ------------------------------------------------------
# Theta coefficients
# ------------------------------------------------------
def representation_count(f: QuadForm, n: int) -> int:
    """#{(x, y) in Z^2 : f(x, y) = n}, by solving for x along each y."""
    a, b, c = f.a, f.b, f.c
    D = f.discriminant
    if n == 0:
        return 1
    count = 0
    ymax = math.isqrt(4 * a * n // -D) + 1
    for y in range(-ymax, ymax + 1):
        disc = D * y * y + 4 * a * n
        if disc < 0:
            continue
        s = math.isqrt(disc)
        if s * s != disc:
            continue
        roots = {(-b * y + s), (-b * y - s)}
        for num in roots:
            if num % (2 * a) == 0:
                count += 1
    return count


def theta_coefficient(G: ClassGroup, f: QuadForm, n: int) -> int:
    """(1/e) #{(x, y) : f(x, y) = n}, with the n = 0 coefficient set to 0."""
    if n > config.theta_bound:
        raise ValueError(f"n = {n} exceeds the theta bound {config.theta_bound}")
    if n == 0:
        return 0
    count = representation_count(f, n)
    if count % G.e:
        raise AssertionFailed(f"{count} representations of {n} by {f} not divisible by {G.e}")
    return count // G.e


def theta_matrix(G: ClassGroup, n: int) -> np.ndarray:
    """M(n)[i, j] = theta coefficient of the class c_i^-1 c_j."""
    per_class = np.array([theta_coefficient(G, f, n) for f in G.elements], dtype=np.int64)
    M = np.zeros((G.h, G.h), dtype=np.int64)
    for i in range(G.h):
        for j in range(G.h):
            M[i, j] = per_class[G.ratio_index(i, j)]
    return M


# ------------------------------------------------------
# Analytic class number
# ------------------------------------------------------
def analytic_class_number(D: int) -> float:
    """
    h(D) from the character sum -(w / 2|D|) sum_{a<=|D|} a (d_K/a) for the
    maximal order, scaled by the conductor formula for non-maximal orders.
    """
    c, d_K = fundamental_discriminant(D)
    n = -d_K
    total = sum(a * kronecker(d_K, a) for a in range(1, n + 1))
    h_K = -unit_count(d_K) * total / (2 * n)
    if c == 1:
        return h_K
    factor = float(c)
    for p, _ in factor_int(c).factors:
        factor *= 1 - kronecker(d_K, p) / p
    return h_K * factor * unit_count(D) / unit_count(d_K)
