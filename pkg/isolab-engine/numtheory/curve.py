"""
Short Weierstrass curves y^2 = x^3 + a x + b over F_p and F_{p^2}:
group law, point counting, Frobenius invariants and curve generation.
"""

import logging
import math
from dataclasses import dataclass, field as dc_field
from typing import Dict, Iterator, Optional, Tuple

import numpy as np
from sympy import primitive_root

import config
from errors import AmbiguousOrder, PointNotOnCurve, SupersingularCurve
from numtheory.arith import factor_int, fundamental_discriminant
from numtheory.fields import PrimeField, QuadExtField, field_element_str
from utils import derive_rng

logger = logging.getLogger("isolab.numtheory.curve")


class _Infinity:
    """The point at infinity; a singleton."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Infinity"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()


@dataclass(frozen=True)
class Curve:
    field: object
    a: object
    b: object
    _cache: Dict[str, object] = dc_field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.discriminant() == self.field.zero:
            raise ValueError(f"singular curve a={self.a} b={self.b} over {self.field}")

    # ------------------------------------------------------
    # Basic invariants
    # ------------------------------------------------------
    def discriminant(self):
        f = self.field
        four_a3 = f.mul(f.from_int(4), f.pow(self.a, 3))
        return f.add(four_a3, f.mul(f.from_int(27), f.mul(self.b, self.b)))

    def j_invariant(self):
        f = self.field
        four_a3 = f.mul(f.from_int(4), f.pow(self.a, 3))
        return f.div(f.mul(f.from_int(1728), four_a3), self.discriminant())

    @property
    def q(self) -> int:
        return self.field.order

    def rhs(self, x):
        f = self.field
        return f.add(f.add(f.pow(x, 3), f.mul(self.a, x)), self.b)

    def is_on_curve(self, P) -> bool:
        if P is INFINITY:
            return True
        x, y = P
        return self.field.mul(y, y) == self.rhs(x)

    def label(self) -> str:
        f = self.field
        return f"y^2 = x^3 + {field_element_str(f, self.a)}x + {field_element_str(f, self.b)} over F_{f.order}"

    def to_dict(self) -> Dict:
        f = self.field
        return {
            "q": f.order,
            "a": field_element_str(f, self.a),
            "b": field_element_str(f, self.b),
            "j": field_element_str(f, self.j_invariant()),
        }

    # ------------------------------------------------------
    # Group law
    # ------------------------------------------------------
    def neg(self, P):
        if P is INFINITY:
            return P
        return (P[0], self.field.neg(P[1]))

    def add(self, P, Q):
        if P is INFINITY:
            return Q
        if Q is INFINITY:
            return P
        f = self.field
        x1, y1 = P
        x2, y2 = Q
        if x1 == x2:
            if f.add(y1, y2) == f.zero:
                return INFINITY
            num = f.add(f.mul(f.from_int(3), f.mul(x1, x1)), self.a)
            den = f.mul(f.from_int(2), y1)
        else:
            num = f.sub(y2, y1)
            den = f.sub(x2, x1)
        lam = f.div(num, den)
        x3 = f.sub(f.sub(f.mul(lam, lam), x1), x2)
        y3 = f.sub(f.mul(lam, f.sub(x1, x3)), y1)
        return (x3, y3)

    def scalar_mul(self, k: int, P):
        if k < 0:
            return self.scalar_mul(-k, self.neg(P))
        result = INFINITY
        addend = P
        while k:
            if k & 1:
                result = self.add(result, addend)
            addend = self.add(addend, addend)
            k >>= 1
        return result

    def random_point(self, rng: np.random.Generator):
        """Uniform x with a square right-hand side, then a random sign for y."""
        f = self.field
        while True:
            x = f.random(rng)
            y = f.sqrt(self.rhs(x))
            if y is None:
                continue
            if rng.integers(0, 2):
                y = f.neg(y)
            return (x, y)

    def points(self) -> Iterator:
        """All affine points; exhaustive, small fields only."""
        f = self.field
        for x in f.elements():
            y = f.sqrt(self.rhs(x))
            if y is None:
                continue
            yield (x, y)
            if y != f.zero:
                yield (x, f.neg(y))

    # ------------------------------------------------------
    # Twists
    # ------------------------------------------------------
    def twist(self) -> "Curve":
        """Quadratic twist by the smallest non-residue d: (a d^2, b d^3)."""
        f = self.field
        d = f.nonresidue
        return Curve(f, f.mul(self.a, f.mul(d, d)), f.mul(self.b, f.pow(d, 3)))

    # ------------------------------------------------------
    # Cached counts
    # ------------------------------------------------------
    @property
    def order(self) -> int:
        if "order" not in self._cache:
            self._cache["order"] = count_points(self)[0]
        return self._cache["order"]

    @property
    def trace(self) -> int:
        return self.q + 1 - self.order


def add(C: Curve, P, Q):
    if not (C.is_on_curve(P) and C.is_on_curve(Q)):
        raise PointNotOnCurve(f"{P} or {Q} not on {C.label()}")
    return C.add(P, Q)


def scalar_mul(C: Curve, k: int, P):
    if not C.is_on_curve(P):
        raise PointNotOnCurve(f"{P} not on {C.label()}")
    return C.scalar_mul(k, P)


def order_from_multiple(C: Curve, P, multiple: int) -> int:
    """Exact order of P given any N with N*P = Infinity."""
    order = multiple
    for p, _ in factor_int(multiple).factors:
        while order % p == 0 and C.scalar_mul(order // p, P) is INFINITY:
            order //= p
    return order


def point_order(C: Curve, P) -> int:
    if not C.is_on_curve(P):
        raise PointNotOnCurve(f"{P} not on {C.label()}")
    if P is INFINITY:
        return 1
    return order_from_multiple(C, P, C.order)


# ------------------------------------------------------
# Point counting
# ------------------------------------------------------
def _count_exhaustive(C: Curve) -> int:
    f = C.field
    total = 1
    for x in f.elements():
        v = C.rhs(x)
        if v == f.zero:
            total += 1
        elif f.is_square(v):
            total += 2
    return total


def _multiple_in_interval(C: Curve, P, lo: int, hi: int) -> int:
    """Some N in [lo, hi] with N*P = Infinity, by baby-step giant-step."""
    m = math.isqrt(hi - lo) + 1
    baby = {}
    R = INFINITY
    for j in range(m):
        if R is INFINITY and j > 0:
            # order of P is j; any multiple of j inside the interval works
            return ((lo + j - 1) // j) * j
        baby.setdefault(R, j)
        R = C.add(R, P)
    step = C.scalar_mul(m, P)
    G = C.scalar_mul(lo, P)
    for i in range(m + 1):
        j = baby.get(C.neg(G))
        if j is not None:
            return lo + i * m + j
        G = C.add(G, step)
    raise AmbiguousOrder(f"no multiple of point order in the Hasse interval for {C.label()}")


def _lcm_order(C: Curve, rng: np.random.Generator, lo: int, hi: int, current: int) -> int:
    P = C.random_point(rng)
    return math.lcm(current, order_from_multiple(C, P, _multiple_in_interval(C, P, lo, hi)))


def _count_bsgs(C: Curve, rng: np.random.Generator) -> int:
    q = C.q
    w = 2 * math.isqrt(q) + 2
    lo, hi = max(q + 1 - w, 1), q + 1 + w
    twist = C.twist()
    L, L_twist = 1, 1
    for attempt in range(config.bsgs_aux_points):
        L = _lcm_order(C, rng, lo, hi, L)
        L_twist = _lcm_order(twist, rng, lo, hi, L_twist)
        first = ((lo + L - 1) // L) * L
        candidates = [
            N for N in range(first, hi + 1, L)
            if abs(q + 1 - N) ** 2 <= 4 * q and (2 * q + 2 - N) % L_twist == 0
        ]
        if len(candidates) == 1:
            logger.debug(f"BSGS count settled after {attempt + 1} point pairs: N={candidates[0]}")
            return candidates[0]
    raise AmbiguousOrder(f"{len(candidates)} candidate orders remain for {C.label()}")


def count_points(C: Curve, rng: Optional[np.random.Generator] = None) -> Tuple[int, int]:
    """
    Return (N, t) with N = #E(F_q) and t = q + 1 - N.

    Exhaustive below the configured bound; baby-step giant-step over the
    Hasse interval otherwise, with the quadratic twist used to separate
    candidate orders. A curve over F_{p^2} with coefficients in F_p is
    counted over F_p and lifted.
    """
    if "order" in C._cache:
        N = C._cache["order"]
        return N, C.q + 1 - N
    q = C.q
    f = C.field
    if isinstance(f, QuadExtField) and f.in_base(C.a) and f.in_base(C.b) and q > config.exhaustive_count_bound:
        t1 = count_points(Curve(f.base, C.a[0], C.b[0]))[1]
        N = q + 1 - (t1 * t1 - 2 * f.p)
    elif q <= config.exhaustive_count_bound:
        N = _count_exhaustive(C)
    elif isinstance(f, PrimeField) and q <= config.point_count_bound:
        rng = rng if rng is not None else derive_rng(0, q, f.to_int(C.a), f.to_int(C.b))
        N = _count_bsgs(C, rng)
    else:
        raise ValueError(f"q = {q} is beyond the point counting bound {config.point_count_bound}")
    t = q + 1 - N
    if t * t > 4 * q:
        raise AmbiguousOrder(f"trace {t} violates the Hasse bound for q = {q}")
    C._cache["order"] = N
    return N, t


# ------------------------------------------------------
# Frobenius invariants
# ------------------------------------------------------
@dataclass(frozen=True)
class CurveInvariants:
    j: object
    t: int
    d_pi: int
    c_pi: int
    d_K: int

    def to_dict(self) -> Dict:
        return {"j": self.j, "t": self.t, "d_pi": self.d_pi, "c_pi": self.c_pi, "d_K": self.d_K}


def is_supersingular(C: Curve) -> bool:
    return C.trace % C.field.p == 0


def curve_invariants(C: Curve) -> CurveInvariants:
    """j, trace, d_pi = t^2 - 4q and its split d_pi = c_pi^2 d_K."""
    t = C.trace
    if t % C.field.p == 0:
        raise SupersingularCurve(f"{C.label()} has trace {t}, divisible by the characteristic")
    d_pi = t * t - 4 * C.q
    c_pi, d_K = fundamental_discriminant(d_pi)
    return CurveInvariants(j=C.j_invariant(), t=t, d_pi=d_pi, c_pi=c_pi, d_K=d_K)


# ------------------------------------------------------
# Curve generation
# ------------------------------------------------------
def random_curve(field, rng: np.random.Generator) -> Curve:
    """Uniform (a, b) with nonzero discriminant."""
    while True:
        a, b = field.random(rng), field.random(rng)
        try:
            return Curve(field, a, b)
        except ValueError:
            continue


def curve_from_j(field, j, twist: bool = False) -> Curve:
    """
    A curve with the given j-invariant: y^2 = x^3 + 1 for j = 0,
    y^2 = x^3 + x for j = 1728, else y^2 = x^3 + 3k x + 2k with k = j/(1728 - j).
    """
    zero, one = field.zero, field.one
    if j == zero:
        C = Curve(field, zero, one)
    elif j == field.from_int(1728):
        C = Curve(field, one, zero)
    else:
        k = field.div(j, field.sub(field.from_int(1728), j))
        C = Curve(field, field.mul(field.from_int(3), k), field.mul(field.from_int(2), k))
    return C.twist() if twist else C


def curve_with_trace(field: PrimeField, j: int, t: int) -> Optional[Curve]:
    """
    A curve over F_p with j-invariant j and trace t, or None.

    For j = 0 and j = 1728 the sextic and quartic twists are searched as well.
    """
    candidates = [curve_from_j(field, j), curve_from_j(field, j, twist=True)]
    if j in (0, 1728 % field.p):
        g = primitive_root(field.p)
        for e in range(6):
            u = pow(g, e, field.p)
            candidates.append(Curve(field, 0, u) if j == 0 else Curve(field, u, 0))
    for C in candidates:
        if C.trace == t:
            return C
    return None
