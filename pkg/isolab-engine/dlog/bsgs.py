"""
Discrete logarithms on small elliptic-curve subgroups.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict

import numpy as np

from errors import NotInSubgroup, PointNotOnCurve
from numtheory.curve import INFINITY, Curve, point_order
from numtheory.fields import field_element_str
from utils import rand_below

logger = logging.getLogger("isolab.dlog.bsgs")

MAX_ORDER = 10 ** 12


@dataclass(frozen=True)
class DlogInstance:
    """Find x with x P = Q, where P has exact order n."""

    curve: Curve
    P: object
    Q: object
    n: int

    def __post_init__(self) -> None:
        for name, point in (("P", self.P), ("Q", self.Q)):
            if not self.curve.is_on_curve(point):
                raise PointNotOnCurve(f"{name} = {point} not on {self.curve.label()}")
        if self.n < 1 or self.curve.scalar_mul(self.n, self.P) is not INFINITY:
            raise ValueError(f"{self.n} is not a multiple of the order of P")

    def solves(self, x: int) -> bool:
        return self.curve.scalar_mul(x, self.P) == self.Q

    def to_dict(self) -> Dict:
        F = self.curve.field

        def render(point):
            if point is INFINITY:
                return "O"
            return [field_element_str(F, point[0]), field_element_str(F, point[1])]

        return {"curve": self.curve.to_dict(), "P": render(self.P), "Q": render(self.Q), "n": self.n}


def make_instance(C: Curve, P, x: int) -> DlogInstance:
    """Instance with base point P and target x P."""
    n = point_order(C, P)
    return DlogInstance(C, P, C.scalar_mul(x % n, P), n)


def random_instance(C: Curve, rng: np.random.Generator, min_order: int = 2) -> DlogInstance:
    """A random base point of order at least min_order and a uniform exponent."""
    for _ in range(1000):
        P = C.random_point(rng)
        if P is INFINITY:
            continue
        n = point_order(C, P)
        if n >= min_order:
            return DlogInstance(C, P, C.scalar_mul(rand_below(rng, n), P), n)
    raise ValueError(f"no point of order >= {min_order} found on {C.label()}")


def dlog_bsgs(instance: DlogInstance) -> int:
    """Baby-step giant-step: x in [0, n) with x P = Q."""
    C, P, Q, n = instance.curve, instance.P, instance.Q, instance.n
    if n > MAX_ORDER:
        raise ValueError(f"order {n} exceeds the baby-step giant-step bound {MAX_ORDER}")
    if Q is INFINITY:
        return 0
    m = math.isqrt(n) + 1

    # baby steps: j P for j < m
    baby: Dict[object, int] = {}
    R = INFINITY
    for j in range(m):
        baby.setdefault(R, j)
        R = C.add(R, P)

    # giant steps: Q - i m P
    step = C.neg(C.scalar_mul(m, P))
    gamma = Q
    for i in range(m + 1):
        j = baby.get(gamma)
        if j is not None:
            x = (i * m + j) % n
            if instance.solves(x):
                logger.debug(f"dlog found after {i} giant steps (n={n})")
                return x
        gamma = C.add(gamma, step)
    raise NotInSubgroup(f"Q is not a multiple of P on {C.label()}")
