"""
Prime-degree isogenies from kernel polynomials.

Division polynomials give the l-torsion x-coordinates, their rational
factors are grouped into candidate kernels, and the Velu-Kohel formulas
turn a kernel polynomial into the codomain curve and explicit maps.
"""

import itertools
import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
from sympy import isprime

import config
from errors import InvalidKernel, PointNotOnCurve, SubsetSearchTooLarge, UnsupportedLevel
from numtheory.curve import INFINITY, Curve
from numtheory.fields import Poly, factor_squarefree, poly_roots
from utils import derive_rng, short_hash

logger = logging.getLogger("isolab.numtheory.isogeny")


# ------------------------------------------------------
# Division Polynomials
# ------------------------------------------------------
class DivisionPolynomials:
    """
    Memoized reduced division polynomials f_n of a curve.

    f_n = psi_n for odd n and f_n = psi_n / y for even n, so every f_n is a
    polynomial in x alone; y^2 is replaced by x^3 + a x + b.
    """

    def __init__(self, curve: Curve) -> None:
        F = curve.field
        a, b = curve.a, curve.b
        self.field = F
        self._cache: Dict[int, Poly] = {}
        self.g = Poly(F, [b, a, F.zero, F.one])
        self._half = F.inv(F.from_int(2))

        def c(n):
            return F.from_int(n)

        a2, a3 = F.mul(a, a), F.pow(a, 3)
        self._cache[0] = Poly(F, [])
        self._cache[1] = Poly.const(F, F.one)
        self._cache[2] = Poly.const(F, c(2))
        self._cache[3] = Poly(F, [F.neg(a2), F.mul(c(12), b), F.mul(c(6), a), F.zero, c(3)])
        f4 = [
            F.neg(F.add(F.mul(c(8), F.mul(b, b)), a3)),
            F.neg(F.mul(c(4), F.mul(a, b))),
            F.neg(F.mul(c(5), a2)),
            F.mul(c(20), b),
            F.mul(c(5), a),
            F.zero,
            F.one,
        ]
        self._cache[4] = Poly(F, f4).scale(c(4))

    def __getitem__(self, n: int) -> Poly:
        if n in self._cache:
            return self._cache[n]
        m = n // 2
        g2 = self.g * self.g
        if n % 2 == 1:
            if m % 2 == 0:
                value = g2 * self[m + 2] * self._cube(m) - self[m - 1] * self._cube(m + 1)
            else:
                value = self[m + 2] * self._cube(m) - g2 * self[m - 1] * self._cube(m + 1)
        else:
            inner = self[m + 2] * self[m - 1] * self[m - 1] - self[m - 2] * self[m + 1] * self[m + 1]
            value = (self[m] * inner).scale(self._half)
        self._cache[n] = value
        return value

    def _cube(self, n: int) -> Poly:
        f = self[n]
        return f * f * f


def division_polynomial(C: Curve, ell: int) -> Poly:
    """psi_ell for an odd prime ell, of degree (ell^2 - 1)/2."""
    if ell % 2 == 0 or not isprime(ell):
        raise ValueError(f"division_polynomial needs an odd prime, got {ell}")
    if ell == C.field.p:
        raise ValueError("ell must differ from the characteristic")
    return DivisionPolynomials(C)[ell]


# ------------------------------------------------------
# Isogenies
# ------------------------------------------------------
@dataclass(frozen=True)
class Isogeny:
    domain: Curve
    codomain: Curve
    degree: int
    kernel_poly: Poly
    map_x: Tuple[Poly, Poly]
    map_y: Tuple[Poly, Poly]

    @property
    def kernel_hash(self) -> str:
        return short_hash(self.degree, self.kernel_poly.coeffs)

    def __call__(self, P):
        return push_point(self, P)

    def to_dict(self) -> Dict:
        return {
            "degree": self.degree,
            "kernel_hash": self.kernel_hash,
            "domain": self.domain.to_dict(),
            "codomain": self.codomain.to_dict(),
        }


def _velu_odd(C: Curve, h: Poly, ell: int):
    F = C.field
    d = (ell - 1) // 2
    coeffs = h.coeffs
    # h = x^d - s1 x^(d-1) + s2 x^(d-2) - s3 x^(d-3) ...
    s1 = F.neg(coeffs[d - 1]) if d >= 1 else F.zero
    s2 = coeffs[d - 2] if d >= 2 else F.zero
    s3 = F.neg(coeffs[d - 3]) if d >= 3 else F.zero
    c = F.from_int
    a, b = C.a, C.b
    sum_sq = F.sub(F.mul(s1, s1), F.mul(c(2), s2))
    sum_cube = F.add(F.sub(F.pow(s1, 3), F.mul(c(3), F.mul(s1, s2))), F.mul(c(3), s3))
    v = F.add(F.mul(c(6), sum_sq), F.mul(c(2 * d), a))
    w = F.add(F.add(F.mul(c(10), sum_cube), F.mul(c(6), F.mul(a, s1))), F.mul(c(4 * d), b))
    A = F.sub(a, F.mul(c(5), v))
    B = F.sub(b, F.mul(c(7), w))

    g = Poly(F, [b, a, F.zero, F.one])
    dg = g.derivative()
    dh = h.derivative()
    ddh = dh.derivative()
    h2 = h * h
    linear = Poly(F, [F.neg(F.mul(c(2), s1)), c(ell)])
    num = linear * h2 - (dg * dh * h).scale(c(2)) + (g * (dh * dh - h * ddh)).scale(c(4))
    return A, B, num, h2


def _velu_two(C: Curve, h: Poly):
    F = C.field
    x0 = F.neg(h.coeffs[0])
    v = F.add(F.mul(F.from_int(3), F.mul(x0, x0)), C.a)
    w = F.mul(x0, v)
    A = F.sub(C.a, F.mul(F.from_int(5), v))
    B = F.sub(C.b, F.mul(F.from_int(7), w))
    num = Poly(F, [v, F.neg(x0), F.one])
    return A, B, num, h


def push_point(phi: Isogeny, P):
    """Image of P; Infinity exactly when P lies in the kernel."""
    if P is INFINITY:
        return INFINITY
    if not phi.domain.is_on_curve(P):
        raise PointNotOnCurve(f"{P} not on {phi.domain.label()}")
    F = phi.domain.field
    x, y = P
    den = phi.map_x[1](x)
    if den == F.zero:
        return INFINITY
    X = F.div(phi.map_x[0](x), den)
    Y = F.mul(y, F.div(phi.map_y[0](x), phi.map_y[1](x)))
    return (X, Y)


def _validate(phi: Isogeny, rng: np.random.Generator, pairs: int) -> bool:
    C, E = phi.domain, phi.codomain
    for _ in range(pairs):
        P, Q = C.random_point(rng), C.random_point(rng)
        fP, fQ = push_point(phi, P), push_point(phi, Q)
        if not (E.is_on_curve(fP) and E.is_on_curve(fQ)):
            return False
        if push_point(phi, C.add(P, Q)) != E.add(fP, fQ):
            return False
    return True


def velu(C: Curve, h: Poly, ell: int, rng: Optional[np.random.Generator] = None, pairs: Optional[int] = None) -> Isogeny:
    """
    Isogeny with kernel cut out by the monic polynomial h.

    Checked by a probabilistic homomorphism test plus codomain membership;
    raises InvalidKernel when h does not describe a subgroup.
    """
    F = C.field
    h = h.monic()
    expected = 1 if ell == 2 else (ell - 1) // 2
    if h.degree != expected:
        raise InvalidKernel(f"kernel polynomial of degree {h.degree}, expected {expected} for ell={ell}")
    A, B, num, den = _velu_two(C, h) if ell == 2 else _velu_odd(C, h, ell)
    try:
        E = Curve(F, A, B)
    except ValueError:
        raise InvalidKernel(f"singular codomain for kernel {h.coeffs}")
    y_num = num.derivative() * den - num * den.derivative()
    phi = Isogeny(C, E, ell, h, (num, den), (y_num, den * den))
    rng = rng if rng is not None else derive_rng(config.default_seed, C.q, ell, hash(h.coeffs) & 0xFFFFFFFF)
    if not _validate(phi, rng, config.velu_test_pairs if pairs is None else pairs):
        raise InvalidKernel(f"homomorphism test failed for kernel {h.coeffs} on {C.label()}")
    return phi


# ------------------------------------------------------
# Kernel Enumeration
# ------------------------------------------------------
def _check_degree(C: Curve, ell: int) -> None:
    if not isprime(ell) or ell == C.field.p:
        raise ValueError(f"ell={ell} must be a prime different from the characteristic")
    if ell > config.max_isogeny_degree:
        raise UnsupportedLevel(f"ell={ell} exceeds the explicit isogeny bound {config.max_isogeny_degree}")


def kernel_polynomials(C: Curve, ell: int, rng: Optional[np.random.Generator] = None) -> List[Poly]:
    """All monic kernel polynomials of F_q-rational subgroups of order ell."""
    _check_degree(C, ell)
    rng = rng if rng is not None else derive_rng(config.default_seed, C.q, ell)
    F = C.field
    if ell == 2:
        g = Poly(F, [C.b, C.a, F.zero, F.one])
        return [Poly(F, [F.neg(r), F.one]) for r in sorted(set(poly_roots(g, rng)))]

    d = (ell - 1) // 2
    psi = division_polynomial(C, ell).monic()
    by_degree: Dict[int, List[Poly]] = defaultdict(list)
    for factor in factor_squarefree(psi, rng):
        by_degree[factor.degree].append(factor)

    # every Galois orbit inside one kernel has the same size
    plans = []
    budget = 0
    for e, factors in sorted(by_degree.items()):
        if d % e or len(factors) < d // e:
            continue
        plans.append((factors, d // e))
        budget += math.comb(len(factors), d // e)
    if budget > config.kernel_subset_cap:
        raise SubsetSearchTooLarge(f"{budget} candidate kernels for ell={ell} on {C.label()}")

    found = []
    for factors, size in plans:
        for subset in itertools.combinations(factors, size):
            h = Poly.const(F, F.one)
            for factor in subset:
                h = h * factor
            try:
                velu(C, h, ell, rng)
            except InvalidKernel:
                continue
            found.append(h)
    logger.debug(f"ell={ell}: {len(found)} kernels from {budget} candidates on {C.label()}")
    return sorted(found, key=lambda h: h.coeffs)


def isogenies_from(C: Curve, ell: int, rng: Optional[np.random.Generator] = None) -> List[Isogeny]:
    """One isogeny per rational kernel of order ell."""
    rng = rng if rng is not None else derive_rng(config.default_seed, C.q, ell)
    return [velu(C, h, ell, rng) for h in kernel_polynomials(C, ell, rng)]


# ------------------------------------------------------
# Isomorphisms & Duals
# ------------------------------------------------------
def isomorphism_scale(E1: Curve, E2: Curve):
    """
    u^2 with (x, y) -> (u^2 x, u^3 y) mapping E1 onto E2, for j not in {0, 1728}.

    Returns None when the curves are not isomorphic over the field.
    """
    F = E1.field
    if E1.j_invariant() != E2.j_invariant():
        return None
    if F.zero in (E1.a, E1.b, E2.a, E2.b):
        return None
    u2 = F.div(F.mul(E2.b, E1.a), F.mul(E2.a, E1.b))
    if F.mul(F.mul(u2, u2), E1.a) != E2.a:
        return None
    return u2


def dual_isogeny(phi: Isogeny, rng: Optional[np.random.Generator] = None, samples: int = 20) -> Optional[Isogeny]:
    """
    The isogeny back from the codomain whose composition with phi is
    multiplication by the degree, up to an isomorphism of the target.
    """
    rng = rng if rng is not None else derive_rng(config.default_seed, phi.domain.q, phi.degree, 1)
    C, ell = phi.domain, phi.degree
    F = C.field
    points = [C.random_point(rng) for _ in range(samples)]
    for back in isogenies_from(phi.codomain, ell, rng):
        u2 = isomorphism_scale(C, back.codomain)
        if u2 is None:
            continue
        ok = True
        for P in points:
            image = push_point(back, push_point(phi, P))
            target = C.scalar_mul(ell, P)
            if (image is INFINITY) != (target is INFINITY):
                ok = False
                break
            if target is not INFINITY and image[0] != F.mul(u2, target[0]):
                ok = False
                break
        if ok:
            return back
    return None


def compose_push(chain: List[Isogeny], P):
    """Push P along a chain of isogenies, first to last."""
    for phi in chain:
        P = push_point(phi, P)
    return P
