"""
Classical modular polynomials Phi_l(X, Y) and the j-invariant neighbors they define.

Levels found in data/modular_polynomials.txt are read from it; any other
configured level is derived exactly from the q-expansion of j. Both paths
pass the same integrity checks before use.
"""

import logging
import time
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
from sympy import divisor_sigma, isprime

import config
from errors import AssertionFailed, UnsupportedLevel
from numtheory.fields import Poly, poly_roots
from utils import derive_rng

logger = logging.getLogger("isolab.numtheory.modular")

DATA_PATH = Path(__file__).resolve().parent.parent / "data" / "modular_polynomials.txt"


# ------------------------------------------------------
# Truncated Laurent series with integer coefficients
# ------------------------------------------------------
class LaurentSeries:
    """
    sum_{e >= val} c_e q^e, exact for exponents below prec.

    coeffs[i] is the coefficient of q^(val + i); len(coeffs) == prec - val.
    """

    __slots__ = ("val", "prec", "coeffs")

    def __init__(self, val: int, coeffs: List[int], prec: int) -> None:
        n = prec - val
        coeffs = list(coeffs[:n]) + [0] * max(0, n - len(coeffs))
        self.val, self.prec, self.coeffs = val, prec, coeffs

    def __getitem__(self, e: int) -> int:
        if e >= self.prec:
            raise IndexError(f"exponent {e} beyond precision {self.prec}")
        return self.coeffs[e - self.val] if e >= self.val else 0

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        val, prec = min(self.val, other.val), min(self.prec, other.prec)
        return LaurentSeries(val, [self[e] + other[e] for e in range(val, prec)], prec)

    def __neg__(self) -> "LaurentSeries":
        return LaurentSeries(self.val, [-c for c in self.coeffs], self.prec)

    def __sub__(self, other: "LaurentSeries") -> "LaurentSeries":
        return self + (-other)

    def __mul__(self, other) -> "LaurentSeries":
        if isinstance(other, int):
            return LaurentSeries(self.val, [c * other for c in self.coeffs], self.prec)
        val = self.val + other.val
        prec = min(self.prec + other.val, other.prec + self.val)
        n = prec - val
        out = [0] * n
        a, b = self.coeffs, other.coeffs
        for i in range(min(len(a), n)):
            ai = a[i]
            if ai:
                for j in range(min(len(b), n - i)):
                    out[i + j] += ai * b[j]
        return LaurentSeries(val, out, prec)

    def exact_div(self, k: int) -> "LaurentSeries":
        out = []
        for c in self.coeffs:
            if c % k:
                raise AssertionFailed(f"inexact division by {k} in q-series arithmetic")
            out.append(c // k)
        return LaurentSeries(self.val, out, self.prec)

    def power(self, m: int) -> "LaurentSeries":
        if m < 1:
            raise ValueError("power needs m >= 1")
        result = None
        base = self
        while m:
            if m & 1:
                result = base if result is None else result * base
            m >>= 1
            if m:
                base = base * base
        return result

    def substitute(self, ell: int) -> "LaurentSeries":
        """q -> q^ell."""
        out = [0] * ((self.prec - self.val) * ell)
        for i, c in enumerate(self.coeffs):
            out[i * ell] = c
        return LaurentSeries(self.val * ell, out, self.prec * ell)

    def hecke_u(self, ell: int) -> "LaurentSeries":
        """Keep exponents divisible by ell and divide them by ell."""
        val = -((-self.val) // ell)
        prec = -((-self.prec) // ell)
        return LaurentSeries(val, [self[e * ell] for e in range(val, prec)], prec)


def _j_series(prec: int) -> LaurentSeries:
    """q-expansion of j = E4^3 / Delta, exact below q^prec."""
    n = prec + 2
    # prod (1 - q^m) by the pentagonal number theorem
    euler = [0] * n
    euler[0] = 1
    k = 1
    while k * (3 * k - 1) // 2 < n:
        sign = -1 if k % 2 else 1
        for e in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2):
            if e < n:
                euler[e] = sign
        k += 1
    e4 = [1] + [240 * int(divisor_sigma(m, 3)) for m in range(1, n)]
    delta = LaurentSeries(0, euler, n).power(24)
    inv = [0] * n
    inv[0] = 1
    for m in range(1, n):
        inv[m] = -sum(delta.coeffs[i] * inv[m - i] for i in range(1, m + 1))
    E4 = LaurentSeries(0, e4, n)
    numerator = E4 * E4 * E4 * LaurentSeries(0, inv, n)
    return LaurentSeries(-1, numerator.coeffs, n - 1)


# ------------------------------------------------------
# Modular polynomial tables
# ------------------------------------------------------
@dataclass(frozen=True)
class ModularPolynomial:
    """Phi_l as {(i, j): c} for i >= j; the table is symmetric."""

    ell: int
    coefficients: Tuple[Tuple[Tuple[int, int], int], ...]

    def table(self) -> Dict[Tuple[int, int], int]:
        full = {}
        for (i, j), c in self.coefficients:
            full[(i, j)] = c
            full[(j, i)] = c
        return full

    def evaluate(self, x: int, y: int) -> int:
        return sum(c * x ** i * y ** j for (i, j), c in self.table().items())

    def to_lines(self) -> List[str]:
        return [f"l {self.ell}"] + [f"{i} {j} {c}" for (i, j), c in self.coefficients]


def _check_modular_polynomial(phi: ModularPolynomial) -> None:
    ell = phi.ell
    table = phi.table()
    top = ell + 1
    if table.get((top, 0)) != 1:
        raise AssertionFailed(f"Phi_{ell}: X^{top} must have coefficient 1")
    if any(i > top for i, _ in table) or (top, top) in table:
        raise AssertionFailed(f"Phi_{ell}: degree exceeds {top} in one variable")
    if table.get((ell, ell)) != -1:
        raise AssertionFailed(f"Phi_{ell}: X^{ell} Y^{ell} must have coefficient -1")
    seen = set()
    for (i, j), _ in phi.coefficients:
        if i < j or (i, j) in seen:
            raise AssertionFailed(f"Phi_{ell}: entry ({i}, {j}) is repeated or has i < j")
        seen.add((i, j))


def generate_modular_polynomial(ell: int, margin: int = 6) -> ModularPolynomial:
    """
    Derive Phi_l from power sums of j over the l + 1 sublattices.

    s_m = j(q^l)^m + l * U_l(j^m) are the power sums of the roots in X; Newton
    identities give the elementary symmetric functions, each a polynomial in j.
    """
    if not isprime(ell):
        raise UnsupportedLevel(f"{ell} is not prime")
    started = time.perf_counter()
    top = ell + 1
    target = ell * ell + 2 * ell + margin
    j = _j_series(ell * target + top + 2)
    powers = [None, j]
    for _ in range(2, top + 1):
        powers.append(powers[-1] * j)

    sums = [None] + [powers[m].substitute(ell) + powers[m].hecke_u(ell) * ell for m in range(1, top + 1)]
    # k e_k = sum_{i=1..k} (-1)^(i-1) e_(k-i) s_i, with e_0 = 1
    elementary = [None]
    for k in range(1, top + 1):
        acc = None
        for i in range(1, k + 1):
            term = sums[i] if i == k else elementary[k - i] * sums[i]
            if i % 2 == 0:
                term = -term
            acc = term if acc is None else acc + term
        elementary.append(acc.exact_div(k))

    coefficients: Dict[Tuple[int, int], int] = {(top, 0): 1}
    for k in range(1, top + 1):
        rest = elementary[k]
        if any(rest[e] for e in range(rest.val, -top)):
            raise AssertionFailed(f"Phi_{ell}: coefficient {k} has a pole beyond order {top}")
        poly: Dict[int, int] = {}
        for v in range(top, 0, -1):
            c = rest[-v]
            if c:
                poly[v] = c
                rest = rest - powers[v] * c
        poly[0] = rest[0]
        if rest.prec <= margin:
            raise AssertionFailed(f"Phi_{ell}: q-series precision exhausted ({rest.prec})")
        if any(rest[e] for e in range(1, rest.prec)):
            raise AssertionFailed(f"Phi_{ell}: coefficient {k} is not a polynomial in j")
        sign = -1 if k % 2 else 1
        for deg, c in poly.items():
            if c:
                coefficients[(top - k, deg)] = sign * c

    for (i, jj), c in coefficients.items():
        if coefficients.get((jj, i)) != c:
            raise AssertionFailed(f"Phi_{ell}: asymmetric entries at ({i}, {jj})")
    entries = tuple(sorted(((i, jj), c) for (i, jj), c in coefficients.items() if i >= jj))
    phi = ModularPolynomial(ell, tuple(sorted(entries, key=lambda e: (-e[0][0], -e[0][1]))))
    _check_modular_polynomial(phi)
    logger.info(f"derived Phi_{ell} ({len(entries)} entries) in {time.perf_counter() - started:.2f}s")
    return phi


def parse_modular_polynomials(lines: Iterable[str]) -> Dict[int, ModularPolynomial]:
    blocks: Dict[int, List[Tuple[Tuple[int, int], int]]] = {}
    current: Optional[int] = None
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "l":
            current = int(parts[1])
            blocks[current] = []
            continue
        if current is None or len(parts) != 3:
            raise ValueError(f"malformed modular polynomial line: {raw!r}")
        blocks[current].append(((int(parts[0]), int(parts[1])), int(parts[2])))
    out = {}
    for ell, entries in blocks.items():
        phi = ModularPolynomial(ell, tuple(entries))
        _check_modular_polynomial(phi)
        out[ell] = phi
    return out


def dump_modular_polynomials(polys: Iterable[ModularPolynomial], path: Path) -> None:
    lines = ["# Classical modular polynomials Phi_l(X, Y); entries <i> <j> <c> with i >= j."]
    for phi in polys:
        lines.extend(phi.to_lines())
    path.write_text("\n".join(lines) + "\n")


@lru_cache(maxsize=None)
def _bundled() -> Dict[int, ModularPolynomial]:
    if not DATA_PATH.exists():
        return {}
    return parse_modular_polynomials(DATA_PATH.read_text().splitlines())


@lru_cache(maxsize=None)
def _source_polynomial(ell: int) -> ModularPolynomial:
    if ell not in config.modular_levels:
        raise UnsupportedLevel(f"no modular polynomial for ell={ell} (levels {config.modular_levels})")
    bundled = _bundled()
    if ell in bundled:
        return bundled[ell]
    return generate_modular_polynomial(ell)


@lru_cache(maxsize=None)
def modular_polynomial(ell: int) -> ModularPolynomial:
    """
    Phi_l from the bundled file or the q-expansion, trusted only after it
    vanishes on every Velu-generated pair of the gate primes.
    """
    phi = _source_polynomial(ell)
    primes = config.modular_gate_primes
    required = config.modular_gate_pairs
    per_prime = -(-required // len(primes))
    checked = velu_gate(ell, primes, per_prime, phi=phi)
    if checked < required:
        raise AssertionFailed(f"Phi_{ell}: only {checked} Velu pairs found over {primes}, need {required}")
    logger.info(f"Phi_{ell} agrees with {checked} Velu pairs over {primes}")
    return phi


def _rows_mod(phi: ModularPolynomial, p: int) -> Tuple[Tuple[int, ...], ...]:
    """rows[k][i] = coefficient of X^i Y^k mod p."""
    top = phi.ell + 1
    rows = [[0] * (top + 1) for _ in range(top + 1)]
    for (i, k), c in phi.table().items():
        rows[k][i] = c % p
    return tuple(tuple(r) for r in rows)


@lru_cache(maxsize=None)
def _reduced_table(ell: int, p: int) -> Tuple[Tuple[int, ...], ...]:
    return _rows_mod(modular_polynomial(ell), p)


def _evaluate_rows(field, x, rows: Tuple[Tuple[int, ...], ...]) -> Poly:
    xpowers = [field.one]
    for _ in range(len(rows) - 1):
        xpowers.append(field.mul(xpowers[-1], x))
    coeffs = []
    for row in rows:
        acc = field.zero
        for i, c in enumerate(row):
            if c:
                acc = field.add(acc, field.mul(field.from_int(c), xpowers[i]))
        coeffs.append(acc)
    return Poly(field, coeffs)


def phi_at(field, x, ell: int) -> Poly:
    """Phi_l(x, Y) as a polynomial in Y over the field."""
    return _evaluate_rows(field, x, _reduced_table(ell, field.p))


def modular_neighbors(j, ell: int, field, rng: Optional[np.random.Generator] = None) -> List:
    """Roots of Phi_l(j, Y) in the field, repeated by multiplicity."""
    rng = rng if rng is not None else derive_rng(config.default_seed, field.order, ell)
    return poly_roots(phi_at(field, j, ell), rng)


def velu_gate(
    ell: int,
    primes: Iterable[int],
    pairs_per_prime: int,
    seed: int = 0,
    phi: Optional[ModularPolynomial] = None,
) -> int:
    """
    Check Phi_l(j, j') = 0 for Velu-generated l-isogenous pairs.

    phi defaults to the source polynomial of level l. Returns the number of
    pairs checked; raises AssertionFailed on a mismatch.
    """
    from numtheory.curve import random_curve
    from numtheory.fields import PrimeField
    from numtheory.isogeny import isogenies_from

    phi = phi if phi is not None else _source_polynomial(ell)
    checked = 0
    for p in primes:
        F = PrimeField(p)
        rows = _rows_mod(phi, p)
        rng = derive_rng(seed, p, ell)
        found = 0
        attempts = 0
        while found < pairs_per_prime and attempts < 50 * pairs_per_prime:
            attempts += 1
            C = random_curve(F, rng)
            for isogeny in isogenies_from(C, ell, rng):
                if _evaluate_rows(F, C.j_invariant(), rows)(isogeny.codomain.j_invariant()) != 0:
                    raise AssertionFailed(f"Phi_{ell} rejects a Velu pair over F_{p}")
                found += 1
                checked += 1
        logger.debug(f"Phi_{ell}: {found} Velu pairs over F_{p} in {attempts} curves")
    return checked
