"""
Hecke character sums over class-group characters.

For a prime p the local Euler-factor roots (alpha, beta) are
  split      (chi(P), chi(P-bar))
  inert      (1, -1)
  ramified   (chi(P), 0)
  conductor  (0, 0)
so a_{p^k} is the complete homogeneous sum of alpha^i beta^(k-i) and the
prime-power coefficient of psi is alpha^k + beta^k.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import primepi

from numtheory.arith import factor_int, primes_upto
from numtheory.classgroup import (
    ClassCharacter,
    ClassGroup,
    GeneratorSlot,
    character_table,
    characters,
    enumerate_class_group,
    prime_form,
)
from utils import ordered_map

logger = logging.getLogger("isolab.numtheory.hecke")

SPLIT, INERT, RAMIFIED, CONDUCTOR = "split", "inert", "ramified", "conductor"


# ------------------------------------------------------
# Local data
# ------------------------------------------------------
def prime_kind(G: ClassGroup, p: int) -> Tuple[str, Optional[int]]:
    """Splitting type of p in the order and the class index of a prime above it."""
    if G.conductor % p == 0:
        return CONDUCTOR, None
    found = prime_form(G.D, p)
    if found is None:
        return INERT, None
    form, mult = found
    return (SPLIT if mult == 2 else RAMIFIED), G.index_of(form)


def local_roots(G: ClassGroup, table: np.ndarray, p: int) -> Tuple[np.ndarray, np.ndarray]:
    """(alpha_p, beta_p) for every character at once (rows of the character table)."""
    kind, i = prime_kind(G, p)
    n = table.shape[0]
    if kind == SPLIT:
        return table[:, i], table[:, G.inverse_index(i)]
    if kind == RAMIFIED:
        return table[:, i], np.zeros(n, dtype=np.complex128)
    if kind == INERT:
        return np.ones(n, dtype=np.complex128), -np.ones(n, dtype=np.complex128)
    return np.zeros(n, dtype=np.complex128), np.zeros(n, dtype=np.complex128)


def _complete_homogeneous(alpha, beta, k: int):
    return sum(alpha ** i * beta ** (k - i) for i in range(k + 1))


# ------------------------------------------------------
# Coefficients
# ------------------------------------------------------
@dataclass
class HeckeCoefficients:
    G: ClassGroup
    chi: ClassCharacter
    cache: Dict[int, complex] = field(default_factory=lambda: {1: 1 + 0j})

    def __getitem__(self, n: int) -> complex:
        if n not in self.cache:
            self.cache[n] = a_n_chi(self.G, self.chi, n)
        return self.cache[n]


def a_n_chi(G: ClassGroup, chi: ClassCharacter, n: int) -> complex:
    """Sum of chi over the invertible ideals of norm n, built prime by prime."""
    if n < 1:
        raise ValueError(f"a_n needs n >= 1, got {n}")
    value = 1 + 0j
    for p, k in factor_int(n).factors:
        kind, i = prime_kind(G, p)
        if kind == CONDUCTOR:
            return 0j
        if kind == SPLIT:
            alpha, beta = chi(i), chi(G.inverse_index(i))
        elif kind == RAMIFIED:
            alpha, beta = chi(i), 0j
        else:
            alpha, beta = 1 + 0j, -1 + 0j
        value *= _complete_homogeneous(alpha, beta, k)
        if value == 0:
            return 0j
    return value


def eigenvalue_sum(G: ClassGroup, chi: ClassCharacter, m: int) -> complex:
    """lambda_chi = sum_{p <= m} a_p(chi)."""
    return sum((a_n_chi(G, chi, p) for p in primes_upto(m)), 0j)


def psi_sum(G: ClassGroup, chi: ClassCharacter, m: int) -> complex:
    """psi(m, chi) = sum over prime powers p^k <= m of (alpha^k + beta^k) log p."""
    total = 0j
    for p in primes_upto(m):
        kind, i = prime_kind(G, p)
        if kind == SPLIT:
            alpha, beta = chi(i), chi(G.inverse_index(i))
        elif kind == RAMIFIED:
            alpha, beta = chi(i), 0j
        elif kind == INERT:
            alpha, beta = 1 + 0j, -1 + 0j
        else:
            continue
        pk, k = p, 1
        while pk <= m:
            total += (alpha ** k + beta ** k) * math.log(p)
            pk *= p
            k += 1
    return total


def character_eigenvalues(G: ClassGroup, slots: Sequence[GeneratorSlot]) -> np.ndarray:
    """sum over generator slots of chi(g), one entry per character."""
    table = character_table(G)
    if not slots:
        return np.zeros(table.shape[0], dtype=np.complex128)
    return table[:, [s.index for s in slots]].sum(axis=1)


# ------------------------------------------------------
# Vectorized sums over all characters
# ------------------------------------------------------
@dataclass
class PrimeSums:
    """Per-character sums over the primes up to m_max, kept as running totals."""

    primes: np.ndarray
    a_p: np.ndarray  # (n_primes, n_chars)

    def S(self, m: int) -> np.ndarray:
        upto = np.searchsorted(self.primes, m, side="right")
        return self.a_p[:upto].sum(axis=0)

    def S_log(self, m: int) -> np.ndarray:
        upto = np.searchsorted(self.primes, m, side="right")
        return (self.a_p[:upto] * np.log(self.primes[:upto])[:, None]).sum(axis=0)

    def S_abel(self, m: int) -> np.ndarray:
        """S(m) rebuilt from S'(n) = sum_{p<=n} a_p log p by summation by parts."""
        upto = np.searchsorted(self.primes, m, side="right")
        if upto == 0:
            return np.zeros(self.a_p.shape[1], dtype=np.complex128)
        p = self.primes[:upto].astype(np.float64)
        running = np.cumsum(self.a_p[:upto] * np.log(p)[:, None], axis=0)
        nxt = np.minimum(np.append(p[1:], m), m)
        weights = 1.0 / np.log(p) - 1.0 / np.log(nxt)
        return running[-1] / math.log(m) + (running * weights[:, None]).sum(axis=0)


def prime_sums(G: ClassGroup, m_max: int, m_values: Sequence[int]) -> Tuple[PrimeSums, Dict[int, np.ndarray]]:
    """a_p for every character and psi(m) for each requested m."""
    table = character_table(G)
    primes = primes_upto(m_max)
    n_chars = table.shape[0]
    a_p = np.zeros((len(primes), n_chars), dtype=np.complex128)
    psi = {m: np.zeros(n_chars, dtype=np.complex128) for m in m_values}
    for row, p in enumerate(primes):
        alpha, beta = local_roots(G, table, p)
        a_p[row] = alpha + beta
        logp = math.log(p)
        pk, k = p, 1
        while pk <= m_max:
            term = (alpha ** k + beta ** k) * logp
            for m in m_values:
                if pk <= m:
                    psi[m] += term
            pk *= p
            k += 1
    return PrimeSums(np.array(primes, dtype=np.int64), a_p), psi


# ------------------------------------------------------
# Sweep reports
# ------------------------------------------------------
@dataclass
class GrhSumReport:
    D: int
    h: int
    chi_index: Tuple[int, ...]
    m: int
    S_value: complex
    ratio: Optional[float]
    psi_value: complex
    prime_power_remainder: float
    remainder_bound: float
    abel_error: float
    lambda_triv: Optional[float] = None
    pi_over_e: Optional[float] = None

    @property
    def is_trivial(self) -> bool:
        return not any(self.chi_index)

    @property
    def remainder_ok(self) -> bool:
        return self.prime_power_remainder <= self.remainder_bound + 1e-9

    def to_dict(self) -> Dict:
        return {
            "D": self.D,
            "h": self.h,
            "chi_index": list(self.chi_index),
            "m": self.m,
            "S": self.S_value,
            "ratio": self.ratio,
            "psi": self.psi_value,
            "prime_power_remainder": self.prime_power_remainder,
            "remainder_bound": self.remainder_bound,
            "abel_error": self.abel_error,
            "lambda_triv": self.lambda_triv,
            "pi_over_e": self.pi_over_e,
        }

    def csv_row(self) -> Dict:
        return {
            "D": self.D,
            "h": self.h,
            "chi_index": ".".join(str(i) for i in self.chi_index),
            "m": self.m,
            "re_S": self.S_value.real,
            "im_S": self.S_value.imag,
            "abs_S": abs(self.S_value),
            "ratio": self.ratio,
            "psi_abs": abs(self.psi_value),
            "remainder_bound": self.remainder_bound,
        }


CSV_COLUMNS = ["D", "h", "chi_index", "m", "re_S", "im_S", "abs_S", "ratio", "psi_abs", "remainder_bound"]


def remainder_bound(m: int) -> float:
    """2 pi(sqrt m) log m."""
    return 2 * int(primepi(math.isqrt(m))) * math.log(m)


def grh_reports_for(D: int, m_values: Sequence[int], include_trivial: bool = True) -> List[GrhSumReport]:
    G = enumerate_class_group(D)
    m_values = sorted(set(m_values))
    sums, psi = prime_sums(G, max(m_values), m_values)
    index = [c.index for c in characters(G)]
    reports = []
    for m in m_values:
        S = sums.S(m)
        S_log = sums.S_log(m)
        abel = sums.S_abel(m)
        bound = remainder_bound(m)
        scale = math.sqrt(m) * math.log(m * abs(D))
        pi_m = int(primepi(m))
        for c, idx in enumerate(index):
            trivial = not any(idx)
            if trivial and not include_trivial:
                continue
            reports.append(
                GrhSumReport(
                    D=D,
                    h=G.h,
                    chi_index=tuple(idx),
                    m=m,
                    S_value=complex(S[c]),
                    ratio=None if trivial else float(abs(S[c]) / scale),
                    psi_value=complex(psi[m][c]),
                    prime_power_remainder=float(abs(psi[m][c] - S_log[c])),
                    remainder_bound=bound,
                    abel_error=float(abs(abel[c] - S[c])),
                    lambda_triv=float(S[c].real) if trivial else None,
                    pi_over_e=pi_m / G.e if trivial else None,
                )
            )
    return reports


@dataclass
class GrhSweep:
    reports: List[GrhSumReport]

    @property
    def nontrivial(self) -> List[GrhSumReport]:
        return [r for r in self.reports if not r.is_trivial]

    @property
    def max_ratio(self) -> float:
        return max((r.ratio for r in self.nontrivial), default=0.0)

    @property
    def max_abel_error(self) -> float:
        return max((r.abel_error for r in self.reports), default=0.0)

    @property
    def remainder_violations(self) -> int:
        return sum(1 for r in self.reports if not r.remainder_ok)

    def summary(self) -> Dict:
        return {
            "reports": len(self.reports),
            "nontrivial": len(self.nontrivial),
            "max_ratio": self.max_ratio,
            "max_abel_error": self.max_abel_error,
            "remainder_violations": self.remainder_violations,
        }


def discriminants_upto(dmax: int, dmin: int = 3) -> List[int]:
    return [D for D in range(-dmin, -dmax - 1, -1) if D % 4 in (0, 1)]


def grh_ratio_sweep(D_values: Sequence[int], m_values: Sequence[int], threads: int = 1) -> GrhSweep:
    """Character sums for every character of every discriminant, in input order."""
    chunks = ordered_map(lambda D: grh_reports_for(D, m_values), list(D_values), threads)
    reports = [r for chunk in chunks for r in chunk]
    sweep = GrhSweep(reports)
    logger.info(f"GRH sweep over {len(D_values)} discriminants: max ratio {sweep.max_ratio:.4f}")
    return sweep
