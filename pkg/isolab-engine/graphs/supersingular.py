"""
Supersingular ell-isogeny graphs over F_{p^2}.

Vertices are supersingular j-invariants, found by closing one seed under
2-isogenies; A[i, j] is the multiplicity of j_j as a root of Phi_l(j_i, Y).
"""

import logging
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

import config
from errors import AssertionFailed, NotSymmetric, SeedNotFound, UnsupportedLevel
from graphs.spectral import SpectralReport, spectral_report
from numtheory.curve import INFINITY, Curve, curve_from_j
from numtheory.fields import Poly, PrimeField, QuadExtField, field_element_str, poly_roots
from numtheory.modular import modular_neighbors
from utils import derive_rng

logger = logging.getLogger("isolab.graphs.supersingular")

MAX_SEED_PRIME = 5000


# ------------------------------------------------------
# Vertices
# ------------------------------------------------------
def find_supersingular_seed(p: int) -> int:
    """A supersingular j in F_p: 1728 or 0 when the congruence allows, else a scan."""
    if p <= 3 or p > MAX_SEED_PRIME:
        raise SeedNotFound(f"p = {p} outside the supported range (3, {MAX_SEED_PRIME}]")
    F = PrimeField(p)
    candidates = []
    if p % 4 == 3:
        candidates.append(1728 % p)
    if p % 3 == 2:
        candidates.append(0)
    candidates.extend(j for j in range(p) if j not in (0, 1728 % p))
    for j in candidates:
        if curve_from_j(F, j).trace % p == 0:
            logger.debug(f"supersingular seed j={j} for p={p}")
            return j
    raise SeedNotFound(f"no supersingular j-invariant in F_{p}")


def e_weight(F: QuadExtField, j) -> int:
    """Number of automorphisms: 6 at j = 0, 4 at j = 1728, else 2."""
    if j == F.zero:
        return 6
    if j == F.from_int(1728):
        return 4
    return 2


def enumerate_supersingular(p: int, seed: int = 0) -> List:
    """Closure of the seed under 2-isogenies over F_{p^2}, sorted."""
    F = QuadExtField(PrimeField(p))
    start = F.embed(find_supersingular_seed(p))
    seen = {start}
    queue = deque([start])
    step = 0
    while queue:
        j = queue.popleft()
        for target in modular_neighbors(j, 2, F, derive_rng(seed, p, 2, step)):
            if target not in seen:
                seen.add(target)
                queue.append(target)
        step += 1
    vertices = sorted(seen)
    logger.info(f"p={p}: {len(vertices)} supersingular j-invariants")
    return vertices


def eichler_mass(F: QuadExtField, vertices: List) -> Fraction:
    """sum of 2 / e_j, equal to (p - 1) / 12."""
    return sum((Fraction(2, e_weight(F, j)) for j in vertices), Fraction(0))


# ------------------------------------------------------
# Independent detectors
# ------------------------------------------------------
def hasse_supersingular_js(p: int, seed: int = 0) -> List:
    """
    Supersingular j from the roots of the Hasse invariant of the Legendre
    family, sum_i C(m, i)^2 x^i with m = (p - 1) / 2.
    """
    F = QuadExtField(PrimeField(p))
    m = (p - 1) // 2
    H = Poly.from_ints(F, [math.comb(m, i) ** 2 for i in range(m + 1)])
    found = set()
    for lam in poly_roots(H, derive_rng(seed, p, 0x4A55E)):
        one = F.one
        lam1 = F.sub(lam, one)
        num = F.mul(F.from_int(256), F.pow(F.add(F.sub(F.mul(lam, lam), lam), one), 3))
        den = F.mul(F.mul(lam, lam), F.mul(lam1, lam1))
        found.add(F.div(num, den))
    return sorted(found)


def _legendre_table(p: int) -> np.ndarray:
    table = -np.ones(p, dtype=np.int64)
    table[0] = 0
    table[(np.arange(1, p, dtype=np.int64) ** 2) % p] = 1
    return table


def _cubic_grid(F: QuadExtField) -> Tuple[np.ndarray, ...]:
    """Every x in F_{p^2} as coordinate pairs, with x^3 alongside."""
    p, r = F.p, F.r
    x0, x1 = np.meshgrid(np.arange(p, dtype=np.int64), np.arange(p, dtype=np.int64), indexing="ij")
    x0, x1 = x0.ravel(), x1.ravel()
    sq0, sq1 = (x0 * x0 + r * x1 % p * x1) % p, (2 * x0 * x1) % p
    cu0, cu1 = (sq0 * x0 + r * sq1 % p * x1) % p, (sq0 * x1 + sq1 * x0) % p
    return x0, x1, cu0, cu1


def trace_over_fp2(C: Curve, legendre: Optional[np.ndarray] = None, grid: Optional[Tuple[np.ndarray, ...]] = None) -> int:
    """
    Frobenius trace over F_{p^2} by counting all x at once: the quadratic
    character of F_{p^2} is the Legendre symbol of the norm.
    """
    F = C.field
    p, r = F.p, F.r
    chi = legendre if legendre is not None else _legendre_table(p)
    x0, x1, cu0, cu1 = grid if grid is not None else _cubic_grid(F)
    (a0, a1), (b0, b1) = C.a, C.b
    z0 = (cu0 + a0 * x0 + r * a1 % p * x1 + b0) % p
    z1 = (cu1 + a0 * x1 + a1 * x0 + b1) % p
    norm = (z0 * z0 - r * z1 % p * z1) % p
    return -int(chi[norm].sum())


def trace_zero_scan(p: int) -> List:
    """Every j in F_{p^2} whose curve has trace divisible by p over F_{p^2}."""
    F = QuadExtField(PrimeField(p))
    chi, grid = _legendre_table(p), _cubic_grid(F)
    found = []
    for j in F.elements():
        if trace_over_fp2(curve_from_j(F, j), chi, grid) % p == 0:
            found.append(j)
    return sorted(found)


def group_exponent_test(C: Curve, rng: np.random.Generator, samples: int = 16) -> bool:
    """All sampled points are killed by p + 1, or all by p - 1."""
    p = C.field.p
    points = [C.random_point(rng) for _ in range(samples)]
    for n in (p + 1, p - 1):
        if all(C.scalar_mul(n, P) is INFINITY for P in points):
            return True
    return False


# ------------------------------------------------------
# Graphs
# ------------------------------------------------------
@dataclass
class SSGraph:
    p: int
    ell: int
    field: QuadExtField
    vertices: List
    adjacency: np.ndarray

    @property
    def e_weights(self) -> List[int]:
        return [e_weight(self.field, j) for j in self.vertices]

    @property
    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.adjacency, self.adjacency.T))

    def asymmetric_vertices(self) -> List[int]:
        """Vertices touching an entry with A[i, j] != A[j, i]."""
        diff = self.adjacency != self.adjacency.T
        return sorted(int(i) for i in np.nonzero(diff.any(axis=0) | diff.any(axis=1))[0])

    def to_dict(self) -> Dict:
        return {
            "kind": "supersingular",
            "p": self.p,
            "ell": self.ell,
            "vertices": [field_element_str(self.field, j) for j in self.vertices],
            "e_weights": self.e_weights,
            "adjacency": self.adjacency.tolist(),
        }


def build_ss_graph(p: int, ell: int, seed: int = 0, vertices: Optional[List] = None) -> SSGraph:
    """Directed (ell + 1)-regular multigraph on the supersingular j-invariants."""
    if ell not in config.modular_levels:
        raise UnsupportedLevel(f"ell={ell} not among the modular levels {config.modular_levels}")
    if ell == p:
        raise UnsupportedLevel(f"ell={ell} equals the characteristic")
    F = QuadExtField(PrimeField(p))
    vertices = vertices if vertices is not None else enumerate_supersingular(p, seed)
    index = {j: i for i, j in enumerate(vertices)}
    A = np.zeros((len(vertices), len(vertices)), dtype=np.int64)
    for i, j in enumerate(vertices):
        roots = modular_neighbors(j, ell, F, derive_rng(seed, p, ell, i))
        if len(roots) != ell + 1:
            raise AssertionFailed(f"Phi_{ell}({j}, Y) has {len(roots)} roots in F_{p}^2")
        for target in roots:
            if target not in index:
                raise AssertionFailed(f"{target} is {ell}-isogenous to {j} but missing from the vertex set")
            A[i, index[target]] += 1
    logger.info(f"supersingular graph p={p} ell={ell}: {len(vertices)} vertices")
    return SSGraph(p=p, ell=ell, field=F, vertices=list(vertices), adjacency=A)


@dataclass
class SsSpectralCheck:
    report: SpectralReport
    method: str
    ramanujan: bool

    def to_dict(self) -> Dict:
        return {"spectral": self.report.to_dict(), "method": self.method, "ramanujan": self.ramanujan}


def _general_report(A: np.ndarray) -> SpectralReport:
    """Spectrum of a non-symmetrizable adjacency through a general eigensolver."""
    k = int(A.sum(axis=1)[0])
    eigs = np.linalg.eigvals(A.astype(np.float64))
    order = np.argsort(-eigs.real)
    eigs = eigs[order]
    components = int(np.sum(np.abs(eigs - k) <= 1e-8 * k))
    rest = eigs[components:]
    lam = float(np.abs(rest).max(initial=0.0))
    bipartite = bool(np.any(np.abs(eigs + k) <= 1e-8 * k))
    return SpectralReport(k=k, eigenvalues=[float(x) for x in eigs.real], lambda_max_nontrivial=lam, components=components, is_bipartite=bipartite)


def ss_spectral_check(graph: SSGraph) -> SsSpectralCheck:
    """
    Spectrum of the supersingular graph: direct when the adjacency is
    symmetric, else after the sqrt(e_j) similarity transform.
    """
    A = graph.adjacency
    k = graph.ell + 1
    if graph.is_symmetric:
        report, method = spectral_report(A, k), "symmetric"
    else:
        try:
            report, method = spectral_report(A, k, weights=graph.e_weights), "weighted"
        except NotSymmetric:
            logger.warning(f"p={graph.p} ell={graph.ell}: adjacency not symmetrizable, using a general eigensolver")
            report, method = _general_report(A), "general"
    ok = report.is_connected and report.lambda_max_nontrivial <= 2 * math.sqrt(graph.ell) + 1e-6
    return SsSpectralCheck(report=report, method=method, ramanujan=ok)
