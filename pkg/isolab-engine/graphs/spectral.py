"""
Dense symmetric eigensolver and spectral-gap reports for regular multigraphs.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

import config
from errors import AssertionFailed, DimensionTooLarge, NotRegular, NotSymmetric

logger = logging.getLogger("isolab.graphs.spectral")

SYMMETRY_TOL = 1e-12
CONVERGENCE_TOL = 1e-12
STAGNATION_TOL = 1e-9
MAX_SWEEPS = 100


# ------------------------------------------------------
# Jacobi eigensolver
# ------------------------------------------------------
def _round_robin(n: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """n - 1 rounds of disjoint index pairs covering every pair exactly once."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(p, q) for p, q in pairs if p >= 0 and q >= 0]
        rounds.append((np.array([p for p, _ in pairs]), np.array([q for _, q in pairs])))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _check_symmetric(A: np.ndarray) -> None:
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotSymmetric(f"matrix of shape {A.shape} is not square")
    scale = max(1.0, float(np.abs(A).max(initial=0.0)))
    if np.abs(A - A.T).max(initial=0.0) > SYMMETRY_TOL * scale:
        raise NotSymmetric("matrix is not symmetric within tolerance")


def eigenvalues_symmetric(A) -> List[float]:
    """
    Full spectrum of a real symmetric matrix by cyclic Jacobi rotations,
    sorted descending.

    Each sweep applies the rotations of one round-robin round at once; the
    pairs in a round are disjoint so their rotations commute.

    Iteration stops once the off-diagonal Frobenius norm is at most
    CONVERGENCE_TOL * ||A||_F. It also stops when a sweep fails to shrink
    that norm while it is already below STAGNATION_TOL * ||A||_F, so the
    guaranteed relative residual is STAGNATION_TOL, not CONVERGENCE_TOL.
    Reaching neither within MAX_SWEEPS raises AssertionFailed.
    """
    A = np.array(A, dtype=np.float64)
    _check_symmetric(A)
    n = A.shape[0]
    if n > config.eigen_max_dim:
        raise DimensionTooLarge(f"dimension {n} exceeds {config.eigen_max_dim}")
    if n == 0:
        return []
    norm = float(np.linalg.norm(A))
    rounds = _round_robin(n)
    previous = math.inf
    for sweep in range(MAX_SWEEPS):
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off <= CONVERGENCE_TOL * norm:
            break
        # rounding floor: no progress and already within STAGNATION_TOL
        if off >= previous and off <= STAGNATION_TOL * norm:
            logger.debug(f"Jacobi stopped at the rounding floor, off={off:.3e} norm={norm:.3e}")
            break
        previous = off
        for P, Q in rounds:
            if P.size == 0:
                continue
            apq = A[P, Q]
            active = np.abs(apq) > 0.0
            safe = np.where(active, apq, 1.0)
            tau = (A[Q, Q] - A[P, P]) / (2.0 * safe)
            sign = np.where(tau >= 0, 1.0, -1.0)
            t = np.where(active, sign / (np.abs(tau) + np.sqrt(1.0 + tau * tau)), 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c

            colP, colQ = A[:, P].copy(), A[:, Q].copy()
            A[:, P] = colP * c - colQ * s
            A[:, Q] = colP * s + colQ * c
            rowP, rowQ = A[P, :].copy(), A[Q, :].copy()
            A[P, :] = c[:, None] * rowP - s[:, None] * rowQ
            A[Q, :] = s[:, None] * rowP + c[:, None] * rowQ
            A[P, Q] = 0.0
            A[Q, P] = 0.0
    else:
        raise AssertionFailed(f"Jacobi iteration did not converge in {MAX_SWEEPS} sweeps (n={n})")
    logger.debug(f"Jacobi converged after {sweep} sweeps for n={n}")
    return sorted((float(x) for x in np.diag(A)), reverse=True)


def weighted_symmetrize(A, weights: Sequence[float]) -> np.ndarray:
    """
    D^(-1/2) A D^(1/2) with D = diag(weights).

    For a directed adjacency with A[i, j] w_j = A[j, i] w_i the result is
    symmetric and has the same spectrum as A.
    """
    A = np.asarray(A, dtype=np.float64)
    root = np.sqrt(np.asarray(weights, dtype=np.float64))
    return A * root[None, :] / root[:, None]


# ------------------------------------------------------
# Reports
# ------------------------------------------------------
@dataclass
class SpectralReport:
    k: int
    eigenvalues: List[float]
    lambda_max_nontrivial: float
    components: int
    is_bipartite: bool

    @property
    def ramanujan_bound(self) -> float:
        return 2 * math.sqrt(self.k - 1) if self.k >= 1 else 0.0

    @property
    def is_connected(self) -> bool:
        return self.components == 1

    @property
    def additive_gap(self) -> float:
        return self.k - self.lambda_max_nontrivial

    @property
    def is_ramanujan(self) -> bool:
        return self.lambda_max_nontrivial <= self.ramanujan_bound + 1e-6

    def to_dict(self) -> Dict:
        return {
            "k": self.k,
            "eigenvalues": self.eigenvalues,
            "lambda_nontrivial_max": self.lambda_max_nontrivial,
            "ramanujan_bound": self.ramanujan_bound,
            "additive_gap": self.additive_gap,
            "connected": self.is_connected,
            "bipartite": self.is_bipartite,
        }


def regular_degree(adjacency) -> int:
    """Common row sum of the adjacency matrix; NotRegular otherwise."""
    A = np.asarray(adjacency)
    if A.shape[0] == 0:
        raise NotRegular("empty graph")
    sums = A.sum(axis=1)
    if not np.allclose(sums, sums[0]):
        raise NotRegular(f"row sums range over [{sums.min()}, {sums.max()}]")
    return int(round(float(sums[0])))


def spectral_report(
    adjacency,
    k: Optional[int] = None,
    weights: Optional[Sequence[float]] = None,
    tol: float = 1e-8,
) -> SpectralReport:
    """
    Spectrum and expansion data for a k-regular multigraph.

    Row sums include self-loops, so the trivial eigenvalue is the degree.
    A directed adjacency is symmetrized with the given vertex weights first.
    """
    degree = regular_degree(adjacency)
    if k is not None and degree != k:
        raise NotRegular(f"row sums equal {degree}, expected {k}")
    matrix = weighted_symmetrize(adjacency, weights) if weights is not None else np.asarray(adjacency, dtype=np.float64)
    eigs = eigenvalues_symmetric(matrix)

    scale = tol * max(1, degree)
    components = sum(1 for x in eigs if abs(x - degree) <= scale)
    bipartite = degree > 0 and any(abs(x + degree) <= scale for x in eigs)

    remaining = list(eigs)
    for _ in range(components):
        remaining.remove(max(remaining, key=lambda x: -abs(x - degree)))
    lam = max((abs(x) for x in remaining), default=0.0)
    report = SpectralReport(k=degree, eigenvalues=eigs, lambda_max_nontrivial=lam, components=components, is_bipartite=bipartite)
    logger.info(
        f"spectrum n={len(eigs)} k={degree}: lambda={lam:.6f}, bound={report.ramanujan_bound:.6f}, components={components}"
    )
    return report


def nearly_ramanujan_verdict(report: SpectralReport, beta: float, C: float) -> bool:
    """lambda_max_nontrivial <= C k^beta."""
    return report.lambda_max_nontrivial <= C * report.k ** beta + 1e-12


def beta_sweep(report: SpectralReport, betas: Sequence[float]) -> Dict[float, float]:
    """Least C with lambda <= C k^beta, for each beta."""
    if report.k <= 0:
        return {beta: 0.0 for beta in betas}
    return {beta: report.lambda_max_nontrivial / report.k ** beta for beta in betas}


def isomorphism_invariants(adjacency) -> Tuple[int, List[int], List[float]]:
    """Vertex count, sorted degree sequence and spectrum of a multigraph."""
    A = np.asarray(adjacency)
    degrees = sorted(int(round(float(d))) for d in A.sum(axis=1))
    return A.shape[0], degrees, eigenvalues_symmetric(A)


def same_invariants(A, B, tol: float = 1e-8) -> bool:
    n1, d1, e1 = isomorphism_invariants(A)
    n2, d2, e2 = isomorphism_invariants(B)
    return n1 == n2 and d1 == d2 and all(abs(x - y) <= tol * max(1.0, abs(x)) for x, y in zip(e1, e2))
