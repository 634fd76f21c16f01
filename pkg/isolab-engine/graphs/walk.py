"""
Random walks on regular multigraphs and the rapid-mixing check.

A step leaves a vertex through one of its k edge slots chosen uniformly,
so multi-edges and loops are weighted by multiplicity.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Tuple

import numpy as np

import config
from errors import SpectralGapZero, VertexOutOfRange
from graphs.spectral import SpectralReport, regular_degree
from utils import derive_rng, ordered_map

logger = logging.getLogger("isolab.graphs.walk")

SUBSET_STREAM = 1
WALK_STREAM = 0


@dataclass
class WalkReport:
    h: int
    S_size: int
    k: int
    c: Optional[float]
    r: int
    trials: int
    hits: int

    @property
    def empirical_prob(self) -> float:
        return self.hits / self.trials if self.trials else 0.0

    @property
    def bound_prob(self) -> float:
        return self.S_size / (2 * self.h)

    @property
    def allowance(self) -> float:
        """Three binomial standard deviations at the bound probability."""
        if not self.trials:
            return 0.0
        b = self.bound_prob
        return 3 * math.sqrt(b * (1 - b) / self.trials)

    @property
    def passed(self) -> bool:
        return self.empirical_prob >= self.bound_prob - self.allowance

    def to_dict(self) -> Dict:
        return {
            "h": self.h,
            "S_size": self.S_size,
            "k": self.k,
            "c": self.c,
            "r": self.r,
            "trials": self.trials,
            "hits": self.hits,
            "empirical_prob": self.empirical_prob,
            "bound_prob": self.bound_prob,
            "passed": self.passed,
        }


def walk_length_bound(h: int, S_size: int, k: float, c: float) -> int:
    """ceil(log(2h / sqrt|S|) / log(k / c)), at least 1."""
    if not 1 <= S_size <= h:
        raise ValueError(f"subset size {S_size} outside [1, {h}]")
    if c >= k:
        raise SpectralGapZero(f"nontrivial eigenvalue {c} reaches the degree {k}")
    if c <= 0:
        return 1
    r = math.ceil(math.log(2 * h / math.sqrt(S_size)) / math.log(k / c))
    return max(1, r)


def slot_table(adjacency) -> np.ndarray:
    """slots[v, i] = endpoint of the i-th edge slot at v."""
    A = np.asarray(adjacency)
    k = regular_degree(A)
    h = A.shape[0]
    table = np.empty((h, k), dtype=np.int64)
    targets = np.arange(h)
    for v in range(h):
        table[v] = np.repeat(targets, A[v].astype(np.int64))
    return table


def _walk_chunk(slots: np.ndarray, x: int, r: int, size: int, rng: np.random.Generator) -> np.ndarray:
    positions = np.full(size, x, dtype=np.int64)
    k = slots.shape[1]
    for _ in range(r):
        positions = slots[positions, rng.integers(0, k, size=size)]
    return positions


def walk_endpoints(adjacency, x: int, r: int, trials: int, seed: int, threads: int = 1) -> np.ndarray:
    """Endpoints of `trials` walks of length r from x, chunk by chunk."""
    slots = slot_table(adjacency)
    if not 0 <= x < slots.shape[0]:
        raise VertexOutOfRange(f"start vertex {x} not in [0, {slots.shape[0]})")
    chunk = max(1, config.walk_chunk)
    sizes = [min(chunk, trials - start) for start in range(0, trials, chunk)]

    def run(index: int) -> np.ndarray:
        return _walk_chunk(slots, x, r, sizes[index], derive_rng(seed, WALK_STREAM, index))

    parts = ordered_map(run, list(range(len(sizes))), threads)
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def simulate_hits(
    adjacency,
    x: int,
    S: Iterable[int],
    r: int,
    trials: int,
    seed: int,
    c: Optional[float] = None,
    threads: int = 1,
) -> WalkReport:
    """Count walks of length exactly r from x whose endpoint lies in S."""
    A = np.asarray(adjacency)
    h = A.shape[0]
    members = np.array(sorted(set(S)), dtype=np.int64)
    if members.size and (members.min() < 0 or members.max() >= h):
        raise VertexOutOfRange(f"subset reaches outside [0, {h})")
    ends = walk_endpoints(A, x, r, trials, seed, threads)
    hits = int(np.isin(ends, members).sum()) if members.size else 0
    return WalkReport(h=h, S_size=int(members.size), k=regular_degree(A), c=c, r=r, trials=trials, hits=hits)


def transition_matrix(adjacency) -> np.ndarray:
    A = np.asarray(adjacency, dtype=np.float64)
    return A / regular_degree(A)


def endpoint_distribution(adjacency, x: int, r: int) -> np.ndarray:
    """Exact law of the endpoint of an r-step walk from x."""
    P = transition_matrix(adjacency)
    if not 0 <= x < P.shape[0]:
        raise VertexOutOfRange(f"start vertex {x} not in [0, {P.shape[0]})")
    start = np.zeros(P.shape[0])
    start[x] = 1.0
    return start @ np.linalg.matrix_power(P, r)


def exact_hit_probability(adjacency, x: int, S: Iterable[int], r: int) -> float:
    dist = endpoint_distribution(adjacency, x, r)
    return float(sum(dist[v] for v in set(S)))


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def empirical_distribution(adjacency, x: int, r: int, trials: int, seed: int, threads: int = 1) -> np.ndarray:
    ends = walk_endpoints(adjacency, x, r, trials, seed, threads)
    return np.bincount(ends, minlength=np.asarray(adjacency).shape[0]) / max(1, trials)


def sample_subset(h: int, fraction: float, seed: int) -> np.ndarray:
    """A uniform subset of round(fraction * h) vertices, at least one."""
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction {fraction} outside (0, 1]")
    size = min(h, max(1, int(round(fraction * h))))
    rng = derive_rng(seed, SUBSET_STREAM)
    return np.sort(rng.choice(h, size=size, replace=False))


def verify_mixing(
    adjacency,
    report: SpectralReport,
    S_fraction: float,
    trials: int,
    seed: int,
    r: Optional[int] = None,
    threads: int = 1,
) -> Tuple[bool, WalkReport]:
    """
    Walks of the bounded length from vertex 0 must land in a random subset
    of the given fraction at least as often as |S| / (2h), up to 3 sigma.
    """
    if not report.is_connected:
        raise SpectralGapZero(f"graph has {report.components} components")
    h = np.asarray(adjacency).shape[0]
    S = sample_subset(h, S_fraction, seed)
    c = report.lambda_max_nontrivial
    length = r if r is not None else walk_length_bound(h, len(S), report.k, c)
    walk = simulate_hits(adjacency, 0, S, length, trials, seed, c=c, threads=threads)
    logger.info(
        f"mixing h={h} |S|={walk.S_size} r={length}: {walk.empirical_prob:.4f} vs bound {walk.bound_prob:.4f}"
    )
    return walk.passed, walk
