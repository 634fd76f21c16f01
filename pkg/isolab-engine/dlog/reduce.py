"""
Random self-reduction of elliptic-curve discrete logarithms along
horizontal isogeny walks.

An instance is carried along a random walk of bounded length in its level,
then handed to an oracle that only answers on part of the level. Every
answer is checked against the original instance.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

import config
from dlog.bsgs import DlogInstance, dlog_bsgs
from errors import KernelMeetsSubgroup, QueryBudgetExhausted, SpectralGapZero, UnsupportedLevel
from graphs.isogeny_graph import MODULAR, VELU, IsogenyGraph, build_isogeny_graph
from graphs.level import UP, vertical_chain, volcano_depth
from graphs.spectral import SpectralReport, spectral_report
from graphs.walk import walk_length_bound
from numtheory.arith import factor_int, kronecker, primes_upto
from numtheory.curve import Curve, curve_invariants
from numtheory.fields import field_element_str
from numtheory.isogeny import Isogeny, isogenies_from
from utils import derive_rng, rand_below

logger = logging.getLogger("isolab.dlog.reduce")

ORACLE_STREAM = 2
WALK_STREAM = 3


# ------------------------------------------------------
# Transport
# ------------------------------------------------------
def transport(phi: Isogeny, instance: DlogInstance) -> DlogInstance:
    """(phi P, phi Q, n): the same exponent solves both instances."""
    if instance.n % phi.degree == 0:
        raise KernelMeetsSubgroup(f"degree {phi.degree} divides the subgroup order {instance.n}")
    if phi.domain != instance.curve:
        raise ValueError("isogeny domain differs from the instance curve")
    return DlogInstance(phi.codomain, phi(instance.P), phi(instance.Q), instance.n)


# ------------------------------------------------------
# Oracle
# ------------------------------------------------------
@dataclass
class Oracle:
    """Solves instances whose curve has a j-invariant in the success set, refuses the rest."""

    success_set: FrozenSet
    solver: Callable[[DlogInstance], int] = dlog_bsgs
    calls: int = 0

    def __call__(self, instance: DlogInstance) -> Optional[int]:
        self.calls += 1
        if instance.curve.j_invariant() not in self.success_set:
            return None
        x = self.solver(instance)
        return x if instance.solves(x) else None


def fraction_oracle(vertices: Sequence, fraction: float, seed: int) -> Oracle:
    """Oracle answering on a uniform random subset of the given j-invariants."""
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction {fraction} outside (0, 1]")
    size = min(len(vertices), max(1, int(round(fraction * len(vertices)))))
    rng = derive_rng(seed, ORACLE_STREAM)
    chosen = rng.choice(len(vertices), size=size, replace=False)
    return Oracle(frozenset(vertices[int(i)] for i in chosen))


# ------------------------------------------------------
# Walk setup
# ------------------------------------------------------
def admissible_primes(instance: DlogInstance, m: int) -> List[int]:
    """Split primes l <= m not dividing c_pi or n, within the walk and isogeny bounds."""
    C = instance.curve
    inv = curve_invariants(C)
    bound = min(m, config.walk_max_prime, config.max_isogeny_degree)
    return [
        ell
        for ell in primes_upto(bound)
        if ell != C.field.p
        and kronecker(inv.d_pi, ell) == 1
        and inv.c_pi % ell
        and instance.n % ell
    ]


def level_graph(C: Curve, primes: Sequence[int], seed: int = 0) -> IsogenyGraph:
    """Horizontal closure of C under the walk primes."""
    method = MODULAR if all(ell in config.modular_levels for ell in primes) else VELU
    return build_isogeny_graph(C, primes, method=method, seed=seed)


def mixing_radius(report: SpectralReport) -> float:
    """Largest |lambda| once the trivial eigenvalue (and -k for a bipartite graph) is removed."""
    eigs = list(report.eigenvalues)
    eigs.remove(min(eigs, key=lambda x: abs(x - report.k)))
    if report.is_bipartite:
        eigs.remove(min(eigs, key=lambda x: abs(x + report.k)))
    return max((abs(x) for x in eigs), default=0.0)


def reduction_walk_length(graph: IsogenyGraph, success_size: int) -> Tuple[int, SpectralReport]:
    report = spectral_report(graph.adjacency)
    c = mixing_radius(report)
    if not report.is_connected:
        raise SpectralGapZero("level graph is disconnected")
    r = walk_length_bound(graph.h, max(1, min(success_size, graph.h)), report.k, c)
    return r, report


# ------------------------------------------------------
# Reduction
# ------------------------------------------------------
@dataclass
class WalkStep:
    ell: int
    kernel_hash: str
    j: object


@dataclass
class ReductionTranscript:
    walk: List[WalkStep]
    queries: int
    success: bool
    recovered_x: Optional[int]
    walk_length: int = 0
    primes: List[int] = field(default_factory=list)
    level_size: Optional[int] = None
    curve_field: object = field(default=None, repr=False)

    def to_dict(self) -> Dict:
        render = (lambda j: field_element_str(self.curve_field, j)) if self.curve_field is not None else str
        return {
            "walk": [{"ell": s.ell, "kernel_hash": s.kernel_hash, "j": render(s.j)} for s in self.walk],
            "queries": self.queries,
            "success": self.success,
            "recovered_x": self.recovered_x,
            "walk_length": self.walk_length,
            "primes": self.primes,
            "level_size": self.level_size,
        }


class _SlotCache:
    """Isogenies of each admissible degree out of each visited curve."""

    def __init__(self, primes: Sequence[int], seed: int) -> None:
        self.primes = list(primes)
        self.seed = seed
        self._slots: Dict[Curve, List[Tuple[int, Isogeny]]] = {}

    def slots(self, C: Curve) -> List[Tuple[int, Isogeny]]:
        if C not in self._slots:
            out = []
            for ell in self.primes:
                rng = derive_rng(self.seed, C.q, ell, len(self._slots))
                out.extend((ell, phi) for phi in isogenies_from(C, ell, rng))
            self._slots[C] = out
        return self._slots[C]


def random_reduce(
    instance: DlogInstance,
    oracle: Callable[[DlogInstance], Optional[int]],
    m: int,
    max_queries: int,
    seed: int,
    success_size: Optional[int] = None,
) -> ReductionTranscript:
    """
    Query the oracle on the instance itself, then on the endpoints of fresh
    random horizontal walks from it, until an answer checks out on the
    original instance.
    """
    C = instance.curve
    if max_queries < 1:
        raise QueryBudgetExhausted("no queries allowed")
    x = oracle(instance)
    if x is not None and instance.solves(x):
        return ReductionTranscript(walk=[], queries=1, success=True, recovered_x=x, curve_field=C.field)

    primes = admissible_primes(instance, m)
    if not primes:
        raise ValueError(f"no admissible walk primes <= {m} for {C.label()}")
    graph = level_graph(C, primes, seed)
    if success_size is None:
        success_size = len(getattr(oracle, "success_set", ())) or max(1, graph.h // 4)
    r, report = reduction_walk_length(graph, success_size)
    cache = _SlotCache(primes, seed)
    logger.info(f"reduction on {C.label()}: primes {primes}, level of {graph.h} curves, walk length {r}")

    for attempt in range(1, max_queries):
        rng = derive_rng(seed, WALK_STREAM, attempt)
        current, carried, steps = C, instance, []
        # a bipartite level needs both parities to reach every vertex
        length = r + rand_below(rng, 2) if report.is_bipartite else r
        for _ in range(length):
            slots = cache.slots(current)
            ell, phi = slots[rand_below(rng, len(slots))]
            carried = transport(phi, carried)
            current = phi.codomain
            steps.append(WalkStep(ell, phi.kernel_hash, current.j_invariant()))
        x = oracle(carried)
        if x is not None and instance.solves(x):
            logger.info(f"recovered x after {attempt + 1} queries")
            return ReductionTranscript(
                walk=steps,
                queries=attempt + 1,
                success=True,
                recovered_x=x,
                walk_length=r,
                primes=primes,
                level_size=graph.h,
                curve_field=C.field,
            )
    raise QueryBudgetExhausted(f"no verified answer within {max_queries} queries")


# ------------------------------------------------------
# Cross-level lift
# ------------------------------------------------------
def lift_to_surface(instance: DlogInstance, seed: int = 0) -> Tuple[DlogInstance, List[Isogeny]]:
    """
    Carry the instance up every ell-volcano for ell | c_pi until the curve
    has maximal endomorphism ring.
    """
    C = instance.curve
    inv = curve_invariants(C)
    chain: List[Isogeny] = []
    for ell, _ in factor_int(inv.c_pi).factors:
        if ell > config.max_isogeny_degree:
            raise UnsupportedLevel(f"conductor prime {ell} exceeds the explicit isogeny bound")
        if instance.n % ell == 0:
            raise KernelMeetsSubgroup(f"conductor prime {ell} divides the subgroup order {instance.n}")
        volcano = volcano_depth(instance.curve, ell, seed)
        steps = volcano.v_c_pi - volcano.depth_below
        for phi in vertical_chain(instance.curve, ell, UP, steps, seed):
            instance = transport(phi, instance)
            chain.append(phi)
    logger.info(f"lifted {C.label()} to {instance.curve.label()} through {len(chain)} isogenies")
    return instance, chain
