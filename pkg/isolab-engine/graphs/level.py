"""
Levels of an isogeny class: depth probing on ell-volcanoes, vertical
navigation, and the conductor distribution experiment.

A volcano is explored through the ell-isogenous j-invariants of a vertex:
roots of the modular polynomial for the bundled levels, Velu codomains for
the other primes. The floor is a vertex with a single ell-neighbor.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from sympy import nextprime

import config
from errors import AssertionFailed, AtFloor, AtSurface, FactorizationTimeout
from numtheory.arith import factor_int, is_squarefree, kronecker, largest_prime_factor, valuation
from numtheory.curve import Curve, CurveInvariants, curve_invariants, is_supersingular, random_curve
from numtheory.fields import PrimeField, field_element_str
from numtheory.isogeny import Isogeny, isogenies_from
from numtheory.modular import modular_neighbors
from utils import derive_rng, ordered_map, rand_below

logger = logging.getLogger("isolab.graphs.level")

UP, DOWN, HORIZONTAL = "up", "down", "horizontal"
TAIL_BETAS = (2, 3, 5, 10, 20, 50)
SQUAREFREE_BAND = (0.55, 0.67)
GATED_BETAS = (5, 10, 20, 50)


# ------------------------------------------------------
# Volcano exploration
# ------------------------------------------------------
class VolcanoExplorer:
    """
    Cached ell-neighborhoods on one isogeny class.

    `v` is the ell-valuation of c_pi, shared by every curve in the class.
    """

    def __init__(self, E: Curve, ell: int, v: int, seed: int = 0) -> None:
        self.field = E.field
        self.ell = ell
        self.v = v
        self.seed = seed
        self.use_modular = ell in config.modular_levels
        self.curves: Dict = {E.j_invariant(): E}
        self._neighbors: Dict = {}
        self._depths: Dict = {}

    def neighbors(self, j) -> List:
        """ell-isogenous j-invariants of j, repeated by multiplicity."""
        if j not in self._neighbors:
            rng = derive_rng(self.seed, self.field.order, self.ell, len(self._neighbors))
            if self.use_modular:
                found = modular_neighbors(j, self.ell, self.field, rng)
            else:
                found = []
                for phi in isogenies_from(self.curves[j], self.ell, rng):
                    target = phi.codomain.j_invariant()
                    self.curves.setdefault(target, phi.codomain)
                    found.append(target)
                found.sort()
            self._neighbors[j] = found
        return self._neighbors[j]

    def depth(self, j) -> int:
        """
        Distance from j to the floor.

        Three non-backtracking paths leave j in lockstep; at least one of
        them descends straight down, so the first to reach a vertex with a
        single neighbor has walked exactly the depth.
        """
        if j in self._depths:
            return self._depths[j]
        if self.v == 0 or len(self.neighbors(j)) <= 1:
            self._depths[j] = 0
            return 0
        paths = [(j, target) for target in self.neighbors(j)[:3]]
        steps = 1
        while True:
            if any(len(self.neighbors(cur)) <= 1 for _, cur in paths):
                break
            if steps >= self.v:
                raise AssertionFailed(f"depth search passed v = {self.v} at j = {j} for ell = {self.ell}")
            advanced = []
            for prev, cur in paths:
                options = list(self.neighbors(cur))
                options.remove(prev)
                advanced.append((cur, options[0]))
            paths = advanced
            steps += 1
        self._depths[j] = steps
        return steps

    def direction(self, j, target) -> str:
        d, e = self.depth(j), self.depth(target)
        if e == d - 1:
            return DOWN
        if e == d + 1:
            return UP
        return HORIZONTAL


@dataclass
class VolcanoDepth:
    ell: int
    v_c_pi: int
    depth_below: int
    neighbors: List[Tuple[object, str]]
    seconds: Optional[float] = None

    @property
    def is_on_surface(self) -> bool:
        return self.depth_below == self.v_c_pi

    @property
    def v_c_E(self) -> int:
        return self.v_c_pi - self.depth_below

    def counts(self) -> Dict[str, int]:
        out = {UP: 0, DOWN: 0, HORIZONTAL: 0}
        for _, direction in self.neighbors:
            out[direction] += 1
        return out

    def to_dict(self, F=None) -> Dict:
        render = (lambda j: field_element_str(F, j)) if F is not None else (lambda j: j)
        out = {
            "ell": self.ell,
            "v_c_pi": self.v_c_pi,
            "v_c_E": self.v_c_E,
            "depth_below": self.depth_below,
            "on_surface": self.is_on_surface,
            "neighbors": [{"j": render(j), "direction": d} for j, d in self.neighbors],
            "counts": self.counts(),
        }
        if self.seconds is not None:
            out["seconds"] = self.seconds
        return out


def volcano_depth(E: Curve, ell: int, seed: int = 0, explorer: Optional[VolcanoExplorer] = None) -> VolcanoDepth:
    """Depth of E on its ell-volcano and the direction of each ell-isogeny out of E."""
    start = time.perf_counter()
    if explorer is None:
        inv = curve_invariants(E)
        explorer = VolcanoExplorer(E, ell, valuation(inv.c_pi, ell), seed)
    j = E.j_invariant()
    explorer.curves.setdefault(j, E)
    depth = explorer.depth(j)
    neighbors = [(target, explorer.direction(j, target)) for target in explorer.neighbors(j)]
    seconds = time.perf_counter() - start
    logger.debug(f"depth ell={ell} on {E.label()}: depth {depth} of {explorer.v} in {seconds:.3f}s")
    return VolcanoDepth(ell=ell, v_c_pi=explorer.v, depth_below=depth, neighbors=neighbors, seconds=seconds)


def expected_direction_counts(d_K: int, ell: int, v_c_pi: int, v_c_E: int) -> Dict[str, int]:
    """Up/down/horizontal ell-isogeny counts for a curve at the given level."""
    if v_c_E == 0:
        symbol = kronecker(d_K, ell)
        horizontal = 1 + symbol
        down = ell - symbol if v_c_pi > 0 else 0
        return {UP: 0, DOWN: down, HORIZONTAL: horizontal}
    if v_c_E == v_c_pi:
        return {UP: 1, DOWN: 0, HORIZONTAL: 0}
    return {UP: 1, DOWN: ell, HORIZONTAL: 0}


# ------------------------------------------------------
# Level descriptors
# ------------------------------------------------------
@dataclass
class LevelDescriptor:
    curve: Curve
    invariants: CurveInvariants
    c_E_valuations: Dict[int, int]
    depths: Dict[int, VolcanoDepth] = field(default_factory=dict)
    skipped: List[int] = field(default_factory=list)

    @property
    def c_E(self) -> Optional[int]:
        if self.skipped:
            return None
        out = 1
        for ell, v in self.c_E_valuations.items():
            out *= ell ** v
        return out

    def to_dict(self, timings: bool = False) -> Dict:
        F = self.curve.field
        inv = self.invariants
        depths = {}
        for ell, volcano in self.depths.items():
            entry = volcano.to_dict(F)
            if not timings:
                entry.pop("seconds", None)
            depths[str(ell)] = entry
        return {
            "curve": self.curve.to_dict(),
            "t": inv.t,
            "d_pi": inv.d_pi,
            "c_pi": inv.c_pi,
            "d_K": inv.d_K,
            "c_E": self.c_E,
            "c_E_valuations": {str(ell): v for ell, v in self.c_E_valuations.items()},
            "skipped": self.skipped,
            "depths": depths,
        }


def level_descriptor(E: Curve, seed: int = 0) -> LevelDescriptor:
    """Volcano depth at every prime of c_pi up to the explicit isogeny bound."""
    inv = curve_invariants(E)
    valuations: Dict[int, int] = {}
    depths: Dict[int, VolcanoDepth] = {}
    skipped: List[int] = []
    for ell, _ in factor_int(inv.c_pi).factors:
        if ell > config.max_isogeny_degree or ell == E.field.p:
            skipped.append(ell)
            continue
        volcano = volcano_depth(E, ell, seed)
        depths[ell] = volcano
        valuations[ell] = volcano.v_c_E
        logger.info(f"ell={ell}: v(c_E) = {volcano.v_c_E} of v(c_pi) = {volcano.v_c_pi} ({volcano.seconds:.3f}s)")
    return LevelDescriptor(E, inv, valuations, depths, skipped)


# ------------------------------------------------------
# Vertical navigation
# ------------------------------------------------------
def vertical_chain(E: Curve, ell: int, direction: str, steps: int, seed: int = 0) -> List[Isogeny]:
    """`steps` composable ell-isogenies that each move one level up or down."""
    if direction not in (UP, DOWN):
        raise ValueError(f"direction must be {UP!r} or {DOWN!r}, got {direction!r}")
    if steps < 0:
        raise ValueError("steps must be non-negative")
    inv = curve_invariants(E)
    explorer = VolcanoExplorer(E, ell, valuation(inv.c_pi, ell), seed)
    depth = explorer.depth(E.j_invariant())
    if direction == UP and steps > explorer.v - depth:
        raise AtSurface(f"only {explorer.v - depth} levels above {E.label()} for ell={ell}")
    if direction == DOWN and steps > depth:
        raise AtFloor(f"only {depth} levels below {E.label()} for ell={ell}")

    chain: List[Isogeny] = []
    current = E
    for step in range(steps):
        want = depth + (1 if direction == UP else -1)
        rng = derive_rng(seed, E.q, ell, step)
        for phi in isogenies_from(current, ell, rng):
            target = phi.codomain.j_invariant()
            explorer.curves.setdefault(target, phi.codomain)
            if explorer.depth(target) == want:
                chain.append(phi)
                current, depth = phi.codomain, want
                break
        else:
            raise AssertionFailed(f"no {direction} ell={ell} isogeny out of {current.label()}")
    return chain


def navigate_vertical(E: Curve, ell: int, direction: str, steps: int, seed: int = 0) -> Curve:
    chain = vertical_chain(E, ell, direction, steps, seed)
    return chain[-1].codomain if chain else E


# ------------------------------------------------------
# Conductor distribution
# ------------------------------------------------------
OK, SUPERSINGULAR, TIMEOUT = "ok", "supersingular", "factorization_timeout"
CPI_COLUMNS = ["q", "a", "b", "t", "d_pi", "c_pi", "P_c_pi", "status"]


@dataclass
class CpiSample:
    q: int
    a: int
    b: int
    t: int
    status: str
    d_pi: Optional[int] = None
    c_pi: Optional[int] = None
    P_c_pi: Optional[int] = None

    def to_dict(self) -> Dict:
        return {name: getattr(self, name) for name in CPI_COLUMNS}


@dataclass
class CpiHistogram:
    samples: List[CpiSample]

    @property
    def ok(self) -> List[CpiSample]:
        return [s for s in self.samples if s.status == OK]

    def _fraction(self, predicate) -> Optional[float]:
        ok = self.ok
        return sum(1 for s in ok if predicate(s)) / len(ok) if ok else None

    def tail(self) -> Dict[str, Optional[float]]:
        return {str(beta): self._fraction(lambda s, beta=beta: s.P_c_pi > beta) for beta in TAIL_BETAS}

    def summary(self) -> Dict:
        return {
            "samples": len(self.samples),
            "ok": len(self.ok),
            "supersingular": sum(1 for s in self.samples if s.status == SUPERSINGULAR),
            "factorization_timeout": sum(1 for s in self.samples if s.status == TIMEOUT),
            "fraction_c_pi_one": self._fraction(lambda s: s.c_pi == 1),
            "fraction_d_pi_squarefree": self._fraction(lambda s: is_squarefree(-s.d_pi)),
            "fraction_odd_part_squarefree": self._fraction(lambda s: is_squarefree(_odd_part(-s.d_pi))),
            "tail": self.tail(),
        }

    def passes_gate(self) -> bool:
        """
        c_pi = 1 (d_pi a fundamental discriminant) for a share of curves inside
        SQUAREFREE_BAND, and Pr[P(c_pi) > beta] <= 5 / beta for every gated beta.
        """
        share = self._fraction(lambda s: s.c_pi == 1)
        if share is None or not SQUAREFREE_BAND[0] <= share <= SQUAREFREE_BAND[1]:
            return False
        tail = self.tail()
        return all(tail[str(beta)] <= 5 / beta for beta in GATED_BETAS)

    def to_dict(self) -> Dict:
        return self.summary()


def _odd_part(n: int) -> int:
    return n >> ((n & -n).bit_length() - 1)


def _sample(index: int, q_range: Tuple[int, int], seed: int) -> CpiSample:
    rng = derive_rng(seed, index)
    lo, hi = q_range
    q = int(nextprime(lo - 1 + rand_below(rng, hi - lo + 1)))
    F = PrimeField(q)
    C = random_curve(F, rng)
    a, b = F.to_int(C.a), F.to_int(C.b)
    if is_supersingular(C):
        return CpiSample(q, a, b, C.trace, SUPERSINGULAR)
    t = C.trace
    d_pi = t * t - 4 * q
    try:
        inv = curve_invariants(C)
    except FactorizationTimeout:
        return CpiSample(q, a, b, t, TIMEOUT, d_pi=d_pi)
    P = largest_prime_factor(factor_int(inv.c_pi))
    return CpiSample(q, a, b, t, OK, d_pi=d_pi, c_pi=inv.c_pi, P_c_pi=P)


def cpi_distribution_experiment(
    q_range: Tuple[int, int],
    sample_count: int,
    seed: int,
    threads: int = 1,
) -> CpiHistogram:
    """
    Random curves over random primes in q_range: c_pi, its largest prime
    factor and the squarefree statistics of d_pi. Supersingular samples and
    factorization timeouts are kept and counted separately.
    """
    lo, hi = q_range
    if lo < 5 or hi < lo:
        raise ValueError(f"bad prime range {q_range}")
    samples = ordered_map(lambda i: _sample(i, q_range, seed), list(range(sample_count)), threads)
    histogram = CpiHistogram(samples)
    logger.info(f"c_pi distribution over {sample_count} curves in [{lo}, {hi}]: {histogram.summary()}")
    return histogram
