"""
Explicit isogeny graphs over F_q, grown from one curve by breadth-first
closure under prime-degree isogenies.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

import config
from errors import ClassNumberTooLarge
from graphs.spectral import same_invariants
from numtheory.classgroup import build_cayley_graph
from numtheory.curve import Curve, curve_from_j, curve_invariants
from numtheory.fields import field_element_str
from numtheory.isogeny import isogenies_from
from numtheory.modular import modular_neighbors
from utils import derive_rng

logger = logging.getLogger("isolab.graphs.isogeny_graph")

VELU = "velu"
MODULAR = "modular"


@dataclass
class IsogenyGraph:
    q: int
    primes: List[int]
    method: str
    vertices: List
    adjacency: np.ndarray
    curves: Dict = field(default_factory=dict, repr=False)

    @property
    def h(self) -> int:
        return len(self.vertices)

    def to_dict(self) -> Dict:
        F = self.curves[self.vertices[0]].field
        return {
            "kind": "isogeny",
            "q": self.q,
            "primes": self.primes,
            "method": self.method,
            "vertices": [field_element_str(F, j) for j in self.vertices],
            "adjacency": self.adjacency.tolist(),
        }


def _velu_edges(E: Curve, ell: int, seed: int, step: int):
    rng = derive_rng(seed, E.q, ell, step)
    return [(phi.codomain.j_invariant(), phi.codomain) for phi in isogenies_from(E, ell, rng)]


def _modular_edges(E: Curve, ell: int, seed: int, step: int):
    rng = derive_rng(seed, E.q, ell, step)
    return [(j, None) for j in modular_neighbors(E.j_invariant(), ell, E.field, rng)]


def build_isogeny_graph(
    start: Curve,
    primes: Sequence[int],
    method: str = VELU,
    seed: int = 0,
    max_vertices: Optional[int] = None,
) -> IsogenyGraph:
    """
    Vertices are j-invariants reachable from the start curve by isogenies of
    the given prime degrees; A[u, v] counts the rational kernels (or the
    modular-polynomial root multiplicity) from u to v.
    """
    if method not in (VELU, MODULAR):
        raise ValueError(f"unknown closure method {method!r}")
    limit = max_vertices if max_vertices is not None else config.class_number_bound
    edges_of = _velu_edges if method == VELU else _modular_edges

    j0 = start.j_invariant()
    order = [j0]
    curves = {j0: start}
    rows: Dict = {}
    queue = deque([j0])
    step = 0
    while queue:
        j = queue.popleft()
        E = curves[j]
        row: Dict = {}
        for ell in primes:
            for target, curve in edges_of(E, ell, seed, step):
                row[target] = row.get(target, 0) + 1
                if target not in curves:
                    if len(order) >= limit:
                        raise ClassNumberTooLarge(f"isogeny closure exceeds {limit} vertices")
                    curves[target] = curve if curve is not None else _curve_for(E, target)
                    order.append(target)
                    queue.append(target)
            step += 1
        rows[j] = row

    position = {j: i for i, j in enumerate(order)}
    A = np.zeros((len(order), len(order)), dtype=np.int64)
    for j, row in rows.items():
        for target, count in row.items():
            A[position[j], position[target]] += count
    logger.info(f"{method} closure over F_{start.q} with primes {list(primes)}: {len(order)} vertices")
    return IsogenyGraph(q=start.q, primes=list(primes), method=method, vertices=order, adjacency=A, curves=curves)


def _curve_for(E: Curve, j) -> Curve:
    """A curve with invariant j on the same isogeny class as E (matching trace)."""
    C = curve_from_j(E.field, j)
    if C.trace != E.trace:
        C = curve_from_j(E.field, j, twist=True)
    return C


def component(adjacency, start: int = 0) -> List[int]:
    """Vertices reachable from start, in breadth-first order."""
    A = np.asarray(adjacency)
    seen = {start}
    order = [start]
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in np.nonzero(A[u])[0]:
            v = int(v)
            if v not in seen:
                seen.add(v)
                order.append(v)
                queue.append(v)
    return order


@dataclass
class ModelComparison:
    D: int
    primes: List[int]
    isogeny_vertices: int
    cayley_vertices: int
    cayley_component: int
    isomorphic: bool

    def to_dict(self) -> Dict:
        return {
            "discriminant": self.D,
            "primes": self.primes,
            "isogeny_vertices": self.isogeny_vertices,
            "cayley_vertices": self.cayley_vertices,
            "cayley_component": self.cayley_component,
            "isomorphic": self.isomorphic,
        }


def compare_with_cayley(graph: IsogenyGraph, start: Curve, D: Optional[int] = None) -> ModelComparison:
    """
    Match the explicit closure against the component of the identity in the
    class-group Cayley graph on the same primes (vertex count, degrees, spectrum).

    Without an explicit discriminant the start curve must have c_pi = 1, so
    its level is the maximal order of discriminant d_pi.
    """
    if D is None:
        inv = curve_invariants(start)
        if inv.c_pi != 1:
            raise ValueError(f"c_pi = {inv.c_pi}; pass the discriminant of the level explicitly")
        D = inv.d_pi
    cayley = build_cayley_graph(D, max(graph.primes), primes=list(graph.primes))
    comp = component(cayley.adjacency, 0)
    sub = cayley.adjacency[np.ix_(comp, comp)]
    ok = same_invariants(graph.adjacency, sub)
    logger.info(f"isogeny graph vs Cayley graph for D={D}: {graph.h} vs {len(comp)} vertices, isomorphic={ok}")
    return ModelComparison(
        D=D,
        primes=list(graph.primes),
        isogeny_vertices=graph.h,
        cayley_vertices=cayley.h,
        cayley_component=len(comp),
        isomorphic=ok,
    )
