import unittest

import numpy as np
import pytest

from dlog.bsgs import DlogInstance, make_instance
from dlog.reduce import (
    Oracle,
    admissible_primes,
    fraction_oracle,
    level_graph,
    lift_to_surface,
    mixing_radius,
    random_reduce,
    transport,
)
from errors import KernelMeetsSubgroup, QueryBudgetExhausted
from graphs.level import DOWN, navigate_vertical, volcano_depth
from graphs.spectral import spectral_report
from numtheory.arith import factor_int, kronecker, valuation
from numtheory.classgroup import enumerate_class_group
from numtheory.curve import INFINITY, curve_invariants, is_supersingular, point_order, random_curve
from numtheory.fields import PrimeField
from numtheory.isogeny import isogenies_from
from utils import derive_rng


def find_curve(F, seed, predicate):
    rng = derive_rng(seed)
    for _ in range(3000):
        C = random_curve(F, rng)
        if is_supersingular(C):
            continue
        inv = curve_invariants(C)
        if inv.d_K not in (-3, -4) and predicate(inv):
            return C
    raise AssertionError("no curve with the requested invariants")


def coprime_point(C, rng, avoid):
    """A point whose order is prime to every prime in avoid."""
    cofactor = 1
    for ell in avoid:
        cofactor *= ell ** valuation(C.order, ell)
    for _ in range(200):
        P = C.scalar_mul(cofactor, C.random_point(rng))
        if P is not INFINITY:
            return P
    raise AssertionError("no point of coprime order")


def walkable(inv):
    return inv.c_pi == 1 and kronecker(inv.d_K, 2) == 1 and enumerate_class_group(inv.d_K).h <= 40


class TestTransport(unittest.TestCase):
    def setUp(self):
        F = PrimeField(1009)
        self.rng = derive_rng(6)
        self.C = find_curve(F, 6, lambda inv: True)
        phis = isogenies_from(self.C, 3, self.rng)
        while not phis:
            self.C = random_curve(F, self.rng)
            phis = isogenies_from(self.C, 3, self.rng)
        self.phi = phis[0]
        P = coprime_point(self.C, self.rng, [3])
        self.instance = make_instance(self.C, P, 123)

    def test_same_exponent_solves_the_image(self):
        image = transport(self.phi, self.instance)
        self.assertEqual(image.curve, self.phi.codomain)
        self.assertEqual(image.n, self.instance.n)
        self.assertTrue(image.solves(123 % self.instance.n))

    def test_degree_dividing_the_order_is_refused(self):
        wide = DlogInstance(self.C, self.instance.P, self.instance.Q, 3 * self.instance.n)
        with self.assertRaises(KernelMeetsSubgroup):
            transport(self.phi, wide)

    def test_foreign_domain_is_refused(self):
        image = transport(self.phi, self.instance)
        with self.assertRaises(ValueError):
            transport(self.phi, image)


class TestOracle(unittest.TestCase):
    def setUp(self):
        F = PrimeField(1009)
        C = find_curve(F, 7, lambda inv: True)
        rng = derive_rng(7)
        P = C.random_point(rng)
        while P is INFINITY or point_order(C, P) < 10:
            P = C.random_point(rng)
        self.instance = make_instance(C, P, 9)

    def test_answers_inside_the_success_set(self):
        oracle = Oracle(frozenset([self.instance.curve.j_invariant()]))
        x = oracle(self.instance)
        self.assertTrue(self.instance.solves(x))
        self.assertEqual(oracle.calls, 1)

    def test_refuses_outside(self):
        oracle = Oracle(frozenset())
        self.assertIsNone(oracle(self.instance))
        self.assertEqual(oracle.calls, 1)

    def test_wrong_answers_are_dropped(self):
        oracle = Oracle(frozenset([self.instance.curve.j_invariant()]), solver=lambda instance: 4)
        self.assertIsNone(oracle(self.instance))


def test_fraction_oracle_size():
    """Test success-set sizes and the fraction guard"""
    vertices = list(range(20))
    assert len(fraction_oracle(vertices, 0.25, seed=1).success_set) == 5
    assert len(fraction_oracle(vertices, 0.01, seed=1).success_set) == 1
    assert fraction_oracle(vertices, 0.5, seed=3).success_set == fraction_oracle(vertices, 0.5, seed=3).success_set
    with pytest.raises(ValueError):
        fraction_oracle(vertices, 1.5, seed=1)


def test_mixing_radius():
    """Test that -k is dropped only for bipartite graphs"""
    K4 = np.ones((4, 4), dtype=np.int64) - np.eye(4, dtype=np.int64)
    assert mixing_radius(spectral_report(K4)) == pytest.approx(1.0)
    C4 = np.array([[0, 1, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 1, 0]])
    assert mixing_radius(spectral_report(C4)) == pytest.approx(0.0, abs=1e-9)


class TestRandomReduce(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.F = PrimeField(1009)
        cls.C = find_curve(cls.F, 8, walkable)
        rng = derive_rng(8)
        P = coprime_point(cls.C, rng, [2, 3, 5, 7])
        cls.instance = make_instance(cls.C, P, 77)
        cls.x = 77 % cls.instance.n
        cls.primes = admissible_primes(cls.instance, 7)
        cls.graph = level_graph(cls.C, cls.primes)

    def test_admissible_primes(self):
        inv = curve_invariants(self.C)
        self.assertIn(2, self.primes)
        for ell in self.primes:
            self.assertEqual(kronecker(inv.d_pi, ell), 1)
            self.assertNotEqual(self.instance.n % ell, 0)
        self.assertEqual(admissible_primes(self.instance, 2), [2])

    def test_first_query_is_the_instance_itself(self):
        transcript = random_reduce(self.instance, Oracle(frozenset(self.graph.vertices)), 7, 5, seed=1)
        self.assertTrue(transcript.success)
        self.assertEqual(transcript.queries, 1)
        self.assertEqual(transcript.walk, [])
        self.assertEqual(transcript.recovered_x, self.x)

    def test_walks_reach_the_success_set(self):
        start = self.C.j_invariant()
        oracle = Oracle(frozenset(j for j in self.graph.vertices if j != start))
        transcript = random_reduce(self.instance, oracle, 7, 64, seed=2)
        self.assertTrue(transcript.success)
        self.assertGreaterEqual(transcript.queries, 2)
        self.assertEqual(transcript.recovered_x, self.x)
        self.assertEqual(transcript.level_size, self.graph.h)
        self.assertIn(len(transcript.walk), (transcript.walk_length, transcript.walk_length + 1))
        for step in transcript.walk:
            self.assertIn(step.ell, self.primes)
            self.assertIn(step.j, self.graph.vertices)
        self.assertEqual(transcript.to_dict()["queries"], transcript.queries)

    def test_reduction_is_deterministic(self):
        oracle = fraction_oracle(self.graph.vertices, 0.5, seed=4)
        first = random_reduce(self.instance, oracle, 7, 64, seed=9).to_dict()
        again = random_reduce(self.instance, fraction_oracle(self.graph.vertices, 0.5, seed=4), 7, 64, seed=9).to_dict()
        self.assertEqual(first, again)

    def test_budget_exhaustion(self):
        with self.assertRaises(QueryBudgetExhausted):
            random_reduce(self.instance, Oracle(frozenset()), 7, 3, seed=1)
        with self.assertRaises(QueryBudgetExhausted):
            random_reduce(self.instance, Oracle(frozenset()), 7, 0, seed=1)


class TestLiftToSurface(unittest.TestCase):
    def setUp(self):
        F = PrimeField(1009)
        C = find_curve(
            F, 9, lambda inv: valuation(inv.c_pi, 2) >= 1 and all(p <= 3 for p in factor_int(inv.c_pi).primes())
        )
        self.floor = navigate_vertical(C, 2, DOWN, volcano_depth(C, 2).depth_below)
        self.rng = derive_rng(9)

    def test_lift_reaches_the_maximal_order(self):
        P = coprime_point(self.floor, self.rng, [2, 3])
        instance = make_instance(self.floor, P, 41)
        lifted, chain = lift_to_surface(instance)
        self.assertGreaterEqual(len(chain), 1)
        self.assertTrue(lifted.solves(41 % instance.n))
        inv = curve_invariants(lifted.curve)
        for ell in factor_int(inv.c_pi).primes():
            self.assertTrue(volcano_depth(lifted.curve, ell).is_on_surface)

    def test_conductor_prime_in_the_order_is_refused(self):
        P = coprime_point(self.floor, self.rng, [2, 3])
        n = point_order(self.floor, P)
        instance = DlogInstance(self.floor, P, P, 2 * n)
        with self.assertRaises(KernelMeetsSubgroup):
            lift_to_surface(instance)


if __name__ == '__main__':
    unittest.main()
