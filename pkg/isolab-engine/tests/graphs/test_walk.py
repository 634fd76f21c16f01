import unittest

import numpy as np
import pytest

from errors import SpectralGapZero, VertexOutOfRange
from graphs.spectral import spectral_report
from graphs.walk import (
    endpoint_distribution,
    empirical_distribution,
    exact_hit_probability,
    sample_subset,
    simulate_hits,
    slot_table,
    total_variation,
    verify_mixing,
    walk_endpoints,
    walk_length_bound,
)
from numtheory.classgroup import build_cayley_graph


def triangle():
    return np.ones((3, 3), dtype=np.int64) - np.eye(3, dtype=np.int64)


def test_walk_length_bound():
    """Test ceil(log(2h / sqrt|S|) / log(k / c))"""
    assert walk_length_bound(100, 25, 10, 5) == 6
    assert walk_length_bound(100, 25, 10, 0) == 1
    assert walk_length_bound(4, 4, 10, 1) == 1


def test_walk_length_bound_guards():
    """Test the zero gap and the subset size guards"""
    with pytest.raises(SpectralGapZero):
        walk_length_bound(100, 25, 4, 4)
    with pytest.raises(ValueError):
        walk_length_bound(100, 0, 4, 2)
    with pytest.raises(ValueError):
        walk_length_bound(100, 101, 4, 2)


def test_slot_table_repeats_multi_edges():
    """Test that a double edge takes two slots"""
    A = np.array([[0, 2], [2, 0]])
    np.testing.assert_array_equal(slot_table(A), [[1, 1], [0, 0]])
    np.testing.assert_array_equal(slot_table(np.array([[1, 1], [1, 1]])), [[0, 1], [0, 1]])


class TestWalks(unittest.TestCase):
    def setUp(self):
        self.A = triangle()

    def test_walks_never_stay_put_on_a_triangle(self):
        ends = walk_endpoints(self.A, 0, 1, 500, seed=3)
        self.assertEqual(len(ends), 500)
        self.assertFalse((ends == 0).any())

    def test_bipartite_parity(self):
        C4 = np.array([[0, 1, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 1, 0]])
        ends = walk_endpoints(C4, 0, 2, 300, seed=1)
        self.assertTrue(set(ends.tolist()) <= {0, 2})

    def test_deterministic_and_thread_independent(self):
        a = walk_endpoints(self.A, 0, 5, 3000, seed=11)
        b = walk_endpoints(self.A, 0, 5, 3000, seed=11, threads=4)
        c = walk_endpoints(self.A, 0, 5, 3000, seed=12)
        np.testing.assert_array_equal(a, b)
        self.assertFalse(np.array_equal(a, c))

    def test_zero_trials(self):
        self.assertEqual(walk_endpoints(self.A, 0, 3, 0, seed=1).size, 0)

    def test_start_vertex_range(self):
        with self.assertRaises(VertexOutOfRange):
            walk_endpoints(self.A, 3, 1, 10, seed=0)
        with self.assertRaises(VertexOutOfRange):
            endpoint_distribution(self.A, -1, 1)


def test_simulate_hits_extreme_subsets():
    """Test that S = V always hits and S = {} never does"""
    A = triangle()
    full = simulate_hits(A, 0, range(3), 4, 200, seed=2)
    assert full.hits == 200
    assert full.empirical_prob == 1.0
    assert full.bound_prob == 0.5
    empty = simulate_hits(A, 0, [], 4, 200, seed=2)
    assert empty.hits == 0
    with pytest.raises(VertexOutOfRange):
        simulate_hits(A, 0, [5], 4, 10, seed=2)


def test_exact_hit_probability():
    """Test the exact endpoint law on a triangle"""
    A = triangle()
    assert exact_hit_probability(A, 0, [1], 1) == pytest.approx(0.5)
    assert exact_hit_probability(A, 0, [0], 2) == pytest.approx(0.5)
    np.testing.assert_allclose(endpoint_distribution(A, 0, 0), [1, 0, 0])


def test_empirical_distribution_is_close_to_exact():
    """Test that simulated endpoints approach the exact law in total variation"""
    A = build_cayley_graph(-47, 13).adjacency
    exact = endpoint_distribution(A, 0, 3)
    empirical = empirical_distribution(A, 0, 3, 20000, seed=4)
    assert empirical.sum() == pytest.approx(1.0)
    assert total_variation(exact, empirical) < 0.05


def test_total_variation():
    """Test the total variation distance"""
    assert total_variation(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 1.0
    assert total_variation(np.array([0.5, 0.5]), np.array([0.5, 0.5])) == 0.0


def test_sample_subset():
    """Test subset size, ordering and determinism"""
    S = sample_subset(10, 0.5, seed=3)
    assert len(S) == 5
    assert list(S) == sorted(set(S.tolist()))
    np.testing.assert_array_equal(S, sample_subset(10, 0.5, seed=3))
    assert len(sample_subset(10, 0.01, seed=3)) == 1
    with pytest.raises(ValueError):
        sample_subset(10, 0.0, seed=3)


class TestVerifyMixing(unittest.TestCase):
    def test_cayley_graph_mixes(self):
        A = build_cayley_graph(-47, 13).adjacency
        report = spectral_report(A)
        passed, walk = verify_mixing(A, report, 0.4, 5000, seed=7)
        self.assertTrue(passed)
        self.assertEqual(walk.S_size, 2)
        self.assertGreaterEqual(walk.r, 1)
        self.assertEqual(walk.to_dict()["passed"], True)

    def test_explicit_length(self):
        A = build_cayley_graph(-47, 13).adjacency
        _, walk = verify_mixing(A, spectral_report(A), 0.4, 100, seed=7, r=9)
        self.assertEqual(walk.r, 9)

    def test_disconnected_graph_is_refused(self):
        A = np.zeros((6, 6), dtype=np.int64)
        A[:3, :3] = triangle()
        A[3:, 3:] = triangle()
        with self.assertRaises(SpectralGapZero):
            verify_mixing(A, spectral_report(A), 0.5, 100, seed=0)


if __name__ == '__main__':
    unittest.main()
