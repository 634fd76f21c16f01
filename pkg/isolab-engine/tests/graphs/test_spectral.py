import itertools
import unittest
from unittest.mock import patch

import numpy as np
import pytest
from sympy import Matrix

from errors import AssertionFailed, DimensionTooLarge, NotRegular, NotSymmetric
from graphs import spectral
from graphs.spectral import (
    beta_sweep,
    eigenvalues_symmetric,
    nearly_ramanujan_verdict,
    regular_degree,
    same_invariants,
    spectral_report,
    weighted_symmetrize,
)
from utils import derive_rng


def complete_graph(n):
    return np.ones((n, n), dtype=np.int64) - np.eye(n, dtype=np.int64)


def cycle_graph(n):
    A = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        A[i, (i + 1) % n] += 1
        A[(i + 1) % n, i] += 1
    return A


def petersen_graph():
    A = np.zeros((10, 10), dtype=np.int64)
    for i in range(5):
        for u, v in ((i, (i + 1) % 5), (i, i + 5), (i + 5, (i + 2) % 5 + 5)):
            A[u, v] = A[v, u] = 1
    return A


class TestJacobiEigensolver(unittest.TestCase):
    def test_complete_graph(self):
        np.testing.assert_allclose(eigenvalues_symmetric(complete_graph(3)), [2, -1, -1], atol=1e-10)

    def test_cycle(self):
        np.testing.assert_allclose(eigenvalues_symmetric(cycle_graph(4)), [2, 0, 0, -2], atol=1e-10)

    def test_identity_and_empty(self):
        self.assertEqual(eigenvalues_symmetric(np.eye(4)), [1.0, 1.0, 1.0, 1.0])
        self.assertEqual(eigenvalues_symmetric(np.zeros((0, 0))), [])

    def test_matches_lapack_on_random_matrices(self):
        rng = derive_rng(8)
        for n in (2, 5, 17, 40):
            M = rng.normal(size=(n, n))
            M = M + M.T
            expected = np.sort(np.linalg.eigvalsh(M))[::-1]
            np.testing.assert_allclose(eigenvalues_symmetric(M), expected, atol=1e-8)

    def test_rejects_asymmetric_and_non_square(self):
        with self.assertRaises(NotSymmetric):
            eigenvalues_symmetric(np.array([[0.0, 1.0], [0.0, 1.0]]))
        with self.assertRaises(NotSymmetric):
            eigenvalues_symmetric(np.zeros((2, 3)))

    def test_dimension_cap(self):
        with patch.object(spectral.config, "eigen_max_dim", 2):
            with self.assertRaises(DimensionTooLarge):
                eigenvalues_symmetric(complete_graph(3))

    def test_stops_at_rounding_floor(self):
        D = np.diag([4.0, -1.0, 2.0])
        with patch.object(spectral, "CONVERGENCE_TOL", -1.0):
            self.assertEqual(eigenvalues_symmetric(D), [4.0, 2.0, -1.0])

    def test_no_exit_without_either_tolerance(self):
        with patch.object(spectral, "CONVERGENCE_TOL", -1.0), patch.object(spectral, "STAGNATION_TOL", -1.0):
            with self.assertRaises(AssertionFailed):
                eigenvalues_symmetric(np.diag([4.0, -1.0, 2.0]))


def small_symmetric_matrices(n, rng=None, samples=0):
    """Every symmetric n x n matrix with entries in [-3, 3], or a sample of them."""
    upper = np.triu_indices(n)
    if rng is None:
        entries = itertools.product(range(-3, 4), repeat=len(upper[0]))
    else:
        entries = (rng.integers(-3, 4, size=len(upper[0])) for _ in range(samples))
    for values in entries:
        M = np.zeros((n, n), dtype=np.int64)
        M[upper] = values
        yield M + np.triu(M, 1).T


@pytest.mark.parametrize("n, samples", [(1, 0), (2, 0), (3, 500), (4, 500)])
def test_jacobi_roots_the_characteristic_polynomial(n, samples):
    """Test that the Jacobi spectrum reproduces the exact characteristic polynomial"""
    rng = derive_rng(41, n) if samples else None
    for M in small_symmetric_matrices(n, rng, samples):
        exact = [float(c) for c in Matrix(M.tolist()).charpoly().all_coeffs()]
        np.testing.assert_allclose(np.poly(eigenvalues_symmetric(M)), exact, rtol=1e-9, atol=1e-7)


def test_regular_degree():
    """Test row-sum degrees and the irregular and empty cases"""
    assert regular_degree(complete_graph(5)) == 4
    assert regular_degree(np.array([[2, 1], [1, 2]])) == 3
    with pytest.raises(NotRegular):
        regular_degree(np.array([[0, 1], [1, 1]]))
    with pytest.raises(NotRegular):
        regular_degree(np.zeros((0, 0)))


def test_report_complete_graph():
    """Test the report of K_4"""
    report = spectral_report(complete_graph(4))
    assert report.k == 3
    assert report.components == 1
    assert not report.is_bipartite
    assert report.lambda_max_nontrivial == pytest.approx(1.0)
    assert report.additive_gap == pytest.approx(2.0)
    assert report.is_ramanujan


def test_report_bipartite_cycle():
    """Test that -k is detected and counted in lambda"""
    report = spectral_report(cycle_graph(6))
    assert report.is_bipartite
    assert report.is_connected
    assert report.lambda_max_nontrivial == pytest.approx(2.0)


def test_report_disconnected_graph():
    """Test that two disjoint triangles give two trivial eigenvalues"""
    A = np.zeros((6, 6), dtype=np.int64)
    A[:3, :3] = complete_graph(3)
    A[3:, 3:] = complete_graph(3)
    report = spectral_report(A)
    assert report.components == 2
    assert not report.is_connected
    assert report.lambda_max_nontrivial == pytest.approx(1.0)


def test_report_petersen_is_ramanujan():
    """Test the Petersen spectrum 3, 1^5, (-2)^4"""
    report = spectral_report(petersen_graph(), k=3)
    np.testing.assert_allclose(report.eigenvalues, [3] + [1] * 5 + [-2] * 4, atol=1e-9)
    assert report.lambda_max_nontrivial == pytest.approx(2.0)
    assert report.ramanujan_bound == pytest.approx(2 * np.sqrt(2))
    assert report.is_ramanujan
    with pytest.raises(NotRegular):
        spectral_report(petersen_graph(), k=4)


def test_weighted_symmetrize_keeps_spectrum():
    """Test that a reversible directed adjacency is symmetrized by its weights"""
    A = np.array([[0, 2], [1, 1]])
    S = weighted_symmetrize(A, [2, 1])
    np.testing.assert_allclose(S, S.T)
    report = spectral_report(A, weights=[2, 1])
    np.testing.assert_allclose(report.eigenvalues, [2, -1], atol=1e-10)
    assert report.lambda_max_nontrivial == pytest.approx(1.0)


def test_beta_sweep_and_verdict():
    """Test the least constants C for lambda <= C k^beta"""
    report = spectral_report(complete_graph(4))
    sweep = beta_sweep(report, [0.5, 1.0])
    assert sweep[0.5] == pytest.approx(1 / np.sqrt(3))
    assert sweep[1.0] == pytest.approx(1 / 3)
    assert nearly_ramanujan_verdict(report, 0.5, 1.0)
    assert not nearly_ramanujan_verdict(report, 0.5, 0.5)


def test_same_invariants():
    """Test invariants under relabelling and between different graphs"""
    A = cycle_graph(5)
    perm = [2, 0, 4, 1, 3]
    assert same_invariants(A, A[np.ix_(perm, perm)])
    assert not same_invariants(A, complete_graph(5))


if __name__ == '__main__':
    unittest.main()
