import unittest

import numpy as np
import pytest
from sympy import divisors

from errors import ClassNumberTooLarge, DiscriminantMismatch
from numtheory.arith import kronecker, primes_upto
from numtheory.classgroup import (
    QuadForm,
    analytic_class_number,
    build_cayley_graph,
    character_table,
    characters,
    compose,
    enumerate_class_group,
    prime_form,
    principal_form,
    reduce_form,
    reduced_forms,
    theta_coefficient,
    theta_matrix,
)


class TestForms(unittest.TestCase):
    def test_reduce_form(self):
        self.assertEqual(reduce_form(QuadForm(3, 1, 2)), QuadForm(2, -1, 3))
        self.assertEqual(reduce_form(QuadForm(2, 1, 3)), QuadForm(2, 1, 3))
        self.assertTrue(QuadForm(2, 1, 3).is_reduced())
        self.assertFalse(QuadForm(3, 1, 2).is_reduced())
        with self.assertRaises(ValueError):
            reduce_form(QuadForm(1, 3, 1))

    def test_composition_in_order_three_group(self):
        f = QuadForm(2, 1, 3)
        self.assertEqual(compose(f, f), f.inverse())
        self.assertEqual(compose(f, f.inverse()), principal_form(-23))
        self.assertEqual(compose(principal_form(-23), f), f)

    def test_composition_rejects_mixed_discriminants(self):
        with self.assertRaises(DiscriminantMismatch):
            compose(QuadForm(2, 1, 3), QuadForm(1, 0, 1))

    def test_principal_form(self):
        self.assertEqual(principal_form(-23), QuadForm(1, 1, 6))
        self.assertEqual(principal_form(-20), QuadForm(1, 0, 5))


def test_reduced_forms_of_minus_23():
    """Test the three reduced forms of discriminant -23"""
    assert reduced_forms(-23) == [QuadForm(1, 1, 6), QuadForm(2, -1, 3), QuadForm(2, 1, 3)]


def test_reduced_forms_bound():
    """Test that the class number bound is enforced"""
    with pytest.raises(ClassNumberTooLarge):
        reduced_forms(-23, bound=1)


@pytest.mark.parametrize("D, h", [(-3, 1), (-4, 1), (-12, 1), (-20, 2), (-23, 3), (-47, 5), (-56, 4), (-71, 7), (-84, 4), (-99, 2)])
def test_class_numbers(D, h):
    """Test enumerated class numbers against the analytic formula and known values"""
    G = enumerate_class_group(D)
    assert G.h == h
    assert analytic_class_number(D) == pytest.approx(h)


def test_group_structure():
    """Test the cyclic decompositions of small groups"""
    assert enumerate_class_group(-56).orders == [4]
    assert sorted(enumerate_class_group(-84).orders) == [2, 2]
    assert enumerate_class_group(-23).orders == [3]
    assert enumerate_class_group(-99).conductor == 3


def test_enumerate_rejects_non_discriminant():
    """Test that D = 3 mod 4 is refused"""
    with pytest.raises(ValueError):
        enumerate_class_group(-5)


def test_group_operations_agree_with_composition():
    """Test index arithmetic against form composition"""
    G = enumerate_class_group(-84)
    for i, f in enumerate(G.elements):
        for j, g in enumerate(G.elements):
            assert G.elements[G.product_index(i, j)] == compose(f, g)
        assert G.elements[G.inverse_index(i)] == f.inverse()


@pytest.mark.parametrize("D", [D for D in range(-3, -501, -1) if D % 4 in (0, 1)])
def test_composition_table_is_closed_and_associative(D):
    """Test closure, index agreement and associativity of Gauss composition"""
    G = enumerate_class_group(D)
    h = G.h
    table = np.zeros((h, h), dtype=np.int64)
    for i, f in enumerate(G.elements):
        for j, g in enumerate(G.elements):
            fg = compose(f, g)
            assert fg in G.index
            table[i, j] = G.index[fg]
            assert table[i, j] == G.product_index(i, j)
    k = np.arange(h)
    left = table[table[:, :, None], k[None, None, :]]
    right = table[k[:, None, None], table[None, :, :]]
    np.testing.assert_array_equal(left, right)
    np.testing.assert_array_equal(np.sort(table, axis=1), np.tile(k, (h, 1)))


def test_character_orthogonality():
    """Test that the character table is unitary up to the factor h"""
    for D in (-23, -56, -84):
        G = enumerate_class_group(D)
        X = character_table(G)
        assert X.shape == (G.h, G.h)
        np.testing.assert_allclose(X @ X.conj().T, G.h * np.eye(G.h), atol=1e-9)
        chars = characters(G)
        assert chars[0].is_trivial()
        assert sum(not chi.is_trivial() for chi in chars) == G.h - 1


def test_characters_are_homomorphisms():
    """Test chi(c_i c_j) = chi(c_i) chi(c_j)"""
    G = enumerate_class_group(-47)
    for chi in characters(G):
        for i in range(G.h):
            for j in range(G.h):
                assert chi(G.product_index(i, j)) == pytest.approx(chi(i) * chi(j))


class TestPrimeForms(unittest.TestCase):
    def test_split_prime(self):
        self.assertEqual(prime_form(-23, 2), (QuadForm(2, 1, 3), 2))
        form, mult = prime_form(-23, 3)
        self.assertEqual(mult, 2)
        self.assertEqual(form.discriminant, -23)

    def test_inert_prime(self):
        self.assertIsNone(prime_form(-23, 5))

    def test_ramified_prime_is_principal(self):
        self.assertEqual(prime_form(-23, 23), (QuadForm(1, 1, 6), 1))
        self.assertEqual(prime_form(-56, 2), (QuadForm(2, 0, 7), 1))

    def test_conductor_primes_are_skipped(self):
        self.assertIsNone(prime_form(-99, 3))

    def test_rejects_composite(self):
        with self.assertRaises(ValueError):
            prime_form(-23, 4)


def test_cayley_graph_minus_23():
    """Test that Cl(-23) with m = 2 is a 3-cycle and m = 3 doubles it"""
    triangle = np.ones((3, 3), dtype=np.int64) - np.eye(3, dtype=np.int64)
    X = build_cayley_graph(-23, 2)
    assert X.k == 2 and X.h == 3
    np.testing.assert_array_equal(X.adjacency, triangle)
    np.testing.assert_array_equal(build_cayley_graph(-23, 3).adjacency, 2 * triangle)


def test_cayley_ramified_principal_loop():
    """Test that a principal ramified generator adds one to the diagonal"""
    X = build_cayley_graph(-23, 23)
    assert np.trace(X.adjacency) >= 3
    assert all(row.sum() == X.k for row in X.adjacency)


@pytest.mark.parametrize("D", [-23, -47, -56, -84])
def test_cayley_graph_is_regular_and_symmetric(D):
    """Test regularity and symmetry of the Cayley graph"""
    X = build_cayley_graph(D, 13)
    A = X.adjacency
    np.testing.assert_array_equal(A, A.T)
    assert set(A.sum(axis=1)) == {X.k}


@pytest.mark.parametrize("D", [-3, -23, -56, -84])
def test_theta_coefficients_count_ideals(D):
    """Test that theta coefficients summed over classes count ideals of norm n"""
    G = enumerate_class_group(D)
    for n in range(1, 40):
        total = sum(theta_coefficient(G, f, n) for f in G.elements)
        assert total == sum(kronecker(D, d) for d in divisors(n))


@pytest.mark.parametrize("D", [-23, -47, -56, -84])
def test_prime_theta_matrices_sum_to_cayley_adjacency(D):
    """Test that the sum of M(l) over primes l <= m is the Cayley adjacency"""
    G = enumerate_class_group(D)
    total = sum(theta_matrix(G, ell) for ell in primes_upto(11))
    np.testing.assert_array_equal(total, build_cayley_graph(D, 11).adjacency)


def test_theta_coefficient_bounds():
    """Test the zero coefficient and the theta bound"""
    G = enumerate_class_group(-23)
    assert theta_coefficient(G, G.elements[0], 0) == 0
    with pytest.raises(ValueError):
        theta_coefficient(G, G.elements[0], 10 ** 9)


if __name__ == '__main__':
    unittest.main()
