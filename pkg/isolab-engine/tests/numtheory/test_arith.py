import unittest

import pytest
from sympy import factorint, jacobi_symbol

from errors import FactorizationTimeout
from numtheory.arith import (
    Factorization,
    factor_int,
    fundamental_discriminant,
    is_discriminant,
    is_fundamental,
    is_squarefree,
    kronecker,
    largest_prime_factor,
    primes_upto,
    square_part,
    valuation,
)
from utils import derive_rng


@pytest.mark.parametrize("D, n, expected", [
    (-23, 2, 1),
    (-23, 3, 1),
    (-23, 5, -1),
    (-23, 23, 0),
    (-4, 2, 0),
    (-3, 2, -1),
    (5, 2, -1),
    (-7, 4, 1),
    (-15, 8, 1),
])
def test_kronecker_values(D, n, expected):
    """Test that the Kronecker symbol matches hand-computed values, including even n"""
    assert kronecker(D, n) == expected


def test_kronecker_agrees_with_jacobi_on_odd_moduli():
    """Test that (D/n) equals the Jacobi symbol whenever n is odd"""
    for D in range(-60, 0):
        for n in range(1, 40, 2):
            assert kronecker(D, n) == jacobi_symbol(D % n, n)


def test_kronecker_rejects_nonpositive_modulus():
    """Test that n = 0 is refused"""
    with pytest.raises(ValueError):
        kronecker(-23, 0)


def test_square_part_examples():
    """Test the square part of a few integers"""
    assert square_part(1) == (1, 1)
    assert square_part(12) == (2, 3)
    assert square_part(72) == (6, 2)
    assert square_part(97) == (1, 97)


@pytest.mark.parametrize("n", [2, 360, 1001, 2 ** 20, 999983 * 1000003, 3 ** 7 * 11 ** 2 * 101])
def test_factor_int_multiplies_back(n):
    """Test that factorizations multiply back to n with prime bases"""
    fac = factor_int(n)
    product = 1
    for p, e in fac.factors:
        product *= p ** e
    assert product == n
    assert fac.primes() == sorted(fac.primes())


def test_factor_int_of_one_is_empty():
    """Test that 1 has no prime factors and P(1) = 1"""
    fac = factor_int(1)
    assert fac.factors == ()
    assert largest_prime_factor(fac) == 1


def test_largest_prime_factor():
    """Test P(n) on a composite"""
    assert largest_prime_factor(factor_int(2 * 3 * 3 * 37)) == 37


def test_factor_int_budget_exhaustion():
    """Test that a tiny effort budget ends in FactorizationTimeout"""
    with pytest.raises(FactorizationTimeout):
        factor_int(1000003 * 1000033, effort=1)


def test_factorization_rejects_wrong_product():
    """Test that inconsistent factor lists are refused"""
    with pytest.raises(ValueError):
        Factorization(12, ((2, 1), (3, 1)))


@pytest.mark.parametrize("n, factors", [(4, ((4, 1),)), (12, ((2, 1), (6, 1))), (1, ((1, 1),))])
def test_factorization_rejects_composite_factors(n, factors):
    """Test that a factor list multiplying back correctly still needs prime entries"""
    with pytest.raises(ValueError):
        Factorization(n, factors)


def test_kronecker_is_multiplicative():
    """Test (D/mn) = (D/m)(D/n) and (D1 D2/n) = (D1/n)(D2/n) on random triples"""
    rng = derive_rng(17)
    for _ in range(1000):
        D1, D2 = (int(x) for x in rng.integers(-10 ** 6, 10 ** 6, size=2))
        m, n = (int(x) for x in rng.integers(1, 10 ** 5, size=2))
        assert kronecker(D1, m * n) == kronecker(D1, m) * kronecker(D1, n)
        assert kronecker(D1 * D2, n) == kronecker(D1, n) * kronecker(D2, n)


def test_square_part_property():
    """Test n = c^2 d with d squarefree on random n below 2^40"""
    rng = derive_rng(19)
    for n in rng.integers(1, 2 ** 40, size=1000):
        n = int(n)
        c, d = square_part(n)
        assert c * c * d == n
        assert all(e == 1 for e in factorint(d).values())


def test_valuation():
    """Test p-adic valuations"""
    assert valuation(96, 2) == 5
    assert valuation(-45, 3) == 2
    assert valuation(7, 2) == 0
    with pytest.raises(ValueError):
        valuation(0, 2)


class TestFundamentalDiscriminant(unittest.TestCase):
    def test_fundamental_inputs(self):
        for D in (-3, -4, -7, -8, -20, -23, -24):
            self.assertEqual(fundamental_discriminant(D), (1, D))
            self.assertTrue(is_fundamental(D))

    def test_non_fundamental_inputs(self):
        self.assertEqual(fundamental_discriminant(-12), (2, -3))
        self.assertEqual(fundamental_discriminant(-16), (2, -4))
        self.assertEqual(fundamental_discriminant(-92), (2, -23))
        self.assertEqual(fundamental_discriminant(-99), (3, -11))
        self.assertFalse(is_fundamental(-12))

    def test_rejects_non_discriminants(self):
        for D in (-2, -5, 0, 5):
            with self.assertRaises(ValueError):
                fundamental_discriminant(D)
        self.assertFalse(is_discriminant(-6))
        self.assertFalse(is_discriminant(12))
        self.assertTrue(is_discriminant(-15))

    def test_squarefree(self):
        self.assertTrue(is_squarefree(-23))
        self.assertFalse(is_squarefree(-92))
        self.assertTrue(is_squarefree(30))


def test_primes_upto():
    """Test the prime sieve bounds are inclusive"""
    assert primes_upto(13) == [2, 3, 5, 7, 11, 13]
    assert primes_upto(1) == []


if __name__ == '__main__':
    unittest.main()
