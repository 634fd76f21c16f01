import unittest
from unittest.mock import patch

import pytest

from errors import AtFloor, AtSurface
from graphs import level as level_module
from graphs.level import (
    CPI_COLUMNS,
    DOWN,
    HORIZONTAL,
    OK,
    SUPERSINGULAR,
    UP,
    CpiHistogram,
    CpiSample,
    _odd_part,
    cpi_distribution_experiment,
    expected_direction_counts,
    level_descriptor,
    navigate_vertical,
    vertical_chain,
    volcano_depth,
)
from numtheory.arith import factor_int, valuation
from numtheory.curve import curve_invariants, is_supersingular, random_curve
from numtheory.fields import PrimeField
from utils import derive_rng


def curves_on_volcano(F, ell, seed, count, min_height=1, small_conductor=False):
    """Ordinary curves with v_ell(c_pi) >= min_height and d_K not -3 or -4."""
    rng = derive_rng(seed, ell)
    found = []
    for _ in range(3000):
        C = random_curve(F, rng)
        if is_supersingular(C):
            continue
        inv = curve_invariants(C)
        if inv.d_K in (-3, -4) or valuation(inv.c_pi, ell) < min_height:
            continue
        if small_conductor and any(p > 3 for p in factor_int(inv.c_pi).primes()):
            continue
        found.append(C)
        if len(found) == count:
            return found
    raise AssertionError(f"only {len(found)} curves on an {ell}-volcano of height >= {min_height}")


class TestExpectedDirectionCounts(unittest.TestCase):
    def test_surface_of_a_volcano(self):
        self.assertEqual(expected_direction_counts(-23, 2, 1, 0), {UP: 0, DOWN: 1, HORIZONTAL: 2})
        self.assertEqual(expected_direction_counts(-15, 3, 2, 0), {UP: 0, DOWN: 3, HORIZONTAL: 1})
        self.assertEqual(expected_direction_counts(-7, 5, 1, 0), {UP: 0, DOWN: 6, HORIZONTAL: 0})

    def test_floor_and_interior(self):
        self.assertEqual(expected_direction_counts(-23, 2, 1, 1), {UP: 1, DOWN: 0, HORIZONTAL: 0})
        self.assertEqual(expected_direction_counts(-23, 2, 3, 1), {UP: 1, DOWN: 2, HORIZONTAL: 0})

    def test_no_volcano(self):
        self.assertEqual(expected_direction_counts(-23, 3, 0, 0), {UP: 0, DOWN: 0, HORIZONTAL: 2})
        self.assertEqual(expected_direction_counts(-23, 5, 0, 0), {UP: 0, DOWN: 0, HORIZONTAL: 0})


@pytest.mark.parametrize("ell", [2, 3])
def test_direction_counts_match_volcano_shape(f1009, ell):
    """Test that the observed up/down/horizontal counts match the level"""
    for C in curves_on_volcano(f1009, ell, 1, 5):
        inv = curve_invariants(C)
        volcano = volcano_depth(C, ell)
        assert 0 <= volcano.depth_below <= volcano.v_c_pi == valuation(inv.c_pi, ell)
        assert volcano.counts() == expected_direction_counts(inv.d_K, ell, volcano.v_c_pi, volcano.v_c_E)
        assert sum(volcano.counts().values()) == len(volcano.neighbors)


def test_velu_exploration_matches_modular(f1009):
    """Test that Velu neighbors reproduce the modular-polynomial depth search"""
    C = curves_on_volcano(f1009, 2, 2, 1)[0]
    modular = volcano_depth(C, 2)
    with patch.object(level_module.config, "modular_levels", ()):
        velu = volcano_depth(C, 2)
    assert velu.depth_below == modular.depth_below
    assert velu.neighbors == modular.neighbors


class TestVerticalNavigation(unittest.TestCase):
    def setUp(self):
        F = PrimeField(1009)
        self.C = curves_on_volcano(F, 2, 3, 1)[0]
        self.volcano = volcano_depth(self.C, 2)
        self.v = self.volcano.v_c_pi

    def test_up_to_surface_then_down_to_floor(self):
        top = navigate_vertical(self.C, 2, UP, self.v - self.volcano.depth_below)
        self.assertTrue(volcano_depth(top, 2).is_on_surface)
        self.assertEqual(top.trace, self.C.trace)
        chain = vertical_chain(top, 2, DOWN, self.v)
        self.assertEqual(len(chain), self.v)
        for phi in chain:
            self.assertEqual(phi.degree, 2)
        floor = chain[-1].codomain
        self.assertEqual(volcano_depth(floor, 2).depth_below, 0)
        with self.assertRaises(AtSurface):
            vertical_chain(top, 2, UP, 1)
        with self.assertRaises(AtFloor):
            vertical_chain(floor, 2, DOWN, 1)

    def test_zero_steps_and_bad_direction(self):
        self.assertIs(navigate_vertical(self.C, 2, UP, 0), self.C)
        with self.assertRaises(ValueError):
            vertical_chain(self.C, 2, "sideways", 1)
        with self.assertRaises(ValueError):
            vertical_chain(self.C, 2, UP, -1)


def test_level_descriptor(f1009):
    """Test that c_E is assembled from the per-prime valuations and divides c_pi"""
    C = curves_on_volcano(f1009, 2, 4, 1, small_conductor=True)[0]
    desc = level_descriptor(C)
    inv = desc.invariants
    assert desc.skipped == []
    assert inv.c_pi % desc.c_E == 0
    assert set(desc.depths) == set(factor_int(inv.c_pi).primes())
    out = desc.to_dict()
    assert out["c_E"] == desc.c_E
    assert "seconds" not in out["depths"]["2"]
    assert "seconds" in desc.to_dict(timings=True)["depths"]["2"]


def test_level_descriptor_skips_large_primes(f1009):
    """Test that primes above the isogeny bound are reported, not explored"""
    C = curves_on_volcano(f1009, 2, 5, 1)[0]
    with patch.object(level_module.config, "max_isogeny_degree", 1):
        desc = level_descriptor(C)
    assert desc.c_E is None
    assert 2 in desc.skipped
    assert desc.depths == {}


class TestCpiDistribution(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.histogram = cpi_distribution_experiment((1000, 3000), 40, seed=5)

    def test_sample_invariants(self):
        self.assertEqual(len(self.histogram.samples), 40)
        for s in self.histogram.ok:
            self.assertEqual(s.d_pi, s.t * s.t - 4 * s.q)
            self.assertEqual(-s.d_pi % (s.c_pi * s.c_pi), 0)
            self.assertLessEqual(s.P_c_pi, s.c_pi)
            self.assertEqual(list(s.to_dict()), CPI_COLUMNS)

    def test_summary_adds_up(self):
        summary = self.histogram.summary()
        self.assertEqual(summary["samples"], summary["ok"] + summary["supersingular"] + summary["factorization_timeout"])
        for key in ("fraction_c_pi_one", "fraction_d_pi_squarefree", "fraction_odd_part_squarefree"):
            self.assertTrue(0.0 <= summary[key] <= 1.0)
        self.assertEqual(set(summary["tail"]), {"2", "3", "5", "10", "20", "50"})

    def test_deterministic_across_threads(self):
        pooled = cpi_distribution_experiment((1000, 3000), 40, seed=5, threads=3)
        self.assertEqual([s.to_dict() for s in pooled.samples], [s.to_dict() for s in self.histogram.samples])

    def test_bad_range(self):
        with self.assertRaises(ValueError):
            cpi_distribution_experiment((3, 100), 5, seed=0)
        with self.assertRaises(ValueError):
            cpi_distribution_experiment((100, 50), 5, seed=0)


def histogram_of(conductors):
    samples = [CpiSample(1009, 1, 1, 5, OK, d_pi=-4011, c_pi=c, P_c_pi=max(c, 1)) for c in conductors]
    return CpiHistogram(samples + [CpiSample(1009, 0, 1, 0, SUPERSINGULAR)])


@pytest.mark.parametrize(
    "conductors, passed",
    [
        ([1] * 6 + [3] * 4, True),
        ([1] * 6 + [7] * 4, True),
        ([1] * 8 + [3] * 2, False),
        ([1] * 5 + [3] * 5, False),
        ([1] * 6 + [53] * 4, False),
        ([1] * 6 + [11] * 3 + [3], True),
        ([], False),
    ],
)
def test_distribution_gate(conductors, passed):
    """Test the share band for c_pi = 1 and the 5/beta tail bound"""
    assert histogram_of(conductors).passes_gate() is passed


def test_odd_part():
    """Test removal of the power of two"""
    assert _odd_part(12) == 3
    assert _odd_part(8) == 1
    assert _odd_part(15) == 15


if __name__ == '__main__':
    unittest.main()
