"""
Tests for the single-field numerical core
"""

import math
import time
import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from src.errors import InvalidParameterError, StabilityError
from src.fields import (
    FieldMap,
    Grid,
    LateralKernel,
    StepParams,
    count_bubbles,
    decode_peak,
    euler_step,
    gaussian_bubble,
    lateral_term,
    make_dog_kernel,
)


def brute_force_lateral(u: np.ndarray, kernel: LateralKernel) -> np.ndarray:
    height, width = u.shape
    r = kernel.radius
    out = np.zeros_like(u)
    for y in range(height):
        for x in range(width):
            total = 0.0
            for dy in range(-r, r + 1):
                for dx in range(-r, r + 1):
                    sx, sy = x - dx, y - dy
                    if 0 <= sx < width and 0 <= sy < height:
                        total += kernel.weight(dx, dy) * u[sy, sx]
            out[y, x] = total
    return out


class TestDogKernel(unittest.TestCase):
    def setUp(self):
        """Reference kernel used throughout"""
        self.kernel = make_dog_kernel(1.0, 1.0, 0.5, 3.0, 5)

    def test_center_value(self):
        """Center weight is a_exc - a_inh"""
        self.assertAlmostEqual(self.kernel.weight(0, 0), 0.5, places=15)

    def test_symmetry(self):
        """w(d) = w(-d)"""
        self.assertEqual(self.kernel.weight(2, 3), self.kernel.weight(-2, -3))
        self.assertEqual(self.kernel.weight(2, 3), self.kernel.weight(3, 2))

    def test_unit_offset_value(self):
        """w(1, 0) evaluates the difference of gaussians directly"""
        expected = math.exp(-0.5) - 0.5 * math.exp(-1.0 / 18.0)
        self.assertAlmostEqual(self.kernel.weight(1, 0), expected, places=14)

    def test_outside_radius_is_zero(self):
        """Offsets beyond the radius carry no weight"""
        self.assertEqual(self.kernel.weight(6, 0), 0.0)
        self.assertEqual(self.kernel.weight(0, -6), 0.0)

    def test_invalid_parameters(self):
        """Bad parameters raise InvalidParameterError"""
        with self.assertRaises(InvalidParameterError):
            make_dog_kernel(0.0, 1.0, 0.5, 3.0, 5)
        with self.assertRaises(InvalidParameterError):
            make_dog_kernel(1.0, 3.0, 0.5, 1.0, 5)
        with self.assertRaises(InvalidParameterError):
            make_dog_kernel(1.0, 1.0, -0.1, 3.0, 5)
        with self.assertRaises(InvalidParameterError):
            make_dog_kernel(1.0, 1.0, 0.5, 3.0, 0)
        with self.assertRaises(InvalidParameterError):
            make_dog_kernel(1.0, 1.0, 0.5, 3.0, 5, global_inhibition=-0.1)

    def test_global_term_makes_kernel_nonzero(self):
        """A zero table with global inhibition still acts"""
        self.assertTrue(LateralKernel.null().is_zero)
        kernel = make_dog_kernel(1.0, 1.0, 0.0, 3.0, 2, global_inhibition=0.1)
        self.assertFalse(kernel.is_zero)
        self.assertEqual(kernel.global_inhibition, 0.1)


class TestLateralTerm(unittest.TestCase):
    def setUp(self):
        """Small grid and kernel"""
        self.grid = Grid(12, 12)
        self.kernel = make_dog_kernel(1.0, 1.0, 0.5, 3.0, 3)
        self.rng = np.random.default_rng(7)

    def test_zero_field(self):
        """u = 0 gives L = 0"""
        field = FieldMap.zeros(self.grid)
        assert_array_equal(lateral_term(field, self.kernel), np.zeros(self.grid.shape))

    def test_impulse_reproduces_kernel(self):
        """An impulse at c gives L(x) = w(x - c), clipped to the grid"""
        u = np.zeros(self.grid.shape)
        u[1, 2] = 1.0
        result = lateral_term(FieldMap(self.grid, u), self.kernel)
        for y in range(12):
            for x in range(12):
                self.assertEqual(result[y, x], self.kernel.weight(x - 2, y - 1))

    def test_matches_brute_force(self):
        """Random fields agree with the nested-loop sum"""
        for _ in range(200):
            u = self.rng.random(self.grid.shape)
            expected = brute_force_lateral(u, self.kernel)
            result = lateral_term(FieldMap(self.grid, u), self.kernel)
            assert_allclose(result, expected, rtol=1e-12, atol=1e-12)

    def test_non_square_grid(self):
        """Rows are y and columns are x"""
        grid = Grid(9, 5)
        u = self.rng.random(grid.shape)
        assert_allclose(lateral_term(FieldMap(grid, u), self.kernel), brute_force_lateral(u, self.kernel),
                        rtol=1e-12, atol=1e-12)

    def test_global_inhibition(self):
        """The global term subtracts g times the total activity everywhere"""
        kernel = make_dog_kernel(1.0, 1.0, 0.5, 3.0, 3, global_inhibition=0.05)
        for _ in range(20):
            u = self.rng.random(self.grid.shape)
            expected = brute_force_lateral(u, kernel) - 0.05 * u.sum()
            assert_allclose(lateral_term(FieldMap(self.grid, u), kernel), expected, rtol=1e-12, atol=1e-12)

    def test_large_grid(self):
        """A 160 x 160 field is handled cell by cell like the nested-loop sum"""
        grid = Grid(160, 160)
        u = self.rng.random(grid.shape)
        start = time.perf_counter()
        result = lateral_term(FieldMap(grid, u), self.kernel)
        self.assertLess(time.perf_counter() - start, 1.0)
        self.assertEqual(result.shape, (160, 160))
        r = self.kernel.radius
        for x, y in [(0, 0), (159, 159), (0, 80), (80, 0), (1, 158), (80, 80), (37, 121), (158, 2)]:
            total = 0.0
            for dy in range(-r, r + 1):
                for dx in range(-r, r + 1):
                    sx, sy = x - dx, y - dy
                    if 0 <= sx < 160 and 0 <= sy < 160:
                        total += self.kernel.weight(dx, dy) * u[sy, sx]
            self.assertAlmostEqual(result[y, x], total, places=12)

    def test_null_kernel(self):
        """A zero kernel or no kernel contributes nothing"""
        u = self.rng.random(self.grid.shape)
        assert_array_equal(lateral_term(FieldMap(self.grid, u), LateralKernel.null()), np.zeros(self.grid.shape))
        assert_array_equal(lateral_term(FieldMap(self.grid, u), None), np.zeros(self.grid.shape))


class TestEulerStep(unittest.TestCase):
    def setUp(self):
        """40 x 40 field with dt/tau = 0.1"""
        self.grid = Grid()
        self.params = StepParams(dt=1.0)
        self.field = FieldMap.zeros(self.grid, tau=10.0)

    def test_fixed_point(self):
        """u = I with a zero kernel stays put"""
        u = np.full(self.grid.shape, 0.3)
        field = FieldMap(self.grid, u, tau=10.0)
        result = euler_step(field, u, LateralKernel.null(), self.params)
        assert_allclose(result.u, u, rtol=0, atol=1e-15)

    def test_relaxation(self):
        """Constant input relaxes geometrically: u_n = 0.6 (1 - 0.9^n)"""
        start = time.perf_counter()
        field = self.field
        drive = np.full(self.grid.shape, 0.6)
        field = euler_step(field, drive, None, self.params)
        assert_allclose(field.u, 0.06, atol=1e-15)
        for n in range(2, 101):
            field = euler_step(field, drive, None, self.params)
        assert_allclose(field.u, 0.6 * (1.0 - 0.9 ** 100), atol=1e-12)
        self.assertLess(np.abs(field.u - 0.6).max(), 0.006)
        self.assertLess(time.perf_counter() - start, 1.0)

    def test_saturation(self):
        """Huge input clamps at u_max"""
        result = euler_step(self.field, np.full(self.grid.shape, 1e6), None, self.params)
        assert_array_equal(result.u, np.ones(self.grid.shape))

    def test_negative_input_clamps_at_zero(self):
        """Activity never drops below u_min"""
        result = euler_step(self.field, np.full(self.grid.shape, -5.0), None, self.params)
        assert_array_equal(result.u, np.zeros(self.grid.shape))

    def test_resting_level(self):
        """The resting level adds to the drive"""
        field = FieldMap(self.grid, np.full(self.grid.shape, 0.5), tau=10.0, resting_level=-0.5)
        result = euler_step(field, np.zeros(self.grid.shape), None, self.params)
        assert_allclose(result.u, 0.4, atol=1e-15)

    def test_per_cell_resting_level(self):
        """An array resting level acts cell by cell"""
        h = -np.linspace(0.0, 0.5, 1600).reshape(self.grid.shape)
        field = FieldMap(self.grid, np.full(self.grid.shape, 0.5), tau=10.0, resting_level=h)
        result = euler_step(field, np.zeros(self.grid.shape), None, self.params)
        assert_allclose(result.u, 0.45 + 0.1 * h, atol=1e-15)

    def test_argument_untouched(self):
        """euler_step returns a new field"""
        euler_step(self.field, np.full(self.grid.shape, 0.6), None, self.params)
        assert_array_equal(self.field.u, np.zeros(self.grid.shape))

    def test_stability_bound(self):
        """dt/tau >= 1 raises StabilityError"""
        field = FieldMap.zeros(self.grid, tau=1.0, name="focus")
        with self.assertRaises(StabilityError):
            euler_step(field, np.zeros(self.grid.shape), None, self.params)

    def test_shape_mismatch(self):
        """Input of the wrong shape is rejected"""
        with self.assertRaises(InvalidParameterError):
            euler_step(self.field, np.zeros((3, 3)), None, self.params)


class TestDecodePeak(unittest.TestCase):
    def setUp(self):
        """Empty 40 x 40 grid"""
        self.grid = Grid()

    def test_empty_field(self):
        """Nothing above threshold decodes to None"""
        self.assertIsNone(decode_peak(FieldMap.zeros(self.grid), 0.1))

    def test_symmetric_bubble(self):
        """A symmetric bubble decodes to its center"""
        u = gaussian_bubble(self.grid, (10, 20), 2.0)
        peak = decode_peak(FieldMap(self.grid, u), 0.5)
        self.assertAlmostEqual(peak.location[0], 10.0, delta=0.1)
        self.assertAlmostEqual(peak.location[1], 20.0, delta=0.1)
        self.assertAlmostEqual(peak.amplitude, 1.0)

    def test_strongest_of_two(self):
        """The component holding the global maximum wins"""
        u = gaussian_bubble(self.grid, (5, 5), 2.0, 0.9) + gaussian_bubble(self.grid, (30, 30), 2.0, 0.6)
        peak = decode_peak(FieldMap(self.grid, u), 0.5)
        self.assertAlmostEqual(peak.location[0], 5.0, delta=0.1)
        self.assertAlmostEqual(peak.location[1], 5.0, delta=0.1)

    def test_count_bubbles(self):
        """Every component is reported, strongest first"""
        u = (gaussian_bubble(self.grid, (5, 5), 2.0, 0.7) + gaussian_bubble(self.grid, (30, 10), 2.0, 0.9)
             + gaussian_bubble(self.grid, (20, 32), 2.0, 0.4))
        peaks = count_bubbles(FieldMap(self.grid, u), 0.5)
        self.assertEqual(len(peaks), 2)
        self.assertAlmostEqual(peaks[0].location[0], 30.0, delta=0.1)
        self.assertAlmostEqual(peaks[1].location[1], 5.0, delta=0.1)


if __name__ == '__main__':
    unittest.main()
