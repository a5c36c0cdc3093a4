import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fisheyebev.distortion import (
    DistortionCoeffs,
    build_lut,
    lut_theta_d_from_theta,
    lut_theta_from_theta_d,
    theta_d_from_theta,
    theta_d_max,
    theta_from_theta_d_exact,
)
from fisheyebev.errors import DomainError, MonotonicityViolation, OutOfRange

from conftest import K_FIXTURE


def poly_oracle(theta, c):
    """Literal term-by-term evaluation of the distortion polynomial."""
    return theta * (
        1.0
        + c.k1 * theta**2
        + c.k2 * theta**4
        + c.k3 * theta**6
        + c.k4 * theta**8
    )


class TestForwardPolynomial:
    def test_zero_angle(self, k_coeffs):
        assert theta_d_from_theta(0.0, k_coeffs) == 0.0

    def test_identity_when_undistorted(self, zero_coeffs):
        assert theta_d_from_theta(0.5, zero_coeffs) == pytest.approx(0.5, abs=0)

    def test_matches_scalar_oracle(self, k_coeffs):
        got = theta_d_from_theta(0.5, k_coeffs)
        assert got == pytest.approx(poly_oracle(0.5, k_coeffs), rel=1e-14)

    def test_array_input(self, k_coeffs):
        thetas = np.linspace(0.0, math.pi / 2, 57)
        got = theta_d_from_theta(thetas, k_coeffs)
        want = [poly_oracle(t, k_coeffs) for t in thetas]
        np.testing.assert_allclose(got, want, rtol=1e-13)

    def test_domain_error(self, k_coeffs):
        with pytest.raises(DomainError):
            theta_d_from_theta(-0.1, k_coeffs)
        with pytest.raises(DomainError):
            theta_d_from_theta(math.pi / 2 + 0.01, k_coeffs)


class TestExactInverse:
    def test_zero(self, k_coeffs):
        assert theta_from_theta_d_exact(0.0, k_coeffs) == pytest.approx(0.0, abs=1e-12)

    def test_identity_when_undistorted(self, zero_coeffs):
        assert theta_from_theta_d_exact(0.7, zero_coeffs) == pytest.approx(0.7, abs=1e-11)

    def test_round_trip(self, k_coeffs):
        theta_d = theta_d_from_theta(0.9, k_coeffs)
        assert theta_from_theta_d_exact(theta_d, k_coeffs) == pytest.approx(0.9, abs=1e-10)

    def test_out_of_range(self, k_coeffs):
        with pytest.raises(OutOfRange):
            theta_from_theta_d_exact(theta_d_max(k_coeffs) + 0.1, k_coeffs)
        with pytest.raises(OutOfRange):
            theta_from_theta_d_exact(-0.01, k_coeffs)

    @settings(max_examples=50, deadline=None)
    @given(theta=st.floats(min_value=0.0, max_value=math.pi / 2))
    def test_round_trip_property(self, theta):
        theta_d = theta_d_from_theta(theta, K_FIXTURE)
        back = theta_from_theta_d_exact(theta_d, K_FIXTURE)
        assert back == pytest.approx(theta, abs=1e-10)


class TestLutConstruction:
    def test_identity_map(self, zero_coeffs):
        table = build_lut(zero_coeffs)
        np.testing.assert_array_equal(table.theta_grid, table.theta_d_grid)

    def test_default_grid_count(self, k_coeffs):
        assert build_lut(k_coeffs).n_grids == 900

    def test_grid_matches_forward_map_pointwise(self, k_coeffs):
        table = build_lut(k_coeffs)
        recomputed = theta_d_from_theta(table.theta_grid, k_coeffs)
        np.testing.assert_array_equal(table.theta_d_grid, recomputed)

    def test_starts_at_zero_and_increases(self, k_coeffs):
        table = build_lut(k_coeffs)
        assert table.theta_d_grid[0] == 0.0
        assert np.all(np.diff(table.theta_d_grid) > 0.0)

    def test_monotonicity_violation_reports_index(self):
        pathological = DistortionCoeffs(k1=-1.0)
        with pytest.raises(MonotonicityViolation) as excinfo:
            build_lut(pathological)
        assert excinfo.value.index > 0


class TestLutLookup:
    def test_node_hit_is_exact(self, k_coeffs):
        table = build_lut(k_coeffs)
        for i in (0, 1, 450, 898, 899):
            got = lut_theta_from_theta_d(table, float(table.theta_d_grid[i]))
            assert got == table.theta_grid[i]

    def test_identity_map_interpolation(self, zero_coeffs):
        table = build_lut(zero_coeffs)
        assert lut_theta_from_theta_d(table, 0.3) == pytest.approx(0.3, abs=1e-15)

    def test_forward_lookup(self, k_coeffs):
        table = build_lut(k_coeffs)
        got = lut_theta_d_from_theta(table, 0.4)
        assert got == pytest.approx(theta_d_from_theta(0.4, k_coeffs), abs=1e-6)

    def test_sweep_against_exact_solver(self, k_coeffs):
        table = build_lut(k_coeffs)
        lo, hi = table.theta_d_range
        theta_d = np.linspace(lo, hi, 2000)
        approx = lut_theta_from_theta_d(table, theta_d)
        exact = theta_from_theta_d_exact(theta_d, k_coeffs)
        assert np.abs(approx - exact).max() < 1e-3

    def test_out_of_range_raises_not_clamps(self, k_coeffs):
        table = build_lut(k_coeffs)
        with pytest.raises(OutOfRange):
            lut_theta_from_theta_d(table, table.theta_d_range[1] + 1e-6)
        with pytest.raises(OutOfRange):
            lut_theta_from_theta_d(table, -1e-9)
