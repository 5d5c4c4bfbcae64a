"""
Unit tests for annulus diffeomorphisms and the Anosov-Katok stage
=================================================================
"""

import numpy as np
import pytest
from pydantic import ValidationError

from src.core.errors import ConstructionError, InputError
from src.systems import (
    DiffeoSpec,
    FiberAxis,
    FiberWarp,
    OrbitBudget,
    RadialShear,
    SystemSpec,
    ak_map,
    band_occupancy,
    boundary_points,
    build_bump_diffeo,
    commutation_residual,
    covering_residual,
    lift_diffeo,
    orbit_array,
    rational_residual,
    roundtrip_error,
    step,
    verify_sublemma,
)
from src.systems.diffeo import annulus_grid

GOLDEN = (5 ** 0.5 - 1) / 2


class TestDiffeoSpec:
    """Test primitive warps and their composition"""

    @pytest.fixture
    def shear(self):
        return RadialShear(knots=[0.0, 0.5, 1.0], offsets=[0.0, 0.3, 0.1])

    def test_identity(self):
        pts = annulus_grid(10)
        assert np.array_equal(DiffeoSpec.identity().forward(pts), pts)
        assert DiffeoSpec.identity().is_identity

    def test_shear_inverse(self, shear):
        spec = DiffeoSpec(primitives=[shear])
        assert roundtrip_error(spec, grid_n=50) <= 1e-12
        np.testing.assert_allclose(spec.jacobian_determinant(annulus_grid(5)), 1.0)

    def test_fiber_warp_validation(self):
        with pytest.raises(ValidationError):
            FiberWarp(axis=FiberAxis.RADIUS, knots=[0.0, 1.0], base_values=[0.0, 0.5],
                      target_values=[0.0, 1.0])
        with pytest.raises(ValidationError):
            FiberWarp(axis=FiberAxis.RADIUS, knots=[0.0, 0.5, 1.0], base_values=[0.0, 0.5, 1.0],
                      target_values=[0.0, 0.6, 1.0], weight_knots=[0.0, 1.0],
                      weight_values=[0.0, 1.0])

    def test_then_applies_in_order(self, shear):
        warp = FiberWarp(axis=FiberAxis.RADIUS, knots=[0.0, 0.5, 1.0],
                         base_values=[0.0, 0.25, 1.0], target_values=[0.0, 0.25, 1.0])
        first = DiffeoSpec(primitives=[warp])
        second = DiffeoSpec(primitives=[shear])
        pts = annulus_grid(8)
        np.testing.assert_array_equal(first.then(second).forward(pts),
                                      second.forward(first.forward(pts)))

    def test_json_round_trip_exact(self):
        spec = build_bump_diffeo(0.1, 0.9, 0.05, 0.05, 0.9)
        assert DiffeoSpec.from_json(spec.to_json()) == spec

    def test_lift_multiplies_degree(self):
        g_hat = build_bump_diffeo(0.1, 0.9, 0.05, 0.05, 0.9)
        g = lift_diffeo(g_hat, 3)
        assert [p.q for p in g.primitives] == [3, 3]
        assert lift_diffeo(g_hat, 1) is g_hat
        with pytest.raises(ValueError):
            lift_diffeo(g_hat, 0)


class TestBumpDiffeo:
    """Test the construction and its numerical verification"""

    @pytest.fixture
    def g_hat(self):
        return build_bump_diffeo(0.1, 0.9, 0.05, 0.05, 0.9)

    def test_sublemma_passes(self, g_hat):
        report = verify_sublemma(g_hat, 0.1, 0.9, 0.05, 0.05, 0.9, grid_n=100)
        assert report.passed
        assert report.identity_margin > 0.0
        assert report.area_margin > 0.0
        assert report.squeeze_margin > 0.0
        assert report.to_dict()['passed'] is True

    def test_orientation_preserving(self, g_hat):
        grid = annulus_grid(100)
        assert grid.shape == (10_000, 2)
        assert np.all(g_hat.jacobian_determinant(grid) > 0.0)
        assert np.all(lift_diffeo(g_hat, 2).jacobian_determinant(grid) > 0.0)

    def test_identity_fails_area_and_squeeze(self):
        # r1 = 0.1 > eps = 0.05, and the identity keeps B1 at area 0.04
        report = verify_sublemma(DiffeoSpec.identity(), 0.1, 0.9, 0.05, 0.05, 0.5, grid_n=100)
        assert report.identity_ok
        assert not report.area_ok
        assert report.area_estimate == pytest.approx(0.8 * 0.05)
        assert not report.squeeze_ok
        assert report.max_radius >= 0.1
        assert not report.passed

    def test_roundtrip(self, g_hat):
        assert roundtrip_error(g_hat) <= 1e-9

    def test_unreachable_area(self):
        with pytest.raises(ConstructionError) as exc:
            build_bump_diffeo(0.1, 0.9, 0.05, 0.05, 0.999)
        assert exc.value.property_name == "(ii)"

    def test_parameter_ranges(self):
        with pytest.raises(InputError):
            build_bump_diffeo(0.9, 0.1, 0.05, 0.05, 0.9)
        with pytest.raises(InputError):
            build_bump_diffeo(0.1, 0.9, 0.05, 0.2, 0.9)

    def test_grid_floor(self, g_hat):
        with pytest.raises(InputError):
            verify_sublemma(g_hat, 0.1, 0.9, 0.05, 0.05, 0.9, grid_n=50)

    def test_lift_commutes_with_rotation(self, g_hat):
        g = lift_diffeo(g_hat, 2)
        assert commutation_residual(g, 1, 2, grid_n=100) <= 1e-9
        assert covering_residual(g_hat, 2, grid_n=100) <= 1e-9
        assert rational_residual(g, 1, 2, grid_n=100) <= 1e-9

    def test_unlifted_does_not_commute(self, g_hat):
        assert commutation_residual(g_hat, 1, 2, grid_n=100) > 1e-3


class TestAnosovKatokMap:
    """Test the conjugated rotation and its orbit statistics"""

    @pytest.fixture
    def spec(self):
        g = lift_diffeo(build_bump_diffeo(0.1, 0.9, 0.05, 0.05, 0.9), 2)
        return ak_map(None, g, GOLDEN)

    def test_alpha_range(self):
        with pytest.raises(InputError):
            ak_map(None, DiffeoSpec.identity(), 1.0)

    def test_band_occupancy_near_theta(self, spec):
        assert band_occupancy(spec, (0.5, 0.25), 20000, 0.05, q=2) == pytest.approx(0.05, abs=5e-3)

    def test_band_occupancy_needs_ak(self):
        with pytest.raises(InputError):
            band_occupancy(SystemSpec.rotation(0.1), 0.0, 10, 0.05)

    def test_boundary_fixed(self, spec):
        pts = boundary_points(spec, 16)
        circle = np.column_stack([np.zeros(16), (np.arange(16) + 0.5) / 16])
        np.testing.assert_allclose(pts, circle, atol=1e-12)

    def test_identity_conjugacy_is_rotation(self):
        spec = ak_map(None, DiffeoSpec.identity(), GOLDEN)
        pts = orbit_array(spec, (0.3, 0.1), OrbitBudget(iterations=500))
        rotation = orbit_array(SystemSpec.rotation(GOLDEN), 0.1, OrbitBudget(iterations=500))
        assert np.all(pts[:, 0] == 0.3)
        np.testing.assert_allclose(pts[:, 1], rotation, rtol=0, atol=1e-15)
        r, t = step(spec, (0.3, 0.1))
        assert r == 0.3
        assert t == pytest.approx(0.1 + GOLDEN, abs=1e-15)

    def test_conjugated_radius_invariant(self, spec):
        shear = DiffeoSpec(primitives=[RadialShear(knots=[0.0, 0.5, 1.0], offsets=[0.0, 0.3, 0.1])])
        sheared = ak_map(shear, spec.family.g, GOLDEN)
        for system in (spec, sheared):
            pts = orbit_array(system, (0.5, 0.25), OrbitBudget(iterations=10_000))
            base = system.family.conjugacy().inverse(pts)
            assert np.ptp(base[:, 0]) <= 1e-9
