"""
Unit tests for finite-horizon diagnostics
=========================================

Schedules, per-point oscillation, the divergence functionals, meta-level
gaps and the parameter scan.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.core.errors import InputError
from src.diagnostics import (
    NON_STATISTICAL,
    NOT_FLAGGED,
    DivergenceEstimate,
    DivergenceKind,
    bifurcation_probe,
    decay_fit,
    delta_e_estimate,
    delta_l1_estimate,
    divergence_curve,
    geometric_schedule,
    harmonic_gap,
    hk_parameter_scan,
    interpolation_bound,
    merge_schedules,
    meta_gap_curve,
    nonstatistical_flag,
    oscillation_score,
    triangle_terms,
    validate_schedule,
)
from src.empirics import meta_empirical
from src.systems import SystemSpec


class TestSchedules:
    """Test horizon schedules and their interpolation error"""

    def test_geometric_shape(self):
        s = geometric_schedule(10, 1000, 1.2)
        assert s[0] == 10 and s[-1] == 1000
        assert all(b > a for a, b in zip(s, s[1:]))
        assert all(b <= math.ceil(1.2 * a) for a, b in zip(s, s[1:]))

    def test_single_horizon(self):
        assert geometric_schedule(7, 7) == [7]

    def test_geometric_rejects(self):
        with pytest.raises(InputError):
            geometric_schedule(20, 10)
        with pytest.raises(InputError):
            geometric_schedule(1, 10, ratio=1.0)
        with pytest.raises(InputError):
            geometric_schedule(0, 10)

    def test_merge(self):
        assert merge_schedules([1, 3, 9], [2, 3]) == [1, 2, 3, 9]

    def test_validate(self):
        validate_schedule([2, 5, 9], 2, 9)
        with pytest.raises(InputError):
            validate_schedule([2, 5], 2, 9)
        with pytest.raises(InputError):
            validate_schedule([2, 2, 9], 2, 9)
        with pytest.raises(InputError):
            validate_schedule([9], 9, 2)

    def test_harmonic_gap(self):
        assert harmonic_gap(0, 1) == pytest.approx(1.0)
        assert harmonic_gap(1, 3) == pytest.approx(0.5 + 1 / 3)

    def test_interpolation_bound(self):
        assert interpolation_bound([1, 2], 1.0) == pytest.approx(1.0)
        assert interpolation_bound([1.0, 2.0], 0.5, continuous_time=True) == pytest.approx(0.5)
        assert interpolation_bound([5], 1.0) == 0.0


class TestOscillation:
    """Test the per-point oscillation score"""

    def test_fixed_point_scores_zero(self):
        report = oscillation_score(SystemSpec.logistic(4.0), 0.75, 10, 100)
        assert report.score == 0.0
        assert not report.flagged

    def test_half_rotation(self):
        report = oscillation_score(SystemSpec.rotation(0.5), 0.0, 1, 4, schedule=[1, 2, 3, 4],
                                   threshold=0.1)
        assert report.score == pytest.approx(0.25)
        assert report.argmax == (1, 2)
        assert report.flagged
        assert len(report.pairs) == 6
        assert report.restricted(2, 4) == pytest.approx(1 / 12)
        assert report.interpolation_bound == pytest.approx(0.5)

    def test_to_dict(self):
        report = oscillation_score(SystemSpec.rotation(0.5), 0.0, 1, 4, mesh=1.0 / 64)
        out = report.to_dict()
        assert out['mesh_error'] == 1.0 / 64
        assert out['flagged'] == report.flagged
        assert 'matrix' not in out

    def test_schedule_outside_window(self):
        with pytest.raises(InputError):
            oscillation_score(SystemSpec.rotation(0.5), 0.0, 2, 4, schedule=[1, 2, 4])

    def test_restricted_needs_entries(self):
        report = oscillation_score(SystemSpec.rotation(0.5), 0.0, 10, 20)
        with pytest.raises(InputError):
            report.restricted(30, 40)


class TestDivergence:
    """Test delta_e and delta_l1 estimates"""

    @pytest.fixture
    def sample(self):
        return [0.05, 0.2, 0.45, 0.7, 0.9]

    def test_identity_self_divergence(self, sample):
        spec = SystemSpec.identity()
        estimate = delta_e_estimate(spec, spec, 5, 50, sample)
        assert estimate.value == 0.0
        assert estimate.kind == DivergenceKind.DELTA_E

    def test_l1_below_e(self, sample):
        spec_h, spec_g = SystemSpec.rotation(0.3), SystemSpec.rotation(0.31)
        e = delta_e_estimate(spec_h, spec_g, 5, 60, sample, seed=3)
        l1 = delta_l1_estimate(spec_h, spec_g, 5, 60, sample, seed=3)
        assert l1.value <= e.value + 1e-12
        assert e.seed == 3
        assert e.sample_size == len(sample)

    def test_curve_nonincreasing(self, sample):
        spec = SystemSpec.logistic(3.9)
        curve = divergence_curve(spec, spec, [5, 10, 20, 40], 80, sample, ratio=1.3)
        assert curve.is_nonincreasing()
        assert [n for n, _ in curve.points] == [5, 10, 20, 40]
        assert set([5, 10, 20, 40]) <= set(curve.schedule)

    def test_curve_needs_increasing_list(self, sample):
        spec = SystemSpec.rotation(0.1)
        with pytest.raises(InputError):
            divergence_curve(spec, spec, [10, 5], 20, sample)
        with pytest.raises(InputError):
            divergence_curve(spec, spec, [5, 30], 20, sample)

    def test_different_spaces(self, sample):
        with pytest.raises(InputError):
            delta_e_estimate(SystemSpec.logistic(3.0), SystemSpec.rotation(0.1), 2, 10, sample)

    def test_estimate_model_checks_horizons(self):
        with pytest.raises(ValidationError):
            DivergenceEstimate(kind=DivergenceKind.DELTA_L1, N=10, M=5, sample_size=1,
                               value=0.0, schedule_length=1)

    def test_flag_verdicts(self):
        sample = [0.0, 0.25]
        flagged = nonstatistical_flag(SystemSpec.rotation(0.5), sample, [1, 2], 4, d_threshold=0.0)
        assert flagged.verdict == NON_STATISTICAL
        quiet = nonstatistical_flag(SystemSpec.identity(), sample, [1, 2], 4)
        assert quiet.verdict == NOT_FLAGGED
        assert quiet.to_dict()['curve'][0] == {'N': 1, 'value': 0.0}

    def test_triangle_inequality(self, sample):
        terms = triangle_terms(SystemSpec.rotation(0.3), SystemSpec.rotation(0.31), 5, 40, sample)
        assert terms['lhs'] <= terms['rhs'] + 1e-12


class TestMetaGap:
    """Test lifted gaps between consecutive pushforwards"""

    def test_identity_gap_zero(self):
        records = meta_gap_curve(SystemSpec.identity(), [0.1, 0.5, 0.8], [1, 4, 16])
        assert all(r.gap == pytest.approx(0.0, abs=1e-15) for r in records)

    def test_half_rotation_at_one(self):
        (record,) = meta_gap_curve(SystemSpec.rotation(0.5), [0.0, 0.25], [1])
        assert record.gap == pytest.approx(0.25)
        assert record.bound == 0.25
        assert record.within_bound
        assert record.ordered
        assert record.to_dict()['within_bound'] is True

    def test_bounds_hold_on_logistic(self):
        sample = list(np.linspace(0.05, 0.95, 12))
        records = meta_gap_curve(SystemSpec.logistic(3.8), sample, [1, 2, 5, 10, 20], mesh=1.0 / 4096)
        assert all(r.within_bound and r.ordered for r in records)

    def test_rejects_empty_sample(self):
        with pytest.raises(InputError):
            meta_gap_curve(SystemSpec.identity(), [], [1])

    def test_sample_above_cap(self):
        with pytest.raises(InputError):
            meta_gap_curve(SystemSpec.identity(), [0.1, 0.2, 0.3], [1], atom_cap=2)

    def test_bifurcation_probe(self):
        sample = [0.2, 0.6]
        identity = SystemSpec.identity()
        target = meta_empirical(identity, sample, 1)
        assert bifurcation_probe([identity, identity], [1, 3], target, sample) == pytest.approx([0.0, 0.0], abs=1e-15)
        with pytest.raises(InputError):
            bifurcation_probe([identity], [1, 3], target, sample)


class TestScans:
    """Test the logistic scan and decay fits"""

    def test_superattracting_parameter(self):
        (row,) = hk_parameter_scan([2.0], 100, 400, [0.1, 0.3, 0.6, 0.9])
        assert row.delta_e <= 0.02
        assert row.q50 <= row.q90 <= row.max_score

    def test_lambda_range(self):
        with pytest.raises(InputError):
            hk_parameter_scan([4.5], 10, 20, [0.1])

    def test_inverse_power(self):
        C, exponent = decay_fit([(n, 5.0 / n) for n in (10, 20, 40, 80)])
        assert C == pytest.approx(5.0)
        assert exponent == pytest.approx(-1.0)

    def test_constant_series(self):
        _, exponent = decay_fit([(n, 0.3) for n in (1, 2, 3)])
        assert exponent == pytest.approx(0.0, abs=1e-12)

    def test_fit_needs_three_points(self):
        with pytest.raises(InputError):
            decay_fit([(1, 1.0), (2, 0.5)])
        with pytest.raises(InputError):
            decay_fit([(1, 1.0), (2, 0.0), (3, 0.1)])
