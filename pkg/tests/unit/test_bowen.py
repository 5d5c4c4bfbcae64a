"""
Unit tests for the Bowen eye surrogate
======================================
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.core.errors import DegenerateInputError, InputError
from src.systems import (
    BowenParams,
    Saddle,
    bowen_running_averages,
    bowen_segments,
    occupation_masses,
    saddle_passage,
    total_time,
)


class TestBowenParams:
    """Test the closed-form limits"""

    def test_gaunersdorfer_values(self, gaunersdorfer_params):
        p = gaunersdorfer_params
        assert p.lam == 2.0
        assert p.sigma == 2.0
        assert p.upper_average == pytest.approx(2 / 3)
        assert p.lower_average == pytest.approx(1 / 3)
        assert p.non_degenerate

    def test_degenerate_product(self):
        p = BowenParams(alpha_plus=2.0, alpha_minus=1.0, beta_plus=1.0, beta_minus=2.0)
        assert not p.non_degenerate
        assert p.upper_average == pytest.approx(p.lower_average)

    def test_eigenvalues_must_be_positive(self):
        with pytest.raises(ValidationError):
            BowenParams(alpha_plus=0.0, alpha_minus=1.0, beta_plus=1.0, beta_minus=1.0)

    def test_eigenvalue_lookup(self, gaunersdorfer_params):
        assert gaunersdorfer_params.eigenvalues(Saddle.A) == (2.0, 1.0)
        assert gaunersdorfer_params.eigenvalues(Saddle.B) == (2.0, 1.0)


class TestSaddlePassage:
    """Test a single box passage"""

    def test_linearised_passage(self, gaunersdorfer_params):
        u_out, sojourn = saddle_passage(gaunersdorfer_params, Saddle.A, 0.1)
        assert sojourn == pytest.approx(math.log(10.0))
        assert u_out == pytest.approx(0.01)

    def test_on_cycle_is_degenerate(self, gaunersdorfer_params):
        with pytest.raises(DegenerateInputError):
            saddle_passage(gaunersdorfer_params, Saddle.A, 0.0)

    def test_outside_box(self, gaunersdorfer_params):
        with pytest.raises(InputError):
            saddle_passage(gaunersdorfer_params, Saddle.B, 1.5)


class TestRunningAverages:
    """Test the passage recursion and occupation bookkeeping"""

    def test_window_between_limits(self, gaunersdorfer_params):
        records = bowen_running_averages(gaunersdorfer_params, 0.1, 60)
        window = [r.average for r in records[29:60]]
        assert max(window) == pytest.approx(2 / 3, abs=0.02)
        assert min(window) == pytest.approx(1 / 3, abs=0.02)

    def test_degenerate_converges(self):
        p = BowenParams(alpha_plus=2.0, alpha_minus=1.0, beta_plus=1.0, beta_minus=2.0)
        window = [r.average for r in bowen_running_averages(p, 0.1, 60)[29:60]]
        assert max(window) - min(window) <= 0.02

    def test_no_underflow(self, gaunersdorfer_params):
        # sojourns double every passage; u itself would underflow long before this
        records = bowen_running_averages(gaunersdorfer_params, 0.1, 200)
        assert all(np.isfinite(r.sojourn) for r in records)
        assert records[-1].saddle == Saddle.B

    def test_saddles_alternate(self, gaunersdorfer_params):
        records = bowen_running_averages(gaunersdorfer_params, 0.5, 4)
        assert [r.saddle for r in records] == [Saddle.A, Saddle.B, Saddle.A, Saddle.B]
        assert [r.passage for r in records] == [1, 2, 3, 4]

    def test_total_time_accounting(self, gaunersdorfer_params):
        records = bowen_running_averages(gaunersdorfer_params, 0.1, 30)
        assert total_time(gaunersdorfer_params, 0.1, 30) == records[-1].exit_time + 1.0

    def test_invalid_start(self, gaunersdorfer_params):
        with pytest.raises(DegenerateInputError):
            bowen_running_averages(gaunersdorfer_params, 0.0, 10)
        with pytest.raises(InputError):
            bowen_running_averages(gaunersdorfer_params, 1.0, 10)
        with pytest.raises(InputError):
            bowen_running_averages(gaunersdorfer_params, 0.1, 1)

    def test_segments(self, gaunersdorfer_params):
        locations, durations = bowen_segments(gaunersdorfer_params, 0.1, 3)
        assert list(locations) == [1.0, 0.5, 0.0, 0.5, 1.0, 0.5]
        assert durations.sum() == pytest.approx(total_time(gaunersdorfer_params, 0.1, 3))

    def test_occupation_rows_are_probabilities(self, gaunersdorfer_params):
        end = total_time(gaunersdorfer_params, 0.1, 10)
        times = np.linspace(0.5, end, 25)
        masses = occupation_masses(gaunersdorfer_params, 0.1, 10, times)
        np.testing.assert_allclose(masses.sum(axis=1), 1.0, atol=1e-12)
        assert np.all(masses >= 0.0)

    def test_occupation_times_range(self, gaunersdorfer_params):
        with pytest.raises(InputError):
            occupation_masses(gaunersdorfer_params, 0.1, 4, np.array([0.0]))
