"""
Unit tests for the Invariant Monitor
====================================
"""

import pytest

from src.core.errors import InvariantViolation
from src.monitoring.invariants import CheckStatus, InvariantMonitor


class TestInvariantMonitor:
    """Test suite for InvariantMonitor"""

    @pytest.fixture
    def monitor(self):
        return InvariantMonitor()

    def test_empty_monitor_passes(self, monitor):
        assert monitor.all_passed
        assert monitor.summary() == {'total': 0, 'passed': 0, 'failed': 0}
        monitor.raise_if_failed()

    def test_at_most_with_tolerance(self, monitor):
        assert monitor.check_at_most('gap', 0.25 + 1e-13, 0.25, tolerance=1e-12).passed
        assert not monitor.check_at_most('gap', 0.26, 0.25).passed
        assert monitor.failures[0].details['tolerance'] == 0.0

    def test_within_is_two_sided(self, monitor):
        assert monitor.check_within('limsup', 0.66, 2 / 3, tolerance=0.02).passed
        assert not monitor.check_within('limsup', 0.5, 2 / 3, tolerance=0.02).passed
        assert not monitor.check_within('limsup', 0.7, 2 / 3, tolerance=0.02).passed
        assert monitor.failures[0].bound == pytest.approx(2 / 3)

    def test_at_least_and_true(self, monitor):
        assert monitor.check_at_least('margin', 0.1, 0.0).passed
        assert monitor.check_true('monotone', True, horizons=3).passed
        assert monitor.check_true('monotone', 0).status == CheckStatus.FAILED

    def test_summary_counts(self, monitor):
        monitor.check_true('a', True)
        monitor.check_true('b', False)
        monitor.check_true('c', True)
        assert monitor.summary() == {'total': 3, 'passed': 2, 'failed': 1}
        assert not monitor.all_passed

    def test_records_serialize(self, monitor):
        monitor.check_at_most('bound', 0.1, 0.2, n=4)
        (record,) = monitor.to_records()
        assert record['name'] == 'bound'
        assert record['status'] == 'passed'
        assert record['details'] == {'tolerance': 0.0, 'n': 4}
        assert 'T' in record['timestamp']

    def test_raise_carries_first_failure(self, monitor):
        monitor.check_true('ok', True)
        monitor.check_at_most('first', 2.0, 1.0)
        monitor.check_at_most('second', 3.0, 1.0)
        with pytest.raises(InvariantViolation) as exc:
            monitor.raise_if_failed()
        assert exc.value.record['name'] == 'first'
        assert exc.value.record['value'] == 2.0
