# monitoring/invariants.py

"""
Invariant Monitor

Collects the invariant checks performed during a run. Results feed the run
manifest, and any failure turns into exit code 3 at the CLI.
"""

import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, List, Optional

from src.core.errors import InvariantViolation

logger = logging.getLogger(__name__)


class CheckStatus(Enum):
    """Outcome of one invariant check"""
    PASSED = "passed"
    FAILED = "failed"


@dataclass
class CheckResult:
    """Result of an invariant check"""
    name: str
    status: CheckStatus
    value: Optional[float] = None
    bound: Optional[float] = None
    details: Dict[str, Any] = field(default_factory=dict)
    timestamp: datetime = field(default_factory=lambda: datetime.now(timezone.utc))

    @property
    def passed(self) -> bool:
        return self.status == CheckStatus.PASSED

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'status': self.status.value,
            'value': self.value,
            'bound': self.bound,
            'details': self.details,
            'timestamp': self.timestamp.isoformat(),
        }


class InvariantMonitor:
    """
    Records invariant checks for one run.

    Checks never raise on their own; call raise_if_failed once the run's
    outputs are written so the failing record is both persisted and reported.
    """

    def __init__(self):
        self._results: List[CheckResult] = []

    def record(self, name: str, passed: bool, value: Optional[float] = None,
               bound: Optional[float] = None, **details: Any) -> CheckResult:
        result = CheckResult(
            name=name,
            status=CheckStatus.PASSED if passed else CheckStatus.FAILED,
            value=value,
            bound=bound,
            details=details,
        )
        self._results.append(result)
        if not passed:
            logger.error(f"Invariant {name} violated: value={value} bound={bound} {details}")
        return result

    def check_at_most(self, name: str, value: float, bound: float, tolerance: float = 0.0,
                      **details: Any) -> CheckResult:
        """value <= bound + tolerance"""
        return self.record(name, value <= bound + tolerance, value, bound,
                           tolerance=tolerance, **details)

    def check_at_least(self, name: str, value: float, bound: float, **details: Any) -> CheckResult:
        return self.record(name, value >= bound, value, bound, **details)

    def check_within(self, name: str, value: float, target: float, tolerance: float,
                     **details: Any) -> CheckResult:
        """|value - target| <= tolerance"""
        return self.record(name, abs(value - target) <= tolerance, value, target,
                           tolerance=tolerance, **details)

    def check_true(self, name: str, condition: bool, **details: Any) -> CheckResult:
        return self.record(name, bool(condition), **details)

    @property
    def results(self) -> List[CheckResult]:
        return list(self._results)

    @property
    def failures(self) -> List[CheckResult]:
        return [r for r in self._results if not r.passed]

    @property
    def all_passed(self) -> bool:
        return not self.failures

    def summary(self) -> Dict[str, Any]:
        return {
            'total': len(self._results),
            'passed': len(self._results) - len(self.failures),
            'failed': len(self.failures),
        }

    def to_records(self) -> List[Dict[str, Any]]:
        return [r.to_dict() for r in self._results]

    def raise_if_failed(self) -> None:
        """
        Raises:
            InvariantViolation: carrying the first failing record
        """
        if self.failures:
            first = self.failures[0]
            raise InvariantViolation(f"invariant {first.name} violated", first.to_dict())
