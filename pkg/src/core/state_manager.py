# core/state_manager.py

"""
Run State Manager - tracks the lifecycle of one experiment run.

A run moves PENDING -> VALIDATED -> RUNNING -> CHECKING -> COMPLETED, or to
FAILED from any active state. The transition history is written into the
run manifest.
"""

import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, List, Optional, Set

logger = logging.getLogger(__name__)


class RunState(str, Enum):
    """Lifecycle states of an experiment run"""
    PENDING = "pending"
    VALIDATED = "validated"
    RUNNING = "running"
    CHECKING = "checking"
    COMPLETED = "completed"
    FAILED = "failed"


@dataclass
class StateTransition:
    """Records a state transition event"""
    from_state: RunState
    to_state: RunState
    timestamp: datetime
    reason: str
    metadata: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'from': self.from_state.value,
            'to': self.to_state.value,
            'timestamp': self.timestamp.isoformat(),
            'reason': self.reason,
        }


class RunStateManager:
    """Manages run state, transitions, and transition history"""

    def __init__(self):
        self._current_state = RunState.PENDING
        self._history: List[StateTransition] = []
        self._transition_rules: Dict[RunState, Set[RunState]] = {
            RunState.PENDING: {RunState.VALIDATED, RunState.FAILED},
            RunState.VALIDATED: {RunState.RUNNING, RunState.FAILED},
            RunState.RUNNING: {RunState.CHECKING, RunState.FAILED},
            RunState.CHECKING: {RunState.COMPLETED, RunState.FAILED},
            RunState.COMPLETED: set(),
            RunState.FAILED: set(),
        }

    @property
    def current_state(self) -> RunState:
        return self._current_state

    @property
    def history(self) -> List[StateTransition]:
        """Get a copy of the transition history"""
        return self._history.copy()

    def can_transition_to(self, target_state: RunState,
                          from_state: Optional[RunState] = None) -> bool:
        state = from_state or self._current_state
        return target_state in self._transition_rules.get(state, set())

    def transition_to(self, target_state: RunState, reason: str = "",
                      metadata: Optional[Dict[str, Any]] = None) -> bool:
        """
        Transition to a new state if valid.

        Args:
            target_state: Desired target state
            reason: Reason for transition
            metadata: Additional transition metadata

        Returns:
            True if transition was successful
        """
        if not self.can_transition_to(target_state):
            logger.warning(
                f"Invalid run transition from {self._current_state.value} "
                f"to {target_state.value}"
            )
            return False

        transition = StateTransition(
            from_state=self._current_state,
            to_state=target_state,
            timestamp=datetime.now(timezone.utc),
            reason=reason,
            metadata=metadata or {},
        )
        self._history.append(transition)
        self._current_state = target_state
        logger.debug(f"Run state: {transition.from_state.value} -> {target_state.value} ({reason})")
        return True

    def history_records(self) -> List[Dict[str, Any]]:
        return [t.to_dict() for t in self._history]
