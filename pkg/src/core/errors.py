# core/errors.py

"""
Error hierarchy for the lab.

Every failure raised by the numerical modules derives from ErgoLabError so the
command-line runner can map it onto an exit status.
"""

from typing import Any, Dict, Optional


class ErgoLabError(Exception):
    """Base class for all lab errors"""
    pass


class InputError(ErgoLabError, ValueError):
    """An argument violates an operation's precondition"""
    pass


class DegenerateInputError(InputError):
    """Input lies on a degenerate set (e.g. exactly on a heteroclinic cycle)"""
    pass


class ConfigurationError(ErgoLabError):
    """A budget or setting cannot support the requested computation"""
    pass


class ConstructionError(ErgoLabError):
    """A constructed object cannot meet one of its defining properties"""

    def __init__(self, property_name: str, message: str):
        self.property_name = property_name
        super().__init__(f"property {property_name}: {message}")


class ResourceError(ErgoLabError):
    """A solver input exceeds the configured size limits"""
    pass


class InvariantViolation(ErgoLabError):
    """A mathematical invariant failed during a computation"""

    def __init__(self, message: str, record: Optional[Dict[str, Any]] = None):
        self.record = record or {}
        super().__init__(message)
