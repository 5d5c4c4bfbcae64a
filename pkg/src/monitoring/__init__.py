"""
Monitoring Module

Invariant checks recorded during experiment runs.
"""

from .invariants import CheckResult, CheckStatus, InvariantMonitor

__all__ = [
    'CheckResult',
    'CheckStatus',
    'InvariantMonitor',
]
