# core/registry.py

"""
Experiment Registry - maps experiment kinds and oracle names to handlers.

The runner and the oracle command both look up callables here instead of
branching on names, so new experiment kinds only need a registration.
"""

import logging
from typing import Any, Callable, Dict, List, Optional

logger = logging.getLogger(__name__)


class ExperimentRegistry:
    """Manages handler registration and discovery"""

    def __init__(self, label: str = "experiment"):
        self._label = label
        self._handlers: Dict[str, Callable[..., Any]] = {}
        self._metadata: Dict[str, Dict[str, Any]] = {}

    def register(self, name: str, handler: Callable[..., Any],
                 metadata: Optional[Dict[str, Any]] = None):
        """
        Register a handler with the registry.

        Args:
            name: Unique handler identifier
            handler: Callable implementing the experiment or oracle
            metadata: Optional metadata (e.g. CSV headers, description)
        """
        if name in self._handlers:
            raise ValueError(f"{self._label} '{name}' is already registered")

        self._handlers[name] = handler
        self._metadata[name] = metadata or {}
        logger.debug(f"Registered {self._label}: {name}")

    def get(self, name: str) -> Optional[Callable[..., Any]]:
        """
        Get a handler by name.

        Args:
            name: Handler identifier

        Returns:
            Handler or None if not found
        """
        return self._handlers.get(name)

    def exists(self, name: str) -> bool:
        return name in self._handlers

    def list_names(self) -> List[str]:
        """Get sorted list of registered names"""
        return sorted(self._handlers.keys())

    def get_metadata(self, name: str) -> Optional[Dict[str, Any]]:
        return self._metadata.get(name)

    def decorator(self, name: str, **metadata: Any) -> Callable[[Callable[..., Any]], Callable[..., Any]]:
        """Register the decorated function under name"""
        def wrap(handler: Callable[..., Any]) -> Callable[..., Any]:
            self.register(name, handler, metadata)
            return handler
        return wrap
