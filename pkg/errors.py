"""Exception bases shared by every package.

The CLI maps ConfigError to exit code 2 and NumericFailure to exit code 3.
"""

from __future__ import annotations

from typing import Any, Dict, Optional


class ConfigError(ValueError):
    """Invalid input, configuration, bounds or domain."""


class NumericFailure(RuntimeError):
    """A solve, training step or optimization produced an unusable result."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message)
        self.diagnostics: Dict[str, Any] = dict(diagnostics or {})


__all__ = ["ConfigError", "NumericFailure"]
