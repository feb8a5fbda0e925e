"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: configuration problems exit
with 2, numerical failures with 3.
"""

from __future__ import annotations

__all__ = [
    "ConfigError",
    "NonMonotoneError",
    "TruncationMarginError",
    "MissedIndexError",
    "NonContractionError",
    "IllConditionedError",
    "NoRootError",
    "NumericalFailure",
]


class ConfigError(ValueError):
    """Invalid user-supplied configuration (file or flags)."""


class NonMonotoneError(RuntimeError):
    """The confining potential stops increasing beyond the support radius."""


class TruncationMarginError(RuntimeError):
    """Requested energy too close to the potential value at the grid edge."""


class MissedIndexError(RuntimeError):
    """Sturm counts became inconsistent during bracket refinement."""


class NonContractionError(RuntimeError):
    """Picard iteration failed to contract (energy below the safe regime)."""


class IllConditionedError(RuntimeError):
    """A regression matrix exceeded the allowed condition number."""


class NoRootError(RuntimeError):
    """A quantization relation has no root in the admissible range."""


class NumericalFailure(RuntimeError):
    """An internal cross-check failed beyond its tolerance."""
