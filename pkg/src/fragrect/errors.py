"""Exception taxonomy shared across the package."""

from __future__ import annotations

__all__ = ["DomainError", "ResourceCapError", "InfeasibleError", "ConfigError", "VerificationError"]


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ResourceCapError(RuntimeError):
    """A simulation exceeded its configured particle cap.

    Carries partial-state diagnostics: how many vertices were
    materialized and the last birth time processed.
    """

    def __init__(self, message: str, n_vertices: int = 0, t_reached: float = 0.0):
        super().__init__(message)
        self.n_vertices = n_vertices
        self.t_reached = t_reached


class InfeasibleError(RuntimeError):
    """An optimization problem has an empty feasible region.

    ``certificate`` describes the violated constraint.
    """

    def __init__(self, message: str, certificate: str = ""):
        super().__init__(message)
        self.certificate = certificate


class ConfigError(ValueError):
    """A run configuration failed validation."""


class VerificationError(RuntimeError):
    """A verification suite reported a failure."""
