"""Exception types shared by every sgdl module.

Each error carries a ``kind`` (the class name) plus the module and
operation it originated from, so the CLI can emit a machine-readable
error document.
"""

from __future__ import annotations

import functools


class SGDLError(Exception):
    """Base class for all library errors."""

    def __init__(self, message: str = "", *, module: str | None = None,
                 operation: str | None = None):
        super().__init__(message)
        self.module = module
        self.operation = operation

    @property
    def kind(self) -> str:
        return type(self).__name__

    def to_dict(self) -> dict:
        return {
            "error": self.kind,
            "module": self.module,
            "operation": self.operation,
            "message": str(self),
        }


# atomic-model
class NoRelativeSystem(SGDLError):
    pass


class DegenerateTransform(SGDLError):
    pass


# potentials
class NonPositiveDistance(SGDLError):
    pass


class NotClosedShell(SGDLError):
    pass


class QuadratureNonConvergence(SGDLError):
    pass


class DegenerateFit(SGDLError):
    pass


class EmptyGrid(SGDLError):
    pass


# quantum-engine
class KindMismatch(SGDLError):
    pass


class UnknownLabel(SGDLError):
    pass


class DimensionMismatch(SGDLError):
    pass


class NonOrthonormalBasis(SGDLError):
    pass


class InvalidState(SGDLError):
    pass


# dynamics
class GridTooCoarse(SGDLError):
    pass


class NormDrift(SGDLError):
    pass


class InvalidParameter(SGDLError):
    pass


# harness
class ConfigParse(SGDLError):
    pass


class UnknownScenario(SGDLError):
    pass


def provenance(module: str, operation: str):
    """Stamp errors escaping the wrapped function with their origin.

    Errors already stamped by an inner call keep the innermost origin.
    """

    def wrap(func):
        @functools.wraps(func)
        def inner(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except SGDLError as exc:
                if exc.module is None:
                    exc.module = module
                    exc.operation = operation
                raise

        return inner

    return wrap
