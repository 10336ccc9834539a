"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class FddevsError(Exception):
    """Base class for all errors raised by fddevs."""


class UnknownStateError(FddevsError, KeyError):
    def __init__(self, model: str, state: str):
        super().__init__(f"model {model!r} has no state {state!r}")
        self.model = model
        self.state = state

    def __str__(self) -> str:
        return self.args[0]


class NoInternalTransitionError(FddevsError):
    def __init__(self, model: str, state: str):
        super().__init__(f"model {model!r} has no internal transition from {state!r}")
        self.model = model
        self.state = state


class ValidationFailed(FddevsError):
    """Raised when a specification or document has error-level violations."""

    def __init__(self, violations, context: str = ""):
        self.violations = list(violations)
        self.context = context
        lines = [str(v) for v in self.violations]
        head = f"{context}: " if context else ""
        super().__init__(head + "; ".join(lines))


class SimulationError(FddevsError):
    pass


class TimeRegressionError(SimulationError):
    pass


class ZeroTimeLoopError(SimulationError):
    pass


class XmlFormatError(FddevsError, ValueError):
    """Malformed XML, wrong root element, or mixed dialect spellings."""


class DialectMismatchError(XmlFormatError):
    pass


class ModelFileNotFound(FddevsError, FileNotFoundError):
    pass


class CycleDetected(FddevsError):
    pass


class TransformError(FddevsError, ValueError):
    """A model transformation could not be carried out.

    ``code`` is a short token such as ``missing-target`` or
    ``bidirectional-port`` so callers can branch on the failure kind.
    """

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


class InvalidParams(FddevsError, ValueError):
    pass


class MalformedTraceError(FddevsError, ValueError):
    pass
