"""Finite-deterministic DEVS models: specification, simulation and interchange.

The pieces fit together like this: :mod:`fddevs.core` holds immutable
atomic and coupled specifications, :mod:`fddevs.sim` runs them, and
:mod:`fddevs.xfd`, :mod:`fddevs.scxml` and :mod:`fddevs.uml` move them in
and out of XML, SCXML and UML XMI. :mod:`fddevs.efp` ships the
experimental-frame/processor reference model.
"""

from importlib.resources import files

from .core import (
    EMPTY_BAG,
    INFINITY,
    AtomicSpec,
    Bag,
    CoupledSpec,
    Coupling,
    CouplingKind,
    ExternalTransition,
    InternalTransition,
    LambdaEntry,
    Message,
    ModelRef,
    ModelRegistry,
    Violation,
    apply_bag,
    delta_con,
    delta_ext,
    delta_int,
    output,
    time_advance,
    validate_atomic,
    validate_coupled,
)
from .errors import (
    CycleDetected,
    DialectMismatchError,
    FddevsError,
    ModelFileNotFound,
    SimulationError,
    TransformError,
    UnknownStateError,
    ValidationFailed,
    XmlFormatError,
)
from .sim import EventKind, Trace, TraceEvent, flatten, initialize, next_event_time, run_until, simulate, step
from .xfd import (
    emit_atomic_xml,
    emit_coupled_xml,
    load_model_tree,
    parse_atomic_xml,
    parse_coupled_xml,
    parse_model_xml,
    validate_document,
    write_model_tree,
)


def data_path(*parts: str):
    """Path of a file shipped in the package's ``data`` directory."""
    return files(__name__).joinpath("data", *parts)


__all__ = [name for name in dir() if not name.startswith("_") and name != "files"]
