"""The experimental frame / processor (ef-p) reference model.

A generator emits ``Job`` messages every ``gen_period`` until the
transducer's observation window closes and it sends ``Stop`` back. A
processor serves one job at a time for ``proc_time`` and drops jobs that
arrive while it is busy. Turnaround times are measured afterwards from a
trace, since a finite-state transducer cannot remember arrival times.

``oracle_trace`` predicts the output events by plain arithmetic, with no
reference to the simulator, so the two can be compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .core import (
    AtomicSpec,
    CoupledSpec,
    Coupling,
    ExternalTransition,
    InternalTransition,
    LambdaEntry,
    ModelRef,
    ModelRegistry,
)
from .errors import InvalidParams, MalformedTraceError
from .sim import EventKind, Trace, TraceEvent

GENERATOR = "EFP/EF/Generator"
TRANSDUCER = "EFP/EF/Transducer"
PROCESSOR = "EFP/Processor"


@dataclass(frozen=True)
class EfpParams:
    gen_period: float = 10.0
    proc_time: float = 5.0
    obs_time: float = 100.0

    def __post_init__(self):
        for field_name in ("gen_period", "proc_time", "obs_time"):
            value = getattr(self, field_name)
            try:
                v = float(value)
            except (TypeError, ValueError):
                raise InvalidParams(f"{field_name} must be a number, got {value!r}") from None
            if not math.isfinite(v) or v <= 0:
                raise InvalidParams(f"{field_name} must be finite and > 0, got {value!r}")
            object.__setattr__(self, field_name, v)


def build_generator(p: EfpParams) -> AtomicSpec:
    return AtomicSpec(
        name="Generator",
        states=("active", "passive"),
        inports=("stop",),
        outports=("out",),
        ta={"active": p.gen_period},
        lambdas=(LambdaEntry("active", "out", "Job"),),
        deltint=(InternalTransition("active", "active"),),
        # the transducer's Stop is the only label routed to "stop"
        deltext=(ExternalTransition("active", "Stop", "passive", True),),
    )


def build_processor(p: EfpParams) -> AtomicSpec:
    return AtomicSpec(
        name="Processor",
        states=("idle", "busy"),
        inports=("in",),
        outports=("out",),
        ta={"busy": p.proc_time},
        lambdas=(LambdaEntry("busy", "out", "Job"),),
        deltint=(InternalTransition("busy", "idle"),),
        deltext=(
            ExternalTransition("idle", "Job", "busy", True),
            # a job arriving while busy is dropped; the running job keeps its deadline
            ExternalTransition("busy", "Job", "busy", False),
        ),
    )


def build_transducer(p: EfpParams) -> AtomicSpec:
    return AtomicSpec(
        name="Transducer",
        states=("observing", "done"),
        inports=("arrived", "solved"),
        outports=("out",),
        ta={"observing": p.obs_time},
        lambdas=(LambdaEntry("observing", "out", "Stop"),),
        deltint=(InternalTransition("observing", "done"),),
        deltext=(ExternalTransition("observing", "Job", "observing", False),),
    )


def build_ef() -> CoupledSpec:
    return CoupledSpec(
        name="EF",
        models=(ModelRef("Generator"), ModelRef("Transducer")),
        couplings=(
            Coupling("Generator", "out", "Transducer", "arrived"),
            Coupling("Generator", "out", "EF", "out"),
            Coupling("EF", "in", "Transducer", "solved"),
            Coupling("Transducer", "out", "Generator", "stop"),
        ),
        inports=("in",),
        outports=("out",),
    )


def build_efp(p: EfpParams | None = None) -> ModelRegistry:
    """Registry with EFP (root), EF, Generator, Transducer and Processor."""
    p = p if p is not None else EfpParams()
    efp = CoupledSpec(
        name="EFP",
        models=(ModelRef("EF"), ModelRef("Processor")),
        couplings=(
            Coupling("EF", "out", "Processor", "in"),
            Coupling("Processor", "out", "EF", "in"),
        ),
    )
    return ModelRegistry.of(
        efp, build_ef(), build_generator(p), build_transducer(p), build_processor(p), root="EFP"
    )


def build_m1m2(m1_period: float = 5.0, m2_period: float = 9.0) -> ModelRegistry:
    """Two-component model M: M1 emits at its timeout, M2 keeps its deadline when M1 reports."""
    m1 = AtomicSpec(
        name="M1",
        states=("active", "passive"),
        inports=("in1", "in2"),
        outports=("out",),
        ta={"active": m1_period},
        lambdas=(LambdaEntry("active", "out", "M1OutputMessage"),),
        deltint=(InternalTransition("active", "passive"),),
        deltext=(ExternalTransition("passive", "M1InputMessage", "passive", True),),
    )
    m2 = AtomicSpec(
        name="M2",
        states=("active", "passive"),
        inports=("in1",),
        outports=("out1", "out2"),
        ta={"active": m2_period},
        lambdas=(LambdaEntry("active", "out2", "M1InputMessage"),),
        deltint=(InternalTransition("active", "passive"),),
        deltext=(ExternalTransition("active", "M1OutputMessage", "active", False),),
    )
    m = CoupledSpec(
        name="M",
        models=(ModelRef("M1"), ModelRef("M2")),
        couplings=(
            Coupling("M", "in", "M1", "in1"),
            Coupling("M1", "out", "M2", "in1"),
            Coupling("M2", "out2", "M1", "in2"),
            Coupling("M2", "out1", "M", "out"),
        ),
        inports=("in",),
        outports=("out",),
    )
    return ModelRegistry.of(m, m1, m2, root="M")


# --------------------------------------------------------------------------
# closed-form expectations


class OracleEvent(NamedTuple):
    t: float
    model: str
    port: str
    label: str


def oracle_trace(p: EfpParams, t_end: float) -> list[OracleEvent]:
    """Output events of the ef-p model up to ``t_end``, by arithmetic alone."""
    t_end = float(t_end)
    events: list[OracleEvent] = []
    horizon = min(t_end, p.obs_time)
    arrivals = []
    k = 1
    while k * p.gen_period <= horizon:
        arrivals.append(k * p.gen_period)
        k += 1
    busy_until = -math.inf
    for a in arrivals:
        events.append(OracleEvent(a, GENERATOR, "out", "Job"))
        # a job finishing at the same instant frees the server first
        if a >= busy_until:
            busy_until = a + p.proc_time
            if busy_until <= t_end:
                events.append(OracleEvent(busy_until, PROCESSOR, "out", "Job"))
    if p.obs_time <= t_end:
        events.append(OracleEvent(p.obs_time, TRANSDUCER, "out", "Stop"))
    return sorted(events)


@dataclass(frozen=True)
class TurnaroundReport:
    jobs_sent: int
    jobs_completed: int
    avg_turnaround: float | None

    def as_dict(self) -> dict:
        out = {"jobsSent": self.jobs_sent, "jobsCompleted": self.jobs_completed}
        if self.avg_turnaround is not None:
            out["avgTurnaround"] = self.avg_turnaround
        return out


def _leaf(path: str) -> str:
    return path.rsplit("/", 1)[-1]


def _input_ports(e: TraceEvent) -> list[str]:
    if e.kind not in (EventKind.EXTERNAL, EventKind.CONFLUENT) or not e.port:
        return []
    return e.port.split(";")


def turnaround_report(
    trace: Trace | list[TraceEvent], transducer: str = "Transducer", processor: str = "Processor"
) -> TurnaroundReport:
    """Pair accepted jobs with completions, first in first out.

    ``jobsSent`` counts messages on the transducer's ``arrived`` port and
    ``jobsCompleted`` those on ``solved``. A job counts as accepted when the
    processor enters ``busy`` from ``idle`` (or restarts it in a confluent
    step); the i-th completion is matched with the i-th accepted job.
    """
    events = trace.events if isinstance(trace, Trace) else list(trace)
    sent = completed = 0
    solved_at: list[float] = []
    accepted_at: list[float] = []
    for e in events:
        leaf = _leaf(e.model)
        if leaf == transducer:
            for port in _input_ports(e):
                if port == "arrived":
                    sent += 1
                elif port == "solved":
                    completed += 1
                    solved_at.append(e.t)
        elif leaf == processor and e.after == "busy":
            if (e.kind is EventKind.EXTERNAL and e.before == "idle") or e.kind is EventKind.CONFLUENT:
                accepted_at.append(e.t)
    if len(solved_at) > len(accepted_at):
        raise MalformedTraceError(
            f"{len(solved_at)} completions but only {len(accepted_at)} accepted jobs"
        )
    gaps = [done - start for start, done in zip(accepted_at, solved_at)]
    if any(g < 0 for g in gaps):
        raise MalformedTraceError("a completion precedes the job it is paired with")
    avg = sum(gaps) / len(gaps) if gaps else None
    return TurnaroundReport(sent, completed, avg)
