"""Parallel DEVS execution of finite-deterministic models.

The engine mirrors the classic abstract simulator: one simulator per atomic
component, one coordinator per coupled model, and a root loop driving the
clock. Each step has two phases. First every imminent atomic computes its
output and the coordinators route those bags bottom-up; then inputs are
delivered top-down and every atomic takes an internal, external or
confluent transition. Trace events within one instant are ordered outputs
first, then transitions, each group sorted by model path.

:func:`flatten` collapses a hierarchy into a single coupled model with the
transitive couplings; simulating the flat model yields the same trace.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from .core import (
    EMPTY_BAG,
    AtomicSpec,
    Bag,
    CoupledSpec,
    Coupling,
    CouplingKind,
    Message,
    ModelRef,
    ModelRegistry,
    Violation,
    apply_bag,
    check_time,
    delta_int,
    errors_only,
    output,
    time_advance,
)
from .errors import SimulationError, TimeRegressionError, ValidationFailed, ZeroTimeLoopError

DEFAULT_MAX_ZERO_TIME_STEPS = 10_000


class EventKind(str, Enum):
    INIT = "INIT"
    OUTPUT = "OUTPUT"
    INTERNAL = "INTERNAL"
    EXTERNAL = "EXTERNAL"
    CONFLUENT = "CONFLUENT"


@dataclass(frozen=True)
class TraceEvent:
    t: float
    model: str
    kind: EventKind
    port: str | None = None
    label: str | None = None
    before: str | None = None
    after: str | None = None


@dataclass
class Trace:
    events: list[TraceEvent]
    termination_time: float

    def outputs(self) -> list[TraceEvent]:
        return [e for e in self.events if e.kind is EventKind.OUTPUT]

    def to_jsonl(self) -> str:
        return "".join(json.dumps(_event_record(e)) + "\n" for e in self.events)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for e in self.events:
            rec = _event_record(e)
            writer.writerow(["" if rec[k] is None else rec[k] for k in TRACE_COLUMNS])
        return buf.getvalue()


TRACE_COLUMNS = ("t", "model", "kind", "port", "label", "before", "after")


def _json_time(t: float):
    if math.isinf(t):
        return "inf"
    v = float(f"{t:.12g}")
    return int(v) if v.is_integer() and abs(v) < 1e15 else v


def _event_record(e: TraceEvent) -> dict:
    return {
        "t": _json_time(e.t),
        "model": e.model,
        "kind": e.kind.value,
        "port": e.port,
        "label": e.label,
        "before": e.before,
        "after": e.after,
    }


def read_jsonl(text: str) -> list[TraceEvent]:
    events = []
    for line in text.splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        t = rec["t"]
        events.append(
            TraceEvent(
                t=math.inf if t == "inf" else float(t),
                model=rec["model"],
                kind=EventKind(rec["kind"]),
                port=rec.get("port"),
                label=rec.get("label"),
                before=rec.get("before"),
                after=rec.get("after"),
            )
        )
    return events


# --------------------------------------------------------------------------
# simulation tree


@dataclass
class SimNode:
    """Runtime state of one atomic component."""

    model_path: str
    name: str
    spec: AtomicSpec
    state: str
    tl: float
    tn: float
    _out: Bag = field(default=EMPTY_BAG, repr=False)

    @property
    def sigma(self) -> float:
        """Time remaining until the next internal event, measured from ``tl``."""
        return self.tn - self.tl


@dataclass
class _Coordinator:
    model_path: str
    name: str
    spec: CoupledSpec
    children: list
    _ic_in: dict = field(default_factory=dict, repr=False)


class SimTree:
    """Mutable simulation state for one model hierarchy. Single owner."""

    def __init__(self, registry: ModelRegistry, root, max_zero_time_steps: int):
        self.registry = registry
        self.root = root
        self.max_zero_time_steps = max_zero_time_steps
        self.events: list[TraceEvent] = []
        self.atomics: list[SimNode] = []
        self.now = 0.0
        self._instant = None
        self._instant_steps = 0

    def node(self, model_path: str) -> SimNode:
        for n in self.atomics:
            if n.model_path == model_path:
                return n
        raise KeyError(model_path)

    def __getitem__(self, model_path: str) -> SimNode:
        return self.node(model_path)


def route(
    spec: CoupledSpec, produced: dict[str, Bag], external_in: Bag = EMPTY_BAG
) -> tuple[dict[str, Bag], Bag]:
    """Copy messages along couplings.

    Child outputs follow IC and EOC couplings, items of ``external_in``
    follow EIC couplings. Each copy carries the destination port. Messages
    on ports without a coupling are dropped.
    """
    per_child: dict[str, list[Message]] = {}
    ext_out: list[Message] = []
    fanout = spec._fanout
    self_name = spec.name
    for child, bag in produced.items():
        for msg in bag:
            for dest, inport in fanout.get((child, msg.port), ()):
                if dest == self_name:
                    ext_out.append(Message(inport, msg.label))
                elif dest != child:
                    per_child.setdefault(dest, []).append(Message(inport, msg.label))
    for msg in external_in:
        for dest, inport in fanout.get((self_name, msg.port), ()):
            if dest != self_name:
                per_child.setdefault(dest, []).append(Message(inport, msg.label))
    return {k: Bag(v) for k, v in per_child.items()}, Bag(ext_out)


def initialize(
    reg: ModelRegistry,
    root_name: str,
    t0: float = 0.0,
    *,
    max_zero_time_steps: int = DEFAULT_MAX_ZERO_TIME_STEPS,
) -> SimTree:
    """Validate the hierarchy under ``root_name`` and place every atomic in its initial state."""
    t0 = check_time(t0)
    if math.isinf(t0):
        raise ValueError("start time must be finite")
    if root_name not in reg:
        raise ValidationFailed(
            [Violation("UnknownModel", "/", f"root model {root_name!r} is not registered")],
            context="initialize",
        )
    problems = errors_only(reg.validate(root_name))
    if problems:
        raise ValidationFailed(problems, context=f"model {root_name!r}")

    tree = SimTree(reg, None, max_zero_time_steps)
    tree.now = t0

    def build(name: str, spec, path: str):
        if isinstance(spec, AtomicSpec):
            node = SimNode(path, name, spec, spec.initial, t0, t0 + time_advance(spec, spec.initial))
            tree.atomics.append(node)
            return node
        children = [build(ref.name, reg.resolve(ref), f"{path}/{ref.name}") for ref in spec.models]
        return _Coordinator(path, name, spec, children)

    tree.root = build(root_name, reg[root_name], root_name)
    for node in sorted(tree.atomics, key=lambda n: n.model_path):
        tree.events.append(TraceEvent(t0, node.model_path, EventKind.INIT, after=node.state))
    return tree


def next_event_time(tree: SimTree) -> float:
    return min((n.tn for n in tree.atomics), default=math.inf)


def _collect(node, t: float, out_events: list) -> Bag:
    """Phase one: imminent outputs, routed up to ``node``'s external output."""
    if isinstance(node, SimNode):
        if node.tn == t:
            bag = output(node.spec, node.state)
            for msg in bag:
                out_events.append(TraceEvent(t, node.model_path, EventKind.OUTPUT, msg.port, msg.label))
            node._out = bag
            return bag
        node._out = EMPTY_BAG
        return EMPTY_BAG
    produced = {}
    for child in node.children:
        bag = _collect(child, t, out_events)
        if bag:
            produced[child.name] = bag
    if not produced:
        node._ic_in = {}
        return EMPTY_BAG
    node._ic_in, ext_out = route(node.spec, produced)
    return ext_out


def _deliver(node, inputs: Bag, t: float, tr_events: list) -> None:
    """Phase two: route inputs down and fire transitions."""
    if isinstance(node, SimNode):
        _transition(node, inputs, t, tr_events)
        return
    if inputs:
        eic_in, _ = route(node.spec, {}, inputs)
        merged = dict(node._ic_in)
        for k, b in eic_in.items():
            merged[k] = merged[k] + b if k in merged else b
    else:
        merged = node._ic_in
    for child in node.children:
        _deliver(child, merged.get(child.name, EMPTY_BAG), t, tr_events)
    node._ic_in = {}


def _join(bag: Bag, attr: str) -> str:
    return ";".join(getattr(m, attr) for m in bag)


def _transition(node: SimNode, inputs: Bag, t: float, tr_events: list) -> None:
    spec = node.spec
    imminent = node.tn == t
    before = node.state
    if imminent and not inputs:
        node.state = delta_int(spec, before)
        node.tl, node.tn = t, t + time_advance(spec, node.state)
        tr_events.append(TraceEvent(t, node.model_path, EventKind.INTERNAL, before=before, after=node.state))
    elif inputs and not imminent:
        node.state, schedule = apply_bag(spec, before, inputs)
        node.tl = t
        if schedule:
            node.tn = t + time_advance(spec, node.state)
        tr_events.append(
            TraceEvent(
                t, node.model_path, EventKind.EXTERNAL,
                _join(inputs, "port"), _join(inputs, "label"), before, node.state,
            )
        )
    elif inputs and imminent:
        mid = delta_int(spec, before)
        node.state, schedule = apply_bag(spec, mid, inputs)
        node.tl = t
        node.tn = t + time_advance(spec, node.state if schedule else mid)
        tr_events.append(
            TraceEvent(
                t, node.model_path, EventKind.CONFLUENT,
                _join(inputs, "port"), _join(inputs, "label"), before, node.state,
            )
        )


def step(tree: SimTree, external_in: Bag | Iterable = EMPTY_BAG, t: float | None = None):
    """Advance the tree through one simulation instant.

    ``t`` defaults to :func:`next_event_time`. Returns the bag emitted on
    the root's output ports and the trace events produced by this step.
    """
    if not isinstance(external_in, Bag):
        external_in = Bag(external_in)
    tn = next_event_time(tree)
    if t is None:
        t = tn
    t = float(t)
    if math.isinf(t):
        raise SimulationError("cannot step to infinity: no event is scheduled")
    latest = max((n.tl for n in tree.atomics), default=tree.now)
    if t < latest or t < tree.now:
        raise TimeRegressionError(f"step at t={t!r} precedes the last event at t={max(latest, tree.now)!r}")
    if t > tn:
        raise SimulationError(f"step at t={t!r} would skip the internal event scheduled at t={tn!r}")

    if t == tree._instant:
        tree._instant_steps += 1
        if tree._instant_steps > tree.max_zero_time_steps:
            raise ZeroTimeLoopError(
                f"more than {tree.max_zero_time_steps} consecutive steps at t={t!r}"
            )
    else:
        tree._instant, tree._instant_steps = t, 1

    out_events: list[TraceEvent] = []
    tr_events: list[TraceEvent] = []
    root = tree.root
    root_out = _collect(root, t, out_events)
    _deliver(root, external_in, t, tr_events)
    out_events.sort(key=lambda e: e.model)
    tr_events.sort(key=lambda e: e.model)
    new = out_events + tr_events
    tree.events.extend(new)
    tree.now = t
    return root_out, new


def run_until(tree: SimTree, t_end: float) -> Trace:
    """Step through every event with time <= ``t_end``; the trace is reported up to ``t_end``."""
    t_end = float(t_end)
    if t_end < tree.now:
        raise TimeRegressionError(f"t_end={t_end!r} precedes the current time {tree.now!r}")
    while True:
        tn = next_event_time(tree)
        if tn > t_end or math.isinf(tn):
            break
        step(tree, EMPTY_BAG, tn)
    termination = t_end if not math.isinf(t_end) else tree.now
    return Trace(list(tree.events), termination)


def simulate(reg: ModelRegistry, root_name: str, t_end: float, t0: float = 0.0, **kw) -> Trace:
    return run_until(initialize(reg, root_name, t0, **kw), t_end)


# --------------------------------------------------------------------------
# flattening


def flatten(reg: ModelRegistry, root_name: str, sep: str = "/") -> tuple[CoupledSpec, ModelRegistry]:
    """Collapse the hierarchy under ``root_name`` into one coupled model.

    Children of the result are the transitively contained atomics, named by
    their path below the root joined with ``sep`` and carrying the atomic's
    registry key as type hint. Couplings are the compositions of the
    original EIC/IC/EOC chains, so message copies are preserved one for one.
    """
    problems = errors_only(reg.validate(root_name))
    if problems:
        raise ValidationFailed(problems, context=f"flatten {root_name!r}")
    root = reg[root_name]
    if isinstance(root, AtomicSpec):
        flat = CoupledSpec(
            name=root_name + "_flat",
            models=(ModelRef(root_name, type_hint=root_name),),
            couplings=tuple(Coupling(root_name + "_flat", p, root_name, p) for p in root.inports)
            + tuple(Coupling(root_name, p, root_name + "_flat", p) for p in root.outports),
            inports=root.inports,
            outports=root.outports,
            host=root.host,
        )
        return flat, ModelRegistry.of(flat, root, root=flat.name)

    atomics: list[tuple[tuple[str, ...], ModelRef]] = []
    out_reg = ModelRegistry()

    # each coupled instance is identified by its tuple of names below the root
    def spec_at(path: tuple[str, ...]):
        spec = root
        for name in path:
            spec = reg.resolve(spec.child(name))
        return spec

    def collect(path: tuple[str, ...]):
        spec = spec_at(path)
        for ref in spec.models:
            child = reg.resolve(ref)
            cpath = path + (ref.name,)
            if isinstance(child, AtomicSpec):
                atomics.append((cpath, ModelRef(sep.join(cpath), type_hint=child.name, platform=ref.platform)))
                out_reg[child.name] = child
            else:
                collect(cpath)

    collect(())

    def sinks(path: tuple[str, ...], port: str):
        """Atomic input endpoints reached by a message entering ``path`` on ``port``."""
        spec = spec_at(path)
        if isinstance(spec, AtomicSpec):
            yield (sep.join(path), port)
            return
        for c in spec.couplings:
            if c.src == spec.name and c.outport == port and spec.classify(c) is CouplingKind.EIC:
                yield from sinks(path + (c.dest,), c.inport)

    def targets(path: tuple[str, ...], port: str):
        """Endpoints reached by a message leaving ``path`` on ``port``; ``None`` name = root output."""
        if not path:
            yield (None, port)
            return
        parent = path[:-1]
        pspec = spec_at(parent)
        me = path[-1]
        for c in pspec.couplings:
            if c.src != me or c.outport != port:
                continue
            kind = pspec.classify(c)
            if kind is CouplingKind.EOC:
                yield from targets(parent, c.inport)
            elif kind is CouplingKind.IC:
                yield from sinks(parent + (c.dest,), c.inport)

    name = root.name
    couplings: list[Coupling] = []
    for p in root.inports:
        for dest, inport in sinks((), p):
            couplings.append(Coupling(name, p, dest, inport))
    for path, ref in atomics:
        spec = reg[ref.type_hint]
        for p in spec.outports:
            for dest, inport in targets(path, p):
                couplings.append(Coupling(ref.name, p, name if dest is None else dest, inport))

    flat = CoupledSpec(
        name=name,
        models=tuple(ref for _, ref in atomics),
        couplings=tuple(couplings),
        inports=root.inports,
        outports=root.outports,
        host=root.host,
    )
    out_reg[name] = flat
    out_reg.root = name
    return flat, out_reg
