"""Finite-deterministic DEVS specifications and their characteristic functions.

Everything here is immutable and side-effect free. An :class:`AtomicSpec`
holds the seven tables of a finite-deterministic atomic model (input and
output ports, states, time advance, output, internal and external
transitions); a :class:`CoupledSpec` holds child references and couplings.
Simulation clocks live in :mod:`fddevs.sim`, serialization in
:mod:`fddevs.xfd`.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import NamedTuple, Union

from .errors import CycleDetected, NoInternalTransitionError, UnknownStateError

INFINITY = math.inf


def check_time(value: float) -> float:
    """Coerce ``value`` to a float time value; reject negatives and NaN."""
    t = float(value)
    if math.isnan(t) or t < 0:
        raise ValueError(f"time value must be >= 0 or infinity, got {value!r}")
    return t


def format_time(t: float) -> str:
    """Shortest decimal text that reads back as ``t`` ("inf" for infinity)."""
    if math.isinf(t):
        return "inf"
    return repr(float(t))


def _is_token(name) -> bool:
    return isinstance(name, str) and bool(name) and name == name.strip()


# --------------------------------------------------------------------------
# messages and bags


class Message(NamedTuple):
    port: str
    label: str


class Bag:
    """Multiset of messages exchanged at a single instant.

    Items are kept in canonical order (port, then label), duplicates
    preserved, so iteration order never depends on insertion order.
    """

    __slots__ = ("_items",)

    def __init__(self, items: Iterable = ()):
        self._items = tuple(sorted(Message(*m) for m in items))

    @property
    def items(self) -> tuple[Message, ...]:
        return self._items

    def __iter__(self) -> Iterator[Message]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __bool__(self) -> bool:
        return bool(self._items)

    def __eq__(self, other) -> bool:
        if isinstance(other, Bag):
            return self._items == other._items
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._items)

    def __add__(self, other: Bag) -> Bag:
        return Bag(self._items + tuple(other))

    def __repr__(self) -> str:
        inner = ", ".join(f"{m.port}:{m.label}" for m in self._items)
        return f"Bag({{{inner}}})"


EMPTY_BAG = Bag()


# --------------------------------------------------------------------------
# violations


@dataclass(frozen=True)
class Violation:
    """One broken rule. ``code`` is drawn from :data:`VIOLATION_CODES`."""

    code: str
    path: str
    message: str
    severity: str = "error"

    def __str__(self) -> str:
        return f"{self.code} at {self.path}: {self.message}"


VIOLATION_CODES = frozenset(
    {
        # atomic tables
        "EmptyName",
        "MissingStates",
        "DuplicateState",
        "DuplicatePort",
        "InitialNotInStates",
        "UnknownState",
        "UnknownOutport",
        "InvalidTimeAdvance",
        "DuplicateTimeAdvance",
        "DuplicateInternalTransition",
        "DuplicateExternalTransition",
        "MissingInternalTransition",
        # coupled structure
        "DuplicateModel",
        "UnknownModel",
        "SelfCoupling",
        "UnknownPort",
        "PortDirection",
        "CycleDetected",
        # documents
        "MalformedXml",
        "KindMismatch",
        "DialectMismatch",
        "MissingAttribute",
        "MissingElement",
        "UnexpectedElement",
        "ElementOrder",
        "Occurrence",
        "InvalidNumber",
        "InvalidBoolean",
        "InvalidInteger",
        "EmptyTimeAdvance",
        "EmptyCouplings",
    }
)


def errors_only(violations: Iterable[Violation]) -> list[Violation]:
    return [v for v in violations if v.severity == "error"]


# --------------------------------------------------------------------------
# atomic specification


@dataclass(frozen=True)
class InternalTransition:
    start: str
    next: str
    id: int = 0


@dataclass(frozen=True)
class ExternalTransition:
    start: str
    message: str
    next: str
    schedule: bool = True
    id: int = 0


@dataclass(frozen=True)
class LambdaEntry:
    state: str
    outport: str
    label: str | None = None

    def __post_init__(self):
        # a label equal to the port name is the default, stored as None
        if self.label == self.outport:
            object.__setattr__(self, "label", None)

    @property
    def message(self) -> Message:
        return Message(self.outport, self.label if self.label is not None else self.outport)


def _number_entries(entries, cls):
    out = []
    for i, e in enumerate(entries, start=1):
        e = e if isinstance(e, cls) else cls(*e)
        out.append(e if e.id else replace(e, id=i))
    return tuple(out)


@dataclass(frozen=True)
class AtomicSpec:
    """A finite-deterministic atomic model.

    ``ta`` accepts a mapping or a sequence of ``(state, timeout)`` pairs and
    is stored as pairs so that duplicated entries remain observable to
    :func:`validate_atomic`. Infinite timeouts are dropped on construction:
    a missing entry already means "passive". The initial state (first listed
    state unless given) is moved to the front of ``states``. ``ta`` and
    ``lambdas`` are kept in state order. Transition entries without an id
    are numbered by position; plain tuples are
    accepted for every table entry.
    """

    name: str
    states: tuple[str, ...]
    inports: tuple[str, ...] = ()
    outports: tuple[str, ...] = ()
    ta: tuple[tuple[str, float], ...] = ()
    lambdas: tuple[LambdaEntry, ...] = ()
    deltint: tuple[InternalTransition, ...] = ()
    deltext: tuple[ExternalTransition, ...] = ()
    initial: str | None = None
    host: str = "localhost"

    def __post_init__(self):
        states = tuple(self.states)
        initial = self.initial if self.initial is not None else (states[0] if states else None)
        if initial in states and states[0] != initial:
            states = (initial,) + tuple(s for s in states if s != initial)
        ta_items = self.ta.items() if isinstance(self.ta, Mapping) else self.ta
        ta = tuple((s, float(v)) for s, v in ta_items if not math.isinf(float(v)))
        # state-ordered tables make equality independent of listing order
        rank = {s: i for i, s in enumerate(states)}

        def by_state(e):
            return rank.get(e[0] if isinstance(e, tuple) else e.state, len(rank))

        ta = tuple(sorted(ta, key=by_state))
        lambdas = tuple(LambdaEntry(*e) if isinstance(e, tuple) else e for e in self.lambdas)
        set_ = object.__setattr__
        set_(self, "states", states)
        set_(self, "initial", initial)
        set_(self, "inports", tuple(self.inports))
        set_(self, "outports", tuple(self.outports))
        set_(self, "ta", ta)
        set_(self, "lambdas", tuple(sorted(lambdas, key=by_state)))
        set_(self, "deltint", _number_entries(self.deltint, InternalTransition))
        set_(self, "deltext", _number_entries(self.deltext, ExternalTransition))

    # lookup tables, built lazily; first entry wins when a table is not a function
    @cached_property
    def _state_set(self) -> frozenset:
        return frozenset(self.states)

    @cached_property
    def _ta_map(self) -> dict:
        out = {}
        for s, v in self.ta:
            out.setdefault(s, v)
        return out

    @cached_property
    def _int_map(self) -> dict:
        out = {}
        for e in self.deltint:
            out.setdefault(e.start, e)
        return out

    @cached_property
    def _ext_map(self) -> dict:
        out = {}
        for e in self.deltext:
            out.setdefault((e.start, e.message), e)
        return out

    @cached_property
    def _out_map(self) -> dict:
        out: dict[str, list] = {}
        for e in self.lambdas:
            out.setdefault(e.state, []).append(e.message)
        return {s: Bag(msgs) for s, msgs in out.items()}

    @property
    def messages(self) -> tuple[str, ...]:
        """Incoming message labels named by the external transition table."""
        return tuple(dict.fromkeys(e.message for e in self.deltext))

    def _check(self, s: str) -> None:
        if s not in self._state_set:
            raise UnknownStateError(self.name, s)


# --------------------------------------------------------------------------
# characteristic functions


def time_advance(spec: AtomicSpec, s: str) -> float:
    spec._check(s)
    return spec._ta_map.get(s, INFINITY)


def output(spec: AtomicSpec, s: str) -> Bag:
    spec._check(s)
    return spec._out_map.get(s, EMPTY_BAG)


def delta_int(spec: AtomicSpec, s: str) -> str:
    spec._check(s)
    entry = spec._int_map.get(s)
    if entry is None:
        raise NoInternalTransitionError(spec.name, s)
    return entry.next


def delta_ext(spec: AtomicSpec, s: str, m: str) -> tuple[str, bool]:
    """Next state and schedule flag; unmatched messages leave ``s`` as is."""
    spec._check(s)
    entry = spec._ext_map.get((s, m))
    if entry is None:
        return s, False
    return entry.next, entry.schedule


def apply_bag(spec: AtomicSpec, s: str, bag: Bag | Iterable) -> tuple[str, bool]:
    """Fold :func:`delta_ext` over ``bag`` in canonical (port, label) order.

    The returned flag is true iff any applied entry asked for rescheduling.
    """
    if not isinstance(bag, Bag):
        bag = Bag(bag)
    spec._check(s)
    schedule = False
    for msg in bag:
        s, sched = delta_ext(spec, s, msg.label)
        schedule = schedule or sched
    return s, schedule


def delta_con(spec: AtomicSpec, s: str, bag: Bag | Iterable) -> str:
    """Confluent transition: internal first, then the input bag at zero elapsed time."""
    return apply_bag(spec, delta_int(spec, s), bag)[0]


# --------------------------------------------------------------------------
# atomic validation

_A = "/Atomic"


def validate_atomic(spec: AtomicSpec) -> list[Violation]:
    v: list[Violation] = []

    def add(code, path, msg):
        v.append(Violation(code, path, msg))

    if not _is_token(spec.name):
        add("EmptyName", _A + "/@modelName", f"model name {spec.name!r} is not a valid token")
    if not spec.states:
        add("MissingStates", _A + "/states", "at least one state is required")

    def check_unique(items, path, item_tag, code, what):
        seen = set()
        for i, name in enumerate(items, start=1):
            if not _is_token(name):
                add("EmptyName", f"{path}/{item_tag}[{i}]", f"{what} name {name!r} is not a valid token")
            elif name in seen:
                add(code, f"{path}/{item_tag}[{i}]", f"{what} {name!r} declared twice")
            seen.add(name)

    check_unique(spec.states, _A + "/states", "state", "DuplicateState", "state")
    check_unique(spec.inports, _A + "/inports", "inport", "DuplicatePort", "inport")
    check_unique(spec.outports, _A + "/outports", "outport", "DuplicatePort", "outport")

    states = set(spec.states)
    if spec.states and spec.initial not in states:
        add("InitialNotInStates", _A + "/states", f"initial state {spec.initial!r} is not declared")

    def ref(state, path):
        if state not in states:
            add("UnknownState", path, f"state {state!r} is not declared")

    seen_ta = set()
    for i, (s, t) in enumerate(spec.ta, start=1):
        path = f"{_A}/timeAdvance/ta[{i}]"
        ref(s, path + "/state")
        if math.isnan(t) or t < 0:
            add("InvalidTimeAdvance", path + "/timeout", f"timeout {t!r} for {s!r} is negative or NaN")
        if s in seen_ta:
            add("DuplicateTimeAdvance", path, f"state {s!r} has two timeouts")
        seen_ta.add(s)

    outports = set(spec.outports)
    for i, e in enumerate(spec.lambdas, start=1):
        path = f"{_A}/lamdas/lamda[{i}]"
        ref(e.state, path + "/state")
        if e.outport not in outports:
            add("UnknownOutport", path + "/outport", f"output port {e.outport!r} is not declared")
        if e.label is not None and not _is_token(e.label):
            add("EmptyName", path + "/message", f"label {e.label!r} is not a valid token")

    seen_int = set()
    for i, e in enumerate(spec.deltint, start=1):
        path = f"{_A}/deltint/InternalTransition[{i}]"
        ref(e.start, path + "/transition/StartState")
        ref(e.next, path + "/transition/NextState")
        if e.start in seen_int:
            add("DuplicateInternalTransition", path, f"second internal transition from {e.start!r}")
        seen_int.add(e.start)

    seen_ext = set()
    for i, e in enumerate(spec.deltext, start=1):
        path = f"{_A}/delttext/ExternalTransition[{i}]"
        if not _is_token(e.message):
            add("EmptyName", path + "/IncomingMessage", f"message {e.message!r} is not a valid token")
        ref(e.start, path + "/transition/StartState")
        ref(e.next, path + "/transition/NextState")
        key = (e.start, e.message)
        if key in seen_ext:
            add(
                "DuplicateExternalTransition",
                path,
                f"second external transition from {e.start!r} on {e.message!r}",
            )
        seen_ext.add(key)

    for s in dict.fromkeys(s for s, t in spec.ta if not math.isnan(t)):
        if s in states and s not in seen_int:
            t = spec._ta_map[s]
            add(
                "MissingInternalTransition",
                f"{_A}/deltint",
                f"state {s!r} has finite time advance {format_time(t)} but no internal transition",
            )
    return v


# --------------------------------------------------------------------------
# coupled specification


@dataclass(frozen=True)
class ModelRef:
    name: str
    type_hint: str | None = None
    platform: str | None = None


@dataclass(frozen=True)
class Coupling:
    """``src.outport -> dest.inport``; either end may be the coupled model itself."""

    src: str
    outport: str
    dest: str
    inport: str

    def __str__(self) -> str:
        return f"{self.src}.{self.outport} -> {self.dest}.{self.inport}"


class CouplingKind(str, Enum):
    EIC = "EIC"
    EOC = "EOC"
    IC = "IC"


@dataclass(frozen=True)
class CoupledSpec:
    name: str
    models: tuple[ModelRef, ...] = ()
    couplings: tuple[Coupling, ...] = ()
    inports: tuple[str, ...] = ()
    outports: tuple[str, ...] = ()
    host: str = "localhost"

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "models", tuple(m if isinstance(m, ModelRef) else ModelRef(m) for m in self.models))
        set_(self, "couplings", tuple(c if isinstance(c, Coupling) else Coupling(*c) for c in self.couplings))
        set_(self, "inports", tuple(self.inports))
        set_(self, "outports", tuple(self.outports))

    @property
    def child_names(self) -> tuple[str, ...]:
        return tuple(m.name for m in self.models)

    def child(self, name: str) -> ModelRef:
        for m in self.models:
            if m.name == name:
                return m
        raise KeyError(name)

    def classify(self, c: Coupling) -> CouplingKind | None:
        """EIC, EOC or IC; ``None`` for a self-coupling (never valid)."""
        if c.src == c.dest:
            return None
        if c.src == self.name:
            return CouplingKind.EIC
        if c.dest == self.name:
            return CouplingKind.EOC
        return CouplingKind.IC

    @cached_property
    def _fanout(self) -> dict:
        out: dict[tuple[str, str], list[tuple[str, str]]] = {}
        for c in self.couplings:
            out.setdefault((c.src, c.outport), []).append((c.dest, c.inport))
        return out

    def eic(self) -> list[Coupling]:
        return [c for c in self.couplings if self.classify(c) is CouplingKind.EIC]

    def eoc(self) -> list[Coupling]:
        return [c for c in self.couplings if self.classify(c) is CouplingKind.EOC]

    def ic(self) -> list[Coupling]:
        return [c for c in self.couplings if self.classify(c) is CouplingKind.IC]


Spec = Union[AtomicSpec, CoupledSpec]


class ModelRegistry(dict):
    """Model name -> :class:`AtomicSpec` or :class:`CoupledSpec`.

    ``root`` optionally records which model is the top of the hierarchy
    (set by loaders); it does not take part in equality.
    """

    root: str | None = None

    @classmethod
    def of(cls, *specs: Spec, root: str | None = None) -> ModelRegistry:
        reg = cls((s.name, s) for s in specs)
        reg.root = root
        return reg

    def add(self, spec: Spec) -> None:
        self[spec.name] = spec

    def resolve(self, ref: ModelRef | str) -> Spec:
        """Look a child reference up by name, falling back to its type hint."""
        if isinstance(ref, str):
            return self[ref]
        if ref.name in self:
            return self[ref.name]
        if ref.type_hint is not None and ref.type_hint in self:
            return self[ref.type_hint]
        raise KeyError(ref.name)

    def can_resolve(self, ref: ModelRef) -> bool:
        return ref.name in self or (ref.type_hint is not None and ref.type_hint in self)

    def reachable(self, root: str) -> list[str]:
        """Registry keys reachable from ``root`` (root first, depth-first).

        Raises :class:`CycleDetected` if a coupled model contains itself.
        """
        order: list[str] = []
        stack: list[str] = []

        def visit(key: str) -> None:
            if key in stack:
                cycle = " -> ".join(stack[stack.index(key):] + [key])
                raise CycleDetected(f"containment cycle: {cycle}")
            if key in order:
                return
            stack.append(key)
            order.append(key)
            spec = self[key]
            if isinstance(spec, CoupledSpec):
                for ref in spec.models:
                    if self.can_resolve(ref):
                        visit(self.resolve(ref).name)
            stack.pop()

        visit(root)
        return order

    def validate(self, root: str | None = None) -> list[Violation]:
        """Validate every model (or those reachable from ``root``)."""
        root = root if root is not None else self.root
        if root is not None and root not in self:
            return [Violation("UnknownModel", "/", f"root model {root!r} is not registered")]
        try:
            keys = self.reachable(root) if root is not None else list(self)
            if root is None:
                for k in keys:
                    self.reachable(k)
        except CycleDetected as exc:
            return [Violation("CycleDetected", "/", str(exc))]
        out: list[Violation] = []
        for key in keys:
            spec = self[key]
            found = validate_atomic(spec) if isinstance(spec, AtomicSpec) else validate_coupled(spec, self)
            out.extend(replace(v, path=f"{key}:{v.path}") for v in found)
        return out


# --------------------------------------------------------------------------
# coupled validation

_D = "/Digraph"


def _ports_of(spec: Spec) -> tuple[tuple[str, ...], tuple[str, ...]]:
    return spec.inports, spec.outports


def validate_coupled(spec: CoupledSpec, reg: Mapping | None = None) -> list[Violation]:
    """Structural checks; port checks against children need ``reg``."""
    v: list[Violation] = []

    def add(code, path, msg):
        v.append(Violation(code, path, msg))

    if not _is_token(spec.name):
        add("EmptyName", _D + "/@name", f"model name {spec.name!r} is not a valid token")
    children: dict[str, ModelRef] = {}
    for i, ref in enumerate(spec.models, start=1):
        path = f"{_D}/Models/Model[{i}]"
        if not _is_token(ref.name):
            add("EmptyName", path, f"child name {ref.name!r} is not a valid token")
        elif ref.name == spec.name:
            add("DuplicateModel", path, f"child {ref.name!r} has the name of its parent")
        elif ref.name in children:
            add("DuplicateModel", path, f"child {ref.name!r} declared twice")
        children[ref.name] = ref
    for i, p in enumerate(spec.inports, start=1):
        if not _is_token(p):
            add("EmptyName", f"{_D}/Inports/inport[{i}]", f"port name {p!r} is not a valid token")
    for i, p in enumerate(spec.outports, start=1):
        if not _is_token(p):
            add("EmptyName", f"{_D}/Outports/outport[{i}]", f"port name {p!r} is not a valid token")
    if len(set(spec.inports)) != len(spec.inports) or len(set(spec.outports)) != len(spec.outports):
        add("DuplicatePort", _D, "a port is declared twice")

    reg_check = reg is not None
    resolved: dict[str, Spec] = {}
    if reg_check:
        for i, ref in enumerate(spec.models, start=1):
            try:
                resolved[ref.name] = (
                    reg.resolve(ref) if isinstance(reg, ModelRegistry) else reg[ref.name]
                )
            except KeyError:
                add("UnknownModel", f"{_D}/Models/Model[{i}]", f"child {ref.name!r} cannot be resolved")

    for i, c in enumerate(spec.couplings, start=1):
        path = f"{_D}/Couplings/coupling[{i}]"
        kind = spec.classify(c)
        if kind is None:
            add("SelfCoupling", path, f"{c} connects {c.src!r} to itself")
            continue
        for end in (c.src, c.dest):
            if end != spec.name and end not in children:
                add("UnknownModel", path, f"{c} references unknown model {end!r}")
        if c.src != spec.name and c.src not in children or c.dest != spec.name and c.dest not in children:
            continue
        # source side: EIC reads a coupled inport, otherwise a child outport
        if kind is CouplingKind.EIC:
            if c.outport not in spec.inports:
                add("UnknownPort", path + "/outport", f"{spec.name!r} has no input port {c.outport!r}")
        elif c.src in resolved and c.outport not in _ports_of(resolved[c.src])[1]:
            code = "PortDirection" if c.outport in _ports_of(resolved[c.src])[0] else "UnknownPort"
            add(code, path + "/outport", f"{c.src!r} has no output port {c.outport!r}")
        if kind is CouplingKind.EOC:
            if c.inport not in spec.outports:
                add("UnknownPort", path + "/inport", f"{spec.name!r} has no output port {c.inport!r}")
        elif c.dest in resolved and c.inport not in _ports_of(resolved[c.dest])[0]:
            code = "PortDirection" if c.inport in _ports_of(resolved[c.dest])[1] else "UnknownPort"
            add(code, path + "/inport", f"{c.dest!r} has no input port {c.inport!r}")
    return v


def classify_coupling(spec: CoupledSpec, c: Coupling) -> CouplingKind | None:
    return spec.classify(c)
