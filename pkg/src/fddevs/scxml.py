"""SCXML state charts to FD-DEVS atomic models.

:func:`transform_scxml` is a native port of the reference XSLT stylesheet
shipped in ``data/scxml/scxml2devs.xsl``; it yields the portless
"statemachine" document that stylesheet produces. :func:`lift_statemachine`
turns that document into an :class:`AtomicSpec`.

The stylesheet's rules, restated:

* every ``<send>`` gives an internal record: the start state is the ``id``
  of the send's grandparent, the next state is the target of the
  transition whose ``event`` equals the send's event, the timeout is the
  send's ``delay`` and the output is the send's event;
* every ``<transition event=...>`` whose event is *not* sent anywhere in the
  document gives an external record starting at the transition's parent;
* the ``deltint`` section is left out when there are no sends.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .core import AtomicSpec, ExternalTransition, InternalTransition, LambdaEntry, errors_only, validate_atomic
from .errors import TransformError
from .xfd import Document, _root_of, _serialize, _sub, _text

_DELAY = re.compile(r"^\s*(\+?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)\s*(ms|s)?\s*$")


def parse_delay(text: str) -> float:
    """Delay text in seconds; bare numbers, ``5s`` and ``500ms`` are accepted."""
    m = _DELAY.match(text)
    if not m:
        raise TransformError("invalid-delay", f"cannot read delay {text!r}")
    value = float(m.group(1))
    return value / 1000.0 if m.group(2) == "ms" else value


@dataclass(frozen=True)
class IntRec:
    start_state: str
    next_state: str
    timeout: float
    out_msg: str
    # the delay exactly as written, so re-emission reproduces it
    timeout_text: str | None = field(default=None, compare=False)


@dataclass(frozen=True)
class ExtRec:
    incoming_msg: str
    start_state: str
    next_state: str
    timeout: float = 0.0
    out_msg: str = ""


@dataclass(frozen=True)
class StateMachineDoc:
    name: str = "default"
    host: str = "localhost"
    internal: tuple[IntRec, ...] = ()
    external: tuple[ExtRec, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "internal", tuple(self.internal))
        object.__setattr__(self, "external", tuple(self.external))


def transform_scxml(doc: Document) -> StateMachineDoc:
    """Apply the stylesheet rules to an SCXML document.

    Namespaces are ignored. Where the stylesheet would silently emit an
    empty or repeated field, a :class:`TransformError` is raised instead:
    ``missing-target``, ``ambiguous-target``, ``missing-delay`` or
    ``missing-start-state``.
    """
    root = _root_of(doc)
    if root.tag != "scxml":
        raise TransformError("not-scxml", f"root element is <{root.tag}>, expected <scxml>")
    parent = {child: p for p in root.iter() for child in p}
    sends = [el for el in root.iter("send")]
    transitions = [el for el in root.iter("transition")]
    sent_events = {s.get("event") for s in sends}

    internal = []
    for s in sends:
        event = s.get("event")
        if event is None:
            raise TransformError("missing-event", "a <send> has no event attribute")
        grand = parent.get(parent.get(s))
        start = grand.get("id") if grand is not None else None
        if not start:
            raise TransformError("missing-start-state", f"send {event!r} has no enclosing element with an id")
        matches = [t for t in transitions if t.get("event") == event]
        if not matches:
            raise TransformError("missing-target", f"no transition handles sent event {event!r}")
        if len(matches) > 1:
            raise TransformError("ambiguous-target", f"{len(matches)} transitions handle sent event {event!r}")
        target = matches[0].get("target")
        if not target:
            raise TransformError("missing-target", f"transition for {event!r} has no target")
        delay = s.get("delay")
        if delay is None:
            raise TransformError("missing-delay", f"send {event!r} in state {start!r} has no delay")
        internal.append(IntRec(start, target, parse_delay(delay), event, delay))

    external = []
    for t in transitions:
        event = t.get("event")
        if event is None or event in sent_events:
            continue
        owner = parent.get(t)
        start = owner.get("id") if owner is not None else None
        if not start:
            raise TransformError("missing-start-state", f"transition on {event!r} is not inside a state with an id")
        target = t.get("target")
        if not target:
            raise TransformError("missing-target", f"transition on {event!r} in {start!r} has no target")
        external.append(ExtRec(event, start, target, 0.0, event))
    return StateMachineDoc(internal=internal, external=external)


def _timeout_text(t: float) -> str:
    return str(int(t)) if float(t).is_integer() else repr(float(t))


def emit_statemachine_xml(sm: StateMachineDoc) -> str:
    """Serialize in the stylesheet's output layout."""
    root = ET.Element("statemachine", {"name": sm.name, "host": sm.host})
    if sm.internal:
        table = _sub(_sub(root, "deltint"), "transitionsInt")
        for r in sm.internal:
            tr = _sub(table, "transition")
            _sub(tr, "startState", r.start_state)
            _sub(tr, "nextState", r.next_state)
            _sub(tr, "timeout", r.timeout_text if r.timeout_text is not None else _timeout_text(r.timeout))
            _sub(tr, "outMsg", r.out_msg)
    table = _sub(_sub(root, "deltext"), "transitionsExt")
    for r in sm.external:
        ext = _sub(table, "transitionExt")
        _sub(ext, "incomingMsg", r.incoming_msg)
        tr = _sub(ext, "transition")
        _sub(tr, "startState", r.start_state)
        _sub(tr, "nextState", r.next_state)
        _sub(tr, "timeout", _timeout_text(r.timeout))
        _sub(tr, "outMsg", r.out_msg)
    return _serialize(root)


def parse_statemachine_xml(doc: Document) -> StateMachineDoc:
    root = _root_of(doc)
    if root.tag != "statemachine":
        raise TransformError("not-statemachine", f"root element is <{root.tag}>, expected <statemachine>")

    def field_of(el, name):
        child = el.find(name)
        if child is None:
            raise TransformError("missing-field", f"<{el.tag}> lacks <{name}>")
        return _text(child)

    internal = []
    for tr in root.findall("deltint/transitionsInt/transition"):
        raw = field_of(tr, "timeout")
        internal.append(
            IntRec(field_of(tr, "startState"), field_of(tr, "nextState"), parse_delay(raw), field_of(tr, "outMsg"), raw)
        )
    external = []
    for ext in root.findall("deltext/transitionsExt/transitionExt"):
        tr = ext.find("transition")
        if tr is None:
            raise TransformError("missing-field", "<transitionExt> lacks <transition>")
        external.append(
            ExtRec(
                field_of(ext, "incomingMsg"),
                field_of(tr, "startState"),
                field_of(tr, "nextState"),
                parse_delay(field_of(tr, "timeout")),
                field_of(tr, "outMsg"),
            )
        )
    return StateMachineDoc(root.get("name", "default"), root.get("host", "localhost"), internal, external)


def _unique(items):
    return tuple(dict.fromkeys(items))


def lift_statemachine(sm: StateMachineDoc, name: str | None = None) -> AtomicSpec:
    """Build the atomic model a statemachine document describes.

    Each distinct output message becomes an output port of the same name,
    each distinct incoming message an input port. External records always
    reschedule. The timeout and output fields of external records carry no
    meaning for an atomic model and are dropped.
    """
    states = _unique(
        [s for r in sm.internal for s in (r.start_state, r.next_state)]
        + [s for r in sm.external for s in (r.start_state, r.next_state)]
    )
    if not states:
        raise TransformError("empty-machine", "the state machine has no transitions to derive states from")
    initial = sm.internal[0].start_state if sm.internal else sm.external[0].start_state

    by_start: dict[str, IntRec] = {}
    for r in sm.internal:
        prev = by_start.get(r.start_state)
        if prev is None:
            by_start[r.start_state] = r
        elif prev.timeout != r.timeout:
            raise TransformError(
                "conflicting-timeouts", f"state {r.start_state!r} has timeouts {prev.timeout} and {r.timeout}"
            )
        elif prev != r:
            raise TransformError(
                "conflicting-internal", f"state {r.start_state!r} has more than one internal transition"
            )
    ext_seen: dict[tuple[str, str], ExtRec] = {}
    for r in sm.external:
        key = (r.start_state, r.incoming_msg)
        prev = ext_seen.get(key)
        if prev is not None and prev.next_state != r.next_state:
            raise TransformError("conflicting-ext", f"state {key[0]!r} reacts to {key[1]!r} in two ways")
        ext_seen.setdefault(key, r)

    spec = AtomicSpec(
        name=name or sm.name,
        states=states,
        initial=initial,
        inports=_unique(r.incoming_msg for r in sm.external),
        outports=_unique(r.out_msg for r in by_start.values()),
        ta=[(s, r.timeout) for s, r in by_start.items()],
        lambdas=[LambdaEntry(s, r.out_msg, r.out_msg) for s, r in by_start.items()],
        deltint=[InternalTransition(s, r.next_state) for s, r in by_start.items()],
        deltext=[ExternalTransition(s, m, r.next_state, True) for (s, m), r in ext_seen.items()],
        host=sm.host,
    )
    problems = errors_only(validate_atomic(spec))
    if problems:
        raise TransformError("invalid-spec", "; ".join(str(v) for v in problems))
    return spec


def scxml_to_atomic(doc: Document, name: str | None = None) -> AtomicSpec:
    return lift_statemachine(transform_scxml(doc), name)
