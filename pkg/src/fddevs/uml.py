"""UML components and state machines to and from DEVS specifications.

Component diagrams map to coupled models: provided ports are inputs,
required ports outputs, assembly connectors internal couplings and
delegation connectors external input or output couplings, depending on the
direction of the delegated port. State machines map to atomic models: a
state labelled ``(phase, sigma)`` is a phase with its time advance; a
transition triggered by ``deltint`` is an internal transition whose effect
names the emitted message; any other trigger is an incoming message. A guard,
when present, names the port used instead of the message.

The XMI vocabulary read and written here is a small fixed subset::

    xmi:XMI / uml:Model
      packagedElement xmi:type="uml:Component" xmi:id name
        ownedAttribute xmi:type="uml:Port" xmi:id name provided|required="<interface>"
        packagedElement xmi:type="uml:Component" ...          (subcomponents)
        ownedConnector xmi:id kind="assembly|delegation"
          end role="<port id>" partWithPort="<component id>"   (two ends, source first)
      packagedElement xmi:type="uml:StateMachine" xmi:id name
        region
          subvertex xmi:type="uml:State" xmi:id name="(phase, sigma)"
          transition xmi:id source target kind="external|internal"
            trigger name
            guard / specification / body
            effect xmi:type="uml:Activity" name

A leaf component is bound to the state machine with the same name. A
transition of kind ``internal`` does not leave its state, so the remaining
time is kept (a non-rescheduling external transition); every other
triggered transition restarts the target's sigma.
"""

from __future__ import annotations

import math
import re
import warnings
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Union

from .core import (
    AtomicSpec,
    CoupledSpec,
    Coupling,
    CouplingKind,
    ExternalTransition,
    InternalTransition,
    LambdaEntry,
    ModelRef,
    ModelRegistry,
    errors_only,
    format_time,
    validate_atomic,
)
from .errors import TransformError, XmlFormatError
from .xfd import Document, _serialize

XMI_NS = "http://schema.omg.org/spec/XMI/2.1"
UML_NS = "http://www.eclipse.org/uml2/3.0.0/UML"
DELTINT = "deltint"

_X = f"{{{XMI_NS}}}"


class UmlWarning(UserWarning):
    """Something in a UML model was ignored or left unconnected."""


# --------------------------------------------------------------------------
# model


@dataclass(frozen=True)
class UmlPort:
    name: str
    direction: str  # "provided" (input) or "required" (output)
    interface: str | None = None

    def __post_init__(self):
        if self.direction not in ("provided", "required"):
            raise TransformError("bidirectional-port", f"port {self.name!r} must be provided or required")

    @property
    def is_input(self) -> bool:
        return self.direction == "provided"


@dataclass(frozen=True)
class UmlConnector:
    kind: str  # "assembly" or "delegation"
    from_component: str
    from_port: str
    to_component: str
    to_port: str


@dataclass(frozen=True)
class UmlComponent:
    name: str
    ports: tuple[UmlPort, ...] = ()
    subcomponents: tuple[UmlComponent, ...] = ()
    connectors: tuple[UmlConnector, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "ports", tuple(self.ports))
        object.__setattr__(self, "subcomponents", tuple(self.subcomponents))
        object.__setattr__(self, "connectors", tuple(self.connectors))
        names = [p.name for p in self.ports]
        if len(set(names)) != len(names):
            raise TransformError("bidirectional-port", f"component {self.name!r} declares a port twice")

    def port(self, name: str) -> UmlPort:
        for p in self.ports:
            if p.name == name:
                return p
        raise TransformError("unknown-port", f"component {self.name!r} has no port {name!r}")

    def sub(self, name: str) -> UmlComponent:
        for c in self.subcomponents:
            if c.name == name:
                return c
        raise TransformError("unknown-component", f"component {self.name!r} has no part {name!r}")


@dataclass(frozen=True)
class UmlState:
    phase: str
    sigma: float = math.inf


@dataclass(frozen=True)
class UmlTransition:
    source: str
    target: str
    trigger: str | None = None
    guard: str | None = None
    effect: str | None = None
    kind: str = "external"

    @property
    def is_internal_event(self) -> bool:
        """True for a ``deltint`` transition (timeout fired), False for a message."""
        return self.trigger == DELTINT


@dataclass(frozen=True)
class UmlStateMachine:
    name: str
    states: tuple[UmlState, ...] = ()
    transitions: tuple[UmlTransition, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "transitions", tuple(self.transitions))


UmlElement = Union[UmlComponent, UmlStateMachine]

_LABEL = re.compile(r"^\s*\(\s*([^,()\s]+)\s*,\s*([^,()]+?)\s*\)\s*$")
_SIGMA = re.compile(r"^\+?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?\s*s?$")


def parse_state_label(label: str) -> UmlState:
    """``"(active, 5s)"`` -> ``UmlState("active", 5.0)``; ``inf`` means passive."""
    m = _LABEL.match(label or "")
    if not m:
        raise TransformError("unparseable-state-label", f"state label {label!r} is not '(phase, sigma)'")
    phase, sigma = m.group(1), m.group(2).strip()
    if sigma.lower() in ("inf", "infinity", "∞"):
        return UmlState(phase, math.inf)
    if not _SIGMA.match(sigma):
        raise TransformError("unparseable-state-label", f"sigma {sigma!r} in {label!r} is not a time value")
    return UmlState(phase, float(sigma.rstrip("s").strip()))


def state_label(state: UmlState) -> str:
    return f"({state.phase}, {format_time(state.sigma)})"


# --------------------------------------------------------------------------
# state machines <-> atomic models


def _unique(items):
    return tuple(dict.fromkeys(items))


def statemachine_to_atomic(
    sm: UmlStateMachine, inports=None, outports=None, host: str = "localhost"
) -> AtomicSpec:
    """Atomic model of a state machine.

    Ports default to the names the transitions use (guard, else the event or
    activity name); a bound component passes its own port lists instead.
    """
    if not sm.states:
        raise TransformError("empty-machine", f"state machine {sm.name!r} has no states")
    phases = [s.phase for s in sm.states]
    if len(set(phases)) != len(phases):
        raise TransformError("duplicate-phase", f"state machine {sm.name!r} repeats a phase")
    deltint, lambdas, deltext = [], [], []
    seen_int: set[str] = set()
    seen_ext: set[tuple[str, str]] = set()
    in_used, out_used = [], []
    for tr in sm.transitions:
        for end in (tr.source, tr.target):
            if end not in phases:
                raise TransformError("unknown-state", f"transition refers to unknown phase {end!r}")
        if tr.is_internal_event:
            if tr.source in seen_int:
                raise TransformError("duplicate-internal", f"phase {tr.source!r} has two deltint transitions")
            seen_int.add(tr.source)
            deltint.append(InternalTransition(tr.source, tr.target))
            if tr.effect:
                port = tr.guard or tr.effect
                lambdas.append(LambdaEntry(tr.source, port, tr.effect))
                out_used.append(port)
        elif tr.trigger:
            key = (tr.source, tr.trigger)
            if key in seen_ext:
                raise TransformError("duplicate-external", f"phase {tr.source!r} reacts to {tr.trigger!r} twice")
            seen_ext.add(key)
            deltext.append(ExternalTransition(tr.source, tr.trigger, tr.target, tr.kind != "internal"))
            in_used.append(tr.guard or tr.trigger)
        else:
            raise TransformError(
                "missing-trigger", f"transition {tr.source!r} -> {tr.target!r} has neither a trigger nor deltint"
            )
    spec = AtomicSpec(
        name=sm.name,
        states=phases,
        inports=_unique(in_used) if inports is None else tuple(inports),
        outports=_unique(out_used) if outports is None else tuple(outports),
        ta=[(s.phase, s.sigma) for s in sm.states],
        lambdas=lambdas,
        deltint=deltint,
        deltext=deltext,
        host=host,
    )
    problems = errors_only(validate_atomic(spec))
    if problems:
        raise TransformError("invalid-spec", "; ".join(str(v) for v in problems))
    return spec


def atomic_to_statemachine(spec: AtomicSpec) -> UmlStateMachine:
    """State machine of an atomic model; outputs on states without a deltint cannot be drawn."""
    problems = errors_only(validate_atomic(spec))
    if problems:
        raise TransformError("invalid-spec", "; ".join(str(v) for v in problems))
    ta = dict(spec.ta)
    out = {e.state: e for e in spec.lambdas}
    has_int = {e.start for e in spec.deltint}
    stray = [s for s in out if s not in has_int]
    if stray:
        raise TransformError("invalid-spec", f"outputs on phases without an internal transition: {stray}")
    transitions = []
    for e in spec.deltint:
        lam = out.get(e.start)
        effect = guard = None
        if lam is not None:
            effect = lam.message.label
            guard = lam.outport if lam.outport != effect else None
        transitions.append(UmlTransition(e.start, e.next, DELTINT, guard, effect))
    for e in spec.deltext:
        transitions.append(UmlTransition(e.start, e.next, e.message, kind="external" if e.schedule else "internal"))
    return UmlStateMachine(
        spec.name,
        tuple(UmlState(s, ta.get(s, math.inf)) for s in spec.states),
        tuple(transitions),
    )


# --------------------------------------------------------------------------
# components <-> coupled models


@dataclass(frozen=True)
class CoupledMapping:
    """A coupled model plus what it needs from its parts.

    ``ports`` are the component's own UML ports; ``child_ports`` the ports
    of each part, keyed by part name.
    """

    spec: CoupledSpec
    ports: tuple[UmlPort, ...]
    child_ports: dict = field(default_factory=dict)


def _check_interfaces(a: UmlPort, b: UmlPort, where: str) -> None:
    if a.interface and b.interface and a.interface != b.interface:
        raise TransformError(
            "incompatible-interfaces", f"{where}: {a.interface!r} does not match {b.interface!r}"
        )


def connector_to_coupling(c: UmlComponent, conn: UmlConnector) -> tuple[Coupling, CouplingKind]:
    """One connector of ``c`` as a coupling, oriented from output to input."""
    def end(comp: str, port: str) -> tuple[UmlPort, bool]:
        if comp == c.name:
            return c.port(port), True
        return c.sub(comp).port(port), False

    (pa, a_parent), (pb, b_parent) = end(conn.from_component, conn.from_port), end(conn.to_component, conn.to_port)
    where = f"{conn.from_component}.{conn.from_port} / {conn.to_component}.{conn.to_port}"
    ends = [(conn.from_component, pa, a_parent), (conn.to_component, pb, b_parent)]
    if conn.kind == "assembly":
        if a_parent or b_parent:
            raise TransformError("direction-mismatch", f"{where}: an assembly connector joins two parts")
        if pa.is_input == pb.is_input:
            raise TransformError("direction-mismatch", f"{where}: assembly needs one required and one provided port")
        src, dst = ends if not pa.is_input else ends[::-1]
        _check_interfaces(src[1], dst[1], where)
        return Coupling(src[0], src[1].name, dst[0], dst[1].name), CouplingKind.IC
    if conn.kind == "delegation":
        if a_parent == b_parent:
            raise TransformError("direction-mismatch", f"{where}: delegation joins the component and one part")
        if pa.is_input != pb.is_input:
            raise TransformError("direction-mismatch", f"{where}: delegated ports must share a direction")
        parent, part = (ends[0], ends[1]) if a_parent else (ends[1], ends[0])
        _check_interfaces(parent[1], part[1], where)
        if pa.is_input:
            return Coupling(parent[0], parent[1].name, part[0], part[1].name), CouplingKind.EIC
        return Coupling(part[0], part[1].name, parent[0], parent[1].name), CouplingKind.EOC
    raise TransformError("unknown-connector", f"{where}: connector kind {conn.kind!r}")


def component_to_coupled(c: UmlComponent) -> CoupledMapping:
    """Coupled model of a component with parts; unused ports raise :class:`UmlWarning`."""
    if not c.subcomponents:
        raise TransformError("leaf-component", f"component {c.name!r} has no parts; it maps to an atomic model")
    couplings = [connector_to_coupling(c, conn)[0] for conn in c.connectors]
    used = {(x.src, x.outport) for x in couplings} | {(x.dest, x.inport) for x in couplings}
    for owner, ports in [(c.name, c.ports)] + [(s.name, s.ports) for s in c.subcomponents]:
        for p in ports:
            if (owner, p.name) not in used:
                warnings.warn(f"port {owner}.{p.name} of {c.name!r} is not connected", UmlWarning, stacklevel=2)
    spec = CoupledSpec(
        name=c.name,
        models=tuple(ModelRef(s.name) for s in c.subcomponents),
        couplings=tuple(couplings),
        inports=tuple(p.name for p in c.ports if p.is_input),
        outports=tuple(p.name for p in c.ports if not p.is_input),
    )
    return CoupledMapping(spec, c.ports, {s.name: s.ports for s in c.subcomponents})


def _ports_from(inports, outports, interfaces=None) -> tuple[UmlPort, ...]:
    interfaces = interfaces or {}
    return tuple(UmlPort(p, "provided", interfaces.get(p)) for p in inports) + tuple(
        UmlPort(p, "required", interfaces.get(p)) for p in outports
    )


def coupled_to_component(
    spec: CoupledSpec,
    reg: ModelRegistry | None = None,
    *,
    ports=None,
    child_ports=None,
    interfaces=None,
) -> UmlComponent:
    """Component of a coupled model; parts come from ``child_ports`` or ``reg``.

    Coupled parts found in ``reg`` are expanded recursively. ``interfaces``
    maps port names of ``spec`` to interface names when ``ports`` is not
    given.
    """
    child_ports = child_ports or {}
    subs = []
    for ref in spec.models:
        if ref.name in child_ports:
            subs.append(UmlComponent(ref.name, child_ports[ref.name]))
            continue
        if reg is None or not reg.can_resolve(ref):
            raise TransformError("unresolved-child", f"part {ref.name!r} of {spec.name!r} is not known")
        child = reg.resolve(ref)
        if isinstance(child, CoupledSpec):
            subs.append(coupled_to_component(child, reg))
        else:
            subs.append(UmlComponent(ref.name, _ports_from(child.inports, child.outports)))
    connectors = []
    for cp in spec.couplings:
        kind = spec.classify(cp)
        connectors.append(
            UmlConnector(
                "assembly" if kind is CouplingKind.IC else "delegation", cp.src, cp.outport, cp.dest, cp.inport
            )
        )
    own = tuple(ports) if ports is not None else _ports_from(spec.inports, spec.outports, interfaces)
    return UmlComponent(spec.name, own, tuple(subs), tuple(connectors))


# --------------------------------------------------------------------------
# registries


def _machines(elements) -> dict[str, UmlStateMachine]:
    return {e.name: e for e in elements if isinstance(e, UmlStateMachine)}


def registry_from_uml(elements, root: str | None = None) -> ModelRegistry:
    """Registry of the first (or named) top-level component and everything inside it.

    Leaf components become atomic models from their state machine, or
    passive shells when none is bound. Without any component, each state
    machine becomes a standalone atomic model.
    """
    machines = _machines(elements)
    components = [e for e in elements if isinstance(e, UmlComponent)]
    reg = ModelRegistry()
    if not components:
        for sm in machines.values():
            reg.add(statemachine_to_atomic(sm))
        reg.root = next(iter(machines), None)
        return reg
    top = components[0] if root is None else next((c for c in components if c.name == root), None)
    if top is None:
        raise TransformError("unresolved-child", f"no top-level component named {root!r}")

    def leaf(c: UmlComponent) -> AtomicSpec:
        ins = tuple(p.name for p in c.ports if p.is_input)
        outs = tuple(p.name for p in c.ports if not p.is_input)
        sm = machines.get(c.name)
        if sm is None:
            return AtomicSpec(c.name, ("passive",), ins, outs)
        return statemachine_to_atomic(sm, ins, outs)

    def add(c: UmlComponent) -> None:
        if c.name in reg:
            raise TransformError("duplicate-component", f"component name {c.name!r} is used twice")
        if c.subcomponents:
            reg[c.name] = component_to_coupled(c).spec
            for s in c.subcomponents:
                add(s)
        else:
            reg[c.name] = leaf(c)

    add(top)
    reg.root = top.name
    problems = errors_only(reg.validate(top.name))
    if problems:
        raise TransformError("invalid-spec", "; ".join(str(v) for v in problems))
    return reg


def registry_to_uml(reg: ModelRegistry, root: str | None = None) -> list[UmlElement]:
    """Top component (hierarchy included) followed by one machine per atomic model."""
    root = root if root is not None else reg.root
    if root is None:
        raise TransformError("unresolved-child", "registry has no root model")
    keys = reg.reachable(root)
    top = reg[root]
    if isinstance(top, CoupledSpec):
        out: list[UmlElement] = [coupled_to_component(top, reg)]
    else:
        out = [UmlComponent(top.name, _ports_from(top.inports, top.outports))]
    out += [atomic_to_statemachine(reg[k]) for k in keys if isinstance(reg[k], AtomicSpec)]
    return out


# --------------------------------------------------------------------------
# XMI reading


def _xmi(name: str) -> str:
    return _X + name


def _get(el: ET.Element, name: str) -> str | None:
    """Attribute lookup accepting both the namespaced and the bare spelling."""
    v = el.get(_xmi(name))
    return v if v is not None else el.get(name)


def _type(el: ET.Element) -> str | None:
    t = _get(el, "type")
    return t.split(":", 1)[-1] if t else None


def _local(tag) -> str:
    return tag.rsplit("}", 1)[-1] if isinstance(tag, str) else ""


def parse_xmi(doc: Document) -> list[UmlElement]:
    """Components and state machines in an XMI document, in document order.

    Unsupported element kinds are skipped with a :class:`UmlWarning`;
    interface declarations are skipped silently.
    """
    if isinstance(doc, (str, bytes)):
        try:
            root = ET.fromstring(doc)
        except ET.ParseError as exc:
            raise TransformError("malformed-xml", str(exc)) from exc
    elif isinstance(doc, ET.ElementTree):
        root = doc.getroot()
    else:
        root = doc
    containers = [root] + [el for el in root if _local(el.tag) == "Model"]
    out: list[UmlElement] = []
    for container in containers:
        for el in container:
            if _local(el.tag) != "packagedElement":
                continue
            kind = _type(el)
            if kind == "Component":
                out.append(_read_component(el))
            elif kind == "StateMachine":
                out.append(_read_machine(el))
            elif kind not in ("Interface", "Package"):
                warnings.warn(f"ignoring packagedElement of type {kind!r}", UmlWarning, stacklevel=2)
    return out


def _read_port(el: ET.Element) -> UmlPort:
    name = el.get("name")
    provided, required = el.get("provided"), el.get("required")
    if provided is not None and required is not None:
        raise TransformError("bidirectional-port", f"port {name!r} is both provided and required")
    if provided is None and required is None:
        raise TransformError("bidirectional-port", f"port {name!r} is neither provided nor required")
    direction, iface = ("provided", provided) if provided is not None else ("required", required)
    return UmlPort(name, direction, iface or None)


def _read_component(el: ET.Element) -> UmlComponent:
    ports, port_ids, subs = [], {}, []
    for child in el:
        tag = _local(child.tag)
        if tag == "ownedAttribute" and _type(child) == "Port":
            port = _read_port(child)
            ports.append(port)
            port_ids[_get(child, "id")] = port.name
        elif tag == "packagedElement" and _type(child) == "Component":
            subs.append(_read_component(child))
    comp_ids = {_get(el, "id"): el.get("name")}
    for child in el:
        if _local(child.tag) == "packagedElement" and _type(child) == "Component":
            comp_ids[_get(child, "id")] = child.get("name")
            for p in child:
                if _local(p.tag) == "ownedAttribute" and _type(p) == "Port":
                    port_ids[_get(p, "id")] = p.get("name")
    connectors = []
    for child in el:
        if _local(child.tag) != "ownedConnector":
            continue
        ends = [e for e in child if _local(e.tag) == "end"]
        if len(ends) != 2:
            raise TransformError("bad-connector", f"connector {_get(child, 'id')!r} needs two ends")
        resolved = []
        for e in ends:
            comp, port = comp_ids.get(e.get("partWithPort")), port_ids.get(e.get("role"))
            if comp is None or port is None:
                raise TransformError("bad-connector", f"connector {_get(child, 'id')!r} has an unknown end")
            resolved += [comp, port]
        connectors.append(UmlConnector(child.get("kind", "assembly"), *resolved))
    return UmlComponent(el.get("name"), tuple(ports), tuple(subs), tuple(connectors))


def _read_machine(el: ET.Element) -> UmlStateMachine:
    states, ids, transitions = [], {}, []
    for region in (r for r in el if _local(r.tag) == "region"):
        for v in region:
            if _local(v.tag) == "subvertex" and _type(v) == "State":
                st = parse_state_label(v.get("name"))
                states.append(st)
                ids[_get(v, "id")] = st.phase
        for t in region:
            if _local(t.tag) != "transition":
                continue
            src, dst = ids.get(t.get("source")), ids.get(t.get("target"))
            if src is None or dst is None:
                raise TransformError("unknown-state", f"transition {_get(t, 'id')!r} has an unknown end")
            trig = next((c.get("name") for c in t if _local(c.tag) == "trigger"), None)
            effect = next((c.get("name") for c in t if _local(c.tag) == "effect"), None)
            guard = None
            for g in (c for c in t if _local(c.tag) == "guard"):
                body = g.find(".//body")
                guard = (body.text or "").strip() if body is not None else g.get("name")
            transitions.append(UmlTransition(src, dst, trig, guard or None, effect, t.get("kind", "external")))
    return UmlStateMachine(el.get("name"), tuple(states), tuple(transitions))


# --------------------------------------------------------------------------
# XMI writing


def _component_xml(parent: ET.Element, c: UmlComponent, prefix: str) -> None:
    cid = f"{prefix}{c.name}"
    el = ET.SubElement(parent, "packagedElement", {_xmi("type"): "uml:Component", _xmi("id"): cid, "name": c.name})
    for p in c.ports:
        ET.SubElement(
            el,
            "ownedAttribute",
            {_xmi("type"): "uml:Port", _xmi("id"): f"{cid}.{p.name}", "name": p.name, p.direction: p.interface or ""},
        )
    for s in c.subcomponents:
        _component_xml(el, s, cid + "/")

    def ref(comp: str) -> str:
        return cid if comp == c.name else f"{cid}/{comp}"

    for i, conn in enumerate(c.connectors, 1):
        cel = ET.SubElement(el, "ownedConnector", {_xmi("id"): f"{cid}#c{i}", "kind": conn.kind})
        for comp, port in ((conn.from_component, conn.from_port), (conn.to_component, conn.to_port)):
            ET.SubElement(cel, "end", {"role": f"{ref(comp)}.{port}", "partWithPort": ref(comp)})


def _machine_xml(parent: ET.Element, sm: UmlStateMachine) -> None:
    mid = f"sm:{sm.name}"
    el = ET.SubElement(parent, "packagedElement", {_xmi("type"): "uml:StateMachine", _xmi("id"): mid, "name": sm.name})
    region = ET.SubElement(el, "region", {_xmi("id"): f"{mid}#region", "name": "main"})
    for s in sm.states:
        ET.SubElement(
            region, "subvertex", {_xmi("type"): "uml:State", _xmi("id"): f"{mid}.{s.phase}", "name": state_label(s)}
        )
    for i, t in enumerate(sm.transitions, 1):
        tid = f"{mid}#t{i}"
        tel = ET.SubElement(
            region,
            "transition",
            {_xmi("id"): tid, "source": f"{mid}.{t.source}", "target": f"{mid}.{t.target}", "kind": t.kind},
        )
        if t.trigger is not None:
            ET.SubElement(tel, "trigger", {_xmi("id"): tid + ".trigger", "name": t.trigger})
        if t.guard is not None:
            g = ET.SubElement(tel, "guard", {_xmi("id"): tid + ".guard"})
            ET.SubElement(ET.SubElement(g, "specification"), "body").text = t.guard
        if t.effect is not None:
            ET.SubElement(tel, "effect", {_xmi("type"): "uml:Activity", _xmi("id"): tid + ".effect", "name": t.effect})


def emit_xmi(models, name: str = "model") -> str:
    """One XMI document holding every component and state machine in ``models``."""
    ET.register_namespace("xmi", XMI_NS)
    ET.register_namespace("uml", UML_NS)
    root = ET.Element(_xmi("XMI"), {_xmi("version"): "2.1"})
    model = ET.SubElement(root, f"{{{UML_NS}}}Model", {_xmi("id"): "model", "name": name})
    for m in models:
        if isinstance(m, UmlComponent):
            _component_xml(model, m, "")
        elif isinstance(m, UmlStateMachine):
            _machine_xml(model, m)
        else:
            raise XmlFormatError(f"cannot write {type(m).__name__} as XMI")
    return _serialize(root)

