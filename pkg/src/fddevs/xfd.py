"""Reading, writing and checking XFD-DEVS atomic and coupled XML documents.

Two spellings exist for each document kind. The *schema* dialects follow the
published atomic and coupled XML schemas element for element (including the
``delttext`` spelling); the *variant* dialects are the looser spellings seen
in generated instance files (``TimeAdvance``/``Timeout``, ``LamdaSet``,
``intTransitionID``, ``SrcModel``/``DestModel``, models listed before
couplings). Parsers accept both; emitters always write the schema dialect,
without namespaces.

One extension is read and written in both dialects: a ``lamda`` entry may
carry a trailing ``<message>`` element naming the emitted label. Without it
the label is the output port name.
"""

from __future__ import annotations

import copy
import math
import re
import warnings
import xml.etree.ElementTree as ET
from enum import Enum
from pathlib import Path
from typing import Union

from .core import (
    AtomicSpec,
    CoupledSpec,
    Coupling,
    ExternalTransition,
    InternalTransition,
    LambdaEntry,
    ModelRef,
    ModelRegistry,
    Violation,
    errors_only,
    format_time,
    validate_atomic,
    validate_coupled,
)
from .errors import (
    CycleDetected,
    DialectMismatchError,
    ModelFileNotFound,
    ValidationFailed,
    XmlFormatError,
)

Document = Union[str, bytes, ET.Element, ET.ElementTree]


class XmlDialect(str, Enum):
    ATOMIC_SCHEMA = "atomic-schema"
    ATOMIC_VARIANT = "atomic-variant"
    COUPLED_SCHEMA = "coupled-schema"
    COUPLED_VARIANT = "coupled-variant"


class DocumentWarning(UserWarning):
    """A document deviates from the schemas in a tolerated way."""


_ATOMIC_NAMES = {
    XmlDialect.ATOMIC_SCHEMA: dict(
        ta="timeAdvance", timeout="timeout", lamdas="lamdas", deltext="delttext", int_id="id", ext_id="id"
    ),
    XmlDialect.ATOMIC_VARIANT: dict(
        ta="TimeAdvance",
        timeout="Timeout",
        lamdas="LamdaSet",
        deltext="deltext",
        int_id="intTransitionID",
        ext_id="extTransitionID",
    ),
}
_ATOMIC_ORDER = {
    XmlDialect.ATOMIC_SCHEMA: ["inports", "states", "outports", "deltint", "delttext", "timeAdvance", "lamdas"],
    XmlDialect.ATOMIC_VARIANT: ["inports", "states", "outports", "TimeAdvance", "LamdaSet", "deltint", "deltext"],
}
_COUPLED_ORDER = {
    XmlDialect.COUPLED_SCHEMA: ["Couplings", "Models", "Inports", "Outports"],
    XmlDialect.COUPLED_VARIANT: ["Models", "Couplings", "Inports", "Outports"],
}
_COUPLING_FIELDS = {
    XmlDialect.COUPLED_SCHEMA: ("coupling", ["src", "dest", "outport", "inport"]),
    XmlDialect.COUPLED_VARIANT: ("Coupling", ["SrcModel", "output", "DestModel", "inport"]),
}

# role of each field listed in _COUPLING_FIELDS, in the same order
_COUPLING_ROLES = {
    XmlDialect.COUPLED_SCHEMA: ("src", "dest", "outport", "inport"),
    XmlDialect.COUPLED_VARIANT: ("src", "outport", "dest", "inport"),
}

_STRICT_ATOMIC_TAGS = {"timeAdvance", "timeout", "lamdas", "delttext"}
_VARIANT_ATOMIC_TAGS = {"TimeAdvance", "Timeout", "LamdaSet"}
_STRICT_COUPLED_TAGS = {"coupling", "src", "dest"}
_VARIANT_COUPLED_TAGS = {"Coupling", "SrcModel", "DestModel", "output", "devs"}

_DECIMAL = re.compile(r"^\+?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_INFINITE = {"INF", "inf", "Infinity", "+INF", "infinity"}
_BOOLEAN = {"true": True, "1": True, "false": False, "0": False}


# --------------------------------------------------------------------------
# element helpers


def _local(name: str) -> str:
    return name.rsplit("}", 1)[-1] if name.startswith("{") else name


def _root_of(doc: Document) -> ET.Element:
    """Parse ``doc`` and return a namespace-free copy of its root element."""
    if isinstance(doc, ET.ElementTree):
        root = copy.deepcopy(doc.getroot())
    elif isinstance(doc, ET.Element):
        root = copy.deepcopy(doc)
    else:
        try:
            root = ET.fromstring(doc)
        except ET.ParseError as exc:
            raise XmlFormatError(f"malformed XML: {exc}") from exc
    for el in root.iter():
        if isinstance(el.tag, str):
            el.tag = _local(el.tag)
        if any(k.startswith("{") for k in el.attrib):
            el.attrib = {_local(k): v for k, v in el.attrib.items()}
    return root


def _elements(el: ET.Element) -> list[ET.Element]:
    return [c for c in el if isinstance(c.tag, str)]


def _text(el: ET.Element | None) -> str:
    return (el.text or "").strip() if el is not None else ""


def _child(el: ET.Element, *names: str) -> ET.Element | None:
    for c in _elements(el):
        if c.tag in names:
            return c
    return None


def _children(el: ET.Element | None, *names: str) -> list[ET.Element]:
    if el is None:
        return []
    return [c for c in _elements(el) if c.tag in names]


def parse_timeout(text: str) -> float:
    """Lexical timeout -> float; accepts decimals, exponents and INF spellings."""
    s = text.strip()
    if s in _INFINITE:
        return math.inf
    if not _DECIMAL.match(s):
        raise ValueError(f"not a non-negative decimal: {text!r}")
    return float(s)


def _tags_and_attrs(root: ET.Element) -> tuple[set, set]:
    tags, attrs = set(), set()
    for el in root.iter():
        if isinstance(el.tag, str):
            tags.add(el.tag)
            attrs.update(el.attrib)
    return tags, attrs


def detect_dialect(doc: Document) -> XmlDialect:
    """Which spelling a document uses; raises on a mix of both."""
    root = _root_of(doc)
    return _detect(root)


def _detect(root: ET.Element) -> XmlDialect:
    tags, attrs = _tags_and_attrs(root)
    if root.tag == "Atomic":
        strict = tags & _STRICT_ATOMIC_TAGS
        variant = tags & _VARIANT_ATOMIC_TAGS
        transitions = [el for el in root.iter() if el.tag in ("InternalTransition", "ExternalTransition")]
        if any("id" in t.attrib for t in transitions):
            strict = strict | {"@id"}
        if attrs & {"intTransitionID", "extTransitionID"}:
            variant = variant | (attrs & {"intTransitionID", "extTransitionID"})
        if strict and variant:
            raise DialectMismatchError(
                f"mixed atomic spellings: {sorted(strict)} and {sorted(variant)}"
            )
        return XmlDialect.ATOMIC_VARIANT if variant else XmlDialect.ATOMIC_SCHEMA
    if root.tag == "Digraph":
        strict = tags & _STRICT_COUPLED_TAGS
        variant = tags & _VARIANT_COUPLED_TAGS
        if strict and variant:
            raise DialectMismatchError(
                f"mixed coupled spellings: {sorted(strict)} and {sorted(variant)}"
            )
        if not strict and not variant:
            kids = [c.tag for c in _elements(root)]
            if "Models" in kids and "Couplings" in kids and kids.index("Models") < kids.index("Couplings"):
                return XmlDialect.COUPLED_VARIANT
        return XmlDialect.COUPLED_VARIANT if variant else XmlDialect.COUPLED_SCHEMA
    raise XmlFormatError(f"root element <{root.tag}> is neither Atomic nor Digraph")


# --------------------------------------------------------------------------
# atomic documents


def parse_atomic_xml(doc: Document, name: str | None = None) -> AtomicSpec:
    """Build an :class:`AtomicSpec` from either atomic dialect.

    ``name`` is used when the document has no ``modelName`` attribute.
    A missing ``ScheduleIndicator`` means ``true``.
    """
    root = _root_of(doc)
    if root.tag != "Atomic":
        raise XmlFormatError(f"expected <Atomic>, found <{root.tag}>")
    dialect = _detect(root)
    names = _ATOMIC_NAMES[dialect]
    problems: list[Violation] = []

    model_name = root.get("modelName") or name
    if not model_name:
        problems.append(Violation("MissingAttribute", "/Atomic/@modelName", "modelName is required"))

    def items(section: str, item: str) -> list[str]:
        return [_text(e) for e in _children(_child(root, section), item)]

    ta = []
    for i, e in enumerate(_children(_child(root, names["ta"], "timeAdvance", "TimeAdvance"), "ta"), 1):
        path = f"/Atomic/{names['ta']}/ta[{i}]"
        t_el = _child(e, names["timeout"])
        if _child(e, "state") is None or t_el is None:
            problems.append(Violation("MissingElement", path, "ta needs state and timeout"))
            continue
        try:
            ta.append((_text(_child(e, "state")), parse_timeout(_text(t_el))))
        except ValueError as exc:
            problems.append(Violation("InvalidNumber", path + "/" + names["timeout"], str(exc)))

    lambdas = []
    for i, e in enumerate(_children(_child(root, names["lamdas"]), "lamda"), 1):
        s_el, p_el, m_el = _child(e, "state"), _child(e, "outport"), _child(e, "message")
        if s_el is None or p_el is None:
            problems.append(
                Violation("MissingElement", f"/Atomic/{names['lamdas']}/lamda[{i}]", "lamda needs state and outport")
            )
            continue
        lambdas.append(LambdaEntry(_text(s_el), _text(p_el), _text(m_el) if m_el is not None else None))

    def read_id(el: ET.Element, attr: str, path: str) -> int:
        raw = el.get(attr)
        if raw is None:
            return 0
        try:
            return int(raw.strip())
        except ValueError:
            problems.append(Violation("InvalidInteger", f"{path}/@{attr}", f"id {raw!r} is not an integer"))
            return 0

    def read_transition(el: ET.Element, path: str):
        tr = _child(el, "transition")
        start, nxt = (_child(tr, "StartState"), _child(tr, "NextState")) if tr is not None else (None, None)
        if start is None or nxt is None:
            problems.append(Violation("MissingElement", path + "/transition", "transition needs StartState and NextState"))
            return None
        return _text(start), _text(nxt)

    deltint = []
    for i, e in enumerate(_children(_child(root, "deltint"), "InternalTransition"), 1):
        path = f"/Atomic/deltint/InternalTransition[{i}]"
        pair = read_transition(e, path)
        if pair:
            deltint.append(InternalTransition(pair[0], pair[1], read_id(e, names["int_id"], path)))

    deltext = []
    ext_section = _child(root, "delttext", "deltext")
    for i, e in enumerate(_children(ext_section, "ExternalTransition"), 1):
        path = f"/Atomic/{names['deltext']}/ExternalTransition[{i}]"
        pair = read_transition(e, path)
        msg = _child(e, "IncomingMessage")
        if msg is None:
            problems.append(Violation("MissingElement", path + "/IncomingMessage", "IncomingMessage is required"))
            continue
        sched_el = _child(e, "ScheduleIndicator")
        schedule = True
        if sched_el is not None:
            raw = _text(sched_el)
            if raw not in _BOOLEAN:
                problems.append(Violation("InvalidBoolean", path + "/ScheduleIndicator", f"{raw!r} is not a boolean"))
            schedule = _BOOLEAN.get(raw, True)
        if pair:
            deltext.append(
                ExternalTransition(pair[0], _text(msg), pair[1], schedule, read_id(e, names["ext_id"], path))
            )

    if problems:
        raise ValidationFailed(problems, context=f"atomic document ({dialect.value})")
    spec = AtomicSpec(
        name=model_name,
        states=items("states", "state"),
        inports=items("inports", "inport"),
        outports=items("outports", "outport"),
        ta=ta,
        lambdas=lambdas,
        deltint=deltint,
        deltext=deltext,
        host=root.get("host", "localhost"),
    )
    found = errors_only(validate_atomic(spec))
    if found:
        raise ValidationFailed(found, context=f"atomic model {model_name!r} ({dialect.value})")
    return spec


def _sub(parent: ET.Element, tag: str, text: str | None = None, **attrib) -> ET.Element:
    el = ET.SubElement(parent, tag, attrib)
    if text is not None:
        el.text = text
    return el


def _serialize(root: ET.Element) -> str:
    ET.indent(root, space="  ")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


def emit_atomic_xml(spec: AtomicSpec) -> str:
    """Write ``spec`` in the atomic schema dialect.

    Warns with :class:`DocumentWarning` when no state has a finite timeout,
    since the schema asks for at least one ``ta`` entry.
    """
    problems = errors_only(validate_atomic(spec))
    if problems:
        raise ValidationFailed(problems, context=f"cannot emit atomic model {spec.name!r}")
    root = ET.Element("Atomic", {"modelName": spec.name, "host": spec.host})
    inports = _sub(root, "inports")
    for p in spec.inports:
        _sub(inports, "inport", p)
    states = _sub(root, "states")
    for s in spec.states:
        _sub(states, "state", s)
    outports = _sub(root, "outports")
    for p in spec.outports:
        _sub(outports, "outport", p)
    deltint = _sub(root, "deltint")
    for e in spec.deltint:
        it = _sub(deltint, "InternalTransition", id=str(e.id))
        tr = _sub(it, "transition")
        _sub(tr, "StartState", e.start)
        _sub(tr, "NextState", e.next)
    deltext = _sub(root, "delttext")
    for e in spec.deltext:
        et = _sub(deltext, "ExternalTransition", id=str(e.id))
        _sub(et, "IncomingMessage", e.message)
        tr = _sub(et, "transition")
        _sub(tr, "StartState", e.start)
        _sub(tr, "NextState", e.next)
        _sub(et, "ScheduleIndicator", "true" if e.schedule else "false")
    ta = _sub(root, "timeAdvance")
    for s, t in spec.ta:
        entry = _sub(ta, "ta")
        _sub(entry, "state", s)
        _sub(entry, "timeout", format_time(t))
    if not spec.ta:
        warnings.warn(
            f"atomic model {spec.name!r} has no finite timeout; timeAdvance is left empty",
            DocumentWarning,
            stacklevel=2,
        )
    lamdas = _sub(root, "lamdas")
    for e in spec.lambdas:
        lam = _sub(lamdas, "lamda")
        _sub(lam, "state", e.state)
        _sub(lam, "outport", e.outport)
        if e.label is not None:
            _sub(lam, "message", e.label)
    return _serialize(root)


# --------------------------------------------------------------------------
# coupled documents


def parse_coupled_xml(doc: Document, name: str | None = None) -> CoupledSpec:
    """Build a :class:`CoupledSpec` from either coupled dialect.

    ``Model`` text (or its ``devs`` child) is the child name; ``type`` and
    ``platform`` attributes become hints. ``name`` is used when the
    ``Digraph`` has no ``name`` attribute.
    """
    root = _root_of(doc)
    if root.tag != "Digraph":
        raise XmlFormatError(f"expected <Digraph>, found <{root.tag}>")
    dialect = _detect(root)
    problems: list[Violation] = []
    model_name = root.get("name") or name
    if not model_name:
        problems.append(Violation("MissingAttribute", "/Digraph/@name", "a model name is required"))

    models = []
    for i, m in enumerate(_children(_child(root, "Models"), "Model"), 1):
        inner = _elements(m)
        child_name = _text(inner[0]) if inner else _text(m)
        if not child_name:
            problems.append(Violation("MissingElement", f"/Digraph/Models/Model[{i}]", "model name is empty"))
            continue
        models.append(ModelRef(child_name, m.get("type"), m.get("platform")))

    tag, fields = _COUPLING_FIELDS[dialect]
    couplings = []
    for i, c in enumerate(_children(_child(root, "Couplings"), tag), 1):
        values = {}
        for f in fields:
            el = _child(c, f)
            if el is None:
                problems.append(Violation("MissingElement", f"/Digraph/Couplings/{tag}[{i}]/{f}", f"{f} is required"))
            values[f] = _text(el)
        role = dict(zip(_COUPLING_ROLES[dialect], fields))
        couplings.append(Coupling(*(values[role[r]] for r in ("src", "outport", "dest", "inport"))))

    if problems:
        raise ValidationFailed(problems, context=f"coupled document ({dialect.value})")
    spec = CoupledSpec(
        name=model_name,
        models=models,
        couplings=couplings,
        inports=[_text(e) for e in _children(_child(root, "Inports"), "inport")],
        outports=[_text(e) for e in _children(_child(root, "Outports"), "outport")],
        host=root.get("host", "localhost"),
    )
    found = errors_only(validate_coupled(spec))
    if found:
        raise ValidationFailed(found, context=f"coupled model {model_name!r} ({dialect.value})")
    return spec


def emit_coupled_xml(spec: CoupledSpec) -> str:
    """Write ``spec`` in the coupled schema dialect.

    Warns with :class:`DocumentWarning` when there are no couplings (the
    schema asks for at least one).
    """
    problems = errors_only(validate_coupled(spec))
    if not spec.models:
        problems.append(Violation("Occurrence", "/Digraph/Models", "at least one child model is required"))
    if problems:
        raise ValidationFailed(problems, context=f"cannot emit coupled model {spec.name!r}")
    root = ET.Element("Digraph", {"name": spec.name, "host": spec.host})
    couplings = _sub(root, "Couplings")
    for c in spec.couplings:
        el = _sub(couplings, "coupling")
        _sub(el, "src", c.src)
        _sub(el, "dest", c.dest)
        _sub(el, "outport", c.outport)
        _sub(el, "inport", c.inport)
    if not spec.couplings:
        warnings.warn(
            f"coupled model {spec.name!r} has no couplings; Couplings is left empty",
            DocumentWarning,
            stacklevel=2,
        )
    models = _sub(root, "Models")
    for m in spec.models:
        attrib = {}
        if m.type_hint is not None:
            attrib["type"] = m.type_hint
        if m.platform is not None:
            attrib["platform"] = m.platform
        _sub(models, "Model", m.name, **attrib)
    inports = _sub(root, "Inports")
    for p in spec.inports:
        _sub(inports, "inport", p)
    outports = _sub(root, "Outports")
    for p in spec.outports:
        _sub(outports, "outport", p)
    return _serialize(root)


def parse_model_xml(doc: Document, name: str | None = None) -> AtomicSpec | CoupledSpec:
    root = _root_of(doc)
    if root.tag == "Digraph":
        return parse_coupled_xml(root, name)
    if root.tag == "Atomic":
        return parse_atomic_xml(root, name)
    raise XmlFormatError(f"root element <{root.tag}> is neither Atomic nor Digraph")


def emit_model_xml(spec: AtomicSpec | CoupledSpec) -> str:
    return emit_atomic_xml(spec) if isinstance(spec, AtomicSpec) else emit_coupled_xml(spec)


# --------------------------------------------------------------------------
# document validation


class _Checker:
    def __init__(self):
        self.found: list[Violation] = []

    def add(self, code: str, path: str, message: str) -> None:
        self.found.append(Violation(code, path, message))

    def warn(self, code: str, path: str, message: str) -> None:
        warnings.warn(f"{code} at {path}: {message}", DocumentWarning, stacklevel=4)

    def sequence(self, el: ET.Element, path: str, expected: list[str], required: set[str], aliases=None):
        """Check children of ``el`` against an ordered content model.

        Each expected name may occur at most once. Returns the children by name.
        """
        aliases = aliases or {}
        seen: dict[str, ET.Element] = {}
        last = -1
        for c in _elements(el):
            slot = aliases.get(c.tag, c.tag)
            if slot not in expected:
                self.add("UnexpectedElement", f"{path}/{c.tag}", f"<{c.tag}> is not allowed here")
                continue
            if slot in seen:
                self.add("Occurrence", f"{path}/{c.tag}", f"<{c.tag}> occurs more than once")
                continue
            pos = expected.index(slot)
            if pos < last:
                self.add("ElementOrder", f"{path}/{c.tag}", f"<{c.tag}> is out of order; expected {expected}")
            last = max(last, pos)
            seen[slot] = c
        for name in expected:
            if name in required and name not in seen:
                self.add("MissingElement", f"{path}/{name}", f"<{name}> is required")
        return seen

    def repeated(self, el: ET.Element | None, path: str, item: str, minimum: int = 0, soft_min: bool = False):
        if el is None:
            return []
        items = []
        for c in _elements(el):
            if c.tag != item:
                self.add("UnexpectedElement", f"{path}/{c.tag}", f"only <{item}> is allowed in <{el.tag}>")
            else:
                items.append(c)
        if len(items) < minimum:
            if soft_min:
                code = "EmptyCouplings" if item in ("coupling", "Coupling") else "EmptyTimeAdvance"
                self.warn(code, path, f"expected at least {minimum} <{item}>")
            else:
                self.add("Occurrence", path, f"expected at least {minimum} <{item}>")
        return items

    def leaf(self, el: ET.Element | None, path: str) -> None:
        if el is not None and _elements(el):
            self.add("UnexpectedElement", path, f"<{el.tag}> must contain text only")


def validate_document(doc: Document, kind: str | None = None) -> list[Violation]:
    """Check a document against the schema rules without an XSD processor.

    ``kind`` is ``"atomic"``, ``"coupled"`` or ``None``/``"auto"``. Returns
    error-level violations; tolerated deviations (missing coupled ``host``,
    empty ``timeAdvance`` or ``Couplings``) are issued as
    :class:`DocumentWarning`. Documents that pass the structural checks are
    also built into a spec and checked semantically.
    """
    try:
        root = _root_of(doc)
    except XmlFormatError as exc:
        return [Violation("MalformedXml", "/", str(exc))]
    expected_tag = {"atomic": "Atomic", "coupled": "Digraph"}.get(kind or "auto")
    if expected_tag and root.tag != expected_tag:
        return [Violation("KindMismatch", f"/{root.tag}", f"expected <{expected_tag}> document, found <{root.tag}>")]
    if root.tag not in ("Atomic", "Digraph"):
        return [Violation("KindMismatch", f"/{root.tag}", f"<{root.tag}> is neither Atomic nor Digraph")]
    try:
        dialect = _detect(root)
    except DialectMismatchError as exc:
        return [Violation("DialectMismatch", f"/{root.tag}", str(exc))]
    ck = _Checker()
    if root.tag == "Atomic":
        _check_atomic(root, dialect, ck)
    else:
        _check_coupled(root, dialect, ck)
    if ck.found:
        return ck.found
    try:
        parse_model_xml(root, name=root.get("modelName") or root.get("name") or "anonymous")
    except ValidationFailed as exc:
        return exc.violations
    return []


def _check_atomic(root: ET.Element, dialect: XmlDialect, ck: _Checker) -> None:
    strict = dialect is XmlDialect.ATOMIC_SCHEMA
    names = _ATOMIC_NAMES[dialect]
    if "modelName" not in root.attrib:
        ck.add("MissingAttribute", "/Atomic/@modelName", "modelName is required")
    if "host" not in root.attrib:
        if strict:
            ck.add("MissingAttribute", "/Atomic/@host", "host is required")
        else:
            ck.warn("MissingAttribute", "/Atomic/@host", "host is missing")
    order = _ATOMIC_ORDER[dialect]
    required = set(order) if strict else {"states"}
    aliases = {"deltext": "delttext"} if strict else {"delttext": "deltext"}
    seen = ck.sequence(root, "/Atomic", order, required, aliases)

    for section, item in (("inports", "inport"), ("outports", "outport")):
        for i, e in enumerate(ck.repeated(seen.get(section), f"/Atomic/{section}", item), 1):
            ck.leaf(e, f"/Atomic/{section}/{item}[{i}]")
    for i, e in enumerate(ck.repeated(seen.get("states"), "/Atomic/states", "state", minimum=1), 1):
        ck.leaf(e, f"/Atomic/states/state[{i}]")

    ta_path = f"/Atomic/{names['ta']}"
    for i, e in enumerate(ck.repeated(seen.get(names["ta"]), ta_path, "ta", minimum=1, soft_min=True), 1):
        p = f"{ta_path}/ta[{i}]"
        parts = ck.sequence(e, p, ["state", names["timeout"]], {"state", names["timeout"]})
        t_el = parts.get(names["timeout"])
        if t_el is not None:
            try:
                parse_timeout(_text(t_el))
            except ValueError:
                ck.add("InvalidNumber", f"{p}/{names['timeout']}", f"{_text(t_el)!r} is not a non-negative decimal")

    lam_path = f"/Atomic/{names['lamdas']}"
    for i, e in enumerate(ck.repeated(seen.get(names["lamdas"]), lam_path, "lamda"), 1):
        ck.sequence(e, f"{lam_path}/lamda[{i}]", ["state", "outport", "message"], {"state", "outport"})

    def transition(el: ET.Element, p: str) -> None:
        ck.sequence(el, p, ["StartState", "NextState"], {"StartState", "NextState"})

    def check_id(el: ET.Element, attr: str, p: str) -> None:
        raw = el.get(attr)
        if raw is None:
            if strict:
                ck.add("MissingAttribute", f"{p}/@{attr}", f"{attr} is required")
        elif not re.fullmatch(r"[+-]?\d+", raw.strip()):
            ck.add("InvalidInteger", f"{p}/@{attr}", f"{raw!r} is not an integer")

    for i, e in enumerate(ck.repeated(seen.get("deltint"), "/Atomic/deltint", "InternalTransition"), 1):
        p = f"/Atomic/deltint/InternalTransition[{i}]"
        check_id(e, names["int_id"], p)
        parts = ck.sequence(e, p, ["transition"], {"transition"})
        if "transition" in parts:
            transition(parts["transition"], p + "/transition")

    ext_tag = names["deltext"]
    ext_el = seen.get(ext_tag)
    for i, e in enumerate(ck.repeated(ext_el, f"/Atomic/{ext_tag}", "ExternalTransition"), 1):
        p = f"/Atomic/{ext_tag}/ExternalTransition[{i}]"
        check_id(e, names["ext_id"], p)
        req = {"IncomingMessage", "transition", "ScheduleIndicator"} if strict else {"IncomingMessage", "transition"}
        parts = ck.sequence(e, p, ["IncomingMessage", "transition", "ScheduleIndicator"], req)
        if "transition" in parts:
            transition(parts["transition"], p + "/transition")
        flag = parts.get("ScheduleIndicator")
        if flag is not None and _text(flag) not in _BOOLEAN:
            ck.add("InvalidBoolean", p + "/ScheduleIndicator", f"{_text(flag)!r} is not a boolean")


def _check_coupled(root: ET.Element, dialect: XmlDialect, ck: _Checker) -> None:
    strict = dialect is XmlDialect.COUPLED_SCHEMA
    for attr in ("name", "host"):
        if attr not in root.attrib:
            ck.warn("MissingAttribute", f"/Digraph/@{attr}", f"{attr} is missing")
    order = _COUPLED_ORDER[dialect]
    required = set(order) if strict else {"Models"}
    seen = ck.sequence(root, "/Digraph", order, required)
    tag, fields = _COUPLING_FIELDS[dialect]
    for i, c in enumerate(ck.repeated(seen.get("Couplings"), "/Digraph/Couplings", tag, minimum=1, soft_min=True), 1):
        p = f"/Digraph/Couplings/{tag}[{i}]"
        parts = ck.sequence(c, p, fields, set(fields))
        for f, el in parts.items():
            ck.leaf(el, f"{p}/{f}")
    for i, m in enumerate(ck.repeated(seen.get("Models"), "/Digraph/Models", "Model", minimum=1), 1):
        p = f"/Digraph/Models/Model[{i}]"
        inner = _elements(m)
        if strict:
            ck.leaf(m, p)
        elif len(inner) > 1 or (inner and inner[0].tag != "devs"):
            ck.add("UnexpectedElement", p, "Model may only wrap a single <devs> element")
        name = _text(inner[0]) if inner else _text(m)
        if not name:
            ck.add("MissingElement", p, "model name is empty")
    for section, item in (("Inports", "inport"), ("Outports", "outport")):
        for i, e in enumerate(ck.repeated(seen.get(section), f"/Digraph/{section}", item), 1):
            ck.leaf(e, f"/Digraph/{section}/{item}[{i}]")


# --------------------------------------------------------------------------
# files


def read_model(path: str | Path) -> AtomicSpec | CoupledSpec:
    """Parse one model file; the file stem names models that lack a name attribute."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except FileNotFoundError as exc:
        raise ModelFileNotFound(str(path)) from exc
    try:
        return parse_model_xml(data, name=path.stem)
    except ValidationFailed as exc:
        raise ValidationFailed(exc.violations, context=f"{path}: {exc.context}") from exc
    except XmlFormatError as exc:
        raise type(exc)(f"{path}: {exc}") from exc


def write_model(spec: AtomicSpec | CoupledSpec, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(emit_model_xml(spec), encoding="utf-8")
    return path


def load_model_tree(root_file: str | Path, directory: str | Path | None = None) -> ModelRegistry:
    """Load a coupled model and, recursively, every child it references.

    A child is looked up as ``<name>.xml`` in ``directory`` (default: the
    root file's directory), then as ``<type>.xml`` when the reference has a
    type hint. The resulting registry has ``root`` set and is validated.
    """
    root_file = Path(root_file)
    directory = Path(directory) if directory is not None else root_file.parent
    reg = ModelRegistry()
    loading: list[str] = []

    def load(path: Path, key_hint: str) -> str:
        spec = read_model(path)
        key = spec.name
        if key in loading:
            raise CycleDetected(f"containment cycle: {' -> '.join(loading + [key])}")
        if key in reg:
            return key
        loading.append(key)
        reg[key] = spec
        if isinstance(spec, CoupledSpec):
            for ref in spec.models:
                if ref.name in loading or ref.type_hint in loading:
                    cyc = ref.name if ref.name in loading else ref.type_hint
                    raise CycleDetected(f"containment cycle: {' -> '.join(loading + [cyc])}")
                if reg.can_resolve(ref):
                    continue
                candidates = [directory / f"{ref.name}.xml"]
                if ref.type_hint:
                    candidates.append(directory / f"{ref.type_hint}.xml")
                found = next((c for c in candidates if c.is_file()), None)
                if found is None:
                    raise ModelFileNotFound(f"{ref.name}.xml (referenced by {key!r} in {directory})")
                load(found, ref.name)
        loading.pop()
        return key

    if not root_file.is_file():
        raise ModelFileNotFound(str(root_file))
    reg.root = load(root_file, root_file.stem)
    problems = errors_only(reg.validate(reg.root))
    if problems:
        raise ValidationFailed(problems, context=f"model tree {root_file}")
    return reg


def write_model_tree(reg: ModelRegistry, directory: str | Path, root: str | None = None) -> list[Path]:
    """Write every model reachable from ``root`` as ``<name>.xml`` under ``directory``."""
    directory = Path(directory)
    root = root if root is not None else reg.root
    keys = reg.reachable(root) if root is not None else list(reg)
    return [write_model(reg[k], directory / f"{k}.xml") for k in keys]
