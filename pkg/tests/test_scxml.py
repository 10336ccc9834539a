from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fddevs.core import ExternalTransition, InternalTransition, LambdaEntry, ModelRegistry, time_advance
from fddevs.errors import TransformError
from fddevs.scxml import (
    ExtRec,
    IntRec,
    StateMachineDoc,
    emit_statemachine_xml,
    lift_statemachine,
    parse_delay,
    parse_statemachine_xml,
    scxml_to_atomic,
    transform_scxml,
)
from fddevs.sim import simulate
from fddevs.uml import parse_xmi, statemachine_to_atomic

M1_SM = StateMachineDoc(
    internal=[IntRec("active", "passive", 5.0, "M1OutputMessage")],
    external=[ExtRec("M1InputMessage", "passive", "passive", 0.0, "M1InputMessage")],
)


def scxml(body: str) -> str:
    return f"<scxml version='1.0'>{body}</scxml>"


# --------------------------------------------------------------------------
# transform


def test_transform_m1(data):
    assert transform_scxml((data / "scxml" / "m1.scxml").read_bytes()) == M1_SM


def test_transform_without_sends_omits_deltint(data):
    sm = transform_scxml((data / "scxml" / "no_send.scxml").read_bytes())
    assert sm.internal == ()
    assert "<deltint>" not in emit_statemachine_xml(sm)


def test_transform_shadowed_event_yields_no_external_record():
    sm = transform_scxml(scxml(
        "<state id='a'><onentry><send event='go' delay='1'/></onentry><transition event='go' target='b'/></state>"
        "<state id='b'><transition event='poke' target='a'/></state>"
    ))
    assert [r.incoming_msg for r in sm.external] == ["poke"]
    assert sm.internal == (IntRec("a", "b", 1.0, "go"),)


@pytest.mark.parametrize(
    "body, code",
    [
        ("<state id='a'><onentry><send event='x' delay='1'/></onentry></state>", "missing-target"),
        ("<state id='a'><onentry><send event='x'/></onentry><transition event='x' target='a'/></state>",
         "missing-delay"),
        ("<state id='a'><onentry><send event='x' delay='1'/></onentry>"
         "<transition event='x' target='a'/><transition event='x' target='b'/></state><state id='b'/>",
         "ambiguous-target"),
        ("<state id='a'><onentry><send delay='1'/></onentry></state>", "missing-event"),
        ("<state id='a'><transition event='x'/></state>", "missing-target"),
    ],
)
def test_transform_errors(body, code):
    with pytest.raises(TransformError) as info:
        transform_scxml(scxml(body))
    assert info.value.code == code


def test_transform_rejects_other_roots():
    with pytest.raises(TransformError) as info:
        transform_scxml("<statemachine/>")
    assert info.value.code == "not-scxml"


def test_send_under_transition_resolves_to_enclosing_state():
    sm = transform_scxml(scxml(
        "<state id='a'><transition event='poke' target='a'><send event='tick' delay='2'/></transition>"
        "<transition event='tick' target='a'/></state>"
    ))
    assert sm.internal == (IntRec("a", "a", 2.0, "tick"),)


@pytest.mark.parametrize(
    "text, seconds", [("5", 5.0), ("5s", 5.0), ("500ms", 0.5), (" 2.5 s ", 2.5), ("1e1", 10.0)]
)
def test_parse_delay(text, seconds):
    assert parse_delay(text) == seconds


@pytest.mark.parametrize("text", ["", "-1", "5min", "fast"])
def test_parse_delay_rejects(text):
    with pytest.raises(TransformError):
        parse_delay(text)


# --------------------------------------------------------------------------
# statemachine documents


def test_statemachine_layout():
    text = emit_statemachine_xml(M1_SM)
    assert '<statemachine name="default" host="localhost">' in text
    assert "<timeout>5</timeout>" in text


def test_delay_text_is_preserved(data):
    sm = transform_scxml((data / "scxml" / "units.scxml").read_bytes())
    assert parse_statemachine_xml(emit_statemachine_xml(sm)) == sm
    assert emit_statemachine_xml(parse_statemachine_xml(emit_statemachine_xml(sm))) == emit_statemachine_xml(sm)


_names = st.sampled_from(["a", "b", "c", "d"])
_msgs = st.sampled_from(["m1", "m2", "m3"])
_int = st.builds(IntRec, _names, _names, st.integers(0, 100).map(float), _msgs)
_ext = st.builds(ExtRec, _msgs, _names, _names, st.just(0.0), _msgs)


@settings(max_examples=100, deadline=None)
@given(internal=st.lists(_int, max_size=4), external=st.lists(_ext, max_size=4))
def test_statemachine_round_trip(internal, external):
    sm = StateMachineDoc(internal=internal, external=external)
    assert parse_statemachine_xml(emit_statemachine_xml(sm)) == sm


# --------------------------------------------------------------------------
# lifting


def test_lift_m1():
    spec = lift_statemachine(M1_SM, name="M1")
    assert spec.states == ("active", "passive")
    assert time_advance(spec, "active") == 5.0
    assert time_advance(spec, "passive") == math.inf
    assert spec.lambdas == (LambdaEntry("active", "M1OutputMessage", "M1OutputMessage"),)
    assert spec.deltint == (InternalTransition("active", "passive", 1),)
    assert spec.deltext == (ExternalTransition("passive", "M1InputMessage", "passive", True, 1),)
    assert spec.inports == ("M1InputMessage",) and spec.outports == ("M1OutputMessage",)


def test_lift_m1_fixture_emits_at_five(data):
    spec = scxml_to_atomic((data / "scxml" / "m1.scxml").read_bytes(), name="M1")
    trace = simulate(ModelRegistry.of(spec), "M1", 20.0)
    assert [(e.t, e.label) for e in trace.outputs()] == [(5.0, "M1OutputMessage")]


def test_lift_matches_uml_machine(data):
    (machine,) = parse_xmi((data / "uml" / "machine_m1.xmi").read_bytes())
    from_uml = statemachine_to_atomic(machine)
    from_scxml = scxml_to_atomic((data / "scxml" / "m1.scxml").read_bytes(), name="M1")
    assert from_uml == from_scxml


@pytest.mark.parametrize(
    "sm, code",
    [
        (StateMachineDoc(), "empty-machine"),
        (StateMachineDoc(internal=[IntRec("s0", "s1", 3, "x"), IntRec("s0", "s2", 3, "x")]), "conflicting-internal"),
        (StateMachineDoc(internal=[IntRec("s0", "s1", 3, "x"), IntRec("s0", "s1", 4, "x")]), "conflicting-timeouts"),
        (StateMachineDoc(external=[ExtRec("m", "s0", "s1"), ExtRec("m", "s0", "s0")]), "conflicting-ext"),
    ],
)
def test_lift_errors(sm, code):
    with pytest.raises(TransformError) as info:
        lift_statemachine(sm)
    assert info.value.code == code


def test_lift_initial_falls_back_to_first_external():
    spec = lift_statemachine(StateMachineDoc(external=[ExtRec("m", "b", "a")]))
    assert spec.initial == "b"


@pytest.mark.parametrize(
    "name",
    ["m1", "generator", "processor", "traffic_light", "units", "onexit_send", "transition_send", "no_send"],
)
def test_lifted_fixtures_simulate(data, name):
    spec = scxml_to_atomic((data / "scxml" / f"{name}.scxml").read_bytes(), name=name)
    trace = simulate(ModelRegistry.of(spec), name, 50.0)
    timed = {s for s, _ in spec.ta}
    assert {e.port for e in trace.outputs()} <= set(spec.outports)
    assert all(e.before in timed for e in trace.events if e.kind.value == "INTERNAL")
