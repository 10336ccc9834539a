from __future__ import annotations

import json
import math

import pytest
from hypothesis import given, settings

from fddevs.core import AtomicSpec, Bag, CoupledSpec, Coupling, InternalTransition, ModelRef, ModelRegistry
from fddevs.efp import GENERATOR, PROCESSOR, TRANSDUCER, EfpParams, build_ef, build_efp, build_m1m2
from fddevs.errors import SimulationError, TimeRegressionError, ValidationFailed, ZeroTimeLoopError
from fddevs.sim import (
    EventKind,
    TraceEvent,
    flatten,
    initialize,
    next_event_time,
    read_jsonl,
    route,
    run_until,
    simulate,
    step,
)
from generators import two_level_models

PASSIVE = ModelRegistry.of(AtomicSpec("A", ("idle",), inports=("in",)), root="A")


def outputs(trace):
    return [(e.t, e.model, e.port, e.label) for e in trace.outputs()]


# --------------------------------------------------------------------------
# initialize / next_event_time


@pytest.mark.parametrize("t0, expected", [(0.0, 10.0), (2.5, 12.5)])
def test_initialize_schedules_generator(t0, expected):
    tree = initialize(build_efp(), "EFP", t0)
    assert tree[GENERATOR].tn == expected
    assert tree[GENERATOR].tl == t0
    assert next_event_time(tree) == expected


def test_initialize_passive_model():
    tree = initialize(PASSIVE, "A")
    assert tree["A"].tn == math.inf
    assert next_event_time(tree) == math.inf
    assert [e.kind for e in tree.events] == [EventKind.INIT]


def test_initialize_emits_one_init_per_atomic_in_path_order():
    tree = initialize(build_efp(), "EFP")
    assert [(e.model, e.after) for e in tree.events] == [
        (GENERATOR, "active"),
        (TRANSDUCER, "observing"),
        (PROCESSOR, "idle"),
    ]


def test_initialize_rejects_invalid_models():
    bad = ModelRegistry.of(AtomicSpec("A", ("s",), ta={"s": 1.0}))
    with pytest.raises(ValidationFailed) as info:
        initialize(bad, "A")
    assert [v.code for v in info.value.violations] == ["MissingInternalTransition"]
    with pytest.raises(ValidationFailed):
        initialize(bad, "Missing")


def test_next_event_time_after_first_output():
    tree = initialize(build_efp(), "EFP")
    step(tree)
    assert next_event_time(tree) == 15.0


# --------------------------------------------------------------------------
# route


def test_route_internal_and_external_output():
    ef = build_ef()
    per_child, ext = route(ef, {"Generator": Bag([("out", "Job")])})
    assert per_child == {"Transducer": Bag([("arrived", "Job")])}
    assert ext == Bag([("out", "Job")])


def test_route_external_input():
    per_child, ext = route(build_ef(), {}, Bag([("in", "Job")]))
    assert per_child == {"Transducer": Bag([("solved", "Job")])}
    assert ext == Bag()


def test_route_empty_and_unmatched():
    assert route(build_ef(), {}, Bag()) == ({}, Bag())
    assert route(build_ef(), {"Generator": Bag([("nowhere", "x")])}) == ({}, Bag())


def test_route_fans_out_copies():
    spec = CoupledSpec(
        "C",
        (ModelRef("a"), ModelRef("b"), ModelRef("c")),
        (Coupling("a", "o", "b", "i"), Coupling("a", "o", "c", "i"), Coupling("a", "o", "C", "y")),
        outports=("y",),
    )
    per_child, ext = route(spec, {"a": Bag([("o", "m"), ("o", "m")])})
    assert per_child["b"] == per_child["c"] == Bag([("i", "m"), ("i", "m")])
    assert len(ext) == 2


# --------------------------------------------------------------------------
# step


def test_step_efp_first_event():
    tree = initialize(build_efp(), "EFP")
    out, events = step(tree)
    assert out == Bag()
    assert [(e.model, e.kind, e.before, e.after) for e in events] == [
        (GENERATOR, EventKind.OUTPUT, None, None),
        (GENERATOR, EventKind.INTERNAL, "active", "active"),
        (TRANSDUCER, EventKind.EXTERNAL, "observing", "observing"),
        (PROCESSOR, EventKind.EXTERNAL, "idle", "busy"),
    ]
    assert tree[GENERATOR].tn == 20.0
    assert tree[PROCESSOR].tn == 15.0


def test_step_unmatched_input_changes_nothing():
    reg = ModelRegistry.of(
        AtomicSpec("A", ("s",), inports=("in",), ta={"s": 10.0}, deltint=[InternalTransition("s", "s")]),
    )
    tree = initialize(reg, "A")
    step(tree, [("in", "whatever")], 4.0)
    node = tree["A"]
    assert (node.state, node.tn) == ("s", 10.0)


def test_step_m1m2_at_five():
    tree = initialize(build_m1m2(), "M")
    _, events = step(tree)
    assert [(e.t, e.model, e.kind, e.label, e.after) for e in events] == [
        (5.0, "M/M1", EventKind.OUTPUT, "M1OutputMessage", None),
        (5.0, "M/M1", EventKind.INTERNAL, None, "passive"),
        (5.0, "M/M2", EventKind.EXTERNAL, "M1OutputMessage", "active"),
    ]


def test_step_rejects_time_regression_and_skips():
    tree = initialize(build_efp(), "EFP")
    step(tree)
    with pytest.raises(TimeRegressionError):
        step(tree, [], 5.0)
    with pytest.raises(SimulationError):
        step(tree, [], 16.0)
    with pytest.raises(SimulationError):
        step(initialize(PASSIVE, "A"))


def test_zero_time_loop_guard():
    spec = AtomicSpec("Z", ("a", "b"), ta={"a": 0.0, "b": 0.0}, deltint=[("a", "b"), ("b", "a")])
    with pytest.raises(ZeroTimeLoopError):
        simulate(ModelRegistry.of(spec), "Z", 1.0, max_zero_time_steps=50)


def test_confluent_transition():
    # a stop that reaches the generator exactly when it fires
    reg = build_efp(EfpParams(gen_period=10.0, obs_time=30.0))
    trace = simulate(reg, "EFP", 40.0)
    conf = [e for e in trace.events if e.kind is EventKind.CONFLUENT and e.model == GENERATOR]
    assert [(e.t, e.before, e.after) for e in conf] == [(30.0, "active", "passive")]
    assert max(e.t for e in trace.outputs() if e.model == GENERATOR) == 30.0


# --------------------------------------------------------------------------
# run_until


def test_run_until_efp_thirty():
    trace = simulate(build_efp(), "EFP", 30.0)
    assert [e.t for e in trace.outputs()] == [10.0, 15.0, 20.0, 25.0, 30.0]
    assert trace.termination_time == 30.0


@pytest.mark.parametrize("t_end", [0.0, 100.0])
def test_run_until_passive(t_end):
    trace = simulate(PASSIVE, "A", t_end)
    assert [e.kind for e in trace.events] == [EventKind.INIT]
    assert trace.termination_time == t_end


def test_run_until_m1m2():
    trace = simulate(build_m1m2(), "M", 20.0)
    assert [(e.t, e.model, e.label) for e in trace.outputs()] == [
        (5.0, "M/M1", "M1OutputMessage"),
        (9.0, "M/M2", "M1InputMessage"),
    ]
    tree = initialize(build_m1m2(), "M")
    run_until(tree, 20.0)
    assert tree["M/M1"].tn == tree["M/M2"].tn == math.inf


def test_run_until_rejects_past():
    tree = initialize(build_efp(), "EFP", 10.0)
    with pytest.raises(TimeRegressionError):
        run_until(tree, 5.0)


def test_non_rescheduling_keeps_deadline():
    tree = initialize(build_m1m2(), "M")
    step(tree)
    m2 = tree["M/M2"]
    assert (m2.tl, m2.tn, m2.sigma) == (5.0, 9.0, 4.0)


# --------------------------------------------------------------------------
# invariants over random hierarchies


def _check_trace_invariants(trace):
    times = [e.t for e in trace.events]
    assert times == sorted(times)
    by_instant = {}
    for e in trace.events:
        by_instant.setdefault(e.t, []).append(e)
    for events in by_instant.values():
        kinds = [e.kind for e in events if e.kind is not EventKind.INIT]
        n_out = sum(k is EventKind.OUTPUT for k in kinds)
        assert all(k is EventKind.OUTPUT for k in kinds[:n_out])
        firing = {e.model for e in events if e.kind in (EventKind.INTERNAL, EventKind.CONFLUENT)}
        assert {e.model for e in events if e.kind is EventKind.OUTPUT} <= firing


@settings(max_examples=40, deadline=None)
@given(reg=two_level_models)
def test_random_traces_are_ordered_and_mealy(reg):
    _check_trace_invariants(simulate(reg, "Top", 30.0))


@settings(max_examples=40, deadline=None)
@given(reg=two_level_models)
def test_simulation_is_deterministic(reg):
    assert simulate(reg, "Top", 30.0).to_jsonl() == simulate(reg, "Top", 30.0).to_jsonl()


@settings(max_examples=40, deadline=None)
@given(reg=two_level_models)
def test_flatten_equivalence_property(reg):
    _, flat_reg = flatten(reg, "Top")
    assert simulate(flat_reg, "Top", 30.0).events == simulate(reg, "Top", 30.0).events


@settings(max_examples=40, deadline=None)
@given(reg=two_level_models)
def test_nodes_never_have_tl_after_tn(reg):
    tree = initialize(reg, "Top")
    while next_event_time(tree) <= 30.0:
        step(tree)
        assert all(n.tl <= n.tn for n in tree.atomics)


# --------------------------------------------------------------------------
# flatten


def test_flatten_efp_structure():
    flat, flat_reg = flatten(build_efp(), "EFP")
    assert flat.child_names == ("EF/Generator", "EF/Transducer", "Processor")
    assert Coupling("EF/Generator", "out", "Processor", "in") in flat.couplings
    assert Coupling("Processor", "out", "EF/Transducer", "solved") in flat.couplings
    assert flat_reg.validate() == []
    assert [e.t for e in simulate(flat_reg, "EFP", 30.0).outputs()] == [10.0, 15.0, 20.0, 25.0, 30.0]


def test_flatten_flat_model_is_identity_up_to_renaming():
    _, once = flatten(build_efp(), "EFP")
    twice, _ = flatten(once, "EFP")
    assert set(twice.couplings) == set(once["EFP"].couplings)


def test_flatten_atomic_root():
    flat, reg = flatten(build_m1m2(), "M1")
    assert flat.name == "M1_flat"
    assert reg.validate() == []


# --------------------------------------------------------------------------
# serialization


def test_jsonl_format():
    trace = simulate(build_efp(), "EFP", 15.0)
    lines = trace.to_jsonl().splitlines()
    first = json.loads(lines[0])
    assert set(first) == {"t", "model", "kind", "port", "label", "before", "after"}
    assert first["t"] == 0 and first["kind"] == "INIT"
    assert read_jsonl(trace.to_jsonl()) == trace.events


def test_jsonl_infinity_and_precision():
    trace = simulate(PASSIVE, "A", 1.0)
    trace.events.append(TraceEvent(math.inf, "A", EventKind.INTERNAL, before="a", after="b"))
    trace.events.append(TraceEvent(1 / 3, "A", EventKind.INTERNAL, before="a", after="b"))
    lines = [json.loads(x) for x in trace.to_jsonl().splitlines()]
    assert lines[1]["t"] == "inf"
    assert lines[2]["t"] == 0.333333333333


def test_csv_format():
    text = simulate(build_efp(), "EFP", 10.0).to_csv().splitlines()
    assert text[0] == "t,model,kind,port,label,before,after"
    assert "10,EFP/EF/Generator,OUTPUT,out,Job,," in text
