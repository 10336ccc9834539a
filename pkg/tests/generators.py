"""Random valid specifications shared by the property and acceptance tests.

Everything is driven by a ``random.Random`` so the same builders serve
seeded loops (exact counts) and hypothesis (via ``st.randoms``).
"""

from __future__ import annotations

import random

from hypothesis import strategies as st

from fddevs.core import (
    AtomicSpec,
    CoupledSpec,
    Coupling,
    ExternalTransition,
    InternalTransition,
    LambdaEntry,
    ModelRef,
    ModelRegistry,
)

# multiples of 0.5 make simultaneous (confluent) events common
TIMES = [0.5 * k for k in range(1, 11)]


def random_atomic(
    rng: random.Random,
    name: str = "A",
    max_states: int = 8,
    max_messages: int = 5,
    inports=None,
    outports=None,
    times=TIMES,
) -> AtomicSpec:
    n = rng.randint(1, max_states)
    states = [f"s{i}" for i in range(n)]
    rng.shuffle(states)
    messages = [f"m{i}" for i in range(rng.randint(1, max_messages))]
    if inports is None:
        inports = [f"in{i}" for i in range(rng.randint(0, 3))]
    if outports is None:
        outports = [f"out{i}" for i in range(rng.randint(0, 3))]
    timed = [s for s in states if rng.random() < 0.6]
    ta = [(s, rng.choice(times)) for s in timed]
    deltint = [InternalTransition(s, rng.choice(states)) for s in timed]
    lambdas = []
    if outports:
        for s in timed:
            if rng.random() < 0.7:
                label = rng.choice([None] + messages)
                lambdas.append(LambdaEntry(s, rng.choice(outports), label))
    deltext = []
    for s in states:
        for m in messages:
            if rng.random() < 0.4:
                nxt = rng.choice(states)
                # keeping tn is only safe when the target can fire an internal event
                schedule = rng.random() < 0.6 or nxt not in timed
                deltext.append(ExternalTransition(s, m, nxt, schedule))
    rng.shuffle(deltext)
    return AtomicSpec(
        name=name,
        states=states,
        inports=inports,
        outports=outports,
        ta=ta,
        lambdas=lambdas,
        deltint=deltint,
        deltext=deltext,
        initial=rng.choice(states),
    )


def random_coupled(rng: random.Random, name: str = "C") -> CoupledSpec:
    """A structurally valid coupled spec (child ports are not checked)."""
    children = [f"c{i}" for i in range(rng.randint(1, 4))]
    inports = [f"i{i}" for i in range(rng.randint(0, 2))]
    outports = [f"o{i}" for i in range(rng.randint(0, 2))]
    ports = ["a", "b", "x"]
    couplings = []
    for _ in range(rng.randint(0, 6)):
        kind = rng.choice(["EIC", "IC", "EOC"])
        if kind == "EIC" and inports:
            couplings.append(Coupling(name, rng.choice(inports), rng.choice(children), rng.choice(ports)))
        elif kind == "EOC" and outports:
            couplings.append(Coupling(rng.choice(children), rng.choice(ports), name, rng.choice(outports)))
        elif kind == "IC" and len(children) > 1:
            src, dst = rng.sample(children, 2)
            couplings.append(Coupling(src, rng.choice(ports), dst, rng.choice(ports)))
    models = [ModelRef(c, rng.choice([None, "T" + c]), rng.choice([None, "java"])) for c in children]
    return CoupledSpec(name, models, couplings, inports, outports, host=rng.choice(["localhost", "sim01"]))


def _wire(rng, parent: CoupledSpec, children: dict) -> tuple:
    """Random couplings for ``parent`` given child specs."""
    couplings = []
    names = list(children)
    for p in parent.inports:
        for _ in range(rng.randint(1, 2)):
            c = rng.choice(names)
            if children[c].inports:
                couplings.append(Coupling(parent.name, p, c, rng.choice(children[c].inports)))
    for c in names:
        for op in children[c].outports:
            for _ in range(rng.randint(0, 2)):
                others = [d for d in names if d != c and children[d].inports]
                if others and rng.random() < 0.7:
                    d = rng.choice(others)
                    couplings.append(Coupling(c, op, d, rng.choice(children[d].inports)))
                elif parent.outports:
                    couplings.append(Coupling(c, op, parent.name, rng.choice(parent.outports)))
    return tuple(dict.fromkeys(couplings))


def _leaf(rng, name):
    return random_atomic(rng, name, max_states=4, max_messages=3, inports=["p", "q"], outports=["y", "z"])


def random_two_level(rng: random.Random) -> ModelRegistry:
    """Root ``Top`` holding atomics and coupled children that hold atomics."""
    reg = ModelRegistry()
    top_children = {}
    n_atomic = 0
    for i in range(rng.randint(2, 3)):
        if rng.random() < 0.6:
            sub_children = {}
            for _ in range(rng.randint(1, 3)):
                n_atomic += 1
                a = _leaf(rng, f"A{n_atomic}")
                sub_children[a.name] = a
                reg.add(a)
            sub = CoupledSpec(f"C{i}", tuple(ModelRef(a) for a in sub_children), (), ("u", "v"), ("w",))
            sub = CoupledSpec(sub.name, sub.models, _wire(rng, sub, sub_children), sub.inports, sub.outports)
            reg.add(sub)
            top_children[sub.name] = sub
        else:
            n_atomic += 1
            a = _leaf(rng, f"A{n_atomic}")
            reg.add(a)
            top_children[a.name] = a
    top = CoupledSpec("Top", tuple(ModelRef(c) for c in top_children), (), ("in",), ("out",))
    top = CoupledSpec(top.name, top.models, _wire(rng, top, top_children), top.inports, top.outports)
    reg.add(top)
    reg.root = "Top"
    return reg


atomic_specs = st.randoms(use_true_random=False).map(random_atomic)
coupled_specs = st.randoms(use_true_random=False).map(random_coupled)
two_level_models = st.randoms(use_true_random=False).map(random_two_level)
