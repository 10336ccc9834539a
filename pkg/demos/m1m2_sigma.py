"""Show that a non-rescheduling external transition keeps the pending deadline.

In the two-component model M, M2 is active with a timeout of 9. When M1
reports at t=5, M2 takes its external transition without rescheduling, so its
internal event still fires at 9 rather than 5 + 9 = 14.

Run with ``python demos/m1m2_sigma.py``.
"""

from __future__ import annotations

from dataclasses import replace

from fddevs.core import ModelRegistry
from fddevs.efp import build_m1m2
from fddevs.sim import EventKind, simulate

reg = build_m1m2(m1_period=5.0, m2_period=9.0)
for e in simulate(reg, "M", 20.0).events:
    if e.kind is not EventKind.INIT:
        change = f"{e.label}" if e.kind is EventKind.OUTPUT else f"{e.before} -> {e.after}"
        print(f"t={e.t:>4}  {e.model:<5} {e.kind.value:<9} {e.port or '':<5} {change}")

# the same model with rescheduling turned on moves M2's event to t=14
m2 = reg["M2"]
rescheduling = replace(m2, deltext=tuple(replace(d, schedule=True) for d in m2.deltext))
alt = ModelRegistry.of(reg["M"], reg["M1"], rescheduling, root="M")
fired = [e.t for e in simulate(alt, "M", 20.0).events if e.model == "M/M2" and e.kind is EventKind.INTERNAL]
print("with rescheduling, M2 fires at", fired)
