"""Flatten the EF-P hierarchy and compare it with the nested simulation.

Flattening removes the EF level, so its children appear as ``EF/Generator``
and ``EF/Transducer``. Couplings through EF are joined into direct ones. The
output events of both runs coincide once paths are rewritten.

Run with ``python demos/flatten_equivalence.py``.
"""

from __future__ import annotations

from fddevs.efp import build_efp
from fddevs.sim import flatten, simulate

reg = build_efp()
flat, flat_reg = flatten(reg, "EFP")
for c in flat.couplings:
    print(f"{c.src}.{c.outport} -> {c.dest}.{c.inport}")

nested = [(e.t, e.model.split("/")[-1], e.port, e.label) for e in simulate(reg, "EFP", 100.0).outputs()]
flat_out = [(e.t, e.model.split("/")[-1], e.port, e.label) for e in simulate(flat_reg, "EFP", 100.0).outputs()]
print(f"{len(nested)} outputs, identical: {nested == flat_out}")
