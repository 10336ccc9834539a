"""Convert an SCXML chart into an FD-DEVS atomic model and simulate it.

The chart's delayed ``<send>`` actions become timeouts and internal
transitions. Its other events become external transitions. The intermediate
state-machine document is printed so each step can be inspected.

Run with ``python demos/scxml_to_devs.py``.
"""

from __future__ import annotations

from fddevs import data_path
from fddevs.core import ModelRegistry
from fddevs.scxml import emit_statemachine_xml, lift_statemachine, transform_scxml
from fddevs.sim import simulate
from fddevs.xfd import emit_atomic_xml

chart = data_path("scxml", "traffic_light.scxml").read_bytes()
machine = transform_scxml(chart)
print(emit_statemachine_xml(machine))

spec = lift_statemachine(machine, name="TrafficLight")
print(emit_atomic_xml(spec))

for e in simulate(ModelRegistry.of(spec), "TrafficLight", 60.0).outputs():
    print(f"t={e.t:>5}  {e.port}")
