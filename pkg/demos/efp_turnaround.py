"""Sweep the generator period of the EF-P model and report turnaround.

A processor that takes longer than the generator period drops the jobs that
arrive while it is busy, so throughput saturates once ``gen_period`` falls
below ``proc_time``. The closed-form oracle is printed next to the simulator
as a cross-check.

Run with ``python demos/efp_turnaround.py``.
"""

from __future__ import annotations

from fddevs.efp import PROCESSOR, EfpParams, build_efp, oracle_trace, turnaround_report
from fddevs.sim import simulate

T_END = 100.0
PROC_TIME = 5.0

print(f"{'period':>6} {'sent':>5} {'done':>5} {'avg':>6} {'oracle done':>12}")
for period in (2.0, 3.0, 5.0, 8.0, 10.0, 20.0):
    params = EfpParams(gen_period=period, proc_time=PROC_TIME, obs_time=T_END)
    trace = simulate(build_efp(params), "EFP", T_END)
    report = turnaround_report(trace)
    oracle_done = sum(1 for e in oracle_trace(params, T_END) if e.model == PROCESSOR)
    avg = "-" if report.avg_turnaround is None else f"{report.avg_turnaround:.1f}"
    print(f"{period:>6} {report.jobs_sent:>5} {report.jobs_completed:>5} {avg:>6} {oracle_done:>12}")

# a short window shows the stop message ending job generation
params = EfpParams(gen_period=10.0, proc_time=5.0, obs_time=25.0)
for e in simulate(build_efp(params), "EFP", 40.0).outputs():
    print(f"t={e.t:>5}  {e.model:<22} {e.port}:{e.label}")
