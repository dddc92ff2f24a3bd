"""Race the width schedules on one doubling search.

Every schedule walks widths upward until a pooled query answers 0 and then
reports the same one-sided estimate, but they pay very different query
counts to get there. Faster-growing schedules stop sooner and overshoot
harder; the tower sequence reaches astronomical widths in a handful of
steps, which is exactly what the Monte Carlo cascade's first stage
exploits.

Run:  python3 demos/schedule_race.py
"""

import numpy as np

from poolcount import Instance, Oracle, builtin_schedules, run_doubling

d = 1000
delta = 0.1
trials = 2000

inst = Instance(d, frozenset(range(1, d + 1)))
print(f"hidden count d = {d}, confidence {delta}, {trials} searches per schedule\n")
print(f"{'schedule':20} {'mean stops':>10} {'worst':>6} {'undershoot rate':>16}")

for schedule in builtin_schedules():
    rng = np.random.default_rng(20260821)
    oracle = Oracle(inst, rng=rng)
    stops = np.empty(trials, dtype=np.int64)
    under = 0
    for t in range(trials):
        out = run_doubling(schedule, delta, oracle)
        stops[t] = out.stop_index
        if not out.estimate.saturated and out.estimate.as_float() < d:
            under += 1
    print(f"{schedule.name:20} {stops.mean():10.2f} {stops.max():6d}"
          f" {under / trials:16.4f}  (allowed {delta / 2:.3f})")
