"""Walk through the library's pieces on one small planted instance.

Run:  python3 demos/quick_tour.py
"""

import numpy as np

from poolcount import (
    EstimatorConfig,
    Instance,
    Oracle,
    estimate_deterministic,
    estimate_expected,
    estimate_monte_carlo,
    find_defectives,
)

n = 4096
rng = np.random.default_rng(7)
hidden = frozenset(int(x) + 1 for x in rng.choice(n, size=37, replace=False))
inst = Instance(n, hidden)
print(f"universe of {n} items, {inst.d} hidden defectives")

# a single pooled query: does this subset touch the hidden set?
oracle = Oracle(inst, rng=rng)
probe = frozenset(range(1, 100))
print(f"pool {{1..99}} answers {oracle.answer_subset(probe)}")

# exact identification, costs about d * log2(n/d) queries
oracle = Oracle(inst, rng=rng)
found = find_defectives(n, oracle)
assert found == hidden
print(f"find_defectives recovered all {len(found)} in {oracle.query_count} queries")

# estimation is much cheaper than identification when a factor
# 1 +/- eps suffices
config = EstimatorConfig(epsilon=0.5, delta=0.1)
for name, run in [
    ("deterministic", lambda o: estimate_deterministic(n, config.epsilon, o)),
    ("expected     ", lambda o: estimate_expected(n, config, o)),
    ("monte-carlo  ", lambda o: estimate_monte_carlo(n, config, o)),
]:
    oracle = Oracle(inst, rng=np.random.default_rng(11))
    out = run(oracle)
    window = f"[{(1 - config.epsilon) * inst.d:.0f}, {(1 + config.epsilon) * inst.d:.0f}]"
    print(f"{name}  estimate {out.estimate:6.1f}  target {window}"
          f"  queries {out.queries_asked}")
