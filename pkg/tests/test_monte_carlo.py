import math

import numpy as np

from poolcount.bounds import log_star
from poolcount.estimators import EstimatorConfig, estimate_monte_carlo
from poolcount.fitted import FITTED
from poolcount.oracle import Instance, Oracle

CFG = EstimatorConfig()


def test_empty_instance_deterministic_zero():
    # with d = 0 no pooled query ever consumes randomness, so the whole run
    # is one fixed query sequence whatever the seed
    outs = [
        estimate_monte_carlo(2**20, CFG, Oracle(Instance(2**20, frozenset()),
                                                rng=np.random.default_rng(seed)))
        for seed in (0, 1, 31337)
    ]
    assert all(o.estimate == 0 for o in outs)
    assert len({o.queries_asked for o in outs}) == 1


def test_stage_names_in_cascade_order():
    oracle = Oracle(Instance(2**20, frozenset(range(1, 101))), rng=np.random.default_rng(5))
    out = estimate_monte_carlo(2**20, CFG, oracle)
    assert [name for name, _ in out.stage_breakdown] == [
        "tower",
        "quad-exp",
        "triple-exp",
        "double-exp-sq",
        "exponent-search",
        "grid-refine",
        "rate-inversion",
    ]
    assert out.queries_asked == oracle.query_count
    assert not out.wrapper_fired


def test_tower_stage_never_exceeds_log_star():
    n = 2**20
    cap = log_star(n)
    assert cap == 5
    rng = np.random.default_rng(17)
    for d in (0, 1, 100, 10_000, 2**19):
        inst = Instance(n, frozenset(range(1, d + 1)))
        for _ in range(50):
            out = estimate_monte_carlo(n, CFG, Oracle(inst, rng=rng))
            assert dict(out.stage_breakdown)["tower"] <= cap


def test_final_stage_sample_size_frozen():
    # stage confidence delta/5 = 0.02, eps = 0.5: ceil(48 * ln(50) / 0.25) = 752
    oracle = Oracle(Instance(4096, frozenset(range(1, 9))), rng=np.random.default_rng(2))
    out = estimate_monte_carlo(4096, CFG, oracle)
    assert dict(out.stage_breakdown)["rate-inversion"] == 752


def test_replay_determinism():
    inst = Instance(10**6, frozenset(range(1, 5001)))
    outs = [
        estimate_monte_carlo(10**6, CFG, Oracle(inst, rng=np.random.default_rng(64)))
        for _ in range(2)
    ]
    assert outs[0] == outs[1]


def test_worst_case_query_bound():
    # the hard bound every single trial must respect, with frozen constants
    n = 2**20
    rng = np.random.default_rng(1234)
    for d in (10, 4096):
        ll = math.log2(max(math.log2(max(d, 2)), 2.0))
        bound = (
            log_star(n)
            + ll
            + FITTED["mc_c1"] * math.sqrt(ll)
            + FITTED["mc_c2"] * 4.0 * math.log2(10.0)
        )
        inst = Instance(n, frozenset(range(1, d + 1)))
        worst = max(
            estimate_monte_carlo(n, CFG, Oracle(inst, rng=rng)).queries_asked
            for _ in range(300)
        )
        assert worst <= bound, (d, worst, bound)


def test_success_rate_within_delta():
    d, n, trials = 256, 2**20, 1000
    inst = Instance(n, frozenset(range(1, d + 1)))
    rng = np.random.default_rng(88)
    failures = 0
    for _ in range(trials):
        out = estimate_monte_carlo(n, CFG, Oracle(inst, rng=rng))
        if not (math.ceil(d / 2) <= out.estimate <= math.floor(1.5 * d)):
            failures += 1
    assert failures / trials <= 0.1 + 3.0 * math.sqrt(0.1 * 0.9 / trials)


def test_huge_defective_count_still_estimates():
    # d near n forces the tower to its cap and the cascade onto enormous
    # widths; the run must still land inside the window
    n = 2**16
    d = 2**15
    inst = Instance(n, frozenset(range(1, d + 1)))
    hits = 0
    runs = 60
    rng = np.random.default_rng(3)
    for _ in range(runs):
        out = estimate_monte_carlo(n, CFG, Oracle(inst, rng=rng))
        hits += math.ceil(d / 2) <= out.estimate <= math.floor(1.5 * d)
    assert hits >= runs * 0.85
