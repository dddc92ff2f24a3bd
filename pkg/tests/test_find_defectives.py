import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from poolcount.estimators import find_defectives
from poolcount.fitted import FITTED
from poolcount.oracle import Instance, Oracle


def run(n, defectives):
    oracle = Oracle(Instance(n, frozenset(defectives)))
    found = find_defectives(n, oracle)
    return found, oracle.query_count


def test_hand_traced_query_counts():
    # single defective in a small universe: full probe + widening + bisection
    found, queries = run(8, {3})
    assert found == {3}
    assert queries == 5

    # a clean universe costs exactly the one certifying probe
    found, queries = run(16, set())
    assert found == set()
    assert queries == 1

    # both endpoints defective: worst wrap-around of the block scan
    found, queries = run(256, {1, 256})
    assert found == {1, 256}
    assert queries == 18


def test_exhaustive_all_subsets_n8():
    for r in range(0, 9):
        for combo in itertools.combinations(range(1, 9), r):
            found, _ = run(8, combo)
            assert found == set(combo), combo


def test_exhaustive_singletons_n64():
    for item in range(1, 65):
        found, queries = run(64, {item})
        assert found == {item}
        # 1*log2(64) + C*1 with the frozen slope
        assert queries <= math.log2(64) + FITTED["find_c"]


def test_query_bound_on_random_instances():
    rng = np.random.default_rng(2024)
    n = 512
    for d in (1, 2, 4, 16, 64, 128):
        for _ in range(30):
            items = rng.choice(n, size=d, replace=False) + 1
            found, queries = run(n, items)
            assert found == set(int(x) for x in items)
            assert queries <= d * math.log2(n / d) + FITTED["find_c"] * d, (d, queries)


def test_defectives_equal_universe():
    found, queries = run(6, {1, 2, 3, 4, 5, 6})
    assert found == {1, 2, 3, 4, 5, 6}


def test_universe_of_one():
    assert run(1, {1}) == ({1}, 1)
    assert run(1, set()) == ({1} - {1}, 1)


def test_rejects_empty_universe():
    with pytest.raises(ValueError):
        find_defectives(0, Oracle(Instance(1, frozenset())))


@given(
    st.integers(min_value=1, max_value=128),
    st.data(),
)
@settings(max_examples=120, deadline=None)
def test_identifies_any_defective_set(n, data):
    defectives = data.draw(st.frozensets(st.integers(min_value=1, max_value=n)))
    found, queries = run(n, defectives)
    assert found == set(defectives)
    d = len(defectives)
    if d >= 1:
        assert queries <= d * math.log2(n / d) + FITTED["find_c"] * d
    else:
        assert queries == 1
