"""Exact simulation of an adaptive group-testing oracle.

An instance is a universe of n items with a hidden defective subset I. A
query is any subset Q of the universe and is answered 1 exactly when Q
intersects I. Randomized pooled queries include each item independently
with probability p; only whether *some* defective joined the pool matters,
so the simulator answers with a single coin of bias 1 - (1-p)**d instead of
materializing n memberships. A materialize mode keeps the slow path around
for cross-checking the shortcut.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class QueryBudgetExceeded(RuntimeError):
    """Raised when an oracle is asked more queries than its budget allows."""


@dataclass(frozen=True)
class Instance:
    """A universe of items 1..n with a hidden defective set."""

    n: int
    defectives: frozenset[int]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"universe size must be >= 1, got {self.n}")
        object.__setattr__(self, "defectives", frozenset(int(x) for x in self.defectives))
        for x in self.defectives:
            if not 1 <= x <= self.n:
                raise ValueError(f"defective {x} outside universe 1..{self.n}")

    @property
    def d(self) -> int:
        return len(self.defectives)

    def defective_mask(self) -> np.ndarray:
        """Boolean mask over items, index 0 unused."""
        mask = np.zeros(self.n + 1, dtype=bool)
        if self.defectives:
            mask[np.fromiter(self.defectives, dtype=np.int64)] = True
        return mask

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "defectives": sorted(self.defectives)})

    @classmethod
    def from_json(cls, text: str) -> "Instance":
        obj = json.loads(text)
        return cls(n=int(obj["n"]), defectives=frozenset(obj["defectives"]))


@dataclass(frozen=True)
class QueryDescriptor:
    """What was asked: an explicit subset, a Bernoulli pool, or a group union.

    kind is one of "explicit-subset", "bernoulli", "group-union". payload
    holds the sorted item tuple, the inclusion probability, or the sorted
    group-id tuple respectively. draws > 1 marks a batch of identically
    distributed Bernoulli pools recorded as one entry.
    """

    kind: str
    payload: tuple | float
    draws: int = 1


@dataclass
class Transcript:
    """Ordered record of (descriptor, answer) pairs for one oracle's life."""

    entries: list[tuple[QueryDescriptor, int]] = field(default_factory=list)

    @property
    def query_count(self) -> int:
        return sum(desc.draws for desc, _ in self.entries)


class Oracle:
    """Answers queries against one instance, counting every query asked.

    Args:
        instance: the hidden instance.
        rng: numpy Generator used for randomized pooled queries. Estimators
            share this stream for their own coins, so a single seed replays
            an entire run.
        record: keep a Transcript of every query (off for bulk runs).
        max_queries: optional hard budget; exceeding it raises
            QueryBudgetExceeded with the violating query already counted.
        materialize: answer Bernoulli pools by sampling all n memberships
            instead of the d-coin shortcut. Slow, for cross-validation.
    """

    def __init__(
        self,
        instance: Instance,
        rng: np.random.Generator | None = None,
        record: bool = False,
        max_queries: int | None = None,
        materialize: bool = False,
    ) -> None:
        self.instance = instance
        self.rng = rng if rng is not None else np.random.default_rng()
        self.max_queries = max_queries
        self.materialize = materialize
        self.query_count = 0
        self.transcript: Transcript | None = Transcript() if record else None
        # Item and group masks are built on first use; estimators that only
        # ask Bernoulli pools never pay for an n-sized array.
        self._mask: np.ndarray | None = None
        self._defective_idx = (
            np.sort(np.fromiter(instance.defectives, dtype=np.int64))
            if instance.defectives
            else np.empty(0, dtype=np.int64)
        )
        self._group_masks: dict[int, np.ndarray] = {}

    # -- internal bookkeeping ------------------------------------------------

    def _charge(self, descriptor: QueryDescriptor, answer: int, draws: int = 1) -> int:
        self.query_count += draws
        if self.transcript is not None:
            self.transcript.entries.append((descriptor, answer))
        if self.max_queries is not None and self.query_count > self.max_queries:
            raise QueryBudgetExceeded(
                f"query budget {self.max_queries} exceeded at {self.query_count}"
            )
        return answer

    def _all_excluded_probability(self, p: float) -> float:
        """(1-p)**d, the chance a Bernoulli-p pool misses every defective."""
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"inclusion probability {p} outside [0, 1]")
        d = self.instance.d
        if d == 0 or p == 0.0:
            return 1.0
        if p == 1.0:
            return 0.0
        return math.exp(d * math.log1p(-p))

    # -- query kinds ---------------------------------------------------------

    def answer_subset(self, subset: Sequence[int] | Iterable[int] | np.ndarray) -> int:
        """Answer 1 iff the explicit subset contains a defective item."""
        items = np.asarray(subset if not isinstance(subset, (set, frozenset)) else sorted(subset))
        if items.size:
            if not np.issubdtype(items.dtype, np.integer):
                raise ValueError("subset items must be integers")
            lo, hi = int(items.min()), int(items.max())
            if lo < 1 or hi > self.instance.n:
                raise ValueError(f"subset item out of range 1..{self.instance.n}")
            if self._mask is None:
                self._mask = self.instance.defective_mask()
            answer = int(self._mask[items].any())
        else:
            answer = 0
        if self.transcript is not None:
            desc = QueryDescriptor("explicit-subset", tuple(int(x) for x in np.sort(items)))
        else:
            desc = _SUBSET_STUB
        return self._charge(desc, answer)

    def answer_group_union(self, group_ids: np.ndarray | Sequence[int], group_size: int) -> int:
        """Answer the union-of-groups query for a fixed-size contiguous partition.

        Group g (1-based) covers items (g-1)*group_size+1 .. min(g*group_size, n).
        The union of the named groups contains a defective exactly when one of
        the groups does, which is precomputed once per group size.
        """
        gmask = self._group_masks.get(group_size)
        if gmask is None:
            n_groups = -(-self.instance.n // group_size)
            gmask = np.zeros(n_groups + 1, dtype=bool)
            if self._defective_idx.size:
                gmask[(self._defective_idx - 1) // group_size + 1] = True
            self._group_masks[group_size] = gmask
        ids = np.asarray(group_ids)
        if ids.size:
            lo, hi = int(ids.min()), int(ids.max())
            if lo < 1 or hi >= gmask.size:
                raise ValueError("group id out of range")
            answer = int(gmask[ids].any())
        else:
            answer = 0
        if self.transcript is not None:
            desc = QueryDescriptor("group-union", tuple(int(g) for g in np.sort(ids)))
        else:
            desc = _GROUP_STUB
        return self._charge(desc, answer)

    def answer_bernoulli(self, p: float) -> int:
        """Answer one pooled query that includes each item with probability p.

        Pr[answer 0] = (1-p)**d exactly. Deterministic cases (p = 0, d = 0,
        p = 1 with d >= 1) consume no randomness.
        """
        if self.materialize:
            return self._answer_materialized(p)
        q0 = self._all_excluded_probability(p)
        if q0 == 1.0:
            answer = 0
        elif q0 == 0.0:
            answer = 1
        else:
            answer = 0 if self.rng.random() < q0 else 1
        desc = _BERNOULLI_STUB if self.transcript is None else QueryDescriptor("bernoulli", p)
        return self._charge(desc, answer)

    def answer_bernoulli_batch(self, p: float, count: int) -> np.ndarray:
        """Answer `count` independent Bernoulli-p pooled queries at once.

        Returns the 0/1 answer array; all `count` queries are charged. Used
        by stages that ask many identically distributed, non-adaptive pools.
        """
        if count < 1:
            raise ValueError("batch needs at least one query")
        q0 = self._all_excluded_probability(p)
        if q0 == 1.0:
            answers = np.zeros(count, dtype=np.uint8)
        elif q0 == 0.0:
            answers = np.ones(count, dtype=np.uint8)
        else:
            answers = (self.rng.random(count) >= q0).astype(np.uint8)
        if self.transcript is None:
            desc = _BERNOULLI_STUB
        else:
            desc = QueryDescriptor("bernoulli", p, draws=count)
        self._charge(desc, int(answers.sum()), draws=count)
        return answers

    def _answer_materialized(self, p: float) -> int:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"inclusion probability {p} outside [0, 1]")
        membership = self.rng.random(self.instance.n) < p
        answer = int(membership[self._defective_idx - 1].any()) if self._defective_idx.size else 0
        desc = _BERNOULLI_STUB if self.transcript is None else QueryDescriptor("bernoulli", p)
        return self._charge(desc, answer)


# Shared stubs avoid building per-query payloads when nothing records them.
_SUBSET_STUB = QueryDescriptor("explicit-subset", ())
_GROUP_STUB = QueryDescriptor("group-union", ())
_BERNOULLI_STUB = QueryDescriptor("bernoulli", ())
