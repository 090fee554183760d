"""Train/test splits by creditor.

``S1`` keeps every creditor on both sides (train and test share the creditor
distribution); ``S2`` puts each creditor entirely on one side so the test set
only contains document layouts the model never saw.

Shuffles use numpy's PCG64 bit generator seeded with the user seed
(``numpy.random.default_rng(seed)``) and ``Generator.permutation``, which is
a Fisher-Yates shuffle.  Groups are visited in order of first appearance in
the corpus, so a split is a function of (corpus order, seed).
"""

from __future__ import annotations

import enum
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import Corpus


class Scenario(enum.Enum):
    S1 = "s1"
    S2 = "s2"


@dataclass(frozen=True)
class SplitSpec:
    scenario: Scenario = Scenario.S1
    train_fraction: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ValueError(f"train_fraction must be in (0, 1), got {self.train_fraction}")
        if isinstance(self.scenario, str):
            object.__setattr__(self, "scenario", Scenario(self.scenario.lower()))


@dataclass(frozen=True)
class SplitResult:
    train_ids: tuple[str, ...]
    test_ids: tuple[str, ...]
    train_creditors: tuple[str, ...]
    test_creditors: tuple[str, ...]

    @property
    def achieved_fraction(self) -> float:
        return len(self.train_ids) / (len(self.train_ids) + len(self.test_ids))


def s1_train_count(k: int, train_fraction: float) -> int:
    """Train documents for a creditor with ``k`` documents: round-half-up, clamped to [1, k-1]."""
    if k < 2:
        return k
    n = math.floor(Fraction(str(train_fraction)) * k + Fraction(1, 2))
    return min(max(n, 1), k - 1)


def _groups(corpus: Corpus) -> dict[str, list[str]]:
    groups: dict[str, list[str]] = defaultdict(list)
    for doc in corpus.documents:
        groups[doc.creditor_id].append(doc.doc_id)
    return groups


def split(corpus: Corpus, spec: SplitSpec) -> SplitResult:
    if len(corpus.documents) < 2:
        raise ValueError("need at least 2 documents to split")
    rng = np.random.default_rng(spec.seed)
    groups = _groups(corpus)
    train: list[str] = []
    test: list[str] = []

    if spec.scenario is Scenario.S1:
        for ids in groups.values():
            order = [ids[i] for i in rng.permutation(len(ids))]
            n = s1_train_count(len(ids), spec.train_fraction)
            train += order[:n]
            test += order[n:]
        train_set = set(train)
        creditors = list(groups)
        return SplitResult(
            tuple(train), tuple(test),
            tuple(c for c in creditors if any(d in train_set for d in groups[c])),
            tuple(c for c in creditors if any(d not in train_set for d in groups[c])),
        )

    creditors = list(groups)
    if len(creditors) < 2:
        raise ValueError("cannot form disjoint creditor split: corpus has a single creditor")
    creditors = [creditors[i] for i in rng.permutation(len(creditors))]
    target = Fraction(str(spec.train_fraction)) * len(corpus.documents)
    n_train_creditors = len(creditors) - 1  # at least one creditor stays in test
    for i, c in enumerate(creditors[:-1]):
        train += groups[c]
        if len(train) >= target:
            n_train_creditors = i + 1
            break
    for c in creditors[n_train_creditors:]:
        test += groups[c]
    return SplitResult(tuple(train), tuple(test),
                       tuple(creditors[:n_train_creditors]), tuple(creditors[n_train_creditors:]))
