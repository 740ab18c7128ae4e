"""Intrinsic evaluation: gold splits, pair-level metrics, and the manual
simplification precision over expert verdicts.

Pair-level precision is normalized the same way as the per-key ranking
metric (true/false positive counts divided by the positive/negative pool
sizes) so that the closed-world class imbalance does not dominate it; the
F-score is the harmonic mean of that precision variant and recall.
Degenerate 0/0 metrics are reported as 0.0 and listed in ``undefined``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .corpus import EntityPair
from .ranking import Verdict, normalized_precision


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class SplitSpec:
    fractions: tuple[float, float, float]  # train, valid, test
    seed: int

    def __post_init__(self):
        if any(f < 0 for f in self.fractions):
            raise EvaluationError(f"negative split fraction in {self.fractions}")
        if abs(sum(self.fractions) - 1.0) > 1e-9:
            raise EvaluationError(f"split fractions must sum to 1, got {self.fractions}")


@dataclass(frozen=True)
class GoldSplit:
    train_pos: frozenset[EntityPair]
    valid_pos: frozenset[EntityPair]
    test_pos: frozenset[EntityPair]
    train_neg: frozenset[EntityPair]
    valid_neg: frozenset[EntityPair]
    test_neg: frozenset[EntityPair]


def _cut(items: list, fractions: tuple[float, float, float]) -> tuple[list, list, list]:
    n = len(items)
    i = int(n * fractions[0])
    j = int(n * (fractions[0] + fractions[1]))
    return items[:i], items[i:j], items[j:]


def split_gold(positives: set[EntityPair], negatives: set[EntityPair],
               spec: SplitSpec) -> GoldSplit:
    """Disjoint train/valid/test partition of both pools: seeded uniform
    shuffle of each (in canonical pair order) followed by a fraction cut."""
    if not positives:
        raise EvaluationError("cannot split an empty positive set")
    rng = random.Random(spec.seed)
    pos = sorted(positives)
    rng.shuffle(pos)
    neg = sorted(negatives)
    rng.shuffle(neg)
    p_train, p_valid, p_test = _cut(pos, spec.fractions)
    n_train, n_valid, n_test = _cut(neg, spec.fractions)
    return GoldSplit(
        train_pos=frozenset(p_train), valid_pos=frozenset(p_valid), test_pos=frozenset(p_test),
        train_neg=frozenset(n_train), valid_neg=frozenset(n_valid), test_neg=frozenset(n_test),
    )


@dataclass(frozen=True)
class PairMetrics:
    tp: int
    fp: int
    fn: int
    tn: int
    recall: float
    specificity: float
    precision: float
    f_score: float
    undefined: tuple[str, ...] = ()


def pair_level_metrics(predicted: set[EntityPair], test_pos: set[EntityPair],
                       test_neg: set[EntityPair]) -> PairMetrics:
    """Score predicted pairs against a held-out split. Predictions outside
    test_pos | test_neg are ignored (they were never labelled)."""
    if not test_pos or not test_neg:
        raise EvaluationError("test sets must be non-empty")
    if test_pos & test_neg:
        raise EvaluationError("test_pos and test_neg overlap")
    tp = len(predicted & test_pos)
    fp = len(predicted & test_neg)
    fn = len(test_pos - predicted)
    tn = len(test_neg - predicted)
    n_pos = len(test_pos)
    n_neg = len(test_neg)
    undefined = []
    recall = tp / n_pos
    specificity = tn / n_neg
    if tp == 0 and fp == 0:
        precision = 0.0
        undefined.append("precision")
    else:
        precision = normalized_precision(tp, fp, n_pos, n_neg)
    if precision + recall == 0:
        f_score = 0.0
        if tp == 0 and fp == 0:
            undefined.append("f_score")
    else:
        f_score = 2 * precision * recall / (precision + recall)
    return PairMetrics(tp=tp, fp=fp, fn=fn, tn=tn, recall=recall,
                       specificity=specificity, precision=precision,
                       f_score=f_score, undefined=tuple(undefined))


def msp(verdicts: Sequence[Verdict]) -> float:
    """Manual simplification precision: the fraction of Yes verdicts."""
    if not verdicts:
        raise EvaluationError("msp needs at least one verdict")
    n_yes = sum(1 for v in verdicts if v.value == "Yes")
    return n_yes / len(verdicts)
