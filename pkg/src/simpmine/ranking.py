"""Ranking and selection of simplifications, with or without seed labels.

Four workflows are supported:

* baseline          - keep every key with a high enough distinct-pair count
* expert, no labels - queue keys for annotation, ranked by pair count
* automatic, labels - score each key against seed pairs and keep those
                      above precision/recall thresholds
* expert + labels   - threshold first, then queue by pair count

A key is scored as a classifier over entity pairs: the pairs it retrieves
are its positive predictions. Negatives come from the closed-world
assumption (corpus pairs absent from the gold positives), so raw precision
would be swamped by the class imbalance; instead true/false positive counts
are normalized by the positive/negative pool sizes:

    precision = (tp / n_pos) / (tp / n_pos + fp / n_neg)

A key matching 10% of the positives and 10% of the negatives therefore
scores 0.5 regardless of the pool sizes. Recall is tp / n_pos and never
sees the negative pool. Keys that match no labelled pair at all score 0.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .clustering import Cluster, cluster_simplifications
from .corpus import EntityPair
from .index import PairIndex

VERDICT_VALUES = ("Yes", "No", "Maybe")


class RankingUsageError(ValueError):
    pass


@dataclass(frozen=True)
class LabelledPairs:
    positives: frozenset[EntityPair]
    negatives: frozenset[EntityPair]

    def __post_init__(self):
        overlap = self.positives & self.negatives
        if overlap:
            raise RankingUsageError(f"{len(overlap)} pairs are both positive and negative")

    @property
    def n_pos(self) -> int:
        return len(self.positives)

    @property
    def n_neg(self) -> int:
        return len(self.negatives)


@dataclass(frozen=True)
class SimplificationMetrics:
    key: str
    pair_count: int
    n_words: int
    tp: int
    fp: int
    precision_s: float
    recall_s: float


@dataclass(frozen=True)
class Verdict:
    value: str  # Yes | No | Maybe
    annotator: str
    timestamp: float

    def __post_init__(self):
        if self.value not in VERDICT_VALUES:
            raise ValueError(f"verdict must be one of {VERDICT_VALUES}, got {self.value!r}")


def closed_world_negatives(corpus_pairs: set[EntityPair],
                           gold_positives: set[EntityPair]) -> set[EntityPair]:
    """Corpus pairs not in the gold set, taken to be negative examples."""
    return set(corpus_pairs) - set(gold_positives)


def normalized_precision(tp: int, fp: int, n_pos: int, n_neg: int) -> float:
    if tp == 0 and fp == 0:
        return 0.0
    tp_rate = tp / n_pos
    fp_rate = fp / n_neg
    return tp_rate / (tp_rate + fp_rate)


def simplification_metrics(index: PairIndex, key: str, labels: LabelledPairs) -> SimplificationMetrics:
    if labels.n_pos < 1 or labels.n_neg < 1:
        raise RankingUsageError("metrics need at least one positive and one negative pair")
    pairs = index.pairs_for_simplification(key)
    tp = len(pairs & labels.positives)
    fp = len(pairs & labels.negatives)
    return SimplificationMetrics(
        key=key,
        pair_count=index.pair_count(key),
        n_words=index.n_words(key),
        tp=tp,
        fp=fp,
        precision_s=normalized_precision(tp, fp, labels.n_pos, labels.n_neg),
        recall_s=tp / labels.n_pos,
    )


def select_baseline(index: PairIndex, min_pair_count: int = 5) -> set[str]:
    """Keys whose distinct-pair count reaches the threshold (inclusive)."""
    if min_pair_count < 1:
        raise RankingUsageError(f"min_pair_count must be >= 1, got {min_pair_count}")
    return {k for k in index.keys() if index.pair_count(k) >= min_pair_count}


def _ranked(metrics: Iterable[SimplificationMetrics]) -> list[SimplificationMetrics]:
    return sorted(metrics, key=lambda m: (-m.pair_count, m.key))


def select_automatic(
    index: PairIndex,
    labels: LabelledPairs,
    precision_thr: float = 0.6,
    recall_thr: float = 0.0,
    min_words: int = 0,
) -> list[SimplificationMetrics]:
    """Threshold the per-key metrics; result ordered by pair count (desc),
    ties broken by key."""
    kept = []
    for key in index.keys():
        m = simplification_metrics(index, key, labels)
        if m.precision_s >= precision_thr and m.recall_s >= recall_thr and m.n_words >= min_words:
            kept.append(m)
    return _ranked(kept)


def _key_seed(seed: int, key: str) -> int:
    digest = hashlib.blake2b(f"{seed}:{key}".encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


@dataclass(frozen=True)
class QueueItem:
    key: str
    pair_count: int
    metrics: Optional[SimplificationMetrics]
    examples: tuple[tuple[str, str], ...]  # (sentence_text, display)


def build_annotation_queue(
    index: PairIndex,
    ordering: str,  # "by_count" | "by_metrics"
    session_size: int,
    examples_per_item: int,
    seed: int,
    labels: Optional[LabelledPairs] = None,
    precision_thr: float = 0.6,
    recall_thr: float = 0.0,
    min_words: int = 0,
    min_pair_count: int = 1,
    cluster_radius: int = 2,
    annotated: frozenset[str] = frozenset(),
    clusters: Optional[Sequence[Cluster]] = None,
) -> list[QueueItem]:
    """Queue the top keys for expert review.

    Previously annotated keys are dropped, then one representative per
    Levenshtein cluster is kept so the expert never sees near-duplicates;
    the survivors are ranked by pair count and cut to the session size.
    Each item carries a reproducible sample of example sentences.
    """
    if session_size < 1:
        raise RankingUsageError(f"session_size must be >= 1, got {session_size}")
    if ordering not in ("by_count", "by_metrics"):
        raise RankingUsageError(f"unknown ordering {ordering!r}")

    metrics_by_key: dict[str, SimplificationMetrics] = {}
    if ordering == "by_metrics":
        if labels is None:
            raise RankingUsageError("ordering 'by_metrics' requires labelled pairs")
        candidates = [m.key for m in select_automatic(
            index, labels, precision_thr=precision_thr, recall_thr=recall_thr,
            min_words=min_words)]
        metrics_by_key = {m.key: m for m in
                          (simplification_metrics(index, k, labels) for k in candidates)}
    else:
        candidates = [k for k in index.keys() if index.pair_count(k) >= min_pair_count]

    candidates = [k for k in candidates if k not in annotated]
    counts = {k: index.pair_count(k) for k in candidates}
    if clusters is None:
        clusters = cluster_simplifications(candidates, radius=cluster_radius, pair_counts=counts)
    candidate_set = set(candidates)
    deduped = []
    for cluster in clusters:
        in_play = cluster.members & candidate_set
        if in_play:
            deduped.append(min(in_play, key=lambda k: (-counts[k], k)))
    deduped.sort(key=lambda k: (-counts[k], k))

    queue = []
    for key in deduped[:session_size]:
        queue.append(QueueItem(
            key=key,
            pair_count=counts[key],
            metrics=metrics_by_key.get(key),
            examples=tuple(index.sample_sentences(key, examples_per_item, _key_seed(seed, key))),
        ))
    return queue
