"""Batch generation of entity pairs from accepted simplifications.

Every pair retrievable through an accepted key becomes a positive example,
with full provenance (which keys, which sentences). Pairs already present
in the seed positives are kept but flagged novel=False, so downstream
consumers can either count only the new ones or evaluate overlap.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .clustering import Cluster, expand_selection
from .corpus import EntityPair
from .index import PairIndex


@dataclass(frozen=True)
class GeneratedPair:
    pair: EntityPair
    supporting_keys: tuple[str, ...]
    supporting_sentences: tuple[tuple[str, str], ...]  # (doc_id, sent_id)
    novel: bool

    def to_json(self) -> dict:
        return {
            "pair": self.pair.to_json(),
            "keys": list(self.supporting_keys),
            "sentences": [list(s) for s in self.supporting_sentences],
            "novel": self.novel,
        }


def generate_pairs(
    index: PairIndex,
    accepted_keys: Iterable[str],
    seed_positives: set[EntityPair],
    expand: bool = False,
    clusters: Optional[Sequence[Cluster]] = None,
) -> list[GeneratedPair]:
    """Union of the pairs of every accepted key, ordered by pair id.

    With expand=True the accepted set is first widened to whole Levenshtein
    clusters (clusters must then be supplied).
    """
    keys = set(accepted_keys)
    if expand:
        if clusters is None:
            raise ValueError("expand=True requires clusters")
        keys = expand_selection(keys, clusters)
    support: dict[EntityPair, dict] = {}
    for key in sorted(keys):
        for record in index.records_for_key(key):
            entry = support.setdefault(record.pair, {"keys": set(), "sentences": set()})
            entry["keys"].add(key)
            entry["sentences"].add((record.doc_id, record.sent_id))
    out = []
    for pair in sorted(support):
        entry = support[pair]
        out.append(GeneratedPair(
            pair=pair,
            supporting_keys=tuple(sorted(entry["keys"])),
            supporting_sentences=tuple(sorted(entry["sentences"])),
            novel=pair not in seed_positives,
        ))
    return out


def write_pairs(path, generated: Sequence[GeneratedPair]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for g in generated:
            f.write(json.dumps(g.to_json(), ensure_ascii=False) + "\n")


def summary(generated: Sequence[GeneratedPair]) -> dict:
    return {
        "pairs": len(generated),
        "novel_pairs": sum(1 for g in generated if g.novel),
        "known_pairs": sum(1 for g in generated if not g.novel),
        "accepted_keys": len({k for g in generated for k in g.supporting_keys}),
        "supporting_sentences": len({s for g in generated for s in g.supporting_sentences}),
    }
