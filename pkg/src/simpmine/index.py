"""Append-only store of (sentence, pair, simplification) records with
bidirectional lookup: pairs for a simplification key and keys for a pair.

On disk an index is a directory holding ``records.ndjson`` (the log) and
``meta`` (schema version, entity-type roles, optional corpus hash).
The two lookup maps live in memory and are rebuilt from the log on load,
so the log is the single source of truth.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Optional

from .corpus import EntityPair

SCHEMA_VERSION = 1


class IndexError_(ValueError):
    pass


@dataclass(frozen=True)
class IndexRecord:
    doc_id: str
    sent_id: str
    pair: EntityPair
    simplification_key: str
    display: str
    sentence_text: str
    n_words: int

    def dedup_key(self) -> tuple:
        return (self.doc_id, self.sent_id, self.simplification_key,
                self.pair.a_id, self.pair.b_id)

    def to_json(self) -> dict:
        return {
            "doc_id": self.doc_id, "sent_id": self.sent_id,
            "pair": self.pair.to_json(),
            "key": self.simplification_key,
            "display": self.display,
            "text": self.sentence_text,
            "n_words": self.n_words,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "IndexRecord":
        return cls(
            doc_id=obj["doc_id"], sent_id=obj["sent_id"],
            pair=EntityPair.from_json(obj["pair"]),
            simplification_key=obj["key"],
            display=obj["display"],
            sentence_text=obj["text"],
            n_words=obj["n_words"],
        )


class PairIndex:
    def __init__(self, type_a: str = "GENE", type_b: str = "DISEASE",
                 corpus_hash: Optional[str] = None):
        self.type_a = type_a
        self.type_b = type_b
        self.corpus_hash = corpus_hash
        self.records: list[IndexRecord] = []
        self._by_key: dict[str, list[int]] = {}
        self._by_pair: dict[EntityPair, set[str]] = {}
        self._pairs_by_key: dict[str, set[EntityPair]] = {}
        self._seen: set[tuple] = set()
        self._sentence_claims: dict[tuple[str, str], tuple] = {}

    # -- writes ---------------------------------------------------------

    def insert(self, record: IndexRecord) -> bool:
        """Append one record; duplicate (doc, sent, key, pair) records are
        ignored so re-ingestion cannot double count. Returns True if added."""
        if not record.simplification_key:
            raise IndexError_("record with empty simplification key")
        dk = record.dedup_key()
        if dk in self._seen:
            return False
        claim = (record.doc_id, record.sent_id)
        if claim in self._sentence_claims and self._sentence_claims[claim] != dk:
            # one pair per sentence in this version, so a sentence maps to
            # exactly one (key, pair) record
            raise IndexError_(
                f"sentence {record.doc_id}/{record.sent_id} already indexed "
                f"with a different key or pair")
        self._sentence_claims[claim] = dk
        self._seen.add(dk)
        self.records.append(record)
        pos = len(self.records) - 1
        self._by_key.setdefault(record.simplification_key, []).append(pos)
        self._pairs_by_key.setdefault(record.simplification_key, set()).add(record.pair)
        self._by_pair.setdefault(record.pair, set()).add(record.simplification_key)
        return True

    def insert_all(self, records: Iterable[IndexRecord]) -> int:
        return sum(1 for r in records if self.insert(r))

    # -- queries --------------------------------------------------------

    def keys(self) -> list[str]:
        return sorted(self._by_key)

    def pairs_for_simplification(self, key: str) -> set[EntityPair]:
        return set(self._pairs_by_key.get(key, set()))

    def simplifications_for_pair(self, pair: EntityPair) -> set[str]:
        return set(self._by_pair.get(pair, set()))

    def pair_count(self, key: str) -> int:
        return len(self._pairs_by_key.get(key, ()))

    def sentence_count(self, key: str) -> int:
        return len(self._by_key.get(key, ()))

    def n_words(self, key: str) -> int:
        positions = self._by_key.get(key)
        if not positions:
            return len(key.split())
        return self.records[positions[0]].n_words

    def all_pairs(self) -> set[EntityPair]:
        return set(self._by_pair)

    def records_for_key(self, key: str) -> list[IndexRecord]:
        return [self.records[i] for i in self._by_key.get(key, ())]

    def sample_sentences(self, key: str, n: int, seed: int) -> list[tuple[str, str]]:
        """Uniform sample (without replacement) of up to n example sentences
        for a key, reproducible for a fixed seed. Unknown keys give []."""
        if n < 1:
            raise IndexError_(f"sample size must be >= 1, got {n}")
        recs = self.records_for_key(key)
        if len(recs) > n:
            recs = random.Random(seed).sample(recs, n)
        return [(r.sentence_text, r.display) for r in recs]

    # -- persistence ----------------------------------------------------

    def save(self, directory) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        with open(d / "records.ndjson", "w", encoding="utf-8") as f:
            for rec in self.records:
                f.write(json.dumps(rec.to_json(), ensure_ascii=False) + "\n")
        meta = {"schema_version": SCHEMA_VERSION, "type_a": self.type_a, "type_b": self.type_b,
                "corpus_hash": self.corpus_hash, "n_records": len(self.records)}
        with open(d / "meta", "w", encoding="utf-8") as f:
            json.dump(meta, f, indent=2, sort_keys=True)
            f.write("\n")

    @classmethod
    def load(cls, directory) -> "PairIndex":
        d = Path(directory)
        meta_path = d / "meta"
        if not meta_path.exists():
            raise IndexError_(f"not an index directory (no meta file): {d}")
        with open(meta_path, "r", encoding="utf-8") as f:
            meta = json.load(f)
        if meta.get("schema_version") != SCHEMA_VERSION:
            raise IndexError_(f"unsupported index schema version {meta.get('schema_version')}")
        index = cls(type_a=meta["type_a"], type_b=meta["type_b"],
                    corpus_hash=meta.get("corpus_hash"))
        with open(d / "records.ndjson", "r", encoding="utf-8") as f:
            for line in f:
                if line.strip():
                    index.insert(IndexRecord.from_json(json.loads(line)))
        return index

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[IndexRecord]:
        return iter(self.records)


def rebuild_maps(records: Iterable[IndexRecord]) -> PairIndex:
    """Fresh index built from a record log (used to cross-check the
    incrementally maintained maps)."""
    index = PairIndex()
    for rec in records:
        index.insert(rec)
    return index
