"""Annotation sessions as append-only event logs.

A session is created with a frozen queue of simplifications to review; the
only mutations afterwards are verdict submissions. Every event is appended
to ``<sessions_dir>/<session_id>/events.ndjson`` before the in-memory state
changes, and loading a session is a pure replay of its log, so a crash or
restart never loses an acknowledged verdict.

Resubmitting a verdict for a key overwrites the effective value but keeps
the older event in the log as an audit trail. The cursor is the length of
the contiguous annotated prefix of the queue.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .clustering import cluster_simplifications
from .evaluation import msp
from .index import PairIndex
from .pairgen import GeneratedPair, generate_pairs
from .ranking import (LabelledPairs, QueueItem, RankingUsageError, Verdict,
                      build_annotation_queue)

WORKFLOWS = ("expert_no_labels", "expert_with_labels")


class SessionError(ValueError):
    pass


class UnknownSessionError(SessionError):
    pass


def _item_to_json(item: QueueItem) -> dict:
    obj = {"key": item.key, "pair_count": item.pair_count,
           "examples": [list(e) for e in item.examples]}
    if item.metrics is not None:
        obj["precision_s"] = item.metrics.precision_s
        obj["recall_s"] = item.metrics.recall_s
        obj["tp"] = item.metrics.tp
        obj["fp"] = item.metrics.fp
    return obj


@dataclass
class Session:
    id: str
    workflow: str
    params: dict
    queue: list[dict]  # serialized queue items, frozen at creation
    verdict_log: list[tuple[str, Verdict]] = field(default_factory=list)
    latest: dict[str, Verdict] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.queue)

    @property
    def cursor(self) -> int:
        pos = 0
        while pos < len(self.queue) and self.queue[pos]["key"] in self.latest:
            pos += 1
        return pos

    @property
    def annotated(self) -> int:
        return len(self.latest)

    def running_msp(self) -> Optional[float]:
        if not self.latest:
            return None
        return msp(list(self.latest.values()))

    def verdict_counts(self) -> dict[str, int]:
        counts = {"Yes": 0, "No": 0, "Maybe": 0}
        for verdict in self.latest.values():
            counts[verdict.value] += 1
        return counts

    def yes_keys(self) -> list[str]:
        return sorted(k for k, v in self.latest.items() if v.value == "Yes")

    def apply_verdict(self, key: str, verdict: Verdict) -> None:
        if key not in {item["key"] for item in self.queue}:
            raise SessionError(f"key not in session queue: {key!r}")
        self.verdict_log.append((key, verdict))
        self.latest[key] = verdict


class SessionStore:
    """Creates, persists and replays sessions against one loaded index."""

    def __init__(self, sessions_dir, index: PairIndex,
                 labels: Optional[LabelledPairs] = None,
                 cluster_radius: int = 2,
                 expand_on_export: bool = False):
        self.dir = Path(sessions_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.index = index
        self.labels = labels
        self.cluster_radius = cluster_radius
        self.expand_on_export = expand_on_export
        self.sessions: dict[str, Session] = {}
        for event_file in sorted(self.dir.glob("*/events.ndjson")):
            session = self._replay(event_file)
            self.sessions[session.id] = session

    # -- persistence ------------------------------------------------------

    def _events_path(self, session_id: str) -> Path:
        return self.dir / session_id / "events.ndjson"

    def _append(self, session_id: str, event: dict) -> None:
        path = self._events_path(session_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "a", encoding="utf-8") as f:
            f.write(json.dumps(event, ensure_ascii=False) + "\n")
            f.flush()

    @staticmethod
    def _replay(event_file: Path) -> Session:
        session: Optional[Session] = None
        with open(event_file, "r", encoding="utf-8") as f:
            for line in f:
                if not line.strip():
                    continue
                event = json.loads(line)
                if event["event"] == "created":
                    session = Session(id=event["id"], workflow=event["workflow"],
                                      params=event["params"], queue=event["queue"])
                elif event["event"] == "verdict":
                    if session is None:
                        raise SessionError(f"verdict before creation in {event_file}")
                    session.apply_verdict(event["key"], Verdict(
                        value=event["value"], annotator=event["annotator"],
                        timestamp=event["ts"]))
                else:
                    raise SessionError(f"unknown event type {event['event']!r} in {event_file}")
        if session is None:
            raise SessionError(f"empty session log {event_file}")
        return session

    # -- operations -------------------------------------------------------

    def _next_id(self) -> str:
        return f"s{len(self.sessions) + 1:04d}"

    def annotated_keys(self) -> frozenset[str]:
        keys: set[str] = set()
        for session in self.sessions.values():
            keys.update(session.latest)
        return frozenset(keys)

    def create(self, workflow: str, session_size: int = 200, examples_per_item: int = 20,
               precision_threshold: float = 0.6, recall_threshold: float = 0.0,
               min_words: int = 0, min_pair_count: int = 1, seed: int = 0) -> Session:
        if workflow not in WORKFLOWS:
            raise SessionError(f"unknown workflow {workflow!r}, expected one of {WORKFLOWS}")
        if session_size < 1:
            raise SessionError(f"session_size must be >= 1, got {session_size}")
        if examples_per_item < 1:
            raise SessionError(f"examples_per_item must be >= 1, got {examples_per_item}")
        ordering = "by_metrics" if workflow == "expert_with_labels" else "by_count"
        if ordering == "by_metrics" and self.labels is None:
            raise RankingUsageError("workflow expert_with_labels needs labelled pairs loaded")
        queue = build_annotation_queue(
            self.index, ordering=ordering, session_size=session_size,
            examples_per_item=examples_per_item, seed=seed, labels=self.labels,
            precision_thr=precision_threshold, recall_thr=recall_threshold,
            min_words=min_words, min_pair_count=min_pair_count,
            cluster_radius=self.cluster_radius, annotated=self.annotated_keys(),
        )
        params = {
            "session_size": session_size, "examples_per_item": examples_per_item,
            "precision_threshold": precision_threshold, "recall_threshold": recall_threshold,
            "min_words": min_words, "min_pair_count": min_pair_count, "seed": seed,
        }
        session = Session(id=self._next_id(), workflow=workflow, params=params,
                          queue=[_item_to_json(i) for i in queue])
        self._append(session.id, {"event": "created", "id": session.id,
                                  "workflow": workflow, "params": params,
                                  "queue": session.queue})
        self.sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise UnknownSessionError(f"no such session: {session_id!r}") from None

    def next_items(self, session_id: str, n: int) -> list[dict]:
        """The next n unannotated queue items at or after the cursor."""
        session = self.get(session_id)
        out = []
        for position in range(session.cursor, session.size):
            item = session.queue[position]
            if item["key"] in session.latest:
                continue
            out.append({"position": position, **item})
            if len(out) == n:
                break
        return out

    def submit(self, session_id: str, key: str, value: str, annotator: str,
               timestamp: Optional[float] = None) -> Session:
        session = self.get(session_id)
        verdict = Verdict(value=value, annotator=annotator,
                          timestamp=time.time() if timestamp is None else timestamp)
        # Validate against the queue before persisting anything.
        if key not in {item["key"] for item in session.queue}:
            raise SessionError(f"key not in session queue: {key!r}")
        self._append(session_id, {"event": "verdict", "key": key, "value": verdict.value,
                                  "annotator": verdict.annotator, "ts": verdict.timestamp})
        session.apply_verdict(key, verdict)
        return session

    def export(self, session_id: str) -> tuple[list[dict], list[GeneratedPair]]:
        """Serialize the verdict log and generate pairs from the Yes keys;
        both are also written beside the event log."""
        session = self.get(session_id)
        verdicts = [
            {"key": key, "value": v.value, "annotator": v.annotator, "ts": v.timestamp}
            for key, v in session.verdict_log
        ]
        seed_positives = set(self.labels.positives) if self.labels is not None else set()
        clusters = None
        if self.expand_on_export:
            counts = {k: self.index.pair_count(k) for k in self.index.keys()}
            clusters = cluster_simplifications(self.index.keys(), radius=self.cluster_radius,
                                               pair_counts=counts)
        pairs = generate_pairs(self.index, session.yes_keys(), seed_positives,
                               expand=self.expand_on_export, clusters=clusters)
        session_dir = self.dir / session_id
        with open(session_dir / "verdicts.ndjson", "w", encoding="utf-8") as f:
            for v in verdicts:
                f.write(json.dumps(v, ensure_ascii=False) + "\n")
        with open(session_dir / "pairs.ndjson", "w", encoding="utf-8") as f:
            for g in pairs:
                f.write(json.dumps(g.to_json(), ensure_ascii=False) + "\n")
        return verdicts, pairs
