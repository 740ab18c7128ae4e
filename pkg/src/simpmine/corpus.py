"""Corpus data model: dependency-parsed sentences with typed entity mentions.

The corpus file format is newline-delimited JSON, one sentence per line:

    {"doc_id": "...", "sent_id": "...", "text": "...",
     "tokens": [{"i": 0, "form": "...", "lemma": "...", "head": 1, "dep": "nsubj"}, ...],
     "mentions": [{"start": 0, "end": 1, "type": "GENE", "id": "G:1"}, ...]}

``head`` is a 0-based token index, or ``null`` for the root token. Mention
spans are token ranges with exclusive end. Upstream NER and parsing are
assumed done; records that violate the tree or span invariants are rejected,
not repaired.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, MutableMapping, Optional


class CorpusError(ValueError):
    """Base class for corpus-level failures."""


class RecordParseError(CorpusError):
    """Raised when a corpus line is not a well-formed record."""

    def __init__(self, message: str, line_no: Optional[int] = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class SentenceValidationError(CorpusError):
    """Raised when a structurally parsed record violates a sentence invariant."""


@dataclass(frozen=True)
class Token:
    idx: int
    form: str
    lemma: str
    head: Optional[int]  # None marks the root token
    deprel: str


@dataclass(frozen=True)
class Mention:
    start_tok: int
    end_tok: int  # exclusive
    entity_type: str
    entity_id: str


@dataclass(frozen=True)
class Sentence:
    doc_id: str
    sent_id: str
    text: str
    tokens: tuple[Token, ...]
    mentions: tuple[Mention, ...]

    def root(self) -> int:
        for tok in self.tokens:
            if tok.head is None:
                return tok.idx
        raise SentenceValidationError("no root")

    def children(self, idx: int) -> list[int]:
        return [t.idx for t in self.tokens if t.head == idx]

    def mentions_of_type(self, entity_type: str) -> list[Mention]:
        return [m for m in self.mentions if m.entity_type == entity_type]


class EntityPair:
    """Direction-normalized pair of entities with fixed type roles.

    Identity (equality and hash) is the id pair (a_id, b_id); the type labels
    travel along for display and serialization but a pair is the same pair
    regardless of how its types were spelled.
    """

    __slots__ = ("a_id", "b_id", "a_type", "b_type")

    def __init__(self, a_id: str, b_id: str, a_type: str, b_type: str):
        if a_type == b_type:
            raise CorpusError(f"pair type roles must differ, got {a_type!r} twice")
        self.a_id = a_id
        self.b_id = b_id
        self.a_type = a_type
        self.b_type = b_type

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EntityPair):
            return NotImplemented
        return self.a_id == other.a_id and self.b_id == other.b_id

    def __hash__(self) -> int:
        return hash((self.a_id, self.b_id))

    def __lt__(self, other: "EntityPair") -> bool:
        return (self.a_id, self.b_id) < (other.a_id, other.b_id)

    def __repr__(self) -> str:
        return f"EntityPair({self.a_id!r}, {self.b_id!r})"

    def to_json(self) -> dict:
        return {"a_id": self.a_id, "b_id": self.b_id,
                "a_type": self.a_type, "b_type": self.b_type}

    @classmethod
    def from_json(cls, obj: dict) -> "EntityPair":
        return cls(obj["a_id"], obj["b_id"], obj["a_type"], obj["b_type"])


def validate_sentence(sentence: Sentence) -> Sentence:
    """Check all sentence invariants, raising SentenceValidationError naming
    the first violated one. Returns the sentence unchanged when valid."""
    n = len(sentence.tokens)
    if n == 0:
        raise SentenceValidationError("empty sentence")
    roots = 0
    for pos, tok in enumerate(sentence.tokens):
        if tok.idx != pos:
            raise SentenceValidationError(
                f"token index {tok.idx} at position {pos} (indices must be 0..n-1 in order)")
        if tok.head is None:
            roots += 1
            continue
        if not (0 <= tok.head < n):
            raise SentenceValidationError(f"head out of range: token {tok.idx} -> {tok.head}")
        if tok.head == tok.idx:
            raise SentenceValidationError(f"self-loop at token {tok.idx}")
    if roots == 0:
        raise SentenceValidationError("no root")
    if roots > 1:
        raise SentenceValidationError("multiple roots")
    # With exactly one root and one parent per non-root token, the edges form
    # a tree iff no walk toward the root revisits a node.
    for tok in sentence.tokens:
        seen = set()
        cur: Optional[int] = tok.idx
        while cur is not None:
            if cur in seen:
                raise SentenceValidationError(f"cycle through token {cur}")
            seen.add(cur)
            cur = sentence.tokens[cur].head
    occupied = [False] * n
    for m in sentence.mentions:
        if not (0 <= m.start_tok < m.end_tok <= n):
            raise SentenceValidationError(
                f"mention span [{m.start_tok}, {m.end_tok}) out of bounds")
        if not m.entity_type:
            raise SentenceValidationError("mention with empty entity type")
        for i in range(m.start_tok, m.end_tok):
            if occupied[i]:
                raise SentenceValidationError(f"overlapping mentions at token {i}")
            occupied[i] = True
    return sentence


def parse_corpus_record(line: str, line_no: Optional[int] = None) -> Sentence:
    """Parse and validate one NDJSON corpus record."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise RecordParseError(f"invalid JSON: {e}", line_no) from e
    if not isinstance(obj, dict):
        raise RecordParseError("record is not an object", line_no)
    try:
        tokens = tuple(
            Token(idx=int(t["i"]), form=str(t["form"]), lemma=str(t["lemma"]),
                  head=None if t["head"] is None else int(t["head"]),
                  deprel=str(t["dep"]))
            for t in obj["tokens"]
        )
        mentions = tuple(
            Mention(start_tok=int(m["start"]), end_tok=int(m["end"]),
                    entity_type=str(m["type"]), entity_id=str(m["id"]))
            for m in obj.get("mentions", [])
        )
        sentence = Sentence(
            doc_id=str(obj["doc_id"]), sent_id=str(obj["sent_id"]),
            text=str(obj.get("text", "")), tokens=tokens, mentions=mentions,
        )
    except (KeyError, TypeError, ValueError) as e:
        raise RecordParseError(f"missing or malformed field: {e}", line_no) from e
    try:
        return validate_sentence(sentence)
    except SentenceValidationError as e:
        if line_no is not None:
            raise SentenceValidationError(f"line {line_no}: {e}") from e
        raise


def serialize_sentence(sentence: Sentence) -> str:
    """Inverse of parse_corpus_record; stable field order, one line, no trailing newline."""
    obj = {
        "doc_id": sentence.doc_id,
        "sent_id": sentence.sent_id,
        "text": sentence.text,
        "tokens": [
            {"i": t.idx, "form": t.form, "lemma": t.lemma, "head": t.head, "dep": t.deprel}
            for t in sentence.tokens
        ],
        "mentions": [
            {"start": m.start_tok, "end": m.end_tok, "type": m.entity_type, "id": m.entity_id}
            for m in sentence.mentions
        ],
    }
    return json.dumps(obj, ensure_ascii=False)


def read_corpus(path) -> Iterator[Sentence]:
    """Stream sentences from an NDJSON corpus file, with line numbers on errors."""
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            yield parse_corpus_record(line, line_no=line_no)


def eligible_sentences(
    sentences: Iterable[Sentence],
    type_a: str,
    type_b: str,
    skip_report: Optional[MutableMapping[str, int]] = None,
) -> Iterator[tuple[Sentence, EntityPair]]:
    """Yield sentences containing exactly one mention of each role type,
    paired with their direction-normalized entity pair.

    Non-eligible sentences are skipped; when ``skip_report`` is given, skip
    reasons (no_type_a, multiple_type_a, no_type_b, multiple_type_b) are
    counted into it.
    """
    if type_a == type_b:
        raise CorpusError("type_a and type_b must differ")

    def skip(reason: str) -> None:
        if skip_report is not None:
            skip_report[reason] = skip_report.get(reason, 0) + 1

    for sentence in sentences:
        a_mentions = sentence.mentions_of_type(type_a)
        b_mentions = sentence.mentions_of_type(type_b)
        if len(a_mentions) == 0:
            skip("no_type_a")
            continue
        if len(a_mentions) > 1:
            skip("multiple_type_a")
            continue
        if len(b_mentions) == 0:
            skip("no_type_b")
            continue
        if len(b_mentions) > 1:
            skip("multiple_type_b")
            continue
        pair = EntityPair(a_id=a_mentions[0].entity_id, b_id=b_mentions[0].entity_id,
                          a_type=type_a, b_type=type_b)
        yield sentence, pair


def mention_head(sentence: Sentence, mention: Mention) -> int:
    """Index of the syntactic head token of a mention span.

    The head is the unique token inside the span whose parent lies outside
    the span (or is the sentence root). If several tokens qualify, the
    leftmost wins.
    """
    span = range(mention.start_tok, mention.end_tok)
    for i in span:
        head = sentence.tokens[i].head
        if head is None or not (mention.start_tok <= head < mention.end_tok):
            return i
    # Unreachable for a valid tree: a span cannot be closed under parents.
    raise SentenceValidationError(
        f"mention [{mention.start_tok}, {mention.end_tok}) has no external head")
