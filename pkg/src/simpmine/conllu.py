"""CoNLL-U to corpus NDJSON conversion.

Dependency trees come from a .conllu file; entity mentions come from a
side-file of NDJSON records ``{"doc_id": ..., "sent_id": ...,
"mentions": [{"start": ..., "end": ..., "type": ..., "id": ...}]}`` joined
on (doc_id, sent_id). Multiword-token ranges and empty nodes are skipped;
HEAD=0 becomes the root, other heads shift to 0-based indices.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterator, Optional

from .corpus import Mention, Sentence, Token, validate_sentence


class ConlluError(ValueError):
    pass


def _finish(doc_id: str, sent_id: Optional[str], text: Optional[str],
            rows: list[list[str]], counter: int) -> Sentence:
    tokens = []
    for row in rows:
        if len(row) < 8:
            raise ConlluError(f"short CoNLL-U row in sentence {sent_id or counter}: {row}")
        tok_id, form, lemma, head, deprel = row[0], row[1], row[2], row[6], row[7]
        idx = int(tok_id) - 1
        head_idx = None if head == "0" else int(head) - 1
        tokens.append(Token(idx=idx, form=form,
                            lemma=form if lemma == "_" else lemma,
                            head=head_idx, deprel=deprel))
    sentence = Sentence(
        doc_id=doc_id,
        sent_id=sent_id if sent_id is not None else f"s{counter}",
        text=text if text is not None else " ".join(t.form for t in tokens),
        tokens=tuple(tokens),
        mentions=(),
    )
    return validate_sentence(sentence)


def read_conllu(path, default_doc_id: Optional[str] = None) -> Iterator[Sentence]:
    """Sentences (without mentions) from a CoNLL-U file."""
    doc_id = default_doc_id or Path(path).stem
    sent_id: Optional[str] = None
    text: Optional[str] = None
    rows: list[list[str]] = []
    counter = 0
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line.strip():
                if rows:
                    counter += 1
                    yield _finish(doc_id, sent_id, text, rows, counter)
                    rows, sent_id, text = [], None, None
                continue
            if line.startswith("#"):
                comment = line[1:].strip()
                if "=" in comment:
                    name, _, value = comment.partition("=")
                    name, value = name.strip(), value.strip()
                    if name == "newdoc id":
                        doc_id = value
                    elif name == "sent_id":
                        sent_id = value
                    elif name == "text":
                        text = value
                continue
            cols = line.split("\t")
            tok_id = cols[0]
            if "-" in tok_id or "." in tok_id:  # multiword range / empty node
                continue
            rows.append(cols)
    if rows:
        counter += 1
        yield _finish(doc_id, sent_id, text, rows, counter)


def read_mention_sidecar(path) -> dict[tuple[str, str], list[Mention]]:
    out: dict[tuple[str, str], list[Mention]] = {}
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                mentions = [Mention(start_tok=int(m["start"]), end_tok=int(m["end"]),
                                    entity_type=str(m["type"]), entity_id=str(m["id"]))
                            for m in obj["mentions"]]
                out[(str(obj["doc_id"]), str(obj["sent_id"]))] = mentions
            except (KeyError, TypeError, ValueError, json.JSONDecodeError) as e:
                raise ConlluError(f"mention side-file line {line_no}: {e}") from e
    return out


def convert(conllu_path, mentions_path: Optional[str] = None,
            default_doc_id: Optional[str] = None) -> Iterator[Sentence]:
    """Join parses with mentions; sentences without a side-car entry keep an
    empty mention list (they will be skipped by eligibility filtering)."""
    sidecar = read_mention_sidecar(mentions_path) if mentions_path else {}
    for sentence in read_conllu(conllu_path, default_doc_id=default_doc_id):
        mentions = sidecar.get((sentence.doc_id, sentence.sent_id))
        if mentions:
            sentence = Sentence(doc_id=sentence.doc_id, sent_id=sentence.sent_id,
                                text=sentence.text, tokens=sentence.tokens,
                                mentions=tuple(mentions))
            validate_sentence(sentence)
        yield sentence
