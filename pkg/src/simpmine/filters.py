"""Sentence-level negation / speculation / hedging exclusion.

A sentence is dropped (whole, conservatively) when any of four checks fires,
in this fixed order:

1. keyword           - any token lemma or surface form is blocklisted
2. sentence_root_combo - (sentence-root lemma, direct-child lemma) blocklisted
3. path_root_combo     - (path-root lemma, direct-child lemma) blocklisted
4. path_between_roots  - the lemma lexicalisation of the root-to-root path
                         is blocklisted

All matching is on lowercase lemmas; contraction surface forms ("didn't")
can be listed directly and are matched against token forms. The shipped
default list (data/filter_default.yaml) is a best-effort reconstruction
from common negation/hedging cue inventories and is meant to be edited by
domain experts, not treated as canonical.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Optional

import yaml

from .corpus import Sentence
from .patterns import PatternSet, lexicalize_nodes


class FilterConfigError(ValueError):
    pass


@dataclass(frozen=True)
class FilterConfig:
    keyword_lemmas: frozenset[str]
    root_pair_blocklist: frozenset[tuple[str, str]]
    path_root_pair_blocklist: frozenset[tuple[str, str]]
    path_between_roots_blocklist: frozenset[str]

    @classmethod
    def empty(cls) -> "FilterConfig":
        return cls(frozenset(), frozenset(), frozenset(), frozenset())


KEEP_REASON = "none"


@dataclass(frozen=True)
class FilterVerdict:
    keep: bool
    reason: str  # keyword | sentence_root_combo | path_root_combo | path_between_roots | none

    def __post_init__(self):
        assert self.keep == (self.reason == KEEP_REASON)


def _word(entry, section: str) -> str:
    # YAML reads bare no/yes/on/off as booleans; insist on quoting so the
    # negation word "no" cannot silently become False.
    if isinstance(entry, bool):
        raise FilterConfigError(
            f'{section}: unquoted YAML boolean {entry} - quote words like "no" or "off"')
    return str(entry).lower()


def _norm_pairs(entries, section: str) -> frozenset[tuple[str, str]]:
    pairs = set()
    for entry in entries or []:
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise FilterConfigError(f"{section}: expected [root_lemma, child_lemma], got {entry!r}")
        pairs.add((_word(entry[0], section), _word(entry[1], section)))
    return frozenset(pairs)


def parse_filter_config(obj: dict) -> FilterConfig:
    if not isinstance(obj, dict):
        raise FilterConfigError("filter config must be a mapping")
    known = {"keyword_lemmas", "sentence_root_pairs", "path_root_pairs", "path_between_roots"}
    unknown = set(obj) - known
    if unknown:
        raise FilterConfigError(f"unknown filter config sections: {sorted(unknown)}")
    keywords = frozenset(_word(w, "keyword_lemmas") for w in (obj.get("keyword_lemmas") or []))
    return FilterConfig(
        keyword_lemmas=keywords,
        root_pair_blocklist=_norm_pairs(obj.get("sentence_root_pairs"), "sentence_root_pairs"),
        path_root_pair_blocklist=_norm_pairs(obj.get("path_root_pairs"), "path_root_pairs"),
        path_between_roots_blocklist=frozenset(
            str(s).lower() for s in (obj.get("path_between_roots") or [])),
    )


def load_filter_config(path: Optional[str] = None) -> FilterConfig:
    """Load a filter config file; with no path, load the shipped default."""
    if path is None:
        text = resources.files("simpmine").joinpath("data/filter_default.yaml").read_text("utf-8")
    else:
        try:
            with open(path, "r", encoding="utf-8") as f:
                text = f.read()
        except OSError as e:
            raise FilterConfigError(f"cannot read filter config {path}: {e}") from e
    try:
        obj = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise FilterConfigError(f"invalid filter config: {e}") from e
    if obj is None:
        return FilterConfig.empty()
    return parse_filter_config(obj)


def _lemma(sentence: Sentence, idx: int) -> str:
    return sentence.tokens[idx].lemma.lower()


def apply_filter(sentence: Sentence, pattern_set: PatternSet, config: FilterConfig) -> FilterVerdict:
    """First matching exclusion reason wins; keep when nothing matches."""
    if config.keyword_lemmas:
        for tok in sentence.tokens:
            if tok.lemma.lower() in config.keyword_lemmas or tok.form.lower() in config.keyword_lemmas:
                return FilterVerdict(keep=False, reason="keyword")
    if config.root_pair_blocklist:
        root = _lemma(sentence, pattern_set.sentence_root)
        for child in pattern_set.sentence_root_descendants:
            if (root, _lemma(sentence, child)) in config.root_pair_blocklist:
                return FilterVerdict(keep=False, reason="sentence_root_combo")
    if config.path_root_pair_blocklist:
        root = _lemma(sentence, pattern_set.path_root)
        for child in pattern_set.path_root_descendants:
            if (root, _lemma(sentence, child)) in config.path_root_pair_blocklist:
                return FilterVerdict(keep=False, reason="path_root_combo")
    if config.path_between_roots_blocklist and pattern_set.path_between_roots is not None:
        lex = lexicalize_nodes(sentence, pattern_set.path_between_roots.nodes, use_lemmas=True)
        if lex.key.lower() in config.path_between_roots_blocklist:
            return FilterVerdict(keep=False, reason="path_between_roots")
    return FilterVerdict(keep=True, reason=KEEP_REASON)
