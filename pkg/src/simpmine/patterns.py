"""Pattern extraction over the dependency tree of an eligible sentence.

A sentence with one mention of each role type yields a bundle of patterns
anchored on the shortest dependency path between the two mention heads:
the path itself, its apex node, the sentence root, the path connecting the
two roots, the direct children of both roots, and sentence-level keyword
lemma sets. Each pattern can be lexicalized into a readable string with the
entity mentions replaced by their uppercase type labels; the plain path
lexicalisation (the "simplification") is the canonical index key.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .corpus import EntityPair, Mention, Sentence, mention_head


class PatternError(ValueError):
    pass


class DegeneratePathError(PatternError):
    """Both path endpoints resolve to the same token."""


@dataclass(frozen=True)
class PathEdge:
    parent: int
    child: int
    deprel: str
    up: bool  # True when the traversal step goes child -> parent


@dataclass(frozen=True)
class DepPath:
    nodes: tuple[int, ...]
    edges: tuple[PathEdge, ...]


@dataclass(frozen=True)
class KeywordSets:
    sentence_lemmas: frozenset[str]
    between_lemmas: frozenset[str]


@dataclass(frozen=True)
class PatternSet:
    path: DepPath
    path_root: int
    sentence_root: int
    path_between_roots: Optional[DepPath]  # None when the two roots coincide
    sentence_root_descendants: tuple[int, ...]
    path_root_descendants: tuple[int, ...]
    keywords: KeywordSets


@dataclass(frozen=True)
class Simplification:
    key: str
    n_words: int


class PatternPart(enum.Enum):
    PATH = "path"
    PATH_ROOT = "path_root"
    SENTENCE_ROOT = "sentence_root"
    PATH_BETWEEN_ROOTS = "path_between_roots"
    SENTENCE_ROOT_DESCENDANTS = "sentence_root_descendants"
    PATH_ROOT_DESCENDANTS = "path_root_descendants"
    # Pulls aux/neg children of both roots out of the word sequence and
    # appends them as "+ hedging:[...]" / "+ negation:[...]" annotations.
    MODALITY = "modality"


def _ancestors(sentence: Sentence, idx: int) -> list[int]:
    """Path of node indices from idx up to and including the root."""
    chain = [idx]
    head = sentence.tokens[idx].head
    while head is not None:
        chain.append(head)
        head = sentence.tokens[head].head
    return chain


def _tree_path(sentence: Sentence, a: int, b: int) -> DepPath:
    up_a = _ancestors(sentence, a)
    up_b = _ancestors(sentence, b)
    in_a = {node: depth for depth, node in enumerate(up_a)}
    lca = next(node for node in up_b if node in in_a)
    # a ... lca taken upward, then lca ... b taken downward.
    nodes = up_a[: in_a[lca] + 1] + list(reversed(up_b[: up_b.index(lca)]))
    edges = []
    for u, v in zip(nodes, nodes[1:]):
        if sentence.tokens[u].head == v:
            edges.append(PathEdge(parent=v, child=u, deprel=sentence.tokens[u].deprel, up=True))
        else:
            edges.append(PathEdge(parent=u, child=v, deprel=sentence.tokens[v].deprel, up=False))
    return DepPath(nodes=tuple(nodes), edges=tuple(edges))


def shortest_dep_path(sentence: Sentence, head_a: int, head_b: int) -> DepPath:
    """Unique tree path between two token indices, edges traversed either way."""
    if head_a == head_b:
        raise DegeneratePathError(f"both endpoints are token {head_a}")
    return _tree_path(sentence, head_a, head_b)


def path_arrow_string(sentence: Sentence, path: DepPath) -> str:
    """Render a path as "w0 <-dep- w1 -dep-> w2" showing edge directions."""
    parts = [sentence.tokens[path.nodes[0]].form]
    for edge, node in zip(path.edges, path.nodes[1:]):
        arrow = f"<-{edge.deprel}-" if edge.up else f"-{edge.deprel}->"
        parts.append(arrow)
        parts.append(sentence.tokens[node].form)
    return " ".join(parts)


def path_apex(sentence: Sentence, path: DepPath) -> int:
    """The unique path node that is not a child within the path (its highest node)."""
    child_nodes = {e.child for e in path.edges}
    apex = [n for n in path.nodes if n not in child_nodes]
    if len(apex) != 1:
        raise PatternError(f"path has {len(apex)} apex nodes, expected 1")
    return apex[0]


def _mention_span_bounds(pair_mentions: Sequence[Mention]) -> tuple[int, int]:
    first, second = sorted(pair_mentions, key=lambda m: m.start_tok)
    return first.end_tok, second.start_tok


def pair_mentions(sentence: Sentence, pair: EntityPair) -> tuple[Mention, Mention]:
    """The (type_a, type_b) mentions backing this pair in this sentence."""
    a = [m for m in sentence.mentions if m.entity_type == pair.a_type and m.entity_id == pair.a_id]
    b = [m for m in sentence.mentions if m.entity_type == pair.b_type and m.entity_id == pair.b_id]
    if len(a) != 1 or len(b) != 1:
        raise PatternError(
            f"sentence {sentence.doc_id}/{sentence.sent_id} does not contain the pair exactly once")
    return a[0], b[0]


def extract_pattern_set(sentence: Sentence, pair: EntityPair) -> PatternSet:
    """Extract every pattern for one eligible (sentence, pair)."""
    mention_a, mention_b = pair_mentions(sentence, pair)
    head_a = mention_head(sentence, mention_a)
    head_b = mention_head(sentence, mention_b)
    path = shortest_dep_path(sentence, head_a, head_b)
    root_of_path = path_apex(sentence, path)
    root_of_sentence = sentence.root()
    if root_of_path == root_of_sentence:
        between = None
    else:
        between = _tree_path(sentence, root_of_sentence, root_of_path)
    between_lo, between_hi = _mention_span_bounds((mention_a, mention_b))
    keywords = KeywordSets(
        sentence_lemmas=frozenset(t.lemma.lower() for t in sentence.tokens),
        between_lemmas=frozenset(
            t.lemma.lower() for t in sentence.tokens[between_lo:between_hi]),
    )
    return PatternSet(
        path=path,
        path_root=root_of_path,
        sentence_root=root_of_sentence,
        path_between_roots=between,
        sentence_root_descendants=tuple(sentence.children(root_of_sentence)),
        path_root_descendants=tuple(sentence.children(root_of_path)),
        keywords=keywords,
    )


def _placeholders(sentence: Sentence, pair: EntityPair) -> dict[int, str]:
    mention_a, mention_b = pair_mentions(sentence, pair)
    return {
        mention_head(sentence, mention_a): pair.a_type.upper(),
        mention_head(sentence, mention_b): pair.b_type.upper(),
    }


def _word(sentence: Sentence, idx: int, use_lemmas: bool) -> str:
    tok = sentence.tokens[idx]
    text = tok.lemma if use_lemmas else tok.form
    return " ".join(text.split())  # keys must stay single-space separated


def lexicalize_nodes(
    sentence: Sentence,
    nodes: Iterable[int],
    pair: Optional[EntityPair] = None,
    use_lemmas: bool = False,
) -> Simplification:
    """Words of the given nodes in sentence order, mention heads replaced by
    their uppercase entity-type placeholder, joined by single spaces."""
    slots = _placeholders(sentence, pair) if pair is not None else {}
    words = [slots.get(i, _word(sentence, i, use_lemmas)) for i in sorted(set(nodes))]
    key = " ".join(w for w in words if w)
    return Simplification(key=key, n_words=len(key.split()))


def lexicalize_path(sentence: Sentence, path: DepPath, pair: EntityPair,
                    use_lemmas: bool = False) -> Simplification:
    return lexicalize_nodes(sentence, path.nodes, pair, use_lemmas=use_lemmas)


def index_key(sentence: Sentence, pattern_set: PatternSet, pair: EntityPair,
              include_sentence_root: bool = False, use_lemmas: bool = False) -> Simplification:
    """Canonical simplification used as the index/ranking key: the path
    lexicalisation, optionally augmented with the sentence root word."""
    nodes = set(pattern_set.path.nodes)
    if include_sentence_root:
        nodes.add(pattern_set.sentence_root)
    return lexicalize_nodes(sentence, nodes, pair, use_lemmas=use_lemmas)


DEFAULT_PARTS = frozenset({PatternPart.PATH})
DISPLAY_PARTS = frozenset({
    PatternPart.PATH, PatternPart.PATH_BETWEEN_ROOTS, PatternPart.MODALITY,
})


def _is_aux(deprel: str) -> bool:
    return deprel == "aux" or deprel.startswith("aux")


def lexicalize_display(
    sentence: Sentence,
    pattern_set: PatternSet,
    pair: EntityPair,
    parts: frozenset[PatternPart] = DISPLAY_PARTS,
    marker: tuple[str, str] = ("~", "~"),
    use_lemmas: bool = False,
) -> str:
    """Merged lexicalisation of the selected patterns.

    Words are de-duplicated by token index and arranged in sentence order;
    words contributed only by non-path parts are wrapped in the marker pair.
    With MODALITY selected, aux/neg children of either root are pulled out of
    the word sequence and appended as hedging/negation annotations.
    """
    path_nodes = set(pattern_set.path.nodes) if PatternPart.PATH in parts else set()
    extra: set[int] = set()
    if PatternPart.PATH_ROOT in parts:
        extra.add(pattern_set.path_root)
    if PatternPart.SENTENCE_ROOT in parts:
        extra.add(pattern_set.sentence_root)
    if PatternPart.PATH_BETWEEN_ROOTS in parts and pattern_set.path_between_roots is not None:
        extra.update(pattern_set.path_between_roots.nodes)

    modality_nodes: set[int] = set()
    hedging: list[int] = []
    negation: list[int] = []
    if PatternPart.MODALITY in parts:
        for idx in sorted(set(pattern_set.path_root_descendants)
                          | set(pattern_set.sentence_root_descendants)):
            deprel = sentence.tokens[idx].deprel
            if _is_aux(deprel):
                hedging.append(idx)
                modality_nodes.add(idx)
            elif deprel == "neg":
                negation.append(idx)
                modality_nodes.add(idx)

    if PatternPart.SENTENCE_ROOT_DESCENDANTS in parts:
        extra.update(set(pattern_set.sentence_root_descendants) - modality_nodes)
    if PatternPart.PATH_ROOT_DESCENDANTS in parts:
        extra.update(set(pattern_set.path_root_descendants) - modality_nodes)

    slots = _placeholders(sentence, pair)
    pre, post = marker
    rendered = []
    for idx in sorted(path_nodes | extra):
        if idx in slots:
            rendered.append(slots[idx])
        else:
            word = _word(sentence, idx, use_lemmas)
            if idx not in path_nodes:
                word = f"{pre}{word}{post}"
            rendered.append(word)
    out = " ".join(w for w in rendered if w)
    for label, indices in (("hedging", hedging), ("negation", negation)):
        if indices:
            words = ", ".join(_word(sentence, i, use_lemmas) for i in indices)
            out += f" + {label}:[{words}]"
    return out
