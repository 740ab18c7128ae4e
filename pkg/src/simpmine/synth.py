"""Seeded synthetic corpus with planted ground truth.

The generator builds a gene/disease pair universe, marks a fraction of the
pairs as gold positives, and emits sentences from two groups of templates:

* good templates express (almost) only gold-positive pairs; their noise is
  a small pre-drawn pool of negative pairs (at most noise_rate times the
  positive pool), so the distinct-pair purity of a good template holds at
  any corpus size;
* bad templates draw from a pool containing matched shares of the positive
  and negative universes, so their normalized per-key precision sits near
  0.5 by construction.

Every template is a chain-shaped dependency tree whose shortest path
between the two mentions covers all its words, so each template maps to
exactly one simplification key and the planted selection problem has a
known answer: a sufficiently high precision threshold must recover the
good templates and nothing else.

All randomness flows from one seed, so a given spec always produces the
identical corpus.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import random

from .clustering import levenshtein
from .corpus import EntityPair, Mention, Sentence, Token


# Connector vocabulary chosen to stay clear of the default negation/hedging
# filter lists.
_VERBS = ["modulates", "elevates", "represses", "amplifies", "dampens",
          "accelerates", "restores", "stabilizes", "disrupts", "attenuates",
          "aggravates", "normalizes"]
_NOUNS = ["progression", "severity", "onset", "expression", "signaling", "growth"]
_PREPS = ["in", "of", "during"]


def _template_words(count: int) -> list[tuple[str, ...]]:
    """Distinct mid-word sequences, all pairwise Levenshtein distance > 2 as
    full keys, so cluster expansion can never bridge two templates."""
    shapes: list[tuple[str, ...]] = []
    for i, verb in enumerate(_VERBS):
        if i % 2 == 0:
            shapes.append((verb,))
        else:
            shapes.append((verb, _NOUNS[i % len(_NOUNS)], _PREPS[i % len(_PREPS)]))
    if count > len(shapes):
        raise ValueError(f"at most {len(shapes)} planted templates supported, asked for {count}")
    picked = shapes[:count]
    keys = [template_key(mid) for mid in picked]
    for i in range(len(keys)):
        for j in range(i + 1, len(keys)):
            if levenshtein(keys[i], keys[j]) <= 2:
                raise AssertionError(f"planted keys too close: {keys[i]!r} / {keys[j]!r}")
    return picked


def template_key(mid_words: Sequence[str]) -> str:
    return " ".join(["GENE", *mid_words, "DISEASE"])


def template_sentence(mid_words: Sequence[str], pair: EntityPair,
                      doc_id: str, sent_id: str) -> Sentence:
    """Chain tree: GENE <-nsubj- w1 -...-> wk -dobj-> DISEASE."""
    forms = [pair.a_id, *mid_words, pair.b_id]
    last = len(forms) - 1
    tokens = []
    for i, form in enumerate(forms):
        if i == 0:
            head, dep = 1, "nsubj"
        elif i == 1:
            head, dep = None, "root"
        elif i == last:
            head, dep = i - 1, "dobj"
        else:
            head, dep = i - 1, "dep"
        tokens.append(Token(idx=i, form=form, lemma=form.lower(), head=head, deprel=dep))
    mentions = (
        Mention(start_tok=0, end_tok=1, entity_type=pair.a_type, entity_id=pair.a_id),
        Mention(start_tok=last, end_tok=last + 1, entity_type=pair.b_type, entity_id=pair.b_id),
    )
    return Sentence(doc_id=doc_id, sent_id=sent_id, text=" ".join(forms) + ".",
                    tokens=tuple(tokens), mentions=mentions)


@dataclass(frozen=True)
class PlantedSpec:
    n_genes: int = 40
    n_diseases: int = 30
    n_good: int = 6
    n_bad: int = 6
    n_sentences: int = 10_000
    positive_fraction: float = 0.3
    noise_rate: float = 0.03  # share of good-template sentences using a negative pair
    good_share: float = 0.6   # share of all sentences drawn from good templates
    bad_pool_share: float = 0.5  # share of each pair universe sampled into a bad pool
    type_a: str = "GENE"
    type_b: str = "DISEASE"
    seed: int = 7


@dataclass
class PlantedCorpus:
    spec: PlantedSpec
    sentences: list[Sentence]
    gold_positives: set[EntityPair]
    negatives: set[EntityPair]
    good_keys: set[str]
    bad_keys: set[str]
    expressed_pairs_by_key: dict[str, set[EntityPair]] = field(default_factory=dict)


def generate(spec: PlantedSpec) -> PlantedCorpus:
    rng = random.Random(spec.seed)
    genes = [f"G{i:03d}" for i in range(spec.n_genes)]
    diseases = [f"D{i:03d}" for i in range(spec.n_diseases)]
    universe = [EntityPair(g, d, spec.type_a, spec.type_b) for g in genes for d in diseases]
    n_pos = round(spec.positive_fraction * len(universe))
    positives = set(rng.sample(universe, n_pos))
    negatives = set(universe) - positives
    pos_list = sorted(positives)
    neg_list = sorted(negatives)

    templates = _template_words(spec.n_good + spec.n_bad)
    good = templates[: spec.n_good]
    bad = templates[spec.n_good:]
    good_keys = {template_key(t) for t in good}
    bad_keys = {template_key(t) for t in bad}

    x = round(spec.bad_pool_share * len(pos_list))
    y = round(spec.bad_pool_share * len(neg_list))
    bad_pools = [sorted(rng.sample(pos_list, x) + rng.sample(neg_list, y)) for _ in bad]
    n_noise = max(1, round(spec.noise_rate * len(pos_list)))
    noise_pools = [sorted(rng.sample(neg_list, n_noise)) for _ in good]

    n_good_sentences = round(spec.good_share * spec.n_sentences)
    sentences = []
    expressed: dict[str, set[EntityPair]] = {}
    for i in range(spec.n_sentences):
        if i < n_good_sentences:
            g = i % len(good)
            mid = good[g]
            if rng.random() < spec.noise_rate:
                pair = rng.choice(noise_pools[g])
            else:
                pair = rng.choice(pos_list)
        else:
            j = (i - n_good_sentences) % len(bad)
            mid = bad[j]
            pair = rng.choice(bad_pools[j])
        doc_id = f"doc{i // 100:04d}"
        sent_id = f"s{i:06d}"
        sentences.append(template_sentence(mid, pair, doc_id, sent_id))
        expressed.setdefault(template_key(mid), set()).add(pair)

    return PlantedCorpus(
        spec=spec, sentences=sentences, gold_positives=positives, negatives=negatives,
        good_keys=good_keys, bad_keys=bad_keys, expressed_pairs_by_key=expressed,
    )


def write_corpus(path, sentences: Sequence[Sentence]) -> None:
    from .corpus import serialize_sentence

    with open(path, "w", encoding="utf-8") as f:
        for sentence in sentences:
            f.write(serialize_sentence(sentence) + "\n")


def write_gold_pairs(path, pairs: Sequence[EntityPair] | set[EntityPair]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for pair in sorted(pairs):
            f.write(f"{pair.a_id}\t{pair.b_id}\n")
