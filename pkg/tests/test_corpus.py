import json

import pytest
from hypothesis import given, strategies as st

from simpmine.corpus import (EntityPair, Mention, RecordParseError, Sentence,
                             SentenceValidationError, Token, eligible_sentences,
                             mention_head, parse_corpus_record, serialize_sentence,
                             validate_sentence)

from conftest import make_sentence


def record_json(tokens, mentions, doc_id="d", sent_id="s"):
    return json.dumps({
        "doc_id": doc_id, "sent_id": sent_id, "text": "t",
        "tokens": [{"i": i, "form": f, "lemma": f.lower(), "head": h, "dep": d}
                   for i, (f, h, d) in enumerate(tokens)],
        "mentions": [{"start": a, "end": b, "type": t, "id": eid}
                     for a, b, t, eid in mentions],
    })


class TestParseRecord:
    def test_minimal_wellformed(self):
        line = record_json(
            [("BRAF", 1, "nsubj"), ("causes", None, "root"), ("melanoma", 1, "dobj")],
            [(0, 1, "GENE", "G:1"), (2, 3, "DISEASE", "D:1")])
        s = parse_corpus_record(line)
        assert len(s.tokens) == 3
        assert len(s.mentions) == 2
        assert s.tokens[1].head is None

    def test_head_out_of_range(self):
        line = record_json([("a", 1, "x"), ("b", None, "root"), ("c", 7, "x")], [])
        with pytest.raises(SentenceValidationError, match="head out of range"):
            parse_corpus_record(line)

    def test_multiple_roots(self):
        line = record_json([("a", None, "root"), ("b", None, "root")], [])
        with pytest.raises(SentenceValidationError, match="multiple roots"):
            parse_corpus_record(line)

    def test_no_root(self):
        line = record_json([("a", 1, "x"), ("b", 0, "x")], [])
        with pytest.raises(SentenceValidationError, match="cycle|no root"):
            parse_corpus_record(line)

    def test_self_loop(self):
        line = record_json([("a", 0, "x"), ("b", None, "root")], [])
        with pytest.raises(SentenceValidationError, match="self-loop"):
            parse_corpus_record(line)

    def test_bad_json_reports_line(self):
        with pytest.raises(RecordParseError, match="line 12"):
            parse_corpus_record("{not json", line_no=12)

    def test_missing_field(self):
        with pytest.raises(RecordParseError):
            parse_corpus_record(json.dumps({"doc_id": "d"}))

    def test_overlapping_mentions(self):
        line = record_json(
            [("a", 1, "x"), ("b", None, "root"), ("c", 1, "x")],
            [(0, 2, "GENE", "G:1"), (1, 3, "DISEASE", "D:1")])
        with pytest.raises(SentenceValidationError, match="overlap"):
            parse_corpus_record(line)

    def test_mention_span_out_of_bounds(self):
        line = record_json([("a", None, "root")], [(0, 2, "GENE", "G:1")])
        with pytest.raises(SentenceValidationError, match="out of bounds"):
            parse_corpus_record(line)

    def test_empty_sentence(self):
        line = json.dumps({"doc_id": "d", "sent_id": "s", "text": "", "tokens": [],
                           "mentions": []})
        with pytest.raises(SentenceValidationError, match="empty"):
            parse_corpus_record(line)


# Random well-formed sentences: parents always point at earlier tokens, so
# the structure is a tree rooted at token 0 by construction.
@st.composite
def sentence_strategy(draw, max_tokens=12):
    n = draw(st.integers(min_value=1, max_value=max_tokens))
    words = st.sampled_from(["alpha", "beta", "gamma", "delta", "NF-kb", "p53", "росток"])
    deps = st.sampled_from(["nsubj", "dobj", "prep", "pobj", "amod", "compound"])
    tokens = []
    for i in range(n):
        head = None if i == 0 else draw(st.integers(min_value=0, max_value=i - 1))
        tokens.append(Token(idx=i, form=draw(words), lemma=draw(words), head=head,
                            deprel=draw(deps)))
    mentions = []
    if n >= 2 and draw(st.booleans()):
        mentions.append(Mention(0, 1, "GENE", "G:1"))
        mentions.append(Mention(n - 1, n, "DISEASE", "D:1"))
    return Sentence(doc_id="d", sent_id="s", text="text",
                    tokens=tuple(tokens), mentions=tuple(mentions))


class TestRoundTrip:
    @given(sentence_strategy())
    def test_serialize_parse_identity(self, sentence):
        validate_sentence(sentence)
        assert parse_corpus_record(serialize_sentence(sentence)) == sentence


def two_mention_sentence(gene_count, disease_count):
    n = gene_count + disease_count + 1
    rows = [("w", "w", None if i == 0 else 0, "dep") for i in range(n)]
    mentions = []
    for g in range(gene_count):
        mentions.append((1 + g, 2 + g, "GENE", f"G:{g}"))
    for d in range(disease_count):
        i = 1 + gene_count + d
        mentions.append((i, i + 1, "DISEASE", f"D:{d}"))
    return make_sentence("d", "s", rows, mentions)


class TestEligibility:
    def test_single_pair_yielded(self):
        s = two_mention_sentence(1, 1)
        out = list(eligible_sentences([s], "GENE", "DISEASE"))
        assert len(out) == 1
        _, p = out[0]
        assert (p.a_id, p.b_id) == ("G:0", "D:0")

    def test_two_genes_skipped_with_reason(self):
        skips = {}
        out = list(eligible_sentences([two_mention_sentence(2, 1)], "GENE", "DISEASE", skips))
        assert out == []
        assert skips == {"multiple_type_a": 1}

    def test_no_disease_skipped(self):
        skips = {}
        out = list(eligible_sentences([two_mention_sentence(1, 0)], "GENE", "DISEASE", skips))
        assert out == []
        assert skips == {"no_type_b": 1}

    def test_same_types_rejected(self):
        with pytest.raises(ValueError):
            list(eligible_sentences([], "GENE", "GENE"))

    @given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), max_size=8))
    def test_output_subset_and_predicate(self, counts):
        sentences = [two_mention_sentence(g, d) for g, d in counts]
        out = list(eligible_sentences(sentences, "GENE", "DISEASE"))
        assert len(out) <= len(sentences)
        expected = sum(1 for g, d in counts if g == 1 and d == 1)
        assert len(out) == expected
        for sentence, _ in out:
            assert len(sentence.mentions_of_type("GENE")) == 1
            assert len(sentence.mentions_of_type("DISEASE")) == 1


class TestMentionHead:
    def test_single_token(self):
        s = two_mention_sentence(1, 1)
        assert mention_head(s, s.mentions[0]) == 1

    def test_internal_head_resolves_outward(self):
        # two-token span where token0 attaches inside, token1 outside
        rows = [("NF-kb", "nf-kb", 1, "compound"), ("activity", "activity", 2, "nsubj"),
                ("rose", "rise", None, "root")]
        s = make_sentence("d", "s", rows, [(0, 2, "GENE", "G:1")])
        assert mention_head(s, s.mentions[0]) == 1

    def test_tie_breaks_leftmost(self):
        # both span tokens attach outside the span
        rows = [("a", "a", 2, "dep"), ("b", "b", 2, "dep"), ("v", "v", None, "root")]
        s = make_sentence("d", "s", rows, [(0, 2, "GENE", "G:1")])
        assert mention_head(s, s.mentions[0]) == 0

    @given(sentence_strategy())
    def test_head_always_inside_span(self, sentence):
        for m in sentence.mentions:
            assert m.start_tok <= mention_head(sentence, m) < m.end_tok


class TestEntityPair:
    def test_identity_is_id_pair(self):
        p1 = EntityPair("G:1", "D:1", "GENE", "DISEASE")
        p2 = EntityPair("G:1", "D:1", "gene", "disease")
        assert p1 == p2 and hash(p1) == hash(p2)

    def test_same_roles_rejected(self):
        with pytest.raises(ValueError):
            EntityPair("a", "b", "GENE", "GENE")

    def test_json_round_trip(self):
        p = EntityPair("G:1", "D:1", "GENE", "DISEASE")
        assert EntityPair.from_json(p.to_json()) == p
