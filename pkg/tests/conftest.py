import pytest

from simpmine.corpus import EntityPair, Mention, Sentence, Token
from simpmine.index import IndexRecord, PairIndex


def make_sentence(doc_id, sent_id, rows, mentions, text=None):
    """rows: (form, lemma, head, deprel) tuples in token order."""
    tokens = tuple(Token(idx=i, form=f, lemma=l, head=h, deprel=d)
                   for i, (f, l, h, d) in enumerate(rows))
    return Sentence(
        doc_id=doc_id, sent_id=sent_id,
        text=text or " ".join(t.form for t in tokens),
        tokens=tokens,
        mentions=tuple(Mention(*m) for m in mentions),
    )


@pytest.fixture
def hedged_knockdown_sentence():
    """'We investigate the hypothesis that the knockdown of BRAF may affect
    melanoma progression.' with the full dependency tree."""
    rows = [
        ("We", "we", 1, "nsubj"),
        ("investigate", "investigate", None, "root"),
        ("the", "the", 3, "det"),
        ("hypothesis", "hypothesis", 1, "dobj"),
        ("that", "that", 10, "mark"),
        ("the", "the", 6, "det"),
        ("knockdown", "knockdown", 10, "nsubj"),
        ("of", "of", 6, "prep"),
        ("BRAF", "BRAF", 7, "pobj"),
        ("may", "may", 10, "aux"),
        ("affect", "affect", 3, "acl"),
        ("melanoma", "melanoma", 12, "compound"),
        ("progression", "progression", 10, "dobj"),
        (".", ".", 1, "punct"),
    ]
    mentions = [(8, 9, "GENE", "G:BRAF"), (11, 12, "DISEASE", "D:melanoma")]
    return make_sentence("d1", "s1", rows, mentions)


@pytest.fixture
def negated_activity_sentence():
    """'The study did not record higher NF-kb activity in cancer patients.'"""
    rows = [
        ("The", "the", 1, "det"),
        ("study", "study", 4, "nsubj"),
        ("did", "do", 4, "aux"),
        ("not", "not", 4, "neg"),
        ("record", "record", None, "root"),
        ("higher", "higher", 7, "amod"),
        ("NF-kb", "NF-kb", 7, "compound"),
        ("activity", "activity", 4, "dobj"),
        ("in", "in", 7, "prep"),
        ("cancer", "cancer", 10, "compound"),
        ("patients", "patient", 8, "pobj"),
        (".", ".", 4, "punct"),
    ]
    mentions = [(6, 7, "GENE", "G:NFKB"), (9, 10, "DISEASE", "D:cancer")]
    return make_sentence("d1", "s2", rows, mentions)


def pair(a_id, b_id):
    return EntityPair(a_id, b_id, "GENE", "DISEASE")


def record(doc_id, sent_id, p, key, display=None, text=None, n_words=None):
    return IndexRecord(
        doc_id=doc_id, sent_id=sent_id, pair=p, simplification_key=key,
        display=display if display is not None else key,
        sentence_text=text if text is not None else f"{doc_id}/{sent_id}: {key}",
        n_words=n_words if n_words is not None else len(key.split()),
    )


def build_index(entries):
    """entries: (doc_id, sent_id, pair, key) tuples."""
    index = PairIndex()
    for doc_id, sent_id, p, key in entries:
        index.insert(record(doc_id, sent_id, p, key))
    return index
