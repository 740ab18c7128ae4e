import json

import pytest
from hypothesis import given, settings, strategies as st

from simpmine.ranking import (LabelledPairs, RankingUsageError, Verdict,
                              build_annotation_queue, closed_world_negatives,
                              normalized_precision, select_automatic,
                              select_baseline, simplification_metrics)

from conftest import build_index, pair, record


def labelled(positives, negatives):
    return LabelledPairs(positives=frozenset(positives), negatives=frozenset(negatives))


class TestClosedWorld:
    def test_set_difference(self):
        p1, p2, p3 = pair("G:1", "D:1"), pair("G:2", "D:1"), pair("G:3", "D:1")
        assert closed_world_negatives({p1, p2, p3}, {p2}) == {p1, p3}

    def test_gold_superset_gives_empty(self):
        p1 = pair("G:1", "D:1")
        assert closed_world_negatives({p1}, {p1, pair("G:9", "D:9")}) == set()

    def test_counts_on_fixture(self):
        corpus = {pair(f"G:{i}", "D:1") for i in range(100)}
        gold = {pair(f"G:{i}", "D:1") for i in range(30)}
        negatives = closed_world_negatives(corpus, gold)
        assert len(negatives) == 70
        # brute-force recount
        assert sum(1 for p in corpus if p not in gold) == 70


class TestMetrics:
    def test_ten_percent_each_side_scores_half(self):
        # key matches 10% of positives and 10% of negatives
        positives = [pair(f"G:{i}", "D:p") for i in range(50)]
        negatives = [pair(f"G:{i}", "D:n") for i in range(200)]
        entries = [("d", f"p{i}", p, "k") for i, p in enumerate(positives[:5])]
        entries += [("d", f"n{i}", p, "k") for i, p in enumerate(negatives[:20])]
        index = build_index(entries)
        m = simplification_metrics(index, "k", labelled(positives, negatives))
        assert m.tp == 5 and m.fp == 20
        assert m.precision_s == 0.5
        assert m.recall_s == 0.1

    def test_pure_positive_key(self):
        positives = [pair("G:1", "D:1")]
        negatives = [pair("G:2", "D:1")]
        index = build_index([("d", "s1", positives[0], "k")])
        m = simplification_metrics(index, "k", labelled(positives, negatives))
        assert m.precision_s == 1.0

    def test_imbalanced_pools(self):
        positives = [pair(f"G:{i}", "D:p") for i in range(10)]
        negatives = [pair(f"G:{i}", "D:n") for i in range(1000)]
        entries = [("d", f"p{i}", p, "k") for i, p in enumerate(positives[:5])]
        entries += [("d", f"n{i}", p, "k") for i, p in enumerate(negatives[:5])]
        index = build_index(entries)
        m = simplification_metrics(index, "k", labelled(positives, negatives))
        expected = (5 / 10) / ((5 / 10) + (5 / 1000))  # independent evaluation
        assert m.precision_s == pytest.approx(expected, abs=1e-15)
        assert m.recall_s == 0.5

    def test_unknown_key_zero_counts(self):
        index = build_index([])
        m = simplification_metrics(index, "nope",
                                   labelled([pair("G:1", "D:1")], [pair("G:2", "D:1")]))
        assert (m.tp, m.fp, m.precision_s, m.recall_s) == (0, 0, 0.0, 0.0)

    def test_recall_ignores_negative_pool(self):
        positives = [pair(f"G:p{i}", "D:1") for i in range(10)]
        entries = [("d", f"p{i}", p, "k") for i, p in enumerate(positives[:4])]
        entries += [("d", "n0", pair("G:n0", "D:1"), "k")]
        index = build_index(entries)
        small = labelled(positives, [pair("G:n0", "D:1")])
        large = labelled(positives, [pair(f"G:n{i}", "D:1") for i in range(500)])
        m_small = simplification_metrics(index, "k", small)
        m_large = simplification_metrics(index, "k", large)
        assert m_small.recall_s == m_large.recall_s == 0.4
        assert m_small.precision_s != m_large.precision_s

    @given(tp_rate=st.floats(0.01, 1.0), scale=st.integers(1, 50))
    def test_equal_rates_score_half(self, tp_rate, scale):
        n_pos, n_neg = 100, 100 * scale
        tp = round(tp_rate * n_pos)
        fp = tp * scale
        if tp == 0:
            return
        assert normalized_precision(tp, fp, n_pos, n_neg) == pytest.approx(0.5)

    def test_overlapping_labels_rejected(self):
        p = pair("G:1", "D:1")
        with pytest.raises(RankingUsageError):
            labelled([p], [p])


class TestSelectBaseline:
    def test_threshold_inclusive(self):
        entries = []
        for key, count in (("k7", 7), ("k5", 5), ("k4", 4)):
            entries += [("d", f"{key}-{i}", pair(f"G:{key}{i}", "D:1"), key)
                        for i in range(count)]
        index = build_index(entries)
        assert select_baseline(index, 5) == {"k7", "k5"}

    def test_min_one_keeps_all(self):
        index = build_index([("d", "s1", pair("G:1", "D:1"), "k1"),
                             ("d", "s2", pair("G:2", "D:1"), "k2")])
        assert select_baseline(index, 1) == {"k1", "k2"}

    def test_planted_counts(self):
        entries = []
        expected = set()
        for k in range(20):
            count = k + 1  # keys k0..k19 with counts 1..20
            key = f"key{k:02d}"
            if count >= 13:
                expected.add(key)
            entries += [("d", f"{key}-{i}", pair(f"G:{key}{i}", "D:1"), key)
                        for i in range(count)]
        index = build_index(entries)
        selected = select_baseline(index, 13)
        assert selected == expected
        assert len(selected) == 8


def threshold_fixture():
    positives = [pair(f"G:p{i}", "D:1") for i in range(10)]
    negatives = [pair(f"G:n{i}", "D:1") for i in range(10)]
    entries = []
    # "good": 4 positives, 0 negatives -> precision 1.0
    entries += [("d", f"g{i}", positives[i], "good key here") for i in range(4)]
    # "even": 2 positives, 2 negatives -> precision 0.5
    entries += [("d", f"e{i}", positives[4 + i], "even key here") for i in range(2)]
    entries += [("d", f"en{i}", negatives[i], "even key here") for i in range(2)]
    # "bad": 0 positives, 3 negatives -> precision 0
    entries += [("d", f"b{i}", negatives[4 + i], "utterly bad key") for i in range(3)]
    return build_index(entries), labelled(positives, negatives)


class TestSelectAutomatic:
    def test_threshold_excludes_even_key(self):
        index, labels = threshold_fixture()
        keys = [m.key for m in select_automatic(index, labels, precision_thr=0.6)]
        assert keys == ["good key here"]

    def test_zero_thresholds_keep_all_ordered_by_count(self):
        index, labels = threshold_fixture()
        got = select_automatic(index, labels, precision_thr=0.0, recall_thr=0.0, min_words=0)
        assert [m.key for m in got] == ["even key here", "good key here", "utterly bad key"]
        counts = [m.pair_count for m in got]
        assert counts == sorted(counts, reverse=True)

    def test_min_words(self):
        index, labels = threshold_fixture()
        index.insert(record("d", "x1", pair("G:p9", "D:1"), "GENE hits DISEASE"))
        got = select_automatic(index, labels, precision_thr=0.0, min_words=4)
        assert all(m.n_words >= 4 for m in got)
        assert "GENE hits DISEASE" not in [m.key for m in got]

    @given(t1=st.floats(0, 1), t2=st.floats(0, 1), r1=st.floats(0, 1), r2=st.floats(0, 1))
    @settings(max_examples=30, deadline=None)
    def test_downward_monotone_in_thresholds(self, t1, t2, r1, r2):
        index, labels = threshold_fixture()
        lo = {m.key for m in select_automatic(index, labels, min(t1, t2), min(r1, r2))}
        hi = {m.key for m in select_automatic(index, labels, max(t1, t2), max(r1, r2))}
        assert hi <= lo


_WORDS = ["ancient", "breeze", "crystal", "dromedary", "elephant", "falconry",
          "glacier", "harbormaster", "islander", "jaguar", "kestrel", "lagoon",
          "meridian", "nocturne", "obsidian", "palisade", "quicksilver", "rampart",
          "sycamore", "tundra", "umbrella", "vagabond", "wisteria", "xylophone",
          "yardstick", "zeppelin", "aqueduct", "bulwark", "citadel", "dynamo"]


def queue_fixture(n_keys=30, sentences_per_key=25):
    # keys built from clearly distinct words so radius-2 clustering keeps
    # them apart
    entries = []
    for k in range(n_keys):
        key = f"GENE {_WORDS[k]} DISEASE"
        for i in range(sentences_per_key):
            # one pair per sentence, pair count k+1 distinct pairs
            entries.append(("d", f"{k}-{i}", pair(f"G:{k}-{i % (k + 1)}", "D:1"), key))
    return build_index(entries)


class TestQueue:
    def test_session_shape(self):
        index = queue_fixture(n_keys=12, sentences_per_key=25)
        queue = build_annotation_queue(index, "by_count", session_size=10,
                                       examples_per_item=20, seed=1)
        assert len(queue) == 10
        assert all(len(item.examples) == min(20, 25) for item in queue)
        counts = [item.pair_count for item in queue]
        assert counts == sorted(counts, reverse=True)

    def test_small_corpus_fewer_items(self):
        index = queue_fixture(n_keys=3)
        queue = build_annotation_queue(index, "by_count", session_size=200,
                                       examples_per_item=5, seed=1)
        assert len(queue) == 3

    def test_cluster_dedup_keeps_higher_count(self):
        entries = [("d", f"a{i}", pair(f"G:a{i}", "D:1"), "GENE effects on DISEASE")
                   for i in range(6)]
        entries += [("d", f"b{i}", pair(f"G:b{i}", "D:1"), "GENE effect on DISEASE")
                    for i in range(3)]
        index = build_index(entries)
        queue = build_annotation_queue(index, "by_count", session_size=10,
                                       examples_per_item=5, seed=1)
        assert [item.key for item in queue] == ["GENE effects on DISEASE"]

    def test_annotated_keys_excluded(self):
        index = queue_fixture(n_keys=5)
        first = build_annotation_queue(index, "by_count", session_size=2,
                                       examples_per_item=3, seed=1)
        done = frozenset(item.key for item in first)
        second = build_annotation_queue(index, "by_count", session_size=10,
                                        examples_per_item=3, seed=1, annotated=done)
        assert not (done & {item.key for item in second})
        assert len(second) == 3

    def test_by_metrics_requires_labels(self):
        index = queue_fixture(n_keys=3)
        with pytest.raises(RankingUsageError):
            build_annotation_queue(index, "by_metrics", session_size=5,
                                   examples_per_item=5, seed=1)

    def test_deterministic_for_seed(self):
        index = queue_fixture(n_keys=10)
        q1 = build_annotation_queue(index, "by_count", session_size=5,
                                    examples_per_item=10, seed=42)
        q2 = build_annotation_queue(index, "by_count", session_size=5,
                                    examples_per_item=10, seed=42)
        assert json.dumps([(i.key, i.examples) for i in q1]) == \
            json.dumps([(i.key, i.examples) for i in q2])


class TestVerdict:
    def test_three_way_values(self):
        for value in ("Yes", "No", "Maybe"):
            assert Verdict(value, "a", 0.0).value == value
        with pytest.raises(ValueError):
            Verdict("yes", "a", 0.0)
