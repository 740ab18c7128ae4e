import json

import pytest

from simpmine import synth
from simpmine.cli import main

CONLLU = """\
# newdoc id = doc7
# sent_id = 1
# text = BRAF drives melanoma.
1\tBRAF\tBRAF\tPROPN\t_\t_\t2\tnsubj\t_\t_
2\tdrives\tdrive\tVERB\t_\t_\t0\troot\t_\t_
3\tmelanoma\tmelanoma\tNOUN\t_\t_\t2\tdobj\t_\t_
"""


@pytest.fixture
def planted(tmp_path):
    spec = synth.PlantedSpec(n_genes=12, n_diseases=8, n_good=3, n_bad=3,
                             n_sentences=1200, seed=9)
    corpus = synth.generate(spec)
    corpus_path = tmp_path / "corpus.ndjson"
    gold_path = tmp_path / "gold.tsv"
    synth.write_corpus(corpus_path, corpus.sentences)
    synth.write_gold_pairs(gold_path, corpus.gold_positives)
    return corpus, corpus_path, gold_path, tmp_path / "run"


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestStages:
    def test_full_automatic_pipeline(self, planted, capsys):
        corpus, corpus_path, gold_path, run_dir = planted
        base = ["--corpus", str(corpus_path), "--labels", str(gold_path),
                "--run-dir", str(run_dir), "--seed", "3",
                "--workflow", "no_expert_but_labels",
                "--precision-threshold", "0.8"]

        code, out, err = run(["ingest", *base], capsys)
        assert code == 0, err
        assert json.loads(out)["eligible"] == 1200

        code, out, _ = run(["extract", *base], capsys)
        assert code == 0
        assert json.loads(out)["keys"] == 6

        code, out, _ = run(["rank", *base], capsys)
        assert code == 0
        selection = json.loads((run_dir / "selection.json").read_text())
        assert set(selection["keys"]) == corpus.good_keys
        ranked = (run_dir / "ranked.tsv").read_text().strip().split("\n")
        assert ranked[0] == "key\tpair_count\ttp\tfp\tprecision_s\trecall_s\tcluster_id"
        assert len(ranked) == 7

        code, out, _ = run(["cluster", *base], capsys)
        assert code == 0
        assert json.loads(out)["keys"] == 6

        code, out, _ = run(["generate", *base], capsys)
        assert code == 0
        generated = json.loads(out)
        assert generated["pairs"] > 0

        code, out, _ = run(["queue", *base], capsys)
        assert code == 0

        code, out, _ = run(["eval-intrinsic", *base], capsys)
        assert code == 0
        report = json.loads((run_dir / "intrinsic.json").read_text())
        assert report["selection_method"] == "no_expert_but_labels"
        assert 0 <= report["precision"] <= 1

        code, out, _ = run(["eval-extrinsic", *base,
                            "--set", "kbc.epochs=3", "--set", "kbc.embedding_dim=4"], capsys)
        assert code == 0
        report = json.loads((run_dir / "extrinsic.json").read_text())
        assert [r["selection_method"] for r in report["rows"]] == \
            ["seed_only", "no_expert_but_labels"]

    def test_rank_threshold_excludes_half_precision_key(self, planted, capsys):
        corpus, corpus_path, gold_path, run_dir = planted
        base = ["--corpus", str(corpus_path), "--labels", str(gold_path),
                "--run-dir", str(run_dir), "--seed", "3",
                "--workflow", "no_expert_but_labels"]
        run(["ingest", *base], capsys)
        run(["extract", *base], capsys)
        code, _, _ = run(["rank", *base, "--precision-threshold", "0.6"], capsys)
        assert code == 0
        selection = json.loads((run_dir / "selection.json").read_text())
        # bad templates sit near precision 0.5 and must be cut at 0.6
        assert not (set(selection["keys"]) & corpus.bad_keys)

    def test_expert_workflow_via_verdicts_file(self, planted, capsys):
        from simpmine.index import PairIndex
        from simpmine.sessions import SessionStore

        corpus, corpus_path, gold_path, run_dir = planted
        base = ["--corpus", str(corpus_path), "--labels", str(gold_path),
                "--run-dir", str(run_dir), "--seed", "3",
                "--workflow", "expert_no_labels"]
        run(["ingest", *base], capsys)
        run(["extract", *base], capsys)

        # an expert annotates a session; two keys get accepted
        index = PairIndex.load(run_dir / "index")
        store = SessionStore(run_dir / "sessions", index)
        session = store.create("expert_no_labels", session_size=6,
                               examples_per_item=2, seed=1)
        keys = [item["key"] for item in session.queue]
        store.submit(session.id, keys[0], "Yes", "expert")
        store.submit(session.id, keys[1], "Yes", "expert")
        for key in keys[2:5]:
            store.submit(session.id, key, "No", "expert")
        store.submit(session.id, keys[5], "Maybe", "expert")
        store.export(session.id)
        verdicts_path = run_dir / "sessions" / session.id / "verdicts.ndjson"

        expert = [*base, "--verdicts", str(verdicts_path)]
        code, _, err = run(["rank", *expert], capsys)
        assert code == 0, err
        selection = json.loads((run_dir / "selection.json").read_text())
        assert set(selection["keys"]) == set(keys[:2])

        code, out, _ = run(["generate", *expert], capsys)
        assert code == 0
        expected_pairs = set()
        for key in keys[:2]:
            expected_pairs |= index.pairs_for_simplification(key)
        assert json.loads(out)["pairs"] == len(expected_pairs)

        code, out, _ = run(["eval-intrinsic", *expert], capsys)
        assert code == 0
        report = json.loads((run_dir / "intrinsic.json").read_text())
        assert report["msp"] == pytest.approx(2 / 6)

    def test_tuned_threshold_from_validation_split(self, planted, capsys):
        corpus, corpus_path, gold_path, run_dir = planted
        base = ["--corpus", str(corpus_path), "--labels", str(gold_path),
                "--run-dir", str(run_dir), "--seed", "3",
                "--workflow", "no_expert_but_labels", "--tune-threshold", "true"]
        run(["ingest", *base], capsys)
        run(["extract", *base], capsys)
        code, out, err = run(["rank", *base], capsys)
        assert code == 0, err
        selection = json.loads((run_dir / "selection.json").read_text())
        assert "tuned_grid_f_scores" in selection
        assert selection["precision_threshold"] in (0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
        # whatever threshold wins, the good templates must survive it
        assert corpus.good_keys <= set(selection["keys"])

    def test_missing_corpus_is_config_error(self, tmp_path, capsys):
        code, out, err = run(["ingest", "--corpus", str(tmp_path / "nope.ndjson"),
                              "--run-dir", str(tmp_path / "r")], capsys)
        assert code == 2
        assert "not found" in json.loads(err)["error"]

    def test_seed_required_for_rank(self, planted, capsys):
        _, corpus_path, gold_path, run_dir = planted
        base = ["--corpus", str(corpus_path), "--labels", str(gold_path),
                "--run-dir", str(run_dir)]
        run(["ingest", *base], capsys)
        run(["extract", *base], capsys)
        code, _, err = run(["rank", *base], capsys)
        assert code == 2
        assert "seed" in json.loads(err)["error"]

    def test_unknown_stage_rejected(self, capsys):
        with pytest.raises(SystemExit):
            main(["frobnicate"])

    def test_set_override_precedence(self, planted, capsys):
        _, corpus_path, gold_path, run_dir = planted
        code, out, _ = run(["ingest", "--corpus", str(corpus_path),
                            "--run-dir", str(run_dir),
                            "--set", "type_a=GENE", "--set", "type_b=DISEASE"], capsys)
        assert code == 0

    def test_bad_override_rejected(self, capsys):
        code, _, err = run(["ingest", "--set", "nonsense_key=1"], capsys)
        assert code == 2
        assert "unknown config key" in json.loads(err)["error"]


class TestConvertConllu:
    def test_convert_then_ingest(self, tmp_path, capsys):
        conllu = tmp_path / "sample.conllu"
        conllu.write_text(CONLLU, encoding="utf-8")
        mentions = tmp_path / "mentions.ndjson"
        mentions.write_text(json.dumps({
            "doc_id": "doc7", "sent_id": "1",
            "mentions": [{"start": 0, "end": 1, "type": "GENE", "id": "G:BRAF"},
                         {"start": 2, "end": 3, "type": "DISEASE", "id": "D:mel"}],
        }) + "\n", encoding="utf-8")
        corpus = tmp_path / "corpus.ndjson"
        code, out, err = run(["convert-conllu", "--conllu", str(conllu),
                              "--mentions", str(mentions), "--corpus", str(corpus)], capsys)
        assert code == 0, err
        assert json.loads(out)["sentences"] == 1
        code, out, _ = run(["ingest", "--corpus", str(corpus),
                            "--run-dir", str(tmp_path / "r")], capsys)
        assert code == 0
        assert json.loads(out)["eligible"] == 1


class TestConfigFile:
    def test_yaml_config_with_flag_override(self, planted, tmp_path, capsys):
        _, corpus_path, gold_path, run_dir = planted
        config = tmp_path / "run.yaml"
        config.write_text(
            f"corpus: {corpus_path}\nlabels: {gold_path}\nrun_dir: {run_dir}\n"
            f"workflow: no_expert_but_labels\nseed: 3\n"
            f"kbc:\n  epochs: 2\n  embedding_dim: 4\n")
        code, out, _ = run(["ingest", "--config", str(config)], capsys)
        assert code == 0
        code, out, _ = run(["extract", "--config", str(config)], capsys)
        assert code == 0
        code, out, _ = run(["rank", "--config", str(config),
                            "--set", "precision_threshold=0.8"], capsys)
        assert code == 0
        selection = json.loads((run_dir / "selection.json").read_text())
        assert selection["precision_threshold"] == 0.8
