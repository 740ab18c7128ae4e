"""Pipeline stages behind the command line.

Each stage reads only the artifacts of earlier stages (plus the original
inputs), writes its outputs under the run directory, and returns a summary
dict. Artifacts contain no wall-clock values or absolute paths, so a rerun
with the same inputs, config and seed reproduces them byte for byte.

Stage order: ``convert-conllu`` (optional) -> ``ingest`` -> ``extract`` ->
``rank`` / ``cluster`` / ``queue`` -> ``generate`` -> ``eval-intrinsic`` /
``eval-extrinsic``; ``serve`` runs the annotation service on the index.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Optional

from . import clustering, pairgen, ranking
from .config import ConfigError, RunConfig
from .corpus import EntityPair, eligible_sentences, read_corpus, serialize_sentence
from .evaluation import GoldSplit, SplitSpec, msp, pair_level_metrics, split_gold
from .filters import apply_filter, load_filter_config
from .index import IndexRecord, PairIndex
from .kbc import evaluate as kbc_evaluate, save_model, train as kbc_train
from .patterns import DISPLAY_PARTS, extract_pattern_set, index_key, lexicalize_display
from .ranking import LabelledPairs, Verdict, closed_world_negatives

STAGES = ("ingest", "extract", "rank", "cluster", "queue", "generate",
          "eval-intrinsic", "eval-extrinsic", "serve", "convert-conllu")


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f, indent=2, sort_keys=True, ensure_ascii=False)
        f.write("\n")


def _require_file(path: Optional[str], what: str) -> Path:
    if path is None:
        raise ConfigError(f"config is missing a path for {what}")
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"{what} not found: {p}")
    return p


def _run_path(cfg: RunConfig, name: str) -> Path:
    p = Path(cfg.run_dir)
    p.mkdir(parents=True, exist_ok=True)
    return p / name


# -- stages ----------------------------------------------------------------

def stage_convert_conllu(cfg: RunConfig) -> dict:
    from .conllu import convert

    conllu_path = _require_file(cfg.conllu, "CoNLL-U input (config key 'conllu')")
    if cfg.mentions is not None:
        _require_file(cfg.mentions, "mention side-file (config key 'mentions')")
    if cfg.corpus is None:
        raise ConfigError("config key 'corpus' must name the output corpus file")
    out = Path(cfg.corpus)
    out.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with_mentions = 0
    with open(out, "w", encoding="utf-8") as f:
        for sentence in convert(conllu_path, cfg.mentions):
            f.write(serialize_sentence(sentence) + "\n")
            n += 1
            if sentence.mentions:
                with_mentions += 1
    return {"stage": "convert-conllu", "sentences": n, "with_mentions": with_mentions,
            "corpus": out.name}


def stage_ingest(cfg: RunConfig) -> dict:
    corpus_path = _require_file(cfg.corpus, "corpus file (config key 'corpus')")
    sentences = sorted(read_corpus(corpus_path), key=lambda s: (s.doc_id, s.sent_id))
    out = _run_path(cfg, "corpus.valid.ndjson")
    with open(out, "w", encoding="utf-8") as f:
        for sentence in sentences:
            f.write(serialize_sentence(sentence) + "\n")
    skips: dict[str, int] = {}
    eligible = sum(1 for _ in eligible_sentences(sentences, cfg.type_a, cfg.type_b, skips))
    summary = {"stage": "ingest", "sentences": len(sentences), "eligible": eligible,
               "skipped": skips}
    _write_json(_run_path(cfg, "ingest.json"), summary)
    return summary


def stage_extract(cfg: RunConfig) -> dict:
    corpus_path = _require_file(str(_run_path(cfg, "corpus.valid.ndjson")),
                                "validated corpus (run ingest first)")
    filter_config = load_filter_config(cfg.filter_config)
    digest = hashlib.sha256(corpus_path.read_bytes()).hexdigest()
    index = PairIndex(type_a=cfg.type_a, type_b=cfg.type_b, corpus_hash=digest)
    filtered: dict[str, int] = {}
    eligible = 0
    for sentence, pair in eligible_sentences(read_corpus(corpus_path), cfg.type_a, cfg.type_b):
        eligible += 1
        pattern_set = extract_pattern_set(sentence, pair)
        verdict = apply_filter(sentence, pattern_set, filter_config)
        if not verdict.keep:
            filtered[verdict.reason] = filtered.get(verdict.reason, 0) + 1
            continue
        simp = index_key(sentence, pattern_set, pair,
                         include_sentence_root=cfg.include_sentence_root,
                         use_lemmas=cfg.use_lemmas)
        display = lexicalize_display(sentence, pattern_set, pair, parts=DISPLAY_PARTS,
                                     use_lemmas=cfg.use_lemmas)
        index.insert(IndexRecord(
            doc_id=sentence.doc_id, sent_id=sentence.sent_id, pair=pair,
            simplification_key=simp.key, display=display,
            sentence_text=sentence.text, n_words=simp.n_words))
    index.save(cfg.resolved_index_dir())
    summary = {"stage": "extract", "eligible": eligible,
               "kept": len(index), "filtered": filtered,
               "keys": len(index.keys()), "pairs": len(index.all_pairs())}
    _write_json(_run_path(cfg, "extract.json"), summary)
    return summary


def _load_index(cfg: RunConfig) -> PairIndex:
    d = cfg.resolved_index_dir()
    if not (d / "meta").exists():
        raise ConfigError(f"no index at {d} (run extract first)")
    return PairIndex.load(d)


def read_gold_pairs(path, type_a: str, type_b: str) -> set[EntityPair]:
    pairs = set()
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) < 2:
                raise ConfigError(f"gold pairs line {line_no}: expected a_id<TAB>b_id")
            pairs.add(EntityPair(parts[0], parts[1], type_a, type_b))
    return pairs


def load_split_labels(cfg: RunConfig, index: PairIndex, stage: str) -> tuple[GoldSplit, LabelledPairs]:
    """Gold positives restricted to corpus pairs, closed-world negatives,
    split train/valid/test; the train part doubles as the ranking labels."""
    gold_path = _require_file(cfg.labels, "gold pairs file (config key 'labels')")
    gold = read_gold_pairs(gold_path, cfg.type_a, cfg.type_b)
    corpus_pairs = index.all_pairs()
    positives = gold & corpus_pairs
    if not positives:
        raise ConfigError("no gold positive pairs occur in the corpus")
    negatives = closed_world_negatives(corpus_pairs, positives)
    spec = SplitSpec(fractions=cfg.split, seed=cfg.require_seed(stage))
    split = split_gold(positives, negatives, spec)
    train_labels = LabelledPairs(positives=split.train_pos, negatives=split.train_neg)
    return split, train_labels


def _read_verdicts(path) -> list[tuple[str, Verdict]]:
    out = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            obj = json.loads(line)
            out.append((obj["key"], Verdict(value=obj["value"],
                                            annotator=obj.get("annotator", "expert"),
                                            timestamp=obj.get("ts", 0.0))))
    return out


def _tabulate(rows: list[list], header: list[str], path: Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write("\t".join(header) + "\n")
        for row in rows:
            f.write("\t".join(repr(c) if isinstance(c, float) else str(c) for c in row) + "\n")


def tune_precision_threshold(index: PairIndex, split: GoldSplit, cfg: RunConfig,
                             grid=(0.4, 0.5, 0.6, 0.7, 0.8, 0.9)) -> tuple[float, dict]:
    """Pick the grid threshold whose generated pairs score the best F on the
    validation split (ties fall to the stricter threshold)."""
    train_labels = LabelledPairs(positives=split.train_pos, negatives=split.train_neg)
    if not split.valid_pos or not split.valid_neg:
        raise ConfigError("threshold tuning needs a non-empty validation split")
    best = None
    scores = {}
    for thr in grid:
        selected = ranking.select_automatic(index, train_labels, precision_thr=thr,
                                            recall_thr=cfg.recall_threshold,
                                            min_words=cfg.min_words)
        predicted = set()
        for m in selected:
            predicted |= index.pairs_for_simplification(m.key)
        metrics = pair_level_metrics(predicted, set(split.valid_pos), set(split.valid_neg))
        scores[thr] = metrics.f_score
        if best is None or metrics.f_score > best[1] or \
                (metrics.f_score == best[1] and thr > best[0]):
            best = (thr, metrics.f_score)
    return best[0], scores


def stage_rank(cfg: RunConfig) -> dict:
    cfg.require_seed("rank")
    index = _load_index(cfg)
    keys = index.keys()
    counts = {k: index.pair_count(k) for k in keys}
    clusters = clustering.cluster_simplifications(keys, radius=cfg.cluster_radius,
                                                  pair_counts=counts)
    cluster_id = {k: c.id for c in clusters for k in c.members}

    labels = None
    split = None
    precision_threshold = cfg.precision_threshold
    tuned = None
    if cfg.workflow in ("no_expert_but_labels", "expert_with_labels"):
        split, labels = load_split_labels(cfg, index, "rank")
        if cfg.tune_threshold:
            precision_threshold, tuned = tune_precision_threshold(index, split, cfg)

    rows = []
    metric_by_key = {}
    if labels is not None:
        for key in keys:
            metric_by_key[key] = ranking.simplification_metrics(index, key, labels)
    for key in sorted(keys, key=lambda k: (-counts[k], k)):
        m = metric_by_key.get(key)
        rows.append([key, counts[key],
                     m.tp if m else "NA", m.fp if m else "NA",
                     m.precision_s if m else "NA", m.recall_s if m else "NA",
                     cluster_id[key]])
    _tabulate(rows, ["key", "pair_count", "tp", "fp", "precision_s", "recall_s", "cluster_id"],
              _run_path(cfg, "ranked.tsv"))

    if cfg.workflow == "baseline":
        selected = sorted(ranking.select_baseline(index, cfg.min_pair_count))
    elif cfg.workflow == "no_expert_but_labels":
        selected = [m.key for m in ranking.select_automatic(
            index, labels, precision_thr=precision_threshold,
            recall_thr=cfg.recall_threshold, min_words=cfg.min_words)]
    else:
        # Expert workflows: acceptance comes from verdicts, when present.
        selected = []
        if cfg.verdicts:
            verdicts = _read_verdicts(_require_file(cfg.verdicts, "verdict file"))
            latest: dict[str, str] = {}
            for key, verdict in verdicts:
                latest[key] = verdict.value
            selected = sorted(k for k, v in latest.items() if v == "Yes")
    selection = {"workflow": cfg.workflow, "precision_threshold": precision_threshold,
                 "recall_threshold": cfg.recall_threshold, "min_words": cfg.min_words,
                 "min_pair_count": cfg.min_pair_count, "keys": selected}
    if tuned is not None:
        selection["tuned_grid_f_scores"] = {repr(k): v for k, v in tuned.items()}
    _write_json(_run_path(cfg, "selection.json"), selection)
    summary = {"stage": "rank", "keys": len(keys), "selected": len(selected),
               "workflow": cfg.workflow, "precision_threshold": precision_threshold}
    _write_json(_run_path(cfg, "rank.json"), summary)
    return summary


def stage_cluster(cfg: RunConfig) -> dict:
    index = _load_index(cfg)
    keys = index.keys()
    counts = {k: index.pair_count(k) for k in keys}
    clusters = clustering.cluster_simplifications(keys, radius=cfg.cluster_radius,
                                                  pair_counts=counts)
    rows = []
    for cluster in clusters:
        for member in sorted(cluster.members):
            rows.append([cluster.id, cluster.representative, member])
    _tabulate(rows, ["cluster_id", "representative", "member"], _run_path(cfg, "clusters.tsv"))
    summary = {"stage": "cluster", "keys": len(keys), "clusters": len(clusters),
               "multi_member_clusters": sum(1 for c in clusters if len(c.members) > 1),
               "largest": max((len(c.members) for c in clusters), default=0)}
    _write_json(_run_path(cfg, "cluster.json"), summary)
    return summary


def stage_queue(cfg: RunConfig) -> dict:
    seed = cfg.require_seed("queue")
    index = _load_index(cfg)
    labels = None
    if cfg.workflow == "expert_with_labels":
        _, labels = load_split_labels(cfg, index, "queue")
        ordering = "by_metrics"
    else:
        ordering = "by_count"
    queue = ranking.build_annotation_queue(
        index, ordering=ordering, session_size=cfg.session_size,
        examples_per_item=cfg.examples_per_item, seed=seed, labels=labels,
        precision_thr=cfg.precision_threshold, recall_thr=cfg.recall_threshold,
        min_words=cfg.min_words, cluster_radius=cfg.cluster_radius)
    items = []
    for item in queue:
        obj = {"key": item.key, "pair_count": item.pair_count,
               "examples": [list(e) for e in item.examples]}
        if item.metrics is not None:
            obj["precision_s"] = item.metrics.precision_s
            obj["recall_s"] = item.metrics.recall_s
        items.append(obj)
    _write_json(_run_path(cfg, "queue.json"), {"ordering": ordering, "items": items})
    summary = {"stage": "queue", "items": len(items), "ordering": ordering}
    _write_json(_run_path(cfg, "queue_summary.json"), summary)
    return summary


def stage_generate(cfg: RunConfig) -> dict:
    index = _load_index(cfg)
    selection_path = _require_file(str(_run_path(cfg, "selection.json")),
                                   "selection (run rank first)")
    with open(selection_path, "r", encoding="utf-8") as f:
        selected = json.load(f)["keys"]
    seed_positives: set[EntityPair] = set()
    if cfg.labels:
        split, _ = load_split_labels(cfg, index, "generate")
        seed_positives = set(split.train_pos)
    clusters = None
    if cfg.expand_clusters:
        counts = {k: index.pair_count(k) for k in index.keys()}
        clusters = clustering.cluster_simplifications(index.keys(), radius=cfg.cluster_radius,
                                                      pair_counts=counts)
    generated = pairgen.generate_pairs(index, selected, seed_positives,
                                       expand=cfg.expand_clusters, clusters=clusters)
    pairgen.write_pairs(_run_path(cfg, "pairs.ndjson"), generated)
    summary = {"stage": "generate", **pairgen.summary(generated),
               "expanded": cfg.expand_clusters}
    _write_json(_run_path(cfg, "generate.json"), summary)
    return summary


def _read_generated(cfg: RunConfig) -> list[dict]:
    pairs_path = _require_file(str(_run_path(cfg, "pairs.ndjson")),
                               "generated pairs (run generate first)")
    out = []
    with open(pairs_path, "r", encoding="utf-8") as f:
        for line in f:
            if line.strip():
                out.append(json.loads(line))
    return out


def stage_eval_intrinsic(cfg: RunConfig) -> dict:
    index = _load_index(cfg)
    split, _ = load_split_labels(cfg, index, "eval-intrinsic")
    generated = _read_generated(cfg)
    predicted = {EntityPair.from_json(g["pair"]) for g in generated}
    metrics = pair_level_metrics(predicted, set(split.test_pos), set(split.test_neg))
    msp_value = None
    if cfg.verdicts:
        verdicts = _read_verdicts(_require_file(cfg.verdicts, "verdict file"))
        latest: dict[str, Verdict] = {}
        for key, verdict in verdicts:
            latest[key] = verdict
        if latest:
            msp_value = msp(list(latest.values()))
    report = {
        "selection_method": cfg.workflow,
        "msp": msp_value,
        "new_pairs": sum(1 for g in generated if g["novel"]),
        "generated_pairs": len(generated),
        "recall": metrics.recall,
        "specificity": metrics.specificity,
        "precision": metrics.precision,
        "f_score": metrics.f_score,
        "tp": metrics.tp, "fp": metrics.fp, "fn": metrics.fn, "tn": metrics.tn,
        "undefined": list(metrics.undefined),
        "split": list(cfg.split),
    }
    _write_json(_run_path(cfg, "intrinsic.json"), report)
    return {"stage": "eval-intrinsic", **report}


def _pair_triples(pairs, relation: str) -> set[tuple[str, str, str]]:
    return {(p.a_id, relation, p.b_id) for p in pairs}


def stage_eval_extrinsic(cfg: RunConfig) -> dict:
    index = _load_index(cfg)
    split, _ = load_split_labels(cfg, index, "eval-extrinsic")
    seed_train = _pair_triples(split.train_pos, cfg.relation)
    test = _pair_triples(split.test_pos, cfg.relation)
    generated = [EntityPair.from_json(g["pair"]) for g in _read_generated(cfg) if g["novel"]]
    augmented = seed_train | _pair_triples(generated, cfg.relation)

    all_pairs = set(split.train_pos) | set(split.valid_pos) | set(split.test_pos) | set(generated)
    entities = sorted({p.a_id for p in all_pairs} | {p.b_id for p in all_pairs})
    candidates = sorted({p.a_id for p in all_pairs})

    rows = []
    for label, triples in (("seed_only", seed_train), (cfg.workflow, augmented)):
        model = kbc_train(triples, cfg.kbc, entities=entities, relations=[cfg.relation])
        metrics = kbc_evaluate(model, seed_train, test, k_values=(100, 1000),
                               candidates=candidates)
        save_model(model, Path(cfg.run_dir) / f"kbc_{label}")
        rows.append({
            "selection_method": label,
            "new_pairs": 0 if label == "seed_only" else len(augmented) - len(seed_train),
            "map": metrics.map,
            "p_at_100": metrics.p_at_k[100], "p_at_1000": metrics.p_at_k[1000],
            "r_at_100": metrics.r_at_k[100], "r_at_1000": metrics.r_at_k[1000],
            "queries": metrics.n_queries,
        })
    report = {"rows": rows,
              "note": "p/r cutoffs use pooled global rankings; map is per-object"}
    _write_json(_run_path(cfg, "extrinsic.json"), report)
    return {"stage": "eval-extrinsic", **report}


def stage_serve(cfg: RunConfig) -> dict:  # pragma: no cover - exercised via TestClient
    import uvicorn

    from .service import create_app
    from .sessions import SessionStore

    index = _load_index(cfg)
    labels = None
    if cfg.labels:
        if cfg.seed is not None:
            _, labels = load_split_labels(cfg, index, "serve")
        else:
            # No split requested: badge metrics use the whole gold set.
            gold = read_gold_pairs(cfg.labels, cfg.type_a, cfg.type_b) & index.all_pairs()
            labels = LabelledPairs(positives=frozenset(gold), negatives=frozenset(
                closed_world_negatives(index.all_pairs(), gold)))
    store = SessionStore(cfg.resolved_sessions_dir(), index, labels=labels,
                         cluster_radius=cfg.cluster_radius,
                         expand_on_export=cfg.expand_clusters)
    app = create_app(store, token=cfg.token, ui_dir=_find_ui_dir())
    uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="warning")
    return {"stage": "serve"}


def _find_ui_dir() -> Optional[str]:
    candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return str(candidate) if candidate.is_dir() else None


_STAGE_FUNCTIONS = {
    "convert-conllu": stage_convert_conllu,
    "ingest": stage_ingest,
    "extract": stage_extract,
    "rank": stage_rank,
    "cluster": stage_cluster,
    "queue": stage_queue,
    "generate": stage_generate,
    "eval-intrinsic": stage_eval_intrinsic,
    "eval-extrinsic": stage_eval_extrinsic,
    "serve": stage_serve,
}


def run_stage(stage: str, cfg: RunConfig) -> dict:
    try:
        fn = _STAGE_FUNCTIONS[stage]
    except KeyError:
        raise ConfigError(f"unknown stage {stage!r}, expected one of {STAGES}") from None
    return fn(cfg)
