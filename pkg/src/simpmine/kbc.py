"""Complex-valued bilinear link prediction for the extrinsic evaluation.

Entities and relations get complex embedding vectors; a triple (s, r, o)
scores Re(sum_d w_r[d] * e_s[d] * conj(e_o[d])). Training minimizes the
logistic loss softplus(-y * score) over the positive triples plus uniformly
corrupted negatives (subject or object replaced by a random entity), with
per-triple L2 weight decay, by mini-batch stochastic gradient descent with
AdaGrad per-coordinate step scaling (plain summed-gradient steps make the
trilinear form blow up once embedding norms grow).

Gradients are coded by hand so they can be verified against central finite
differences. Packing d/d(re) + i*d/d(im) into one complex number, the score
gradients are conj(r)*o for the subject, conj(s)*o for the relation and r*s
for the object.

Ranking evaluation treats each (relation, object) with held-out positives
as a query: all candidate subjects are ranked by score, training positives
are filtered out of the list, and average precision is accumulated as
sum_k P(k) * (R(k) - R(k-1)). The mean over queries is mAP; precision and
recall at fixed cutoffs are also computed over the pooled ranked
predictions of all queries.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

Triple = tuple[str, str, str]


class KbcError(ValueError):
    pass


class VocabularyError(KbcError):
    pass


class TrainingError(KbcError):
    pass


@dataclass(frozen=True)
class KbcConfig:
    embedding_dim: int = 32
    epochs: int = 200
    learning_rate: float = 0.05
    negatives_per_positive: int = 5
    l2_weight: float = 1e-4
    batch_size: int = 128
    init_scale: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.embedding_dim < 1:
            raise KbcError(f"embedding_dim must be >= 1, got {self.embedding_dim}")
        if self.epochs < 0:
            raise KbcError(f"epochs must be >= 0, got {self.epochs}")
        if self.learning_rate <= 0:
            raise KbcError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.negatives_per_positive < 1:
            raise KbcError(f"negatives_per_positive must be >= 1, got {self.negatives_per_positive}")
        if self.l2_weight < 0:
            raise KbcError(f"l2_weight must be >= 0, got {self.l2_weight}")


@dataclass
class KbcModel:
    entity_index: dict[str, int]
    relation_index: dict[str, int]
    entity_embeddings: np.ndarray  # complex128, (n_entities, dim)
    relation_embeddings: np.ndarray  # complex128, (n_relations, dim)
    loss_trace: list[float] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.entity_embeddings.shape[1]

    def entity_id(self, entity: str) -> int:
        try:
            return self.entity_index[entity]
        except KeyError:
            raise VocabularyError(f"unknown entity {entity!r}") from None

    def relation_id(self, relation: str) -> int:
        try:
            return self.relation_index[relation]
        except KeyError:
            raise VocabularyError(f"unknown relation {relation!r}") from None


def score(model: KbcModel, subject: str, relation: str, obj: str) -> float:
    s = model.entity_embeddings[model.entity_id(subject)]
    r = model.relation_embeddings[model.relation_id(relation)]
    o = model.entity_embeddings[model.entity_id(obj)]
    return float(np.real(np.sum(r * s * np.conj(o))))


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _triple_grads(es: np.ndarray, wr: np.ndarray, eo: np.ndarray,
                  labels: np.ndarray, l2_weight: float):
    """Loss and per-triple embedding gradients for a batch.

    Returns (total_loss, grad_subject, grad_relation, grad_object), the
    gradients packed as complex arrays of the same shape as the inputs.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        # overflow is caught by the per-epoch finiteness check, not here
        scores = np.real(np.sum(wr * es * np.conj(eo), axis=1))
        margins = -labels * scores
        loss = float(np.sum(np.logaddexp(0.0, margins)))
        g = (-labels * _sigmoid(margins))[:, None]
        gs = g * np.conj(wr) * eo
        gr = g * np.conj(es) * eo
        go = g * wr * es
        if l2_weight:
            loss += l2_weight * float(
                np.sum(np.abs(es) ** 2) + np.sum(np.abs(wr) ** 2) + np.sum(np.abs(eo) ** 2))
            gs = gs + 2.0 * l2_weight * es
            gr = gr + 2.0 * l2_weight * wr
            go = go + 2.0 * l2_weight * eo
    return loss, gs, gr, go


def loss_and_gradients(model: KbcModel, triples: Sequence[Triple],
                       labels: Sequence[float], l2_weight: float = 0.0):
    """Total loss over labelled triples plus dense gradient arrays matching
    the embedding tables (used for gradient verification)."""
    s_idx = np.array([model.entity_id(s) for s, _, _ in triples])
    r_idx = np.array([model.relation_id(r) for _, r, _ in triples])
    o_idx = np.array([model.entity_id(o) for _, _, o in triples])
    y = np.asarray(labels, dtype=float)
    loss, gs, gr, go = _triple_grads(
        model.entity_embeddings[s_idx], model.relation_embeddings[r_idx],
        model.entity_embeddings[o_idx], y, l2_weight)
    grad_ent = np.zeros_like(model.entity_embeddings)
    grad_rel = np.zeros_like(model.relation_embeddings)
    np.add.at(grad_ent, s_idx, gs)
    np.add.at(grad_ent, o_idx, go)
    np.add.at(grad_rel, r_idx, gr)
    return loss, grad_ent, grad_rel


def train(triples: Iterable[Triple], config: KbcConfig,
          entities: Optional[Sequence[str]] = None,
          relations: Optional[Sequence[str]] = None) -> KbcModel:
    """Fit embeddings to the positive triples.

    The vocabulary is fixed up front (from the triples, or from the given
    entity/relation lists, which may add unlinked candidates); embeddings
    are seeded-random complex vectors. Each epoch shuffles the positives,
    draws ``negatives_per_positive`` corruptions per positive (subject or
    object replaced by a uniformly random entity, label -1) and applies SGD
    per mini-batch. Aborts if the loss stops being finite.
    """
    positives = sorted(set(triples))
    if not positives:
        raise KbcError("no training triples")
    entity_vocab = sorted(
        set(entities or ()) | {s for s, _, _ in positives} | {o for _, _, o in positives})
    relation_vocab = sorted(set(relations or ()) | {r for _, r, _ in positives})
    ent_index = {e: i for i, e in enumerate(entity_vocab)}
    rel_index = {r: i for i, r in enumerate(relation_vocab)}

    rng = np.random.default_rng(config.seed)
    dim = config.embedding_dim

    def init(n: int) -> np.ndarray:
        return config.init_scale * (rng.standard_normal((n, dim))
                                    + 1j * rng.standard_normal((n, dim)))

    ent = init(len(entity_vocab))
    rel = init(len(relation_vocab))
    model = KbcModel(entity_index=ent_index, relation_index=rel_index,
                     entity_embeddings=ent, relation_embeddings=rel)

    pos_s = np.array([ent_index[s] for s, _, _ in positives])
    pos_r = np.array([rel_index[r] for _, r, _ in positives])
    pos_o = np.array([ent_index[o] for _, _, o in positives])
    n_pos = len(positives)
    n_ent = len(entity_vocab)
    k = config.negatives_per_positive
    eps = 1e-8
    acc_ent = np.zeros(ent.shape + (2,))  # AdaGrad accumulators, re/im planes
    acc_rel = np.zeros(rel.shape + (2,))

    def adagrad_step(table: np.ndarray, acc: np.ndarray, grad: np.ndarray) -> None:
        with np.errstate(over="ignore", invalid="ignore"):
            acc[..., 0] += grad.real ** 2
            acc[..., 1] += grad.imag ** 2
            table -= config.learning_rate * (grad.real / np.sqrt(acc[..., 0] + eps)
                                             + 1j * grad.imag / np.sqrt(acc[..., 1] + eps))

    for epoch in range(config.epochs):
        order = rng.permutation(n_pos)
        epoch_loss = 0.0
        n_seen = 0
        for start in range(0, n_pos, config.batch_size):
            batch = order[start:start + config.batch_size]
            b = len(batch)
            s_idx = pos_s[batch]
            r_idx = pos_r[batch]
            o_idx = pos_o[batch]
            # One corruption block per negative sample: copy the positive
            # batch, then overwrite subject or object with random entities.
            neg_s = np.repeat(s_idx, k)
            neg_r = np.repeat(r_idx, k)
            neg_o = np.repeat(o_idx, k)
            corrupt_subject = rng.random(b * k) < 0.5
            replacements = rng.integers(0, n_ent, size=b * k)
            neg_s = np.where(corrupt_subject, replacements, neg_s)
            neg_o = np.where(corrupt_subject, neg_o, replacements)
            all_s = np.concatenate([s_idx, neg_s])
            all_r = np.concatenate([r_idx, neg_r])
            all_o = np.concatenate([o_idx, neg_o])
            y = np.concatenate([np.ones(b), -np.ones(b * k)])
            loss, gs, gr, go = _triple_grads(ent[all_s], rel[all_r], ent[all_o], y, config.l2_weight)
            grad_ent = np.zeros_like(ent)
            grad_rel = np.zeros_like(rel)
            np.add.at(grad_ent, all_s, gs)
            np.add.at(grad_ent, all_o, go)
            np.add.at(grad_rel, all_r, gr)
            adagrad_step(ent, acc_ent, grad_ent)
            adagrad_step(rel, acc_rel, grad_rel)
            epoch_loss += loss
            n_seen += len(y)
        mean_loss = epoch_loss / max(n_seen, 1)
        if not math.isfinite(mean_loss):
            raise TrainingError(
                f"non-finite loss at epoch {epoch} (mean {mean_loss}); "
                f"reduce learning_rate ({config.learning_rate}) or check the data")
        model.loss_trace.append(mean_loss)
    return model


@dataclass(frozen=True)
class RankingMetrics:
    map: float
    p_at_k: dict[int, float]
    r_at_k: dict[int, float]
    n_queries: int
    avep_by_query: dict[tuple[str, str], float]


def average_precision(relevance: Sequence[bool], n_relevant: int) -> float:
    """AveP = sum_k P(k) * (R(k) - R(k-1)) over one ranked list."""
    if n_relevant == 0:
        return 0.0
    hits = 0
    terms = []
    for pos, rel in enumerate(relevance, start=1):
        if rel:
            hits += 1
            terms.append((hits / pos) * (1.0 / n_relevant))
    return math.fsum(terms)


def evaluate(model: KbcModel, train_pos: set[Triple], test_pos: set[Triple],
             k_values: Sequence[int] = (100, 1000),
             candidates: Optional[Sequence[str]] = None) -> RankingMetrics:
    """Rank candidate subjects for every (relation, object) query with test
    positives; training positives are removed from the candidate lists."""
    if not test_pos:
        raise KbcError("no test triples to evaluate")
    overlap = set(train_pos) & set(test_pos)
    if overlap:
        raise KbcError(f"{len(overlap)} triples are in both train and test")
    if candidates is None:
        subjects = {s for s, _, _ in set(train_pos) | set(test_pos)}
        candidates = sorted(s for s in subjects if s in model.entity_index)
    else:
        candidates = sorted(set(candidates))
        missing = [s for s in candidates if s not in model.entity_index]
        if missing:
            raise VocabularyError(f"candidate subjects not in vocabulary: {missing[:5]}")

    queries: dict[tuple[str, str], set[str]] = {}
    for s, r, o in test_pos:
        queries.setdefault((r, o), set()).add(s)

    aveps: dict[tuple[str, str], float] = {}
    pooled: list[tuple[float, str, str, str, bool]] = []
    for (r, o) in sorted(queries):
        if o not in model.entity_index or r not in model.relation_index:
            continue
        relevant = {s for s in queries[(r, o)] if s in model.entity_index}
        if not relevant:
            continue
        ranked = []
        for s in candidates:
            if (s, r, o) in train_pos:
                continue
            ranked.append((-score(model, s, r, o), s))
        ranked.sort()
        relevance = [s in relevant for _, s in ranked]
        aveps[(r, o)] = average_precision(relevance, len(relevant))
        for neg_sc, s in ranked:
            pooled.append((neg_sc, r, o, s, s in relevant))

    if not aveps:
        raise KbcError("no evaluable queries (all objects or subjects out of vocabulary)")

    pooled.sort()
    total_relevant = sum(1 for entry in pooled if entry[4])
    p_at_k: dict[int, float] = {}
    r_at_k: dict[int, float] = {}
    for k in k_values:
        top = pooled[:k]
        hits = sum(1 for entry in top if entry[4])
        p_at_k[k] = hits / len(top) if top else 0.0
        r_at_k[k] = hits / total_relevant if total_relevant else 0.0
    return RankingMetrics(
        map=math.fsum(sorted(aveps.values())) / len(aveps),
        p_at_k=p_at_k,
        r_at_k=r_at_k,
        n_queries=len(aveps),
        avep_by_query=aveps,
    )


# -- checkpointing -------------------------------------------------------

def save_model(model: KbcModel, directory) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    entities = sorted(model.entity_index, key=model.entity_index.get)
    relations = sorted(model.relation_index, key=model.relation_index.get)
    with open(d / "vocab.json", "w", encoding="utf-8") as f:
        json.dump({"schema_version": 1, "entities": entities, "relations": relations},
                  f, ensure_ascii=False)
        f.write("\n")
    np.save(d / "entity_embeddings.npy", model.entity_embeddings)
    np.save(d / "relation_embeddings.npy", model.relation_embeddings)


def load_model(directory) -> KbcModel:
    d = Path(directory)
    with open(d / "vocab.json", "r", encoding="utf-8") as f:
        vocab = json.load(f)
    if vocab.get("schema_version") != 1:
        raise KbcError(f"unsupported checkpoint schema {vocab.get('schema_version')}")
    return KbcModel(
        entity_index={e: i for i, e in enumerate(vocab["entities"])},
        relation_index={r: i for i, r in enumerate(vocab["relations"])},
        entity_embeddings=np.load(d / "entity_embeddings.npy"),
        relation_embeddings=np.load(d / "relation_embeddings.npy"),
    )
