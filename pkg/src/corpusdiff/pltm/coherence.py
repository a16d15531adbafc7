"""Topic coherence (NPMI) and the topic-count sweep used to pick K."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

from ..corpus.model import Passage
from ..errors import InsufficientVocabulary
from .gibbs import train
from .model import PolyTopicModel

EPS = 1e-12


def npmi_pair(df_i: int, df_j: int, df_ij: int, n_docs: int) -> float:
    """Normalized PMI from passage-level document frequencies.

    The joint probability gets add-epsilon smoothing; co-occurrence in every
    passage is the perfect-association limit and scores 1.
    """
    if n_docs <= 0:
        raise ValueError("n_docs must be positive")
    if df_ij >= n_docs:
        return 1.0
    p_i = df_i / n_docs
    p_j = df_j / n_docs
    p_ij = df_ij / n_docs + EPS
    return math.log(p_ij / (p_i * p_j)) / (-math.log(p_ij))


@dataclass
class CoherenceReport:
    per_topic: list[float]
    mean: float
    top_words: list[list[str]]


def npmi_coherence(
    model: PolyTopicModel,
    reference: Sequence[Sequence[str]],
    language: str,
    top_n: int = 10,
) -> CoherenceReport:
    """Mean pairwise NPMI over each topic's top words, then over topics.

    ``reference`` is a tokenized corpus; co-occurrence is counted at passage
    level. Topic words outside the reference vocabulary are skipped when
    picking the top ``top_n``.
    """
    if top_n < 2:
        raise ValueError("top_n must be >= 2")
    doc_sets = [frozenset(tokens) for tokens in reference]
    n_docs = len(doc_sets)
    if n_docs == 0:
        raise ValueError("reference corpus is empty")
    ref_vocab: dict[str, int] = {}
    for s in doc_sets:
        for w in s:
            ref_vocab[w] = ref_vocab.get(w, 0) + 1

    beta = model.beta[language]
    words = model.vocab[language]
    per_topic: list[float] = []
    tops: list[list[str]] = []
    for topic in range(model.k):
        ranked = sorted(range(len(words)), key=lambda v: (-beta[topic, v], words[v]))
        top = []
        for v in ranked:
            if words[v] in ref_vocab:
                top.append(words[v])
            if len(top) == top_n:
                break
        if len(top) < top_n:
            raise InsufficientVocabulary(
                f"topic {topic} has only {len(top)} of {top_n} words in the reference corpus"
            )
        score = 0.0
        pairs = 0
        for wi, wj in combinations(top, 2):
            df_ij = sum(1 for s in doc_sets if wi in s and wj in s)
            score += npmi_pair(ref_vocab[wi], ref_vocab[wj], df_ij, n_docs)
            pairs += 1
        per_topic.append(score / pairs)
        tops.append(top)
    return CoherenceReport(
        per_topic=per_topic,
        mean=sum(per_topic) / len(per_topic),
        top_words=tops,
    )


def sweep_k(
    tuples: Sequence[Mapping[str, Sequence[Passage]]],
    k_values: Sequence[int],
    reference: Sequence[Sequence[str]],
    language: str,
    top_n: int = 10,
    **train_kwargs,
) -> list[dict]:
    """Train one model per K with a shared seed and report mean NPMI per K.

    Selection is left to the user; the table is sorted by K.
    """
    if not k_values:
        raise ValueError("k_values must be non-empty")
    rows = []
    for k in sorted(k_values):
        model = train(tuples, k=k, **train_kwargs)
        report = npmi_coherence(model, reference, language, top_n=top_n)
        rows.append({"k": k, "mean_npmi": report.mean, "per_topic": report.per_topic})
    return rows
