"""Bundled synthetic bilingual corpus with planted topic structure.

Each topic owns a per-language vocabulary plus a pool of shared terms that
appear on both sides (standing in for cognates and names), so the hashing
embedder retrieves across languages and the scripted chat provider produces a
mix of answered and abstained items. Document i on the anchor side is loosely
aligned with document i on the comparison side and both draw from the same
planted topic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

WORDS_PER_TOPIC = 14
SHARED_PER_TOPIC = 6


@dataclass
class SyntheticCorpus:
    anchor_documents: list[dict]
    comparison_documents: list[dict]
    pairs: list[tuple[str, str]]
    planted_topic: dict[str, int]  # document id -> topic
    planted_passage_topic: dict[str, int] = field(default_factory=dict)
    n_topics: int = 2


def _vocab(prefix: str, topic: int, count: int) -> list[str]:
    return [f"{prefix}t{topic}w{j:02d}" for j in range(count)]


def make_corpus(
    n_topics: int = 2,
    docs_per_side: int = 8,
    passages_per_doc: int = 3,
    tokens_per_passage: int = 8,
    seed: int = 997,
    anchor_language: str = "en",
    comparison_language: str = "es",
) -> SyntheticCorpus:
    rng = np.random.default_rng(seed)
    anchor_vocab = {k: _vocab("en", k, WORDS_PER_TOPIC) for k in range(n_topics)}
    comparison_vocab = {k: _vocab("es", k, WORDS_PER_TOPIC) for k in range(n_topics)}
    shared_vocab = {k: _vocab("sh", k, SHARED_PER_TOPIC) for k in range(n_topics)}

    def passage_tokens(topic: int, side_vocab: dict) -> list[str]:
        pool = side_vocab[topic] + shared_vocab[topic]
        picks = rng.integers(0, len(pool), size=tokens_per_passage)
        return [pool[int(i)] for i in picks]

    anchor_docs, comparison_docs, pairs = [], [], []
    planted: dict[str, int] = {}
    planted_passage: dict[str, int] = {}
    for d in range(docs_per_side):
        topic = d % n_topics
        a_id, c_id = f"a{d:03d}", f"c{d:03d}"
        a_lines = [
            " ".join(passage_tokens(topic, anchor_vocab)) for _ in range(passages_per_doc)
        ]
        c_lines = [
            " ".join(passage_tokens(topic, comparison_vocab))
            for _ in range(passages_per_doc)
        ]
        anchor_docs.append(
            {"id": a_id, "language": anchor_language, "text": "\n".join(a_lines)}
        )
        comparison_docs.append(
            {"id": c_id, "language": comparison_language, "text": "\n".join(c_lines)}
        )
        pairs.append((a_id, c_id))
        planted[a_id] = topic
        planted[c_id] = topic
        for i in range(passages_per_doc):
            planted_passage[f"{a_id}:{i}"] = topic
            planted_passage[f"{c_id}:{i}"] = topic
    return SyntheticCorpus(
        anchor_documents=anchor_docs,
        comparison_documents=comparison_docs,
        pairs=pairs,
        planted_topic=planted,
        planted_passage_topic=planted_passage,
        n_topics=n_topics,
    )


def planted_purity(assignments: dict[str, int], planted: dict[str, int], k: int) -> float:
    """Best-matching accuracy between inferred and planted topics.

    The contingency table is matched greedily from the largest cell; with the
    small K used here this equals the optimal assignment.
    """
    ids = sorted(set(assignments) & set(planted))
    if not ids:
        raise ValueError("no overlapping ids between assignments and planted labels")
    table = np.zeros((k, k), dtype=np.int64)
    for pid in ids:
        table[assignments[pid], planted[pid]] += 1
    total = 0
    used_rows: set[int] = set()
    used_cols: set[int] = set()
    flat = sorted(
        ((int(table[r, c]), r, c) for r in range(k) for c in range(k)),
        key=lambda t: (-t[0], t[1], t[2]),
    )
    for count, r, c in flat:
        if r in used_rows or c in used_cols:
            continue
        total += count
        used_rows.add(r)
        used_cols.add(c)
    return total / len(ids)
