"""Index persistence: inputs plus configuration, same matrix format as the
topic model. Partitions are rebuilt deterministically on load from the stored
seed, so no clustering state needs to survive serialization."""

from __future__ import annotations

import json
from pathlib import Path

from ..pltm.model import load_matrix, save_matrix
from .embedding import EmbeddingProvider
from .search import TopicIndex


def save_index(index: TopicIndex, directory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    topic_ids = list(range(index.k_topics))
    dims = list(range(index.embeddings.shape[1]))
    save_matrix(directory / "embeddings", index.embeddings, index.passage_ids, dims)
    save_matrix(directory / "theta", index.theta, index.passage_ids, topic_ids)
    meta = {
        "lam": index.lam,
        "l_min": index.l_min,
        "seed": index.seed,
        "provider_id": index.provider.provider_id if index.provider else None,
        "dimension": int(index.embeddings.shape[1]),
        "passages": len(index.passage_ids),
        "topics": index.k_topics,
    }
    (directory / "index.json").write_text(
        json.dumps(meta, ensure_ascii=False, indent=2), encoding="utf-8"
    )


def load_index(directory, provider: EmbeddingProvider | None = None) -> TopicIndex:
    directory = Path(directory)
    meta = json.loads((directory / "index.json").read_text(encoding="utf-8"))
    embeddings, passage_ids, _ = load_matrix(directory / "embeddings")
    theta, _, _ = load_matrix(directory / "theta")
    return TopicIndex(
        passage_ids=[str(p) for p in passage_ids],
        embeddings=embeddings.astype("float64"),
        theta=theta.astype("float64"),
        lam=meta["lam"],
        l_min=meta["l_min"],
        seed=meta["seed"],
        provider=provider,
    )
