"""LLM topic labeling from re-ranked keywords and representative passages."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from ..corpus.filtering import ds_rerank
from ..errors import ProviderError
from ..llm import prompts
from ..llm.provider import ChatProvider, DecodingParams
from .model import PolyTopicModel

_FORBIDDEN = re.compile(r"\blabel\b", re.IGNORECASE)


@dataclass(frozen=True)
class TopicLabel:
    topic_id: int
    label: str
    status: str = "active"  # active | discarded

    def __post_init__(self):
        if self.status == "active" and not self.label:
            raise ValueError("active topics need a non-empty label")


def top_words(model: PolyTopicModel, language: str, topic: int, n: int = 12) -> list[str]:
    """Keywords for a topic, re-ranked to penalize words shared across topics."""
    reranked = ds_rerank(model.beta[language])
    order = np.argsort(-reranked[topic], kind="stable")
    words = model.vocab[language]
    return [words[v] for v in order[:n]]


def representative_passages(
    model: PolyTopicModel, language: str, topic: int, texts: dict[str, str], n: int = 5
) -> list[str]:
    ids = model.passage_order[language]
    weights = [(model.theta[p][topic], p) for p in ids if p in texts]
    weights.sort(key=lambda t: (-t[0], t[1]))
    return [texts[p] for _, p in weights[:n]]


def _valid_label(label: str) -> bool:
    return bool(label.strip()) and not _FORBIDDEN.search(label)


def label_topics(
    model: PolyTopicModel,
    chat: ChatProvider,
    texts: dict[str, str],
    language: str,
    docs_per_topic: int = 5,
    n_keywords: int = 12,
    decoding: DecodingParams | None = None,
) -> list[TopicLabel]:
    """One label per topic; responses echoing the forbidden word retry once."""
    labels = []
    for topic in range(model.k):
        keywords = top_words(model, language, topic, n=n_keywords)
        docs = representative_passages(model, language, topic, texts, n=docs_per_topic)
        prompt = prompts.render(
            "topic_labeling",
            keywords=", ".join(keywords),
            docs="\n".join(f"- {d}" for d in docs),
        )
        try:
            label = chat.complete(prompt, decoding=decoding).strip()
            if not _valid_label(label):
                label = chat.complete(prompt, decoding=decoding).strip()
        except ProviderError as exc:
            raise ProviderError(f"labeling topic {topic} failed: {exc}") from exc
        if not _valid_label(label):
            raise ProviderError(
                f"topic {topic}: provider returned an invalid label {label!r} twice"
            )
        labels.append(TopicLabel(topic_id=topic, label=label))
    return labels
