"""Topic-partitioned retrieval over unit-norm passage embeddings.

Passages with weight on a topic form that topic's active set; each active set
is k-means-partitioned for approximate probing. Queries run in four modes:
topic-restricted exact (tb-enn) or approximate (tb-ann), and whole-corpus
baselines (enn, ann). Candidate scores are the cosine similarity, optionally
scaled by the querying passage's weight on the candidate's topic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import DimensionMismatch, EmptyIndex
from .embedding import EmbeddingProvider
from .kmeans import kmeans

MODES = ("tb-enn", "tb-ann", "enn", "ann")
GLOBAL_PARTITION = -1


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def partition_params(n_members: int, lam: float = 4.0, l_min: int = 8) -> dict:
    """Cluster-count rule and the derived probe budget.

    l_k = max(floor(lam * sqrt(n)), l_min); the effective centroid count is
    clamped to the member count; probes are 10% of l_k, rounded half-up,
    at least one.
    """
    if n_members < 1:
        raise ValueError("n_members must be >= 1")
    if lam <= 0 or l_min < 1:
        raise ValueError("lam must be > 0 and l_min >= 1")
    l_k = max(math.floor(lam * math.sqrt(n_members)), l_min)
    effective = min(l_k, n_members)
    n_probe = max(1, round_half_up(0.10 * max(1, l_k)))
    n_probe = min(n_probe, effective)
    return {"l_k": l_k, "effective": effective, "n_probe": n_probe}


def relevant_topics(
    theta: np.ndarray, epsilon_mode: str = "static", epsilon: float = 0.0
) -> list[int]:
    """Topics worth probing for a query passage; never empty.

    Static mode keeps topics with weight strictly above epsilon. Dynamic mode
    sorts the nonzero weights and cuts at the elbow (the point farthest from
    the chord between the first and last sorted values), keeping weights at or
    above the elbow value; with fewer than three nonzero weights it falls back
    to the dominant topic.
    """
    theta = np.asarray(theta, dtype=np.float64)
    if epsilon_mode == "static":
        keep = [int(k) for k in range(theta.size) if theta[k] > epsilon]
        return keep or [int(np.argmax(theta))]
    if epsilon_mode != "dynamic":
        raise ValueError(f"unknown epsilon mode {epsilon_mode!r}")
    nonzero = [int(k) for k in range(theta.size) if theta[k] > 0]
    if len(nonzero) < 3:
        return [int(np.argmax(theta))]
    values = np.sort(theta[nonzero])[::-1]
    m = values.size
    x1, y1, x2, y2 = 0.0, values[0], float(m - 1), values[-1]
    xs = np.arange(m, dtype=np.float64)
    dists = np.abs((y2 - y1) * xs - (x2 - x1) * values + x2 * y1 - y2 * x1)
    elbow_value = float(values[int(np.argmax(dists))])
    return [int(k) for k in range(theta.size) if theta[k] >= elbow_value]


@dataclass(frozen=True)
class ScoredPassage:
    passage_id: str
    score: float
    similarity: float
    source_topic: int | None
    weight: float


@dataclass(frozen=True)
class EvidenceSet:
    question_id: str
    passages: tuple[ScoredPassage, ...]
    l_requested: int

    @property
    def l_prime(self) -> int:
        return len(self.passages)


@dataclass
class TopicPartition:
    topic_id: int
    member_rows: np.ndarray          # indices into the index's embedding matrix
    l_k: int                         # cluster-count rule before clamping
    centroids: np.ndarray
    assignment: np.ndarray           # member position -> centroid
    n_probe: int
    inverted: list[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        if not self.inverted:
            self.inverted = [
                self.member_rows[self.assignment == c]
                for c in range(self.centroids.shape[0])
            ]


class TopicIndex:
    """Immutable after build; queries are safe to run concurrently."""

    def __init__(
        self,
        passage_ids: Sequence[str],
        embeddings: np.ndarray,
        theta: np.ndarray,
        lam: float = 4.0,
        l_min: int = 8,
        seed: int = 0,
        provider: EmbeddingProvider | None = None,
    ):
        embeddings = np.asarray(embeddings, dtype=np.float64)
        theta = np.asarray(theta, dtype=np.float64)
        if embeddings.ndim != 2:
            raise DimensionMismatch("embeddings must be a P x d matrix")
        if len(passage_ids) != embeddings.shape[0] or theta.shape[0] != embeddings.shape[0]:
            raise DimensionMismatch("passage_ids, embeddings, and theta disagree on P")
        if provider is not None and provider.dimension not in (0, embeddings.shape[1]):
            raise DimensionMismatch(
                f"provider dimension {provider.dimension} != embeddings {embeddings.shape[1]}"
            )
        self.passage_ids = list(passage_ids)
        self.embeddings = embeddings
        self.theta = theta
        self.lam = lam
        self.l_min = l_min
        self.seed = seed
        self.provider = provider
        self.k_topics = theta.shape[1]
        self.partitions: dict[int, TopicPartition] = {}
        for topic in range(self.k_topics):
            rows = np.flatnonzero(theta[:, topic] > 0)
            if rows.size == 0:
                continue
            self.partitions[topic] = self._build_partition(topic, rows)
        self.global_partition = self._build_partition(
            GLOBAL_PARTITION, np.arange(embeddings.shape[0])
        )

    def _build_partition(self, topic: int, rows: np.ndarray) -> TopicPartition:
        params = partition_params(rows.size, self.lam, self.l_min)
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=self.seed, spawn_key=(topic + 2,))
        )
        centroids, labels = kmeans(self.embeddings[rows], params["effective"], rng)
        return TopicPartition(
            topic_id=topic,
            member_rows=rows,
            l_k=params["l_k"],
            centroids=centroids,
            assignment=labels,
            n_probe=params["n_probe"],
        )

    # -- querying ---------------------------------------------------------

    def _query_vector(self, query_text: str | None, query_vector) -> np.ndarray:
        if query_vector is not None:
            q = np.asarray(query_vector, dtype=np.float64)
        else:
            if self.provider is None:
                raise ValueError("no embedding provider attached; pass query_vector")
            q = self.provider.embed([query_text])[0]
        if q.shape != (self.embeddings.shape[1],):
            raise DimensionMismatch("query vector dimension mismatch")
        return q

    def _top_candidates(self, q, rows, h, stats) -> list[tuple[float, str, int]]:
        sims = self.embeddings[rows] @ q
        if stats is not None:
            stats["distance_evals"] += int(rows.size)
        order = sorted(
            ((float(sims[i]), self.passage_ids[rows[i]]) for i in range(rows.size)),
            key=lambda t: (-t[0], t[1]),
        )
        return order[:h]

    def _probed_rows(self, q, partition: TopicPartition, n_probe, stats) -> np.ndarray:
        n_centroids = partition.centroids.shape[0]
        probe = min(n_probe or partition.n_probe, n_centroids)
        diffs = partition.centroids - q[None, :]
        dists = np.einsum("ij,ij->i", diffs, diffs)
        if stats is not None:
            stats["distance_evals"] += int(n_centroids)
        order = np.argsort(dists, kind="stable")[:probe]
        rows = [partition.inverted[c] for c in sorted(int(c) for c in order)]
        return np.concatenate(rows) if rows else np.empty(0, dtype=np.int64)

    def search(
        self,
        query_text: str | None = None,
        theta_anchor=None,
        mode: str = "tb-enn",
        weighted: bool = False,
        l: int = 5,
        h: int = 10,
        epsilon_mode: str = "static",
        epsilon: float = 0.0,
        n_probe: int | None = None,
        query_vector=None,
        stats: dict | None = None,
    ) -> list[ScoredPassage]:
        """Top-l scored passages for one query.

        Topic-based modes take per-topic top-h candidates from the relevant
        topics, score them (weighted: similarity scaled by the anchor topic
        weight), deduplicate passages appearing under several topics keeping
        the best score, and rank globally. Baselines scan or probe the whole
        corpus with weight 1.
        """
        mode = mode.lower()
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if not self.passage_ids:
            raise EmptyIndex("index holds no passages")
        if l < 1 or h < 1 or l > h:
            raise ValueError("need 1 <= l <= h")
        if stats is not None:
            stats.setdefault("distance_evals", 0)
        q = self._query_vector(query_text, query_vector)

        if mode in ("enn", "ann"):
            if mode == "enn":
                rows = np.arange(self.embeddings.shape[0])
            else:
                rows = self._probed_rows(q, self.global_partition, n_probe, stats)
            top = self._top_candidates(q, rows, max(l, h), stats)
            return [
                ScoredPassage(pid, sim, sim, None, 1.0) for sim, pid in top[:l]
            ]

        if theta_anchor is None:
            raise ValueError("topic-based modes need theta_anchor")
        theta_anchor = np.asarray(theta_anchor, dtype=np.float64)
        best: dict[str, ScoredPassage] = {}
        for topic in relevant_topics(theta_anchor, epsilon_mode, epsilon):
            partition = self.partitions.get(topic)
            if partition is None:
                continue  # empty active set: never probed
            if mode == "tb-enn":
                rows = partition.member_rows
            else:
                rows = self._probed_rows(q, partition, n_probe, stats)
            alpha = float(theta_anchor[topic]) if weighted else 1.0
            for sim, pid in self._top_candidates(q, rows, h, stats):
                score = alpha * sim
                cur = best.get(pid)
                if cur is None or score > cur.score:
                    best[pid] = ScoredPassage(pid, score, sim, topic, alpha)
        ranked = sorted(best.values(), key=lambda s: (-s.score, s.passage_id))
        return ranked[:l]


def build_index(
    passage_ids: Sequence[str],
    embeddings: np.ndarray,
    theta: np.ndarray,
    lam: float = 4.0,
    l_min: int = 8,
    seed: int = 0,
    provider: EmbeddingProvider | None = None,
) -> TopicIndex:
    return TopicIndex(passage_ids, embeddings, theta, lam, l_min, seed, provider)


def merge_evidence(
    question_id: str, per_subquery: Sequence[Sequence[ScoredPassage]], l_requested: int
) -> EvidenceSet:
    """Union the subquery result lists, keeping each passage's best score."""
    best: dict[str, ScoredPassage] = {}
    for results in per_subquery:
        for sp in results:
            cur = best.get(sp.passage_id)
            if cur is None or sp.score > cur.score:
                best[sp.passage_id] = sp
    ranked = sorted(best.values(), key=lambda s: (-s.score, s.passage_id))
    return EvidenceSet(
        question_id=question_id, passages=tuple(ranked), l_requested=l_requested
    )
