from .bench import BenchQuery, BenchRow, benchmark, write_csv
from .embedding import EmbeddingProvider, HashingEmbedder, HTTPEmbeddingProvider
from .kmeans import kmeans
from .persist import load_index, save_index
from .search import (
    MODES,
    EvidenceSet,
    ScoredPassage,
    TopicIndex,
    TopicPartition,
    build_index,
    merge_evidence,
    partition_params,
    relevant_topics,
    round_half_up,
)

__all__ = [
    "BenchQuery",
    "BenchRow",
    "EmbeddingProvider",
    "EvidenceSet",
    "HTTPEmbeddingProvider",
    "HashingEmbedder",
    "MODES",
    "ScoredPassage",
    "TopicIndex",
    "TopicPartition",
    "benchmark",
    "build_index",
    "kmeans",
    "load_index",
    "merge_evidence",
    "partition_params",
    "relevant_topics",
    "round_half_up",
    "save_index",
    "write_csv",
]
