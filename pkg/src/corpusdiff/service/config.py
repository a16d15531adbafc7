"""Project configuration: one TOML or JSON file, env-var overrides for
provider endpoints and keys, and per-stage dependency hashing so config
changes invalidate only the stages they affect."""

from __future__ import annotations

import hashlib
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass
class ProviderConfig:
    kind: str = "mock"  # mock | http | hash (embedding only)
    url: str = ""
    model: str = ""
    api_key: str = ""
    dimension: int = 16  # embedding only


@dataclass
class ProjectConfig:
    anchor_corpus: str = "anchor"
    comparison_corpus: str = "comparison"
    anchor_language: str = "en"
    comparison_language: str = "es"
    seed: int = 13

    # segmentation / preprocessing
    segment_mode: str = "newline"
    n_sentences: int = 3
    extra_stopwords: dict[str, list[str]] = field(default_factory=dict)

    # topic model
    k: int = 5
    alpha: float | None = None  # None -> 50/K
    eta: float = 0.01
    iterations: int = 1000
    burn_in: int = 200

    # labeling
    docs_per_topic: int = 5
    n_keywords: int = 12

    # index / retrieval
    lam: float = 4.0
    l_min: int = 8
    search_mode: str = "tb-enn"
    weighted: bool = False
    l: int = 5
    h: int = 10
    epsilon_mode: str = "static"
    epsilon: float = 0.0

    # answering
    document_excerpt_chars: int = 1200
    max_in_flight: int = 2

    chat: ProviderConfig = field(default_factory=ProviderConfig)
    nli: ProviderConfig = field(default_factory=ProviderConfig)
    embedding: ProviderConfig = field(default_factory=ProviderConfig)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ProjectConfig":
        data = dict(data)
        for key in ("chat", "nli", "embedding"):
            if key in data and isinstance(data[key], dict):
                data[key] = ProviderConfig(**data[key])
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "ProjectConfig":
        path = Path(path)
        if path.suffix == ".toml":
            data = tomllib.loads(path.read_text(encoding="utf-8"))
        else:
            data = json.loads(path.read_text(encoding="utf-8"))
        return cls.from_dict(data)

    def with_env_overrides(self) -> "ProjectConfig":
        """Provider endpoints and keys can come from the environment."""
        env = os.environ
        mapping = {
            "CORPUSDIFF_CHAT_URL": ("chat", "url"),
            "CORPUSDIFF_CHAT_MODEL": ("chat", "model"),
            "CORPUSDIFF_CHAT_KEY": ("chat", "api_key"),
            "CORPUSDIFF_CHAT_KIND": ("chat", "kind"),
            "CORPUSDIFF_NLI_URL": ("nli", "url"),
            "CORPUSDIFF_NLI_KIND": ("nli", "kind"),
            "CORPUSDIFF_EMBED_URL": ("embedding", "url"),
            "CORPUSDIFF_EMBED_KIND": ("embedding", "kind"),
        }
        for var, (section, attr) in mapping.items():
            if var in env:
                setattr(getattr(self, section), attr, env[var])
        return self


# Config keys each stage's artifacts depend on; a change marks the stage and
# everything after it stale without touching earlier artifacts.
STAGE_CONFIG_KEYS: dict[str, tuple[str, ...]] = {
    "ingest": ("anchor_corpus", "comparison_corpus", "anchor_language", "comparison_language"),
    "preprocess": ("segment_mode", "n_sentences", "extra_stopwords"),
    "train": ("k", "alpha", "eta", "iterations", "burn_in", "seed"),
    "label": ("chat", "docs_per_topic", "n_keywords"),
    "index": ("lam", "l_min", "seed", "embedding"),
    "questions": ("chat", "nli"),
    "queries": ("chat",),
    "retrieve": ("search_mode", "weighted", "l", "h", "epsilon_mode", "epsilon"),
    "answer": ("chat", "document_excerpt_chars"),
    "detect": ("chat",),
    "export": (),
}


def stage_config_hash(config: ProjectConfig, stage: str) -> str:
    data = config.to_dict()
    relevant = {key: data[key] for key in STAGE_CONFIG_KEYS[stage]}
    blob = json.dumps(relevant, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]
