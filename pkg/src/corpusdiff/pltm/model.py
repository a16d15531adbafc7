"""Polylingual topic model container and on-disk format.

Matrices are persisted as raw little-endian float32 (row-major) with a JSON
sidecar carrying shape, dtype, and row/column identifiers; count tables use
the same scheme with int32. Model metadata lives in ``metadata.json``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

NORM_TOL = 1e-6


def save_matrix(base: Path, array: np.ndarray, row_ids, col_ids) -> None:
    base = Path(base)
    array = np.ascontiguousarray(array)
    if array.dtype.kind == "f":
        data = array.astype("<f4")
        dtype = "float32"
    else:
        data = array.astype("<i4")
        dtype = "int32"
    base.with_suffix(".f32" if dtype == "float32" else ".i32").write_bytes(data.tobytes())
    sidecar = {
        "shape": list(array.shape),
        "dtype": dtype,
        "byte_order": "little",
        "order": "C",
        "row_ids": list(row_ids),
        "col_ids": list(col_ids),
    }
    base.with_suffix(".json").write_text(
        json.dumps(sidecar, ensure_ascii=False), encoding="utf-8"
    )


def load_matrix(base: Path) -> tuple[np.ndarray, list, list]:
    base = Path(base)
    meta = json.loads(base.with_suffix(".json").read_text(encoding="utf-8"))
    dtype = "<f4" if meta["dtype"] == "float32" else "<i4"
    raw = base.with_suffix(".f32" if meta["dtype"] == "float32" else ".i32").read_bytes()
    array = np.frombuffer(raw, dtype=dtype).reshape(meta["shape"]).copy()
    return array, meta["row_ids"], meta["col_ids"]


@dataclass
class PolyTopicModel:
    """Trained topic model: one topic space, per-language word distributions."""

    k: int
    alpha: float
    eta: float
    iterations: int
    burn_in: int
    sample_every: int
    seed: int
    languages: list[str]
    vocab: dict[str, list[str]]               # language -> word list (column order)
    beta: dict[str, np.ndarray]               # language -> K x V_l probabilities
    theta: dict[str, np.ndarray]              # passage id -> length-K probabilities
    passage_order: dict[str, list[str]]       # language -> passage ids in training order
    passage_language: dict[str, str] = field(default_factory=dict)
    word_topic_counts: dict[str, np.ndarray] = field(default_factory=dict)  # K x V_l int32
    kernel: str = "python"

    def __post_init__(self):
        for lang, b in self.beta.items():
            sums = b.sum(axis=1)
            if not np.allclose(sums, 1.0, atol=NORM_TOL):
                raise ValueError(f"beta[{lang}] rows must sum to 1 within {NORM_TOL}")
            if np.any(b < 0):
                raise ValueError(f"beta[{lang}] has negative entries")
        for pid, th in self.theta.items():
            if abs(float(th.sum()) - 1.0) > NORM_TOL or np.any(th < 0):
                raise ValueError(f"theta[{pid}] is not a probability vector")

    def word_index(self, language: str) -> dict[str, int]:
        return {w: i for i, w in enumerate(self.vocab[language])}

    def theta_matrix(self, language: str) -> np.ndarray:
        ids = self.passage_order[language]
        return np.stack([self.theta[p] for p in ids]) if ids else np.zeros((0, self.k))

    def save(self, directory) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        meta = {
            "k": self.k,
            "alpha": self.alpha,
            "eta": self.eta,
            "iterations": self.iterations,
            "burn_in": self.burn_in,
            "sample_every": self.sample_every,
            "seed": self.seed,
            "languages": self.languages,
            "kernel": self.kernel,
            "vocab_sizes": {l: len(v) for l, v in self.vocab.items()},
        }
        (directory / "metadata.json").write_text(
            json.dumps(meta, ensure_ascii=False, indent=2), encoding="utf-8"
        )
        topic_ids = list(range(self.k))
        for lang in self.languages:
            save_matrix(
                directory / f"beta_{lang}", self.beta[lang], topic_ids, self.vocab[lang]
            )
            save_matrix(
                directory / f"theta_{lang}",
                self.theta_matrix(lang),
                self.passage_order[lang],
                topic_ids,
            )
            if lang in self.word_topic_counts:
                save_matrix(
                    directory / f"counts_{lang}",
                    self.word_topic_counts[lang],
                    topic_ids,
                    self.vocab[lang],
                )

    @classmethod
    def load(cls, directory) -> "PolyTopicModel":
        directory = Path(directory)
        meta = json.loads((directory / "metadata.json").read_text(encoding="utf-8"))
        vocab, beta, theta, order, counts, pass_lang = {}, {}, {}, {}, {}, {}
        for lang in meta["languages"]:
            b, _, words = load_matrix(directory / f"beta_{lang}")
            beta[lang] = b.astype(np.float64)
            vocab[lang] = [str(w) for w in words]
            th, pids, _ = load_matrix(directory / f"theta_{lang}")
            order[lang] = [str(p) for p in pids]
            for i, pid in enumerate(order[lang]):
                theta[pid] = th[i].astype(np.float64)
                pass_lang[pid] = lang
            counts_base = directory / f"counts_{lang}"
            if counts_base.with_suffix(".json").exists():
                c, _, _ = load_matrix(counts_base)
                counts[lang] = c
        return cls(
            k=meta["k"],
            alpha=meta["alpha"],
            eta=meta["eta"],
            iterations=meta["iterations"],
            burn_in=meta["burn_in"],
            sample_every=meta["sample_every"],
            seed=meta["seed"],
            languages=meta["languages"],
            vocab=vocab,
            beta=beta,
            theta=theta,
            passage_order=order,
            passage_language=pass_lang,
            word_topic_counts=counts,
            kernel=meta.get("kernel", "python"),
        )
