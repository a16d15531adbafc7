"""Training and inference for the polylingual topic model.

Tuples of loosely equivalent documents share one topic distribution: the
document-topic counts in the collapsed Gibbs conditional are kept at tuple
level, while per-passage counts are tracked alongside to estimate passage
topic distributions. The hot sweep runs in a compiled kernel when available;
set CORPUSDIFF_PURE_PYTHON=1 to force the fallback.
"""

from __future__ import annotations

import os
from typing import Callable, Mapping, Sequence

import numpy as np

from ..corpus.model import Passage
from ..errors import EmptyCorpus, InvalidHyperparameter, UnknownLanguage
from .model import PolyTopicModel

if os.environ.get("CORPUSDIFF_PURE_PYTHON"):
    from . import _gibbs_py as _kernel
else:
    try:
        from . import _gibbs_cy as _kernel  # type: ignore[attr-defined]
    except ImportError:
        from . import _gibbs_py as _kernel

KERNEL_NAME: str = _kernel.KERNEL_NAME

DEFAULT_ITERATIONS = 1000
DEFAULT_BURN_IN = 200
SAMPLE_EVERY = 10


def default_alpha(k: int) -> float:
    return 50.0 / k


class _Flat:
    """Token stream and count tables laid out for the sweep kernels."""

    def __init__(self, tuples: Sequence[Mapping[str, Sequence[Passage]]], k: int):
        self.languages = sorted({lang for tup in tuples for lang in tup})
        lang_pos = {lang: i for i, lang in enumerate(self.languages)}

        vocab_sets: dict[str, set[str]] = {lang: set() for lang in self.languages}
        for tup in tuples:
            for lang, passages in tup.items():
                for p in passages:
                    vocab_sets[lang].update(p.tokens)
        self.vocab = {lang: sorted(words) for lang, words in vocab_sets.items()}
        word_ids = {
            lang: {w: i for i, w in enumerate(words)} for lang, words in self.vocab.items()
        }
        self.offsets = {}
        off = 0
        for lang in self.languages:
            self.offsets[lang] = off
            off += len(self.vocab[lang])
        self.v_total = off

        self.passage_order: dict[str, list[str]] = {lang: [] for lang in self.languages}
        self.passage_language: dict[str, str] = {}
        pass_pos: dict[str, int] = {}
        tuple_idx, pass_idx, lang_idx, word_idx = [], [], [], []
        tokens_per_side: dict[tuple[int, str], int] = {}
        for d, tup in enumerate(tuples):
            for lang in sorted(tup):
                side_tokens = 0
                for p in tup[lang]:
                    if p.id in pass_pos:
                        raise ValueError(f"passage {p.id!r} appears in more than one tuple")
                    pass_pos[p.id] = len(pass_pos)
                    self.passage_order[lang].append(p.id)
                    self.passage_language[p.id] = lang
                    wid_map = word_ids[lang]
                    for tok in p.tokens:
                        tuple_idx.append(d)
                        pass_idx.append(pass_pos[p.id])
                        lang_idx.append(lang_pos[lang])
                        word_idx.append(self.offsets[lang] + wid_map[tok])
                        side_tokens += 1
                tokens_per_side[(d, lang)] = side_tokens

        for (d, lang), count in tokens_per_side.items():
            if count == 0:
                raise EmptyCorpus(
                    f"tuple {d} has no tokens on the {lang!r} side after preprocessing"
                )

        self.tuple_idx = np.asarray(tuple_idx, dtype=np.int32)
        self.pass_idx = np.asarray(pass_idx, dtype=np.int32)
        self.lang_idx = np.asarray(lang_idx, dtype=np.int32)
        self.word_idx = np.asarray(word_idx, dtype=np.int32)
        self.n_tokens = len(tuple_idx)
        self.n_tuples = len(tuples)
        self.n_passages = len(pass_pos)
        self.pass_ids = [None] * self.n_passages
        for pid, pos in pass_pos.items():
            self.pass_ids[pos] = pid
        self.k = k

    def init_counts(self, z: np.ndarray):
        n_dk = np.zeros((self.n_tuples, self.k), dtype=np.int32)
        n_pk = np.zeros((self.n_passages, self.k), dtype=np.int32)
        n_kw = np.zeros((self.k, self.v_total), dtype=np.int32)
        n_lk = np.zeros((len(self.languages), self.k), dtype=np.int32)
        np.add.at(n_dk, (self.tuple_idx, z), 1)
        np.add.at(n_pk, (self.pass_idx, z), 1)
        np.add.at(n_kw, (z, self.word_idx), 1)
        np.add.at(n_lk, (self.lang_idx, z), 1)
        return n_dk, n_pk, n_kw, n_lk


def train(
    tuples: Sequence[Mapping[str, Sequence[Passage]]],
    k: int,
    alpha: float | None = None,
    eta: float = 0.01,
    iterations: int = DEFAULT_ITERATIONS,
    burn_in: int = DEFAULT_BURN_IN,
    seed: int = 0,
    sample_every: int = SAMPLE_EVERY,
    on_iteration: Callable[[int, dict], None] | None = None,
) -> PolyTopicModel:
    """Run collapsed Gibbs sampling over tuple-aligned, tokenized passages.

    ``tuples`` maps language tag to that side's passages. Estimates are
    posterior means over post-burn-in states sampled every ``sample_every``
    iterations (the final state if none were reached). Fixed seed gives a
    bit-identical model.
    """
    if not tuples:
        raise EmptyCorpus("no tuples to train on")
    if k < 1:
        raise InvalidHyperparameter(f"K must be >= 1, got {k}")
    if alpha is None:
        alpha = default_alpha(k)
    if alpha <= 0 or eta <= 0:
        raise InvalidHyperparameter("alpha and eta must be > 0")
    if iterations < 1:
        raise InvalidHyperparameter("iterations must be >= 1")

    flat = _Flat(tuples, k)
    rng = np.random.default_rng(seed)
    z = rng.integers(0, k, size=flat.n_tokens, dtype=np.int32)
    n_dk, n_pk, n_kw, n_lk = flat.init_counts(z)
    eta_v = np.array(
        [len(flat.vocab[lang]) * eta for lang in flat.languages], dtype=np.float64
    )
    pass_len = n_pk.sum(axis=1).astype(np.float64)

    beta_acc = np.zeros_like(n_kw, dtype=np.float64)
    theta_acc = np.zeros_like(n_pk, dtype=np.float64)
    samples = 0

    def accumulate():
        nonlocal samples
        for li, lang in enumerate(flat.languages):
            sl = slice(flat.offsets[lang], flat.offsets[lang] + len(flat.vocab[lang]))
            beta_acc[:, sl] += (n_kw[:, sl] + eta) / (
                n_lk[li].astype(np.float64)[:, None] + eta_v[li]
            )
        theta_acc[...] += (n_pk + alpha) / (pass_len[:, None] + k * alpha)
        samples += 1

    for it in range(1, iterations + 1):
        uniforms = rng.random(flat.n_tokens)
        _kernel.sweep(
            z,
            flat.tuple_idx,
            flat.pass_idx,
            flat.lang_idx,
            flat.word_idx,
            n_dk,
            n_pk,
            n_kw,
            n_lk,
            eta_v,
            float(alpha),
            float(eta),
            uniforms,
        )
        if on_iteration is not None:
            on_iteration(
                it,
                {"n_dk": n_dk, "n_pk": n_pk, "n_kw": n_kw, "n_lk": n_lk, "z": z},
            )
        if it > burn_in and (it - burn_in) % sample_every == 0:
            accumulate()
    if samples == 0:
        accumulate()

    beta = {}
    for li, lang in enumerate(flat.languages):
        sl = slice(flat.offsets[lang], flat.offsets[lang] + len(flat.vocab[lang]))
        b = beta_acc[:, sl] / samples
        beta[lang] = b / b.sum(axis=1, keepdims=True)
    theta_rows = theta_acc / samples
    theta_rows = theta_rows / theta_rows.sum(axis=1, keepdims=True)
    theta = {pid: theta_rows[i] for i, pid in enumerate(flat.pass_ids)}

    counts = {}
    for lang in flat.languages:
        sl = slice(flat.offsets[lang], flat.offsets[lang] + len(flat.vocab[lang]))
        counts[lang] = n_kw[:, sl].copy()

    return PolyTopicModel(
        k=k,
        alpha=alpha,
        eta=eta,
        iterations=iterations,
        burn_in=burn_in,
        sample_every=sample_every,
        seed=seed,
        languages=flat.languages,
        vocab=flat.vocab,
        beta=beta,
        theta=theta,
        passage_order=flat.passage_order,
        passage_language=flat.passage_language,
        word_topic_counts=counts,
        kernel=KERNEL_NAME,
    )


def infer_theta(
    model: PolyTopicModel,
    tokens: Sequence[str],
    language: str,
    iterations: int = 100,
    seed: int = 0,
) -> np.ndarray:
    """Fold in an unseen passage against the trained word distributions.

    Out-of-vocabulary tokens are ignored; an empty passage yields the uniform
    prior mean. Deterministic under a fixed seed.
    """
    if language not in model.vocab:
        raise UnknownLanguage(f"model has no language {language!r}")
    word_ids = model.word_index(language)
    ids = [word_ids[t] for t in tokens if t in word_ids]
    k = model.k
    if not ids:
        return np.full(k, 1.0 / k)
    beta = model.beta[language]
    alpha = model.alpha
    rng = np.random.default_rng(seed)
    z = rng.integers(0, k, size=len(ids))
    m = np.bincount(z, minlength=k).astype(np.float64)
    burn = iterations // 2
    acc = np.zeros(k)
    samples = 0
    for it in range(1, iterations + 1):
        uniforms = rng.random(len(ids))
        for i, w in enumerate(ids):
            m[z[i]] -= 1
            probs = (m + alpha) * beta[:, w]
            cum = np.cumsum(probs)
            u = uniforms[i] * cum[-1]
            k_new = int(np.searchsorted(cum, u, side="right"))
            if k_new >= k:
                k_new = k - 1
            z[i] = k_new
            m[k_new] += 1
        if it > burn and (it - burn) % SAMPLE_EVERY == 0:
            acc += (m + alpha) / (len(ids) + k * alpha)
            samples += 1
    if samples == 0:
        acc = (m + alpha) / (len(ids) + k * alpha)
        samples = 1
    theta = acc / samples
    return theta / theta.sum()


def dominant_topic(theta: np.ndarray) -> int:
    """Index of the strongest topic; ties resolve to the lowest index."""
    theta = np.asarray(theta)
    if theta.ndim != 1 or theta.size == 0:
        raise ValueError("theta must be a non-empty vector")
    return int(np.argmax(theta))
