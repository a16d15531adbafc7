import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from corpusdiff.corpus.filtering import (
    ds_rerank,
    filter_candidates,
    passage_score,
    smooth_rows,
)
from corpusdiff.corpus.model import FilterScore
from corpusdiff.errors import (
    DegenerateBeta,
    EmptyPassage,
    FullCoverage,
    InsufficientPassages,
)


def brute_force_rerank(beta):
    """Independent evaluation: weight times the log-ratio to the per-word
    geometric mean, computed with plain loops."""
    k_count, v_count = len(beta), len(beta[0])
    out = [[0.0] * v_count for _ in range(k_count)]
    for v in range(v_count):
        geo = math.exp(sum(math.log(beta[j][v]) for j in range(k_count)) / k_count)
        for k in range(k_count):
            out[k][v] = beta[k][v] * math.log(beta[k][v] / geo)
    return out


def brute_force_xi(tokens, beta_ds, vocab):
    retained = sorted({t for t in tokens if t in vocab})
    excluded = len(vocab) - len(retained)
    col = {w: i for i, w in enumerate(vocab)}
    total = sum(max(row[col[w]] for row in beta_ds) for w in retained)
    return (total / excluded) / len(retained)


def test_single_topic_is_all_zero():
    out = ds_rerank(np.array([[0.25, 0.25, 0.25, 0.25]]))
    assert np.all(out == 0.0)


def test_identical_rows_are_all_zero():
    row = np.array([0.5, 0.3, 0.2])
    out = ds_rerank(np.stack([row, row, row]))
    np.testing.assert_allclose(out, 0.0, atol=1e-15)


def test_two_topic_worked_case():
    beta = np.array([[0.9, 0.1], [0.5, 0.5]])
    out = ds_rerank(beta)
    expected = 0.9 * math.log(0.9 / math.sqrt(0.9 * 0.5))
    assert abs(out[0][0] - expected) < 1e-9


def test_matches_brute_force_on_random_instances(rng):
    for _ in range(25):
        k = int(rng.integers(1, 6))
        v = int(rng.integers(2, 9))
        beta = rng.random((k, v)) + 0.05
        beta /= beta.sum(axis=1, keepdims=True)
        np.testing.assert_allclose(
            ds_rerank(beta), brute_force_rerank(beta.tolist()), atol=1e-9, rtol=0
        )


def test_rejects_zero_entries():
    beta = np.array([[1.0, 0.0], [0.5, 0.5]])
    with pytest.raises(DegenerateBeta):
        ds_rerank(beta)


def test_rejects_unnormalized_rows():
    with pytest.raises(ValueError):
        ds_rerank(np.array([[0.7, 0.7]]))


def test_smooth_rows_makes_positive_and_normalized():
    beta = np.array([[1.0, 0.0], [0.5, 0.5]])
    smoothed = smooth_rows(beta, eta=0.01)
    assert np.all(smoothed > 0)
    np.testing.assert_allclose(smoothed.sum(axis=1), 1.0, atol=1e-12)
    ds_rerank(smoothed)  # now well-defined


@given(st.integers(2, 6), st.integers(2, 8), st.integers(0, 10_000))
def test_shared_row_symmetry_property(k, v, seed):
    row = np.random.default_rng(seed).random(v) + 0.01
    row /= row.sum()
    out = ds_rerank(np.tile(row, (k, 1)))
    assert np.allclose(out, 0.0, atol=1e-12)


# -- passage scoring -----------------------------------------------------------


def test_worked_single_word_case():
    beta = np.array([[0.9, 0.1], [0.5, 0.5]])
    beta_ds = ds_rerank(beta)
    score = passage_score(["w"], beta_ds, ["w", "u"], passage_id="p")
    expected = beta_ds[:, 0].max()
    assert abs(score.xi - expected) < 1e-12
    assert score.retained_word_count == 1
    assert score.excluded_word_count == 1


def test_oov_tokens_dropped_before_scoring():
    beta_ds = ds_rerank(np.array([[0.6, 0.4], [0.4, 0.6]]))
    with_oov = passage_score(["w", "zzz"], beta_ds, ["w", "u"])
    without = passage_score(["w"], beta_ds, ["w", "u"])
    assert with_oov.xi == without.xi


def test_all_oov_is_empty_passage():
    beta_ds = np.zeros((2, 2))
    with pytest.raises(EmptyPassage):
        passage_score(["zzz"], beta_ds, ["w", "u"])


def test_full_vocabulary_coverage_rejected():
    beta_ds = np.zeros((2, 2))
    with pytest.raises(FullCoverage):
        passage_score(["w", "u"], beta_ds, ["w", "u"])


def test_zero_weights_give_zero_score():
    beta_ds = np.zeros((3, 3))
    assert passage_score(["a"], beta_ds, ["a", "b", "c"]).xi == 0.0


@given(
    st.lists(st.sampled_from(["a", "b", "c", "d"]), min_size=1, max_size=12),
    st.integers(0, 10_000),
)
def test_score_ignores_order_and_multiplicity(tokens, seed):
    gen = np.random.default_rng(seed)
    beta = gen.random((3, 5)) + 0.05
    beta /= beta.sum(axis=1, keepdims=True)
    beta_ds = ds_rerank(beta)
    vocab = ["a", "b", "c", "d", "e"]
    unique = sorted(set(tokens))
    s1 = passage_score(tokens, beta_ds, vocab)
    s2 = passage_score(unique[::-1] * 2, beta_ds, vocab)
    assert s1.xi == s2.xi


def test_matches_brute_force_xi(rng):
    vocab = [f"w{i}" for i in range(12)]
    for _ in range(25):
        k = int(rng.integers(1, 5))
        beta = rng.random((k, 12)) + 0.05
        beta /= beta.sum(axis=1, keepdims=True)
        beta_ds = ds_rerank(beta)
        n_tokens = int(rng.integers(1, 8))
        tokens = [vocab[int(i)] for i in rng.integers(0, 11, n_tokens)]
        got = passage_score(tokens, beta_ds, vocab).xi
        want = brute_force_xi(tokens, beta_ds.tolist(), vocab)
        assert abs(got - want) < 1e-9


# -- candidate filtering ---------------------------------------------------------


def scores(values):
    return [FilterScore(f"p{i:03d}", x, 1, 1) for i, x in enumerate(values)]


def test_bottom_percentile_split():
    values = [i / 100 for i in range(200)]
    split = filter_candidates(scores(values), bottom_percentile=5, n_good=20, seed=1)
    assert len(split["bad"]) == 10  # ceil(200 * 5%)
    assert {s.passage_id for s in split["bad"]} == {f"p{i:03d}" for i in range(10)}
    assert len(split["good"]) == 20
    assert not {s.passage_id for s in split["bad"]} & {s.passage_id for s in split["good"]}


def test_uniform_scores_tie_case_only_size_guaranteed():
    split = filter_candidates(scores([0.5] * 100), bottom_percentile=10, n_good=5, seed=3)
    assert len(split["bad"]) == 10


def test_seeded_good_sample_reproducible():
    values = list(range(50))
    a = filter_candidates(scores(values), 10, 8, seed=42)
    b = filter_candidates(scores(values), 10, 8, seed=42)
    c = filter_candidates(scores(values), 10, 8, seed=43)
    assert [s.passage_id for s in a["good"]] == [s.passage_id for s in b["good"]]
    assert [s.passage_id for s in a["good"]] != [s.passage_id for s in c["good"]]


def test_insufficient_passages():
    with pytest.raises(InsufficientPassages):
        filter_candidates(scores([1, 2, 3]), 50, n_good=3, seed=0)


def test_invalid_percentile():
    with pytest.raises(ValueError):
        filter_candidates(scores([1, 2]), 0, 1, seed=0)
