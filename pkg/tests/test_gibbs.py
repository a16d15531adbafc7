import numpy as np
import pytest

from corpusdiff.errors import EmptyCorpus, InvalidHyperparameter, UnknownLanguage
from corpusdiff.pltm import _gibbs_py
from corpusdiff.pltm.gibbs import dominant_topic, infer_theta, train
from corpusdiff.synthetic import make_corpus, planted_purity

from conftest import make_passage

try:
    from corpusdiff.pltm import _gibbs_cy
except ImportError:
    _gibbs_cy = None


def tiny_tuples():
    return [
        {
            "en": [make_passage("a1:0", ["cat", "dog", "cat", "bird"])],
            "es": [make_passage("b1:0", ["gato", "perro"], language="es")],
        },
        {
            "en": [make_passage("a2:0", ["sun", "moon", "star"])],
            "es": [make_passage("b2:0", ["sol", "luna", "sol"], language="es")],
        },
    ]


def planted_tuples(n_docs=40, tokens=8, seed=5):
    corpus = make_corpus(
        n_topics=2, docs_per_side=n_docs, passages_per_doc=1, tokens_per_passage=tokens, seed=seed
    )
    tuples = []
    for (a_id, c_id), a_doc, c_doc in zip(
        corpus.pairs, corpus.anchor_documents, corpus.comparison_documents
    ):
        tuples.append(
            {
                "en": [make_passage(f"{a_id}:0", a_doc["text"].split(), doc=a_id)],
                "es": [
                    make_passage(f"{c_id}:0", c_doc["text"].split(), language="es", doc=c_id)
                ],
            }
        )
    return corpus, tuples


def test_k1_degeneracy():
    model = train(tiny_tuples(), k=1, iterations=20, burn_in=5, seed=0)
    for theta in model.theta.values():
        np.testing.assert_allclose(theta, [1.0])
    for lang in model.languages:
        counts = model.word_topic_counts[lang][0].astype(float)
        v = len(model.vocab[lang])
        expected = (counts + model.eta) / (counts.sum() + v * model.eta)
        np.testing.assert_allclose(model.beta[lang][0], expected / expected.sum(), atol=1e-12)


def test_count_conservation_every_iteration():
    tuples = tiny_tuples()
    tokens_per_tuple = [
        sum(len(p.tokens) for side in tup.values() for p in side) for tup in tuples
    ]
    seen = []

    def check(it, counts):
        n_dk, n_kw, n_lk = counts["n_dk"], counts["n_kw"], counts["n_lk"]
        assert n_dk.sum(axis=1).tolist() == tokens_per_tuple
        assert n_kw.sum() == sum(tokens_per_tuple)
        assert np.all(n_dk >= 0) and np.all(n_kw >= 0) and np.all(n_lk >= 0)
        np.testing.assert_array_equal(n_kw.sum(axis=1), n_lk.sum(axis=0))
        seen.append(it)

    train(tuples, k=3, iterations=30, burn_in=5, seed=1, on_iteration=check)
    assert seen == list(range(1, 31))


def test_normalization_of_estimates():
    model = train(tiny_tuples(), k=3, iterations=40, burn_in=10, seed=2)
    for lang in model.languages:
        np.testing.assert_allclose(model.beta[lang].sum(axis=1), 1.0, atol=1e-6)
        assert np.all(model.beta[lang] >= 0)
    for theta in model.theta.values():
        assert abs(theta.sum() - 1.0) < 1e-6
        assert np.all(theta >= 0)


def test_seed_determinism_bit_identical():
    a = train(tiny_tuples(), k=2, iterations=50, burn_in=10, seed=9)
    b = train(tiny_tuples(), k=2, iterations=50, burn_in=10, seed=9)
    for lang in a.languages:
        assert np.array_equal(a.beta[lang], b.beta[lang])
        assert np.array_equal(a.word_topic_counts[lang], b.word_topic_counts[lang])
    for pid in a.theta:
        assert np.array_equal(a.theta[pid], b.theta[pid])


def test_different_seed_changes_assignments():
    a = train(tiny_tuples(), k=2, iterations=50, burn_in=10, seed=9)
    b = train(tiny_tuples(), k=2, iterations=50, burn_in=10, seed=10)
    assert any(not np.array_equal(a.beta[l], b.beta[l]) for l in a.languages)


def test_language_order_in_tuples_is_canonical():
    tuples_a = tiny_tuples()
    tuples_b = [dict(reversed(list(tup.items()))) for tup in tiny_tuples()]
    a = train(tuples_a, k=2, iterations=30, burn_in=10, seed=4)
    b = train(tuples_b, k=2, iterations=30, burn_in=10, seed=4)
    for lang in a.languages:
        assert np.array_equal(a.beta[lang], b.beta[lang])


def test_planted_topics_recovered():
    corpus, tuples = planted_tuples()
    model = train(tuples, k=2, iterations=300, burn_in=100, seed=7)
    assignments = {
        pid: int(np.argmax(theta)) for pid, theta in model.theta.items()
    }
    purity = planted_purity(assignments, corpus.planted_passage_topic, k=2)
    assert purity >= 0.9


def test_empty_corpus_and_bad_hyperparameters():
    with pytest.raises(EmptyCorpus):
        train([], k=2)
    with pytest.raises(InvalidHyperparameter):
        train(tiny_tuples(), k=0)
    with pytest.raises(InvalidHyperparameter):
        train(tiny_tuples(), k=2, alpha=-1.0)
    with pytest.raises(InvalidHyperparameter):
        train(tiny_tuples(), k=2, eta=0.0)


def test_empty_tuple_side_rejected():
    tuples = tiny_tuples()
    tuples[0]["es"] = [make_passage("b1:0", [], language="es")]
    with pytest.raises(EmptyCorpus):
        train(tuples, k=2, iterations=5, burn_in=1, seed=0)


@pytest.mark.skipif(_gibbs_cy is None, reason="compiled kernel unavailable")
def test_kernels_produce_identical_chains():
    gen = np.random.default_rng(3)
    n, k_count, n_tuples, n_passages, n_langs, v_total = 400, 5, 8, 16, 2, 24
    z1 = gen.integers(0, k_count, n).astype(np.int32)
    tuple_idx = gen.integers(0, n_tuples, n).astype(np.int32)
    pass_idx = gen.integers(0, n_passages, n).astype(np.int32)
    lang_idx = gen.integers(0, n_langs, n).astype(np.int32)
    word_idx = gen.integers(0, v_total, n).astype(np.int32)

    def counts(z):
        n_dk = np.zeros((n_tuples, k_count), np.int32)
        n_pk = np.zeros((n_passages, k_count), np.int32)
        n_kw = np.zeros((k_count, v_total), np.int32)
        n_lk = np.zeros((n_langs, k_count), np.int32)
        np.add.at(n_dk, (tuple_idx, z), 1)
        np.add.at(n_pk, (pass_idx, z), 1)
        np.add.at(n_kw, (z, word_idx), 1)
        np.add.at(n_lk, (lang_idx, z), 1)
        return n_dk, n_pk, n_kw, n_lk

    eta_v = np.array([12 * 0.01, 12 * 0.01])
    z2 = z1.copy()
    state1, state2 = counts(z1), counts(z2)
    for it in range(15):
        uniforms = np.random.default_rng(50 + it).random(n)
        _gibbs_py.sweep(z1, tuple_idx, pass_idx, lang_idx, word_idx, *state1, eta_v, 0.4, 0.01, uniforms)
        _gibbs_cy.sweep(z2, tuple_idx, pass_idx, lang_idx, word_idx, *state2, eta_v, 0.4, 0.01, uniforms)
    assert np.array_equal(z1, z2)
    for a, b in zip(state1, state2):
        assert np.array_equal(a, b)


# -- inference ------------------------------------------------------------------


def test_infer_empty_tokens_gives_uniform_prior():
    model = train(tiny_tuples(), k=4, iterations=20, burn_in=5, seed=0)
    np.testing.assert_allclose(infer_theta(model, [], "en"), np.full(4, 0.25))
    np.testing.assert_allclose(infer_theta(model, ["zzz-oov"], "en"), np.full(4, 0.25))


def test_infer_planted_passage_peaks_on_its_topic():
    corpus, tuples = planted_tuples()
    model = train(tuples, k=2, iterations=300, burn_in=100, seed=7)
    # identify which inferred topic matches planted topic 0
    probe = [f"ent0w{j:02d}" for j in range(8)]
    theta = infer_theta(model, probe, "en", iterations=200, seed=1)
    assert theta.max() >= 0.9


def test_infer_deterministic_under_seed():
    model = train(tiny_tuples(), k=3, iterations=30, burn_in=10, seed=0)
    a = infer_theta(model, ["cat", "dog"], "en", seed=5)
    b = infer_theta(model, ["cat", "dog"], "en", seed=5)
    assert np.array_equal(a, b)


def test_infer_unknown_language():
    model = train(tiny_tuples(), k=2, iterations=10, burn_in=2, seed=0)
    with pytest.raises(UnknownLanguage):
        infer_theta(model, ["cat"], "fr")


def test_dominant_topic_rules():
    assert dominant_topic(np.array([0.2, 0.5, 0.3])) == 1
    assert dominant_topic(np.array([0.5, 0.5])) == 0
    one_hot = np.zeros(6)
    one_hot[4] = 1.0
    assert dominant_topic(one_hot) == 4
    with pytest.raises(ValueError):
        dominant_topic(np.array([]))
