import pytest
from hypothesis import given
from hypothesis import strategies as st

from corpusdiff.corpus.model import Passage
from corpusdiff.corpus.preprocess import (
    LangConfig,
    preprocess_passage,
    preprocess_text,
    tokenize,
)
from corpusdiff.errors import LanguageMismatch


def passage(text, language="en"):
    return Passage(id="p:0", document_id="p", language=language, text=text, index_in_document=0)


def test_contractions_then_stopwords():
    cfg = LangConfig(
        language="en",
        stopwords=frozenset({"do", "not"}),
        contraction_map={"don't": "do not"},
    )
    assert preprocess_passage(passage("Don't eat PEANUTS!"), cfg).tokens == ("eat", "peanuts")


def test_empty_text_gives_no_tokens():
    cfg = LangConfig(language="en")
    assert preprocess_text("", cfg) == []


def test_no_lemmatizer_keeps_surface_forms():
    cfg = LangConfig(language="en")
    assert preprocess_text("Running dogs RAN", cfg) == ["running", "dogs", "ran"]


def test_lemmatizer_hook_applied_after_stopwords():
    seen = []

    def hook(tokens):
        seen.append(list(tokens))
        return [t.rstrip("s") for t in tokens]

    cfg = LangConfig(language="en", stopwords=frozenset({"the"}), lemmatizer_hook=hook)
    assert preprocess_text("the dogs", cfg) == ["dog"]
    assert seen == [["dogs"]]


def test_language_mismatch_raises():
    cfg = LangConfig(language="en")
    with pytest.raises(LanguageMismatch):
        preprocess_passage(passage("hola", language="es"), cfg)


def test_tokens_are_alphanumeric_only():
    cfg = LangConfig(language="en")
    assert preprocess_text("x-ray, 2nd & s'more", cfg) == ["x", "ray", "2nd", "s", "more"]


def test_unicode_letters_kept():
    cfg = LangConfig(language="es")
    assert preprocess_text("niño pequeño", cfg) == ["niño", "pequeño"]


@given(st.lists(st.text(alphabet="abcdefgh", min_size=1, max_size=8), max_size=20))
def test_idempotent_on_rejoined_tokens(words):
    cfg = LangConfig(language="en", stopwords=frozenset({"abc"}))
    once = preprocess_text(" ".join(words), cfg)
    twice = preprocess_text(" ".join(once), cfg)
    assert once == twice


def test_default_config_carries_small_stopword_list():
    cfg = LangConfig.default("en")
    assert "the" in cfg.stopwords
    assert tokenize("The Cat") == ["the", "cat"]
    assert preprocess_text("The cat", cfg) == ["cat"]
