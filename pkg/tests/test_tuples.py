import pytest

from corpusdiff.corpus.model import Corpus, DocTuple, Document, TupleMember
from corpusdiff.corpus.tuples import ExplicitPairs, ViaTranslation, form_tuples
from corpusdiff.errors import DanglingAlignment


def corpus(cid, language, ids):
    c = Corpus(id=cid, language=language)
    for doc_id in ids:
        c.add(Document(id=doc_id, language=language, raw_text=f"text of {doc_id}"))
    return c


def test_explicit_pairs():
    anchor = corpus("A", "en", ["a1", "a2"])
    comparison = corpus("C", "es", ["c1", "c2"])
    result = form_tuples(anchor, comparison, ExplicitPairs((("a1", "c1"), ("a2", "c2"))))
    assert len(result.tuples) == 2
    assert result.unaligned_anchor == [] and result.unaligned_comparison == []
    members = result.tuples[0].members
    assert {m.corpus_id for m in members} == {"A", "C"}


def test_unaligned_documents_reported():
    anchor = corpus("A", "en", ["a1", "a2", "a3"])
    comparison = corpus("C", "es", ["c1", "c2"])
    result = form_tuples(anchor, comparison, ExplicitPairs((("a1", "c1"),)))
    assert result.unaligned_anchor == ["a2", "a3"]
    assert result.unaligned_comparison == ["c2"]


def test_dangling_pair_raises():
    anchor = corpus("A", "en", ["a1"])
    comparison = corpus("C", "es", ["c1"])
    with pytest.raises(DanglingAlignment):
        form_tuples(anchor, comparison, ExplicitPairs((("a1", "missing"),)))


def test_via_translation_flags_synthetic_members():
    anchor = corpus("A", "en", ["a1"])
    comparison = corpus("C", "es", ["c1", "a1-trans"])
    alignment = ViaTranslation(
        anchor_to_comparison={"a1": "a1-trans"},
        comparison_to_anchor={},
    )
    result = form_tuples(anchor, comparison, alignment)
    assert len(result.tuples) == 1
    synth = [m for m in result.tuples[0].members if m.synthetic]
    assert [m.document_id for m in synth] == ["a1-trans"]
    # the untranslated comparison document is reported, not dropped
    assert result.unaligned_comparison == ["c1"]


def test_translation_documents_not_double_counted():
    anchor = corpus("A", "en", ["a1", "c1-trans"])
    comparison = corpus("C", "es", ["c1", "a1-trans"])
    alignment = ViaTranslation(
        anchor_to_comparison={"a1": "a1-trans"},
        comparison_to_anchor={"c1": "c1-trans"},
    )
    result = form_tuples(anchor, comparison, alignment)
    assert len(result.tuples) == 2
    assert result.unaligned_anchor == [] and result.unaligned_comparison == []


def test_tuple_invariants():
    with pytest.raises(ValueError):
        DocTuple(members=(TupleMember("A", "a1"),))
    with pytest.raises(ValueError):
        DocTuple(members=(TupleMember("A", "a1"), TupleMember("A", "a2")))
