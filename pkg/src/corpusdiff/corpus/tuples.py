"""Loose alignment of documents across corpora into shared-topic tuples."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import DanglingAlignment
from .model import Corpus, DocTuple, TupleMember


@dataclass(frozen=True)
class ExplicitPairs:
    """Pre-existing alignment: list of (anchor_doc_id, comparison_doc_id)."""

    pairs: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class ViaTranslation:
    """Each document is paired with its translation, ingested on the other side.

    Maps original document ids to the ids of their translations in the
    opposite corpus. Translations only establish topic-space alignment; their
    members are flagged synthetic so downstream stages can drop them after
    training.
    """

    anchor_to_comparison: dict[str, str] = field(default_factory=dict)
    comparison_to_anchor: dict[str, str] = field(default_factory=dict)


@dataclass
class TupleResult:
    tuples: list[DocTuple]
    unaligned_anchor: list[str]
    unaligned_comparison: list[str]


def form_tuples(
    anchor: Corpus,
    comparison: Corpus,
    alignment: ExplicitPairs | ViaTranslation,
) -> TupleResult:
    """Build document tuples; unaligned documents are reported, never dropped silently."""
    if isinstance(alignment, ExplicitPairs):
        return _from_pairs(anchor, comparison, alignment.pairs)
    if isinstance(alignment, ViaTranslation):
        return _from_translations(anchor, comparison, alignment)
    raise TypeError(f"unsupported alignment {type(alignment).__name__}")


def _require(corpus: Corpus, doc_id: str) -> None:
    if doc_id not in corpus.documents:
        raise DanglingAlignment(f"document {doc_id!r} not found in corpus {corpus.id!r}")


def _from_pairs(anchor: Corpus, comparison: Corpus, pairs) -> TupleResult:
    tuples = []
    seen_a, seen_c = set(), set()
    for a_id, c_id in pairs:
        _require(anchor, a_id)
        _require(comparison, c_id)
        tuples.append(
            DocTuple(
                members=(
                    TupleMember(anchor.id, a_id),
                    TupleMember(comparison.id, c_id),
                )
            )
        )
        seen_a.add(a_id)
        seen_c.add(c_id)
    return TupleResult(
        tuples=tuples,
        unaligned_anchor=sorted(set(anchor.documents) - seen_a),
        unaligned_comparison=sorted(set(comparison.documents) - seen_c),
    )


def _from_translations(
    anchor: Corpus, comparison: Corpus, alignment: ViaTranslation
) -> TupleResult:
    tuples = []
    unaligned_a, unaligned_c = [], []
    translation_ids = set(alignment.anchor_to_comparison.values()) | set(
        alignment.comparison_to_anchor.values()
    )
    for doc_id in sorted(anchor.documents):
        if doc_id in translation_ids:
            continue
        trans_id = alignment.anchor_to_comparison.get(doc_id)
        if trans_id is None:
            unaligned_a.append(doc_id)
            continue
        _require(comparison, trans_id)
        tuples.append(
            DocTuple(
                members=(
                    TupleMember(anchor.id, doc_id),
                    TupleMember(comparison.id, trans_id, synthetic=True),
                )
            )
        )
    for doc_id in sorted(comparison.documents):
        if doc_id in translation_ids:
            continue
        trans_id = alignment.comparison_to_anchor.get(doc_id)
        if trans_id is None:
            unaligned_c.append(doc_id)
            continue
        _require(anchor, trans_id)
        tuples.append(
            DocTuple(
                members=(
                    TupleMember(anchor.id, trans_id, synthetic=True),
                    TupleMember(comparison.id, doc_id),
                )
            )
        )
    return TupleResult(
        tuples=tuples, unaligned_anchor=unaligned_a, unaligned_comparison=unaligned_c
    )
