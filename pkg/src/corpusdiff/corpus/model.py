"""Core data model: corpora, documents, passages, loose alignment tuples."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Document:
    id: str
    language: str
    raw_text: str
    source_uri: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("document id must be non-empty")
        if not self.raw_text:
            raise ValueError(f"document {self.id!r}: raw_text must be non-empty")


@dataclass(frozen=True)
class Passage:
    id: str
    document_id: str
    language: str
    text: str
    index_in_document: int
    tokens: tuple[str, ...] = ()

    def __post_init__(self):
        if self.index_in_document < 0:
            raise ValueError(f"passage {self.id!r}: index_in_document must be >= 0")

    def with_tokens(self, tokens) -> "Passage":
        return Passage(
            id=self.id,
            document_id=self.document_id,
            language=self.language,
            text=self.text,
            index_in_document=self.index_in_document,
            tokens=tuple(tokens),
        )


@dataclass(frozen=True)
class TupleMember:
    corpus_id: str
    document_id: str
    synthetic: bool = False  # machine translation used only for topic alignment


@dataclass(frozen=True)
class DocTuple:
    """Loosely equivalent documents, one per corpus, sharing a topic distribution."""

    members: tuple[TupleMember, ...]

    def __post_init__(self):
        if len(self.members) < 2:
            raise ValueError("a tuple needs at least two members")
        corpora = [m.corpus_id for m in self.members]
        if len(set(corpora)) != len(corpora):
            raise ValueError("at most one member per corpus in a tuple")


@dataclass(frozen=True)
class FilterScore:
    passage_id: str
    xi: float
    retained_word_count: int
    excluded_word_count: int


@dataclass
class Corpus:
    """A registry of documents sharing one language side of the analysis."""

    id: str
    language: str
    documents: dict[str, Document] = field(default_factory=dict)

    def add(self, doc: Document) -> None:
        if doc.id in self.documents:
            raise ValueError(f"duplicate document id {doc.id!r} in corpus {self.id!r}")
        self.documents[doc.id] = doc

    def __len__(self) -> int:
        return len(self.documents)
