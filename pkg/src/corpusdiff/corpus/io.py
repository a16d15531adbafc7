"""Corpus ingestion: JSON Lines documents and JSON alignment files, UTF-8."""

from __future__ import annotations

import json
from pathlib import Path

from .model import Corpus, Document
from .tuples import ExplicitPairs


def load_corpus_jsonl(path, corpus_id: str, language: str | None = None) -> tuple[Corpus, list[str]]:
    """Load one document per line: {id, language, text, source_uri?}.

    Returns the corpus plus the ids of documents skipped for empty text.
    ``language``, when given, overrides per-document tags absent from a line.
    """
    path = Path(path)
    skipped: list[str] = []
    docs: list[Document] = []
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            doc_id = str(obj.get("id", f"line-{line_no}"))
            text = obj.get("text", "")
            if not text or not text.strip():
                skipped.append(doc_id)
                continue
            docs.append(
                Document(
                    id=doc_id,
                    language=obj.get("language") or language or "und",
                    raw_text=text,
                    source_uri=obj.get("source_uri"),
                )
            )
    lang = language or (docs[0].language if docs else "und")
    corpus = Corpus(id=corpus_id, language=lang)
    for doc in docs:
        corpus.add(doc)
    return corpus, skipped


def dump_corpus_jsonl(corpus: Corpus, path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for doc_id in sorted(corpus.documents):
            doc = corpus.documents[doc_id]
            obj = {"id": doc.id, "language": doc.language, "text": doc.raw_text}
            if doc.source_uri:
                obj["source_uri"] = doc.source_uri
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def load_alignment_json(path) -> ExplicitPairs:
    """Alignment file: JSON list of [anchor_doc_id, comparison_doc_id] pairs."""
    with Path(path).open(encoding="utf-8") as fh:
        raw = json.load(fh)
    pairs = tuple((str(a), str(c)) for a, c in raw)
    return ExplicitPairs(pairs=pairs)
