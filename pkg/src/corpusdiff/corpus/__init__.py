from .filtering import ds_rerank, filter_candidates, passage_score, smooth_rows
from .io import dump_corpus_jsonl, load_alignment_json, load_corpus_jsonl
from .model import Corpus, DocTuple, Document, FilterScore, Passage, TupleMember
from .preprocess import (
    DEFAULT_CONTRACTIONS,
    DEFAULT_STOPWORDS,
    LangConfig,
    preprocess_passage,
    preprocess_passages,
    preprocess_text,
    tokenize,
)
from .segment import segment_document
from .tuples import ExplicitPairs, TupleResult, ViaTranslation, form_tuples

__all__ = [
    "Corpus",
    "DocTuple",
    "Document",
    "FilterScore",
    "Passage",
    "TupleMember",
    "LangConfig",
    "DEFAULT_STOPWORDS",
    "DEFAULT_CONTRACTIONS",
    "preprocess_passage",
    "preprocess_passages",
    "preprocess_text",
    "tokenize",
    "segment_document",
    "ds_rerank",
    "smooth_rows",
    "passage_score",
    "filter_candidates",
    "ExplicitPairs",
    "ViaTranslation",
    "TupleResult",
    "form_tuples",
    "load_corpus_jsonl",
    "dump_corpus_jsonl",
    "load_alignment_json",
]
