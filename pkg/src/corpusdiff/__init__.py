"""corpusdiff: detect factual and cultural discrepancies between corpora in different languages.

The pipeline aligns an anchor corpus and one or more comparison corpora in a
shared topic space, retrieves topically relevant passages, generates grounded
answers with a pluggable chat model, and classifies answer pairs into a closed
discrepancy label set, with a human steering topic selection and review.
"""

__version__ = "0.1.0"
