import numpy as np
import pytest

from corpusdiff.corpus.model import Passage


def make_passage(pid, tokens, language="en", text=None, doc=None):
    return Passage(
        id=pid,
        document_id=doc or pid.split(":")[0],
        language=language,
        text=text if text is not None else " ".join(tokens),
        index_in_document=int(pid.split(":")[1]) if ":" in pid else 0,
        tokens=tuple(tokens),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def passage_factory():
    return make_passage
