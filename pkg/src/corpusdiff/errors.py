"""Exception hierarchy shared across the pipeline."""


class CorpusDiffError(Exception):
    """Base class for all package errors."""


# corpus / preprocessing
class LanguageMismatch(CorpusDiffError):
    pass


class DegenerateBeta(CorpusDiffError):
    pass


class EmptyPassage(CorpusDiffError):
    pass


class FullCoverage(CorpusDiffError):
    pass


class InsufficientPassages(CorpusDiffError):
    pass


class DanglingAlignment(CorpusDiffError):
    pass


# topic model
class EmptyCorpus(CorpusDiffError):
    pass


class InvalidHyperparameter(CorpusDiffError):
    pass


class UnknownLanguage(CorpusDiffError):
    pass


class InsufficientVocabulary(CorpusDiffError):
    pass


# index / retrieval
class DimensionMismatch(CorpusDiffError):
    pass


class EmptyIndex(CorpusDiffError):
    pass


# providers
class ProviderError(CorpusDiffError):
    pass


class ParseError(CorpusDiffError):
    pass


# metrics
class EmptyGold(CorpusDiffError):
    pass


class TooFewQueries(CorpusDiffError):
    pass


class LengthMismatch(CorpusDiffError):
    pass


# orchestration
class PredecessorIncomplete(CorpusDiffError):
    pass


class StageFailure(CorpusDiffError):
    pass


class UnknownTopic(CorpusDiffError):
    pass


class StageConflict(CorpusDiffError):
    """Downstream artifacts exist; rerun with force to invalidate them."""


class AlreadyReviewed(CorpusDiffError):
    pass


class UnknownRecord(CorpusDiffError):
    pass


class NothingToExport(CorpusDiffError):
    pass


class ProjectLocked(CorpusDiffError):
    pass
