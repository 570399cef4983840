"""Exception types shared across the package."""


class StakeflowError(Exception):
    """Base class for all errors raised by this package."""


class OntologyError(StakeflowError):
    """Malformed or inconsistent ontology file."""


class CorpusError(StakeflowError):
    """Malformed document stream or gazetteer."""


class MentionIntegrityError(CorpusError):
    """Mention record that does not agree with its document text."""


class EmbeddingError(StakeflowError):
    """Vector dimension mismatch or missing external vector."""


class ClusteringError(StakeflowError):
    """Invalid seed table or cluster state misuse."""


class CoverageError(StakeflowError):
    """Coverage aggregation misuse."""


class EmptyCoverageError(CoverageError):
    """Share computation requested for a (topic, media house) pair with no counts."""


class EvaluationError(StakeflowError):
    """Bad gold data or metric computation misuse."""


class ComplexityBoundError(EvaluationError):
    """Instrumented similarity operation count exceeded its guaranteed bound."""
