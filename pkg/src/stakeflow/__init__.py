"""Stakeholder extraction and coverage analysis for topic-tagged news streams.

The package splits into independent layers: :mod:`stakeflow.ontology` for the
stakeholder type graph, :mod:`stakeflow.corpus` for document/mention handling,
:mod:`stakeflow.embedding` for mention representations,
:mod:`stakeflow.clustering` for the sequential cross-document clusterer,
:mod:`stakeflow.coverage` for visibility aggregation, and
:mod:`stakeflow.evaluation` for scoring and complexity verification. See the
demos directory in the source distribution for narrative walkthroughs of each
capability.
"""

__version__ = "0.1.0"

from .errors import (
    ClusteringError,
    ComplexityBoundError,
    CorpusError,
    CoverageError,
    EmbeddingError,
    EmptyCoverageError,
    EvaluationError,
    MentionIntegrityError,
    OntologyError,
    StakeflowError,
)
from .ontology import (
    Ontology,
    OntologyEdge,
    Relation,
    StakeholderType,
    default_ontology,
    default_ontology_path,
    is_reachable,
    load_ontology,
    loads_ontology,
    serialize_ontology,
    topic_stakeholders,
)
from .corpus import (
    COARSE_TYPES,
    DEFAULT_CONTEXT_WINDOW,
    Document,
    Gazetteer,
    GazetteerEntry,
    Mention,
    detect_mentions,
    load_gazetteer,
    load_mentions,
    normalize_surface,
    parse_corpus,
)
from .embedding import (
    DEFAULT_DIMENSION,
    DEFAULT_HASH_SEED,
    EmbeddingProvider,
    ExternalVectorProvider,
    HashedTextProvider,
    KnowledgeBase,
    combine,
    cosine_similarity,
    embed_context,
    embed_kb,
    embed_text_hashed,
    load_kb,
)
from .clustering import (
    AssignmentDecision,
    Cluster,
    ClusterState,
    DecisionKind,
    RunResult,
    SeedCluster,
    SeedMember,
    SeedTable,
    StakeholderEntry,
    StakeholderTable,
    assign,
    cluster_vector,
    init_state,
    load_seed_table,
    process_document,
    run,
    write_cluster_dump,
    write_manifest,
    write_stakeholder_table,
)
from .coverage import (
    CoverageMatrix,
    accumulate,
    coverage_rows,
    coverage_share,
    export,
    export_by_topic,
    read_coverage_csv,
    topic_slug,
    visibility,
    write_coverage_rows,
)
from .evaluation import (
    GoldAnnotation,
    MetricReport,
    PairwiseResult,
    Prediction,
    SyntheticStream,
    TypeMetrics,
    complexity_report,
    load_gold,
    make_synthetic_stream,
    pairwise_agreement,
    run_pairwise_baseline,
    score,
)
