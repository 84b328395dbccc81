"""Analysis of pen digitizer recordings: on-surface versus in-air behavior.

The pipeline: parse raw recordings (ingest), split them into on-surface,
short in-air, and long in-air strokes (segmentation), reduce each file to six
timing/count features (features), aggregate cohorts and compare them with
rank tests (stats), generate synthetic corpora with exact ground truth
(synth), and render tables and trajectory plots (report).
"""

from .errors import (
    DegenerateDataError,
    EmptyCohortError,
    EmptyInputError,
    ExactSizeError,
    InsufficientDataError,
    ManifestError,
    ParseError,
    PenAirError,
    SynthSpecError,
    TimestampOrderError,
)
from .features import (
    AnomalyPolicy,
    CohortSummary,
    Feature,
    FeatureVector,
    aggregate_cohort,
    feature_vector,
    relative_times,
)
from .ingest import (
    CorpusManifest,
    ManifestRecord,
    ParseOptions,
    ParseWarning,
    PenStatus,
    Sample,
    SampleStream,
    ValidationReport,
    load_manifest,
    parse_session,
    read_manifest,
    read_session,
    serialize_session,
    validate_stream,
)
from .report import (
    RunConfig,
    TableFormat,
    render_p_table,
    render_time_table,
    render_trajectories,
)
from .segmentation import (
    Gap,
    SegmentationConfig,
    SessionSegmentation,
    Stroke,
    StrokeClass,
    detect_gaps,
    nominal_period,
    segment,
)
from .stats import (
    ALPHA,
    RankTestResult,
    UStat,
    approx_p,
    compare_cohorts,
    exact_p,
    mann_whitney_u,
    midranks,
)
from .synth import (
    CohortSpec,
    CorpusSpec,
    GroundTruth,
    IntRange,
    PlanDistribution,
    SynthSpec,
    file_seed,
    generate_corpus,
    generate_session,
    load_corpus_spec,
    read_corpus_spec,
)

__version__ = "0.1.0"

__all__ = [
    "ALPHA",
    "AnomalyPolicy",
    "CohortSpec",
    "CohortSummary",
    "CorpusManifest",
    "CorpusSpec",
    "DegenerateDataError",
    "EmptyCohortError",
    "EmptyInputError",
    "ExactSizeError",
    "Feature",
    "FeatureVector",
    "Gap",
    "GroundTruth",
    "InsufficientDataError",
    "IntRange",
    "ManifestError",
    "ManifestRecord",
    "ParseError",
    "ParseOptions",
    "ParseWarning",
    "PenAirError",
    "PenStatus",
    "PlanDistribution",
    "RankTestResult",
    "RunConfig",
    "Sample",
    "SampleStream",
    "SegmentationConfig",
    "SessionSegmentation",
    "Stroke",
    "StrokeClass",
    "SynthSpec",
    "SynthSpecError",
    "TableFormat",
    "TimestampOrderError",
    "UStat",
    "ValidationReport",
    "aggregate_cohort",
    "approx_p",
    "compare_cohorts",
    "detect_gaps",
    "exact_p",
    "feature_vector",
    "file_seed",
    "generate_corpus",
    "generate_session",
    "load_corpus_spec",
    "load_manifest",
    "mann_whitney_u",
    "midranks",
    "nominal_period",
    "parse_session",
    "read_corpus_spec",
    "read_manifest",
    "read_session",
    "relative_times",
    "render_p_table",
    "render_time_table",
    "render_trajectories",
    "segment",
    "serialize_session",
    "validate_stream",
    "__version__",
]
