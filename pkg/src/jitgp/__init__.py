"""Defect prediction from developer collaboration graphs.

The package mines version-control history into a weighted developer-file
graph, projects it onto developers, derives per-change features from either
centrality measures or community ids plus node embeddings, and trains
resampled classifiers whose precision-recall behavior is written to a
deterministic report.
"""

__version__ = "0.1.0"

from .centrality import CentralityVector, compute_centralities
from .community import CommunityPartition, louvain, modularity
from .embedding import EmbeddingMatrix, node2vec_embed
from .errors import (
    ConfigError,
    ConsistencyError,
    DataError,
    DomainError,
    JitgpError,
    ParseError,
    SchemaError,
    ShapeError,
    StageError,
)
from .evaluation import (
    ConfusionCounts,
    EvaluationReport,
    PrCurve,
    aggregate_ranks,
    auc_pr,
    best_f1_threshold,
    confusion_at_threshold,
    evaluate_scores,
    mcc,
    pr_curve,
    precision_recall_f1,
)
from .features import FeatureMatrix, assemble_features
from .graphs import (
    ContributionGraph,
    ProjectionGraph,
    build_contribution_graph,
    project_developer_graph,
)
from .ingest import ChangeRecord, ChangeSet, normalize_author, parse_changelog
from .pipeline import PipelineConfig, PipelineResult, emit_plot_data, run_pipeline
from .seeds import derive_seed, seed_derivation

__all__ = [
    "CentralityVector",
    "ChangeRecord",
    "ChangeSet",
    "CommunityPartition",
    "ConfigError",
    "ConfusionCounts",
    "ConsistencyError",
    "ContributionGraph",
    "DataError",
    "DomainError",
    "EmbeddingMatrix",
    "EvaluationReport",
    "FeatureMatrix",
    "JitgpError",
    "ParseError",
    "PipelineConfig",
    "PipelineResult",
    "PrCurve",
    "ProjectionGraph",
    "SchemaError",
    "ShapeError",
    "StageError",
    "aggregate_ranks",
    "assemble_features",
    "auc_pr",
    "best_f1_threshold",
    "build_contribution_graph",
    "compute_centralities",
    "confusion_at_threshold",
    "derive_seed",
    "emit_plot_data",
    "evaluate_scores",
    "louvain",
    "mcc",
    "modularity",
    "node2vec_embed",
    "normalize_author",
    "parse_changelog",
    "pr_curve",
    "precision_recall_f1",
    "project_developer_graph",
    "run_pipeline",
    "seed_derivation",
]
