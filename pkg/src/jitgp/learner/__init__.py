"""Model preparation, resampling, training, and hyperparameter search."""

from .gbdt import GradientBoostedTrees
from .models import (
    ALL_KINDS,
    DEFAULT_GRIDS,
    DEFAULT_HYPERPARAMETERS,
    GRADIENT_BOOSTED,
    LOGISTIC_REGRESSION,
    RANDOM_FOREST,
    ClassifierSpec,
    TrainedModel,
    build_estimator,
    canonical_kind,
    load_model,
    predict_scores,
    save_model,
    train_classifier,
)
from .prep import (
    ScalerState,
    minmax_apply,
    minmax_fit,
    stratified_folds,
    stratified_split,
    stratified_split_indices,
)
from .search import grid_search
from .smote import SmoteConfig, smote_oversample

__all__ = [
    "ALL_KINDS",
    "DEFAULT_GRIDS",
    "DEFAULT_HYPERPARAMETERS",
    "GRADIENT_BOOSTED",
    "LOGISTIC_REGRESSION",
    "RANDOM_FOREST",
    "ClassifierSpec",
    "GradientBoostedTrees",
    "ScalerState",
    "SmoteConfig",
    "TrainedModel",
    "build_estimator",
    "canonical_kind",
    "grid_search",
    "load_model",
    "minmax_apply",
    "minmax_fit",
    "predict_scores",
    "save_model",
    "smote_oversample",
    "stratified_folds",
    "stratified_split",
    "stratified_split_indices",
    "train_classifier",
]
