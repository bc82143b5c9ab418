"""botscope: classify GitHub commenters as bots or humans from comment patterns.

Pipeline: fetch issue/PR comments -> activity CSV -> per-contributor
profiles -> repetition-pattern features -> decision tree -> predictions CSV
-> reports, bulk export, and an operator review dashboard.
"""

from .corpus import ContributorProfile, build_profiles, normalize_comment
from .estimators import BotClassifier, PatternFeaturizer
from .features import (
    FeatureVector,
    PatternPartition,
    cluster_patterns,
    comment_distance,
    extract_features,
    gini_inequality,
)
from .records import ActivityComment, FetchWindow, RepoRef
from .store import PredictionRecord, RepoSummary, summarize
from .tree import TrainedModel, default_model, load_model, save_model, train_tree

__version__ = "0.1.0"

__all__ = [
    "ActivityComment",
    "BotClassifier",
    "ContributorProfile",
    "FeatureVector",
    "FetchWindow",
    "PatternFeaturizer",
    "PatternPartition",
    "PredictionRecord",
    "RepoRef",
    "RepoSummary",
    "TrainedModel",
    "build_profiles",
    "cluster_patterns",
    "comment_distance",
    "default_model",
    "extract_features",
    "gini_inequality",
    "load_model",
    "normalize_comment",
    "save_model",
    "summarize",
    "train_tree",
    "__version__",
]
