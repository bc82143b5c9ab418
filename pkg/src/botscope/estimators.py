"""Scikit-learn style estimators wrapping the feature and tree primitives.

These wrappers exist so the pipeline's core composes with the wider
ecosystem (``Pipeline``, ``clone``, grid search over ``eps``/``max_depth``):

    featurize = PatternFeaturizer(eps=0.3)
    clf = BotClassifier(max_depth=4).fit(featurize.transform(profiles), labels)
    clf.predict(featurize.transform(new_profiles))
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_array

from .corpus import ContributorProfile, normalize_comment
from .features import DEFAULT_EPS, FEATURE_NAMES, FeatureVector, extract_features
from .tree import (
    DEFAULT_MAX_DEPTH,
    DEFAULT_MIN_LEAF,
    TrainedModel,
    default_model,
    predict,
    train_tree,
)


def _as_profile(item) -> ContributorProfile:
    if isinstance(item, ContributorProfile):
        return item
    if isinstance(item, str):
        raise TypeError("expected a profile or a sequence of comments, got a bare string")
    comments = tuple(normalize_comment(c) for c in item)
    return ContributorProfile(
        repo=None, login="<adhoc>", comments=comments, total_observed=len(comments)
    )


def _check_feature_matrix(X) -> np.ndarray:
    X = check_array(X, dtype=float, ensure_2d=True)
    if X.shape[1] != len(FEATURE_NAMES):
        raise ValueError(
            f"expected {len(FEATURE_NAMES)} feature columns {FEATURE_NAMES}, "
            f"got {X.shape[1]}"
        )
    return X


def _row_to_vector(row: np.ndarray) -> FeatureVector:
    return FeatureVector(
        num_comments=int(row[0]),
        num_empty=int(row[1]),
        num_patterns=int(row[2]),
        gini=float(row[3]),
        pattern_ratio=float(row[4]),
    )


class PatternFeaturizer(BaseEstimator, TransformerMixin):
    """Transform contributor profiles (or raw comment lists) into the
    5-column feature matrix ``(num_comments, num_empty, num_patterns, gini,
    pattern_ratio)``.

    Stateless: ``fit`` only validates ``eps``.
    """

    def __init__(self, eps: float = DEFAULT_EPS):
        self.eps = eps

    def fit(self, X: Iterable, y=None) -> "PatternFeaturizer":
        if not 0.0 < self.eps <= 1.0:
            raise ValueError(f"eps must lie in (0, 1], got {self.eps}")
        return self

    def transform(self, X: Iterable) -> np.ndarray:
        if not 0.0 < self.eps <= 1.0:
            raise ValueError(f"eps must lie in (0, 1], got {self.eps}")
        rows = [extract_features(_as_profile(item), self.eps).as_tuple() for item in X]
        return np.asarray(rows, dtype=float).reshape(len(rows), len(FEATURE_NAMES))

    def get_feature_names_out(self, input_features=None):
        return np.asarray(FEATURE_NAMES, dtype=object)


class BotClassifier(BaseEstimator, ClassifierMixin):
    """Decision-tree bot/human classifier over the pattern feature matrix.

    ``fit`` trains a fresh tree; constructing with ``pretrained()`` or
    ``from_model()`` wraps an existing tree (e.g. the packaged default) so
    ``predict`` works without training data.
    """

    def __init__(self, max_depth: int = DEFAULT_MAX_DEPTH, min_leaf: int = DEFAULT_MIN_LEAF):
        self.max_depth = max_depth
        self.min_leaf = min_leaf

    @classmethod
    def pretrained(cls) -> "BotClassifier":
        return cls.from_model(default_model())

    @classmethod
    def from_model(cls, model: TrainedModel) -> "BotClassifier":
        clf = cls()
        clf.model_ = model
        clf.classes_ = np.asarray(sorted({"bot", "human"}))
        return clf

    def fit(self, X, y) -> "BotClassifier":
        X = _check_feature_matrix(X)
        labels = [str(label) for label in y]
        if len(labels) != X.shape[0]:
            raise ValueError(f"X has {X.shape[0]} rows but y has {len(labels)} labels")
        dataset = [(_row_to_vector(row), label) for row, label in zip(X, labels)]
        self.model_ = train_tree(dataset, max_depth=self.max_depth, min_leaf=self.min_leaf)
        self.classes_ = np.asarray(sorted(set(labels)))
        return self

    def predict(self, X) -> np.ndarray:
        return np.asarray([p.label for p in self.predict_detailed(X)], dtype=object)

    def predict_confidence(self, X) -> np.ndarray:
        """Majority share at the deciding leaf for each row."""
        return np.asarray([p.confidence for p in self.predict_detailed(X)], dtype=float)

    def predict_detailed(self, X) -> list:
        if not hasattr(self, "model_"):
            raise ValueError("classifier is not fitted; call fit() or use pretrained()")
        X = _check_feature_matrix(X)
        return [predict(self.model_, _row_to_vector(row)) for row in X]


def classify_profiles(
    profiles: Sequence[ContributorProfile],
    model: Optional[TrainedModel] = None,
    eps: float = DEFAULT_EPS,
) -> list:
    """Convenience composition: profiles -> features -> tree predictions.

    Returns ``(profile, FeatureVector, TypedPrediction)`` triples.
    """
    model = model if model is not None else default_model()
    out = []
    for profile in profiles:
        fv = extract_features(profile, eps)
        out.append((profile, fv, predict(model, fv)))
    return out
