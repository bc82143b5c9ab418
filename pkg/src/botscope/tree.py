"""Binary decision tree over comment-pattern features, with JSON persistence.

Model files are JSON documents::

    {"feature_names": [...], "root": node}
    node = {"kind": "split", "feature": int, "threshold": number,
            "left": node, "right": node}
         | {"kind": "leaf", "counts": {"bot": int, "human": int}}

A sample goes left when ``feature < threshold``. Leaf class counts double as
the prediction confidence (majority count over total). Prediction ties
resolve to ``human``: flagging a human as a bot is the costlier mistake when
the point of the exercise is accrediting human contributors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

from .features import FEATURE_NAMES, FeatureVector

BOT = "bot"
HUMAN = "human"
LABELS = (BOT, HUMAN)

DEFAULT_MAX_DEPTH = 4
DEFAULT_MIN_LEAF = 2

# Hard ceiling on the depth accepted when loading a model file.
MAX_MODEL_DEPTH = 32


class ModelFormatError(ValueError):
    """Raised when a model document is malformed or violates model invariants."""


@dataclass(frozen=True)
class Leaf:
    counts: dict  # label -> non-negative count, total >= 1

    def __post_init__(self):
        unknown = set(self.counts) - set(LABELS)
        if unknown:
            raise ModelFormatError(f"leaf counts carry unknown labels: {sorted(unknown)}")
        if any(v < 0 for v in self.counts.values()):
            raise ModelFormatError("leaf counts must be non-negative")
        if sum(self.counts.values()) < 1:
            raise ModelFormatError("leaf counts must total at least 1")

    @property
    def label(self) -> str:
        bot = self.counts.get(BOT, 0)
        human = self.counts.get(HUMAN, 0)
        return BOT if bot > human else HUMAN

    @property
    def confidence(self) -> float:
        total = sum(self.counts.values())
        majority = max(self.counts.get(BOT, 0), self.counts.get(HUMAN, 0))
        return majority / total


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    left: Union["Split", Leaf]
    right: Union["Split", Leaf]

    def __post_init__(self):
        if not 0 <= self.feature < len(FEATURE_NAMES):
            raise ModelFormatError(
                f"split feature index {self.feature} outside [0, {len(FEATURE_NAMES)})"
            )


TreeNode = Union[Split, Leaf]


@dataclass(frozen=True)
class TypedPrediction:
    label: str
    confidence: float


@dataclass(frozen=True)
class TrainedModel:
    feature_names: tuple
    root: TreeNode

    def __post_init__(self):
        if tuple(self.feature_names) != FEATURE_NAMES:
            bad = [n for n in self.feature_names if n not in FEATURE_NAMES]
            detail = f"unknown feature name(s) {bad}" if bad else "wrong feature order"
            raise ModelFormatError(f"bad feature_names: {detail}")
        if tree_depth(self.root) > MAX_MODEL_DEPTH:
            raise ModelFormatError(f"tree deeper than the {MAX_MODEL_DEPTH}-level limit")

    @property
    def depth(self) -> int:
        return tree_depth(self.root)

    @property
    def leaf_count(self) -> int:
        return count_leaves(self.root)


def tree_depth(node: TreeNode) -> int:
    if isinstance(node, Leaf):
        return 0
    return 1 + max(tree_depth(node.left), tree_depth(node.right))


def count_leaves(node: TreeNode) -> int:
    if isinstance(node, Leaf):
        return 1
    return count_leaves(node.left) + count_leaves(node.right)


def default_model() -> TrainedModel:
    """Hand-authored fallback tree shipped with the package.

    The thresholds and leaf counts are authored constants of this project,
    chosen so that frequent commenters whose comments collapse into few
    patterns come out as bots; they are not fitted to any dataset.
    """
    return TrainedModel(
        feature_names=FEATURE_NAMES,
        root=Split(
            feature=0,  # num_comments
            threshold=10,
            left=Leaf({BOT: 1, HUMAN: 9}),
            right=Split(
                feature=4,  # pattern_ratio
                threshold=0.15,
                left=Leaf({BOT: 9, HUMAN: 1}),
                right=Split(
                    feature=3,  # gini
                    threshold=0.6,
                    left=Leaf({BOT: 2, HUMAN: 8}),
                    right=Split(
                        feature=2,  # num_patterns
                        threshold=6,
                        left=Leaf({BOT: 7, HUMAN: 3}),
                        right=Leaf({BOT: 3, HUMAN: 7}),
                    ),
                ),
            ),
        ),
    )


def predict(model: TrainedModel, fv: FeatureVector) -> TypedPrediction:
    """Route a feature vector to its leaf and report label plus confidence."""
    node = model.root
    while isinstance(node, Split):
        node = node.left if fv[node.feature] < node.threshold else node.right
    return TypedPrediction(label=node.label, confidence=node.confidence)


def train_tree(
    dataset: Sequence,
    max_depth: int = DEFAULT_MAX_DEPTH,
    min_leaf: int = DEFAULT_MIN_LEAF,
) -> TrainedModel:
    """Fit a tree by greedy recursive partitioning on (FeatureVector, label) pairs.

    Candidate thresholds are midpoints between consecutive distinct sorted
    values of each feature. The chosen split minimizes the weighted Gini
    impurity of its children; ties break toward the lowest feature index,
    then the lowest threshold. Recursion stops on purity, at ``max_depth``,
    or when every candidate split would leave a child with fewer than
    ``min_leaf`` samples.
    """
    if not dataset:
        raise ValueError("training dataset must be non-empty")
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    if min_leaf < 1:
        raise ValueError("min_leaf must be >= 1")
    for _, label in dataset:
        if label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}, got {label!r}")
    samples = [(fv.as_tuple(), label) for fv, label in dataset]
    root = _grow(samples, depth=0, max_depth=max_depth, min_leaf=min_leaf)
    return TrainedModel(feature_names=FEATURE_NAMES, root=root)


def _label_counts(samples) -> dict:
    counts = {BOT: 0, HUMAN: 0}
    for _, label in samples:
        counts[label] += 1
    return counts


def _gini_impurity(counts: dict) -> float:
    total = sum(counts.values())
    if total == 0:
        return 0.0
    return 1.0 - sum((c / total) ** 2 for c in counts.values())


def _grow(samples, depth: int, max_depth: int, min_leaf: int) -> TreeNode:
    counts = _label_counts(samples)
    if depth >= max_depth or min(counts.values()) == 0:
        return Leaf(counts)
    best = None  # (impurity, feature, threshold, left, right)
    n = len(samples)
    for feature in range(len(FEATURE_NAMES)):
        values = sorted({fv[feature] for fv, _ in samples})
        for low, high in zip(values, values[1:]):
            threshold = (low + high) / 2
            left = [s for s in samples if s[0][feature] < threshold]
            right = [s for s in samples if s[0][feature] >= threshold]
            if len(left) < min_leaf or len(right) < min_leaf:
                continue
            impurity = (
                len(left) / n * _gini_impurity(_label_counts(left))
                + len(right) / n * _gini_impurity(_label_counts(right))
            )
            key = (impurity, feature, threshold)
            if best is None or key < (best[0], best[1], best[2]):
                best = (impurity, feature, threshold, left, right)
    if best is None:
        return Leaf(counts)
    _, feature, threshold, left, right = best
    return Split(
        feature=feature,
        threshold=threshold,
        left=_grow(left, depth + 1, max_depth, min_leaf),
        right=_grow(right, depth + 1, max_depth, min_leaf),
    )


def model_to_doc(model: TrainedModel) -> dict:
    return {"feature_names": list(model.feature_names), "root": _node_to_doc(model.root)}


def _node_to_doc(node: TreeNode) -> dict:
    if isinstance(node, Leaf):
        return {"kind": "leaf", "counts": {k: v for k, v in node.counts.items()}}
    return {
        "kind": "split",
        "feature": node.feature,
        "threshold": node.threshold,
        "left": _node_to_doc(node.left),
        "right": _node_to_doc(node.right),
    }


def model_from_doc(doc: dict) -> TrainedModel:
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be a JSON object")
    try:
        names = doc["feature_names"]
        root_doc = doc["root"]
    except (KeyError, TypeError) as exc:
        raise ModelFormatError(f"model document missing field: {exc}") from None
    return TrainedModel(feature_names=tuple(names), root=_node_from_doc(root_doc))


def _node_from_doc(doc) -> TreeNode:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ModelFormatError("tree node must be an object with a 'kind' field")
    kind = doc["kind"]
    if kind == "leaf":
        counts = doc.get("counts")
        if not isinstance(counts, dict):
            raise ModelFormatError("leaf node requires a 'counts' object")
        return Leaf({str(k): int(v) for k, v in counts.items()})
    if kind == "split":
        try:
            return Split(
                feature=int(doc["feature"]),
                threshold=float(doc["threshold"]),
                left=_node_from_doc(doc["left"]),
                right=_node_from_doc(doc["right"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ModelFormatError):
                raise
            raise ModelFormatError(f"bad split node: {exc}") from None
    raise ModelFormatError(f"unknown node kind {kind!r}")


def save_model(model: TrainedModel, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(model_to_doc(model), handle, indent=2)
        handle.write("\n")


def load_model(path: Path) -> TrainedModel:
    path = Path(path)
    if not path.exists():
        raise ModelFormatError(f"model file not found: {path}")
    with open(path, "r", encoding="utf-8") as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{path}: not valid JSON ({exc})") from None
    return model_from_doc(doc)
