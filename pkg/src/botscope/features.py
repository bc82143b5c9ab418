"""Per-contributor classification features from comment repetition patterns.

A contributor's comments are clustered into "patterns": connected components
of the graph that links two comments whenever their length-normalized edit
distance is at most ``eps`` (single linkage). Bots tend to produce few
patterns over many comments, so the feature vector captures the pattern
count, its ratio to the comment count, and how unevenly comments concentrate
in patterns (Gini inequality of cluster sizes).

The normalized distance does not satisfy the triangle inequality, so nothing
here relies on it; clustering is plain threshold-graph traversal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import ContributorProfile

DEFAULT_EPS = 0.3

FEATURE_NAMES = ("num_comments", "num_empty", "num_patterns", "gini", "pattern_ratio")

# Loaded feature vectors carry reals rounded to 6 decimals, so derived-field
# checks allow that much slack.
_RATIO_TOLERANCE = 1e-6


@dataclass(frozen=True)
class PatternPartition:
    """Partition of comment indices into pattern clusters.

    Clusters are ordered by their smallest contained index; indices inside a
    cluster are ascending. Together they cover {0..n-1} exactly.
    """

    clusters: tuple

    @property
    def sizes(self) -> list:
        return [len(cluster) for cluster in self.clusters]

    def __len__(self) -> int:
        return len(self.clusters)


@dataclass(frozen=True)
class FeatureVector:
    """Classification features for one contributor profile."""

    num_comments: int
    num_empty: int
    num_patterns: int
    gini: float
    pattern_ratio: float

    def __post_init__(self):
        if min(self.num_comments, self.num_empty, self.num_patterns) < 0:
            raise ValueError("feature counts must be non-negative")
        if self.num_empty > self.num_comments:
            raise ValueError("num_empty cannot exceed num_comments")
        if (self.num_patterns == 0) != (self.num_comments == 0):
            raise ValueError("num_patterns must be 0 exactly when there are no comments")
        if self.num_patterns > self.num_comments:
            raise ValueError("num_patterns cannot exceed num_comments")
        if not 0.0 <= self.gini < 1.0:
            raise ValueError(f"gini must lie in [0, 1), got {self.gini}")
        if not 0.0 <= self.pattern_ratio <= 1.0:
            raise ValueError(f"pattern_ratio must lie in [0, 1], got {self.pattern_ratio}")

    def as_tuple(self) -> tuple:
        return (
            self.num_comments,
            self.num_empty,
            self.num_patterns,
            self.gini,
            self.pattern_ratio,
        )

    def __getitem__(self, index: int):
        return self.as_tuple()[index]


def comment_distance(a: str, b: str) -> float:
    """Length-normalized edit distance between two normalized comments.

    Unit-cost insert/delete/substitute distance divided by the longer length;
    0 when both strings are empty. Symmetric, 0 iff the strings are equal,
    and always within [0, 1].
    """
    if a == b:
        return 0.0
    longest = max(len(a), len(b))
    return _edit_distance(a, b) / longest


def _edit_distance(a: str, b: str) -> int:
    """Classic two-row dynamic-programming Levenshtein distance."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ch_a in enumerate(a):
        current = [i + 1]
        for j, ch_b in enumerate(b):
            insertion = previous[j + 1] + 1
            deletion = current[j] + 1
            substitution = previous[j] + (ch_a != ch_b)
            current.append(min(insertion, deletion, substitution))
        previous = current
    return previous[-1]


def cluster_patterns(comments: Sequence[str], eps: float = DEFAULT_EPS) -> PatternPartition:
    """Cluster comments into patterns by single-linkage at threshold ``eps``.

    Two comments are linked when their distance is <= eps; clusters are the
    connected components of that graph.
    """
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    n = len(comments)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            ri, rj = find(i), find(j)
            if ri == rj:
                continue
            if comment_distance(comments[i], comments[j]) <= eps:
                parent[max(ri, rj)] = min(ri, rj)

    members: dict = {}
    for i in range(n):
        members.setdefault(find(i), []).append(i)
    clusters = tuple(tuple(members[root]) for root in sorted(members))
    return PatternPartition(clusters=clusters)


def gini_inequality(sizes: Iterable[int]) -> float:
    """Gini coefficient of cluster sizes: mean absolute pairwise difference
    normalized by twice the mean. 0 for empty, singleton, or uniform inputs."""
    values = list(sizes)
    n = len(values)
    if n <= 1:
        return 0.0
    if any(v < 1 for v in values):
        raise ValueError("cluster sizes must be >= 1")
    total = sum(values)
    pair_sum = sum(abs(x - y) for x in values for y in values)
    # 2 * n^2 * mean simplifies to 2 * n * total.
    return pair_sum / (2 * n * total)


def extract_features(profile: ContributorProfile, eps: float = DEFAULT_EPS) -> FeatureVector:
    """Compute the feature vector for one contributor profile.

    Empty comments take part in clustering (they are mutually at distance 0,
    so they form a single pattern) and are also tallied in ``num_empty``.
    """
    comments = profile.comments
    num_comments = len(comments)
    if num_comments == 0:
        return FeatureVector(0, 0, 0, 0.0, 0.0)
    partition = cluster_patterns(comments, eps)
    num_patterns = len(partition)
    return FeatureVector(
        num_comments=num_comments,
        num_empty=sum(1 for c in comments if not c),
        num_patterns=num_patterns,
        gini=gini_inequality(partition.sizes),
        pattern_ratio=num_patterns / num_comments,
    )
