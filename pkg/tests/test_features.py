"""Distance, clustering, and inequality features, each checked against an
independent brute-force oracle."""

import itertools
import random
from functools import lru_cache

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from botscope.corpus import ContributorProfile
from botscope.features import (
    FeatureVector,
    cluster_patterns,
    comment_distance,
    extract_features,
    gini_inequality,
)


# -- oracles -----------------------------------------------------------------


def recursive_edit_distance(a, b):
    """Memoized plain-recursion edit distance, independent of the DP version."""

    @lru_cache(maxsize=None)
    def go(i, j):
        if i == len(a):
            return len(b) - j
        if j == len(b):
            return len(a) - i
        swap = go(i + 1, j + 1) + (a[i] != b[j])
        return min(swap, go(i + 1, j) + 1, go(i, j + 1) + 1)

    return go(0, 0)


def oracle_distance(a, b):
    if not a and not b:
        return 0.0
    return recursive_edit_distance(a, b) / max(len(a), len(b))


def brute_force_clusters(comments, eps):
    """Full distance matrix plus breadth-first connected components."""
    n = len(comments)
    linked = [
        [comment_distance(comments[i], comments[j]) <= eps for j in range(n)]
        for i in range(n)
    ]
    seen = [False] * n
    clusters = []
    for start in range(n):
        if seen[start]:
            continue
        queue, component = [start], []
        seen[start] = True
        while queue:
            node = queue.pop(0)
            component.append(node)
            for other in range(n):
                if linked[node][other] and not seen[other]:
                    seen[other] = True
                    queue.append(other)
        clusters.append(tuple(sorted(component)))
    clusters.sort(key=min)
    return tuple(clusters)


def profile_of(comments):
    return ContributorProfile(
        repo=None, login="someone", comments=tuple(comments), total_observed=len(comments)
    )


# -- comment_distance --------------------------------------------------------


class TestCommentDistance:
    def test_identical_strings(self):
        assert comment_distance("abc", "abc") == 0.0

    def test_empty_versus_nonempty(self):
        assert comment_distance("", "abc") == 1.0

    def test_both_empty(self):
        assert comment_distance("", "") == 0.0

    def test_kitten_sitting(self):
        assert comment_distance("kitten", "sitting") == pytest.approx(3 / 7)
        assert recursive_edit_distance("kitten", "sitting") == 3

    def test_matches_recursive_oracle_exhaustively(self):
        alphabet = "abc"
        strings = [
            "".join(p)
            for length in range(0, 4)
            for p in itertools.product(alphabet, repeat=length)
        ]
        for a in strings:
            for b in strings:
                assert comment_distance(a, b) == oracle_distance(a, b), (a, b)

    @given(
        st.text(alphabet="abcdef ", max_size=64),
        st.text(alphabet="abcdef ", max_size=64),
    )
    def test_symmetric_and_bounded(self, a, b):
        d = comment_distance(a, b)
        assert d == comment_distance(b, a)
        assert 0.0 <= d <= 1.0
        if a == b:
            assert d == 0.0
        else:
            assert d > 0.0


# -- cluster_patterns --------------------------------------------------------


class TestClusterPatterns:
    def test_near_duplicates_form_one_cluster(self):
        partition = cluster_patterns(["lgtm", "lgtm", "lgtm!"], eps=0.3)
        assert partition.clusters == ((0, 1, 2),)

    def test_distant_comments_stay_apart(self):
        partition = cluster_patterns(["alpha", "omega"], eps=0.3)
        assert partition.clusters == ((0,), (1,))
        assert comment_distance("alpha", "omega") == pytest.approx(0.8)

    def test_transitive_chaining(self):
        # d(0,1)=d(1,2)=0.25 link the ends even though d(0,2)=0.5 > eps.
        partition = cluster_patterns(["aaaa", "aaab", "aabb"], eps=0.3)
        assert partition.clusters == ((0, 1, 2),)

    def test_empty_input(self):
        assert cluster_patterns([], eps=0.3).clusters == ()

    def test_eps_validation(self):
        with pytest.raises(ValueError):
            cluster_patterns(["a"], eps=0.0)
        with pytest.raises(ValueError):
            cluster_patterns(["a"], eps=1.5)

    def test_matches_brute_force_on_random_corpora(self):
        rng = random.Random(20211201)
        alphabet = "abcdef"
        for trial in range(300):
            n = rng.randint(0, 12)
            comments = [
                "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 10)))
                for _ in range(n)
            ]
            eps = rng.choice([0.1, 0.3, 0.5, 0.7, 0.9])
            assert cluster_patterns(comments, eps).clusters == brute_force_clusters(
                comments, eps
            ), (comments, eps)

    def test_raising_eps_never_adds_clusters(self):
        rng = random.Random(7)
        for _ in range(50):
            comments = [
                "".join(rng.choice("abcd") for _ in range(rng.randint(0, 8)))
                for _ in range(rng.randint(1, 10))
            ]
            counts = [
                len(cluster_patterns(comments, eps))
                for eps in (0.1, 0.2, 0.4, 0.6, 0.8, 1.0)
            ]
            assert counts == sorted(counts, reverse=True)

    @given(
        st.lists(st.text(alphabet="abcd", max_size=8), max_size=10),
        st.sampled_from([0.2, 0.5, 0.9]),
    )
    def test_partition_covers_indices_exactly(self, comments, eps):
        partition = cluster_patterns(comments, eps)
        flattened = sorted(i for cluster in partition.clusters for i in cluster)
        assert flattened == list(range(len(comments)))
        assert [min(c) for c in partition.clusters] == sorted(
            min(c) for c in partition.clusters
        )


# -- gini_inequality ---------------------------------------------------------


class TestGiniInequality:
    def test_uniform_is_zero(self):
        assert gini_inequality([1, 1, 1]) == 0.0

    def test_singleton_is_zero(self):
        assert gini_inequality([5]) == 0.0

    def test_empty_is_zero(self):
        assert gini_inequality([]) == 0.0

    def test_pair_example(self):
        assert gini_inequality([1, 3]) == 0.25

    def test_rejects_nonpositive_sizes(self):
        with pytest.raises(ValueError):
            gini_inequality([0, 2])

    @given(st.lists(st.integers(min_value=1, max_value=50), min_size=2, max_size=12))
    def test_permutation_invariant_and_bounded(self, sizes):
        value = gini_inequality(sizes)
        assert 0.0 <= value < 1.0
        shuffled = list(sizes)
        random.Random(0).shuffle(shuffled)
        assert gini_inequality(shuffled) == pytest.approx(value)

    @given(
        st.lists(st.integers(min_value=1, max_value=30), min_size=1, max_size=10),
        st.integers(min_value=2, max_value=5),
    )
    def test_scale_invariant(self, sizes, k):
        assert gini_inequality([k * s for s in sizes]) == pytest.approx(
            gini_inequality(sizes)
        )

    @given(st.lists(st.integers(min_value=1, max_value=40), min_size=2, max_size=10))
    def test_zero_only_for_uniform(self, sizes):
        value = gini_inequality(sizes)
        if len(set(sizes)) == 1:
            assert value == 0.0
        else:
            assert value > 0.0


# -- extract_features --------------------------------------------------------


class TestExtractFeatures:
    def test_templated_bot_profile(self):
        comments = ["build passed"] * 18 + ["", ""]
        fv = extract_features(profile_of(comments), eps=0.3)
        assert fv == FeatureVector(20, 2, 2, 0.4, 0.1)

    def test_empty_profile(self):
        fv = extract_features(profile_of([]), eps=0.3)
        assert fv == FeatureVector(0, 0, 0, 0.0, 0.0)

    def test_all_distinct_comments(self):
        comments = [
            "the quick brown fox jumps",
            "a completely different remark",
            "numbers 12345 here",
            "shipping the release now",
            "docs needed for this change",
        ]
        for a, b in itertools.combinations(comments, 2):
            assert comment_distance(a, b) > 0.3
        fv = extract_features(profile_of(comments), eps=0.3)
        assert fv == FeatureVector(5, 0, 5, 0.0, 1.0)

    @given(
        st.lists(st.text(alphabet="ab d", max_size=10), max_size=15),
        st.sampled_from([0.2, 0.3, 0.6]),
    )
    def test_invariants_hold_for_arbitrary_profiles(self, comments, eps):
        fv = extract_features(profile_of(comments), eps)
        assert fv.num_comments == len(comments)
        assert 0 <= fv.num_empty <= fv.num_comments
        if fv.num_comments == 0:
            assert fv.num_patterns == 0
            assert fv.pattern_ratio == 0.0
        else:
            assert 1 <= fv.num_patterns <= fv.num_comments
            assert fv.pattern_ratio == fv.num_patterns / fv.num_comments
        assert 0.0 <= fv.gini < 1.0
