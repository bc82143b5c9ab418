#!/usr/bin/env python3
"""Regenerate the bundled test fixtures (deterministic, seeded).

Produces under tests/fixtures/:
  comments.csv              synthetic activity corpus: one repo, 12 contributors,
                            3 planted bots (>=20 comments each from <=3 templates,
                            <=15% character perturbation) and 9 humans whose
                            comments sit pairwise farther than 0.3 apart
  expected_predictions.csv  golden `predict` output for comments.csv at defaults
  aggregate_predictions.csv multi-repo predictions used by the report fixtures
                            (37 contributors / 6 bots, 24 / 8, 6 / 2)

The script validates every planted property with the production distance
function and the real pipeline before writing anything, so a regeneration
that would break the acceptance suite fails here instead.
"""

import itertools
import random
import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from botscope.cli import predict_records
from botscope.corpus import normalize_comment, write_activity_csv
from botscope.features import FeatureVector, comment_distance
from botscope.records import ActivityComment, RepoRef
from botscope.store import PredictionRecord, persist_predictions
from botscope.tree import default_model

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
REPO = RepoRef(owner="acme", name="turbine")
SEED = 20211201

BOT_TEMPLATES = {
    "ci-badger": [
        "build #{} succeeded on linux-x86_64 in 14m32s, artifacts uploaded",
        "build #{} failed: step 'unit tests' exited with code 1, see logs",
        "coverage report for #{}: 84.2% lines, 71.9% branches, no regression",
    ],
    "merge-marmot": [
        "merging #{} into main now that all required checks have passed",
        "cannot merge #{}: branch is out of date with the base branch, please rebase",
    ],
    "greet-gopher": [
        "welcome @contributor{}! thanks for opening your first issue, a maintainer will triage it soon",
        "thanks for the pull request #{}! please make sure you have signed the cla",
        "closing #{} as stale: there has been no activity for 60 days",
    ],
}

HUMAN_WORDS = (
    "approach benchmark cache decode encode fallback guard helper invariant jitter "
    "kernel lookup metrics nudge offset parser queue retry schema timeout upgrade "
    "vector warning yield zeroing buffer checksum dispatch eviction flamegraph "
    "goroutine handshake iterator journal keyspace latency mutex namespace overflow "
    "pipeline quorum refactor snapshot transaction unwind validator watchdog"
).split()

HUMAN_OPENERS = (
    "i think we should", "after profiling this,", "not convinced that", "could you also",
    "on second thought,", "the regression comes from", "let's split out", "be careful:",
    "for what it's worth,", "once this lands,", "reading the diff,", "strictly speaking,",
)


def perturb(rng, template):
    """Apply at most 15% single-character edits, verified against the template."""
    budget = max(1, int(len(template) * 0.15) - 1)
    while True:
        chars = list(template)
        for _ in range(rng.randint(1, budget)):
            op = rng.choice(("sub", "ins", "del"))
            pos = rng.randrange(len(chars))
            letter = rng.choice("abcdefghijklmnopqrstuvwxyz0123456789")
            if op == "sub":
                chars[pos] = letter
            elif op == "ins":
                chars.insert(pos, letter)
            elif len(chars) > 4:
                del chars[pos]
        candidate = "".join(chars)
        if comment_distance(normalize_comment(candidate), normalize_comment(template)) <= 0.15:
            return candidate


def bot_comments(rng, login):
    """>=20 comments per bot: for each template, several exact copies plus
    perturbed variants, so single-linkage keeps one pattern per template."""
    comments = []
    templates = BOT_TEMPLATES[login]
    per_template = max(8, -(-21 // len(templates)))
    for template in templates:
        filled = template.format(rng.randint(100, 999))
        copies = [template.format(rng.randint(100, 999)) for _ in range(per_template // 2)]
        variants = [perturb(rng, filled) for _ in range(per_template - len(copies))]
        comments.extend(copies + variants)
    # Distinct numeric ids keep exact copies within 0.15 of each other.
    for a, b in itertools.combinations(range(len(comments)), 2):
        same_template = a // per_template == b // per_template
        d = comment_distance(normalize_comment(comments[a]), normalize_comment(comments[b]))
        if same_template:
            assert d <= 0.3, (login, comments[a], comments[b], d)
        else:
            assert d > 0.3, (login, comments[a], comments[b], d)
    return comments


def human_comments(rng, count):
    """Diverse comments, pairwise normalized distance strictly above 0.3."""
    comments = []
    attempts = 0
    while len(comments) < count:
        attempts += 1
        assert attempts < 10_000, "could not build a diverse comment set"
        opener = rng.choice(HUMAN_OPENERS)
        words = rng.sample(HUMAN_WORDS, rng.randint(3, 7))
        candidate = f"{opener} {' '.join(words)}"
        if rng.random() < 0.25:
            candidate += f", see issue #{rng.randint(10, 99)}"
        normalized = normalize_comment(candidate)
        if all(
            comment_distance(normalized, normalize_comment(existing)) > 0.3
            for existing in comments
        ):
            comments.append(candidate)
    return comments


def build_corpus():
    rng = random.Random(SEED)
    start = datetime(2021, 12, 1, 8, 0, 0, tzinfo=timezone.utc)
    contributors = {}
    for login in BOT_TEMPLATES:
        contributors[login] = bot_comments(rng, login)
    for index in range(9):
        login = f"dev-{'abcdefghi'[index]}"
        contributors[login] = human_comments(rng, rng.randint(10, 12))

    records = []
    comment_id = 5000
    for login, comments in contributors.items():
        for i, body in enumerate(comments):
            comment_id += 1
            records.append(
                ActivityComment(
                    repo=REPO,
                    kind="pull_request" if (comment_id % 3 == 0) else "issue",
                    number=1 + comment_id % 28,
                    comment_id=comment_id,
                    author=login,
                    created_at=start + timedelta(hours=(comment_id * 7) % 1400),
                    body=body,
                )
            )
    records.sort(key=lambda r: (r.created_at, r.comment_id))
    return records


def audit_predictions(records):
    predictions = predict_records(records, default_model())
    got = {p.login: p.effective for p in predictions}
    for login in BOT_TEMPLATES:
        assert got[login] == "bot", (login, got[login])
    humans = [login for login in got if login.startswith("dev-")]
    assert len(humans) == 9
    misses = [login for login in humans if got[login] != "human"]
    assert not misses, f"humans misclassified: {misses}"
    return predictions


def aggregate_rows():
    rng = random.Random(SEED + 1)
    rows = []
    for repo_name, bots, humans in [
        ("paritytech/substrate", 6, 31),
        ("diem/diem", 8, 16),
        ("servo/servo", 2, 4),
    ]:
        repo = RepoRef.parse(repo_name)
        for i in range(bots):
            n = rng.randint(25, 90)
            patterns = rng.randint(2, 4)
            rows.append(
                PredictionRecord(
                    repo=repo,
                    login=f"{repo.name}-bot-{i}",
                    features=FeatureVector(
                        n, rng.randint(0, 2), patterns,
                        round(rng.uniform(0.3, 0.55), 6), round(patterns / n, 6),
                    ),
                    predicted="bot",
                    confidence=0.9,
                )
            )
        for i in range(humans):
            n = rng.randint(10, 60)
            patterns = rng.randint(int(n * 0.7), n)
            rows.append(
                PredictionRecord(
                    repo=repo,
                    login=f"{repo.name}-dev-{i}",
                    features=FeatureVector(
                        n, 0, patterns,
                        round(rng.uniform(0.0, 0.2), 6), round(patterns / n, 6),
                    ),
                    predicted="human",
                    confidence=rng.choice([0.7, 0.8, 0.9]),
                )
            )
    rows.sort(key=lambda r: r.key)
    return rows


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    corpus_records = build_corpus()
    predictions = audit_predictions(corpus_records)
    write_activity_csv(corpus_records, FIXTURES / "comments.csv")
    persist_predictions(predictions, FIXTURES / "expected_predictions.csv")
    persist_predictions(aggregate_rows(), FIXTURES / "aggregate_predictions.csv")
    print(f"wrote {len(corpus_records)} comments for {len(set(r.author for r in corpus_records))} contributors")
    print(f"wrote {len(predictions)} golden predictions")


if __name__ == "__main__":
    main()
