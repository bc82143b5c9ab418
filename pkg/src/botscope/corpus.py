"""Activity CSV dataset, comment normalization, and per-contributor profiles.

The activity CSV is the hand-off format between the fetch and predict stages:
header ``repository,activity_type,number,author,created_at,body``, comma
delimited, double-quote quoting with quote doubling, UTF-8, ``\\n`` line
endings. Bodies round-trip byte-exactly, including embedded commas, quotes
and newlines.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from .records import (
    ActivityComment,
    FetchWindow,
    RepoRef,
    format_timestamp,
    parse_timestamp,
)

ACTIVITY_HEADER = ["repository", "activity_type", "number", "author", "created_at", "body"]

DEFAULT_COMMENT_CAP = 100


class ActivityCsvError(ValueError):
    """Raised when an activity CSV is missing, has a bad header, or a bad row."""


@dataclass(frozen=True)
class ContributorProfile:
    """One account's windowed, capped set of normalized comments in one repo.

    ``comments`` are ordered most recent first and truncated to the cap;
    ``total_observed`` counts the in-window comments before truncation.
    """

    repo: RepoRef
    login: str
    comments: tuple
    total_observed: int

    def __post_init__(self):
        if not self.login:
            raise ValueError("profile login must be non-empty")
        if self.total_observed < len(self.comments):
            raise ValueError("total_observed cannot be below the kept comment count")


def normalize_comment(body: str) -> str:
    """Lowercase, trim, and collapse all internal whitespace runs to single spaces."""
    return " ".join(body.lower().split())


def write_activity_csv(records: Iterable[ActivityComment], destination: Path) -> None:
    """Write comment records to ``destination`` in the activity CSV format."""
    with open(destination, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(ACTIVITY_HEADER)
        for record in records:
            writer.writerow(
                [
                    record.repo.full_name,
                    record.kind,
                    record.number,
                    record.author,
                    format_timestamp(record.created_at),
                    record.body,
                ]
            )


def read_activity_csv(source: Path) -> list:
    """Read an activity CSV back into comment records.

    Inverse of :func:`write_activity_csv` on its own output. Errors name the
    1-based line number of the offending row.
    """
    source = Path(source)
    if not source.exists():
        raise ActivityCsvError(f"activity CSV not found: {source}")
    records = []
    with open(source, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ActivityCsvError(f"{source}: empty file, expected header") from None
        if header != ACTIVITY_HEADER:
            raise ActivityCsvError(
                f"{source}: bad header {header!r}, expected {ACTIVITY_HEADER!r}"
            )
        for row in reader:
            line = reader.line_num
            if len(row) != len(ACTIVITY_HEADER):
                raise ActivityCsvError(
                    f"{source}:{line}: expected {len(ACTIVITY_HEADER)} fields, got {len(row)}"
                )
            repo_text, kind, number_text, author, created_text, body = row
            try:
                repo = RepoRef.parse(repo_text)
                number = int(number_text)
                created_at = parse_timestamp(created_text)
                record = ActivityComment(
                    repo=repo,
                    kind=kind,
                    number=number,
                    comment_id=line - 1,
                    author=author,
                    created_at=created_at,
                    body=body,
                )
            except ValueError as exc:
                raise ActivityCsvError(f"{source}:{line}: {exc}") from None
            records.append(record)
    return records


def build_profiles(
    records: Iterable[ActivityComment],
    window: Optional[FetchWindow] = None,
    cap: int = DEFAULT_COMMENT_CAP,
) -> list:
    """Group comments into per-(repo, author) profiles.

    Keeps only comments inside ``window`` (all comments when ``window`` is
    None), normalizes bodies, orders them most recent first (ties broken by
    comment_id descending), and truncates to ``cap``. Profiles are returned
    sorted by repository then login.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    grouped: dict = {}
    for record in records:
        if window is not None and not window.contains(record.created_at):
            continue
        grouped.setdefault((record.repo, record.author), []).append(record)
    profiles = []
    for (repo, login), group in sorted(
        grouped.items(), key=lambda item: (item[0][0].full_name, item[0][1])
    ):
        group.sort(key=lambda r: (r.created_at, r.comment_id), reverse=True)
        comments = tuple(normalize_comment(r.body) for r in group[:cap])
        profiles.append(
            ContributorProfile(
                repo=repo,
                login=login,
                comments=comments,
                total_observed=len(group),
            )
        )
    return profiles
