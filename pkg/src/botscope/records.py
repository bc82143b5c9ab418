"""Domain records shared across the pipeline: repositories, time windows, comments."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone

ISSUE = "issue"
PULL_REQUEST = "pull_request"
ACTIVITY_KINDS = (ISSUE, PULL_REQUEST)

# Login assigned to comments whose author account was deleted.
GHOST_LOGIN = "ghost"


@dataclass(frozen=True, order=True)
class RepoRef:
    """A GitHub repository identified by owner and name."""

    owner: str
    name: str

    def __post_init__(self):
        for field in (self.owner, self.name):
            if not field:
                raise ValueError("repository owner and name must be non-empty")
            if "/" in field:
                raise ValueError(f"repository owner/name may not contain '/': {field!r}")

    @property
    def full_name(self) -> str:
        return f"{self.owner}/{self.name}"

    @classmethod
    def parse(cls, text: str) -> "RepoRef":
        """Parse an ``owner/name`` string."""
        parts = text.split("/")
        if len(parts) != 2:
            raise ValueError(f"expected OWNER/NAME, got {text!r}")
        return cls(owner=parts[0], name=parts[1])

    def __str__(self) -> str:
        return self.full_name


@dataclass(frozen=True)
class FetchWindow:
    """Half-open UTC time window [since, until)."""

    since: datetime
    until: datetime

    def __post_init__(self):
        object.__setattr__(self, "since", ensure_utc(self.since))
        object.__setattr__(self, "until", ensure_utc(self.until))
        if not self.since < self.until:
            raise ValueError("window requires since < until")

    def contains(self, when: datetime) -> bool:
        return self.since <= ensure_utc(when) < self.until


@dataclass(frozen=True)
class ActivityComment:
    """One issue or pull-request comment event."""

    repo: RepoRef
    kind: str
    number: int
    comment_id: int
    author: str
    created_at: datetime
    body: str

    def __post_init__(self):
        if self.kind not in ACTIVITY_KINDS:
            raise ValueError(f"kind must be one of {ACTIVITY_KINDS}, got {self.kind!r}")
        if self.number <= 0:
            raise ValueError("issue/PR number must be positive")
        if not self.author:
            raise ValueError("author login must be non-empty")
        object.__setattr__(self, "created_at", ensure_utc(self.created_at))


def ensure_utc(when: datetime) -> datetime:
    """Interpret naive datetimes as UTC and convert aware ones to UTC."""
    if when.tzinfo is None:
        return when.replace(tzinfo=timezone.utc)
    return when.astimezone(timezone.utc)


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO-8601 timestamp (``Z`` suffix or explicit offset) to UTC."""
    raw = text.strip()
    if raw.endswith("Z") or raw.endswith("z"):
        raw = raw[:-1] + "+00:00"
    try:
        parsed = datetime.fromisoformat(raw)
    except ValueError:
        raise ValueError(f"not an ISO-8601 timestamp: {text!r}") from None
    return ensure_utc(parsed)


def format_timestamp(when: datetime) -> str:
    """Render a UTC timestamp as ISO-8601 with ``Z`` suffix.

    Sub-second precision is kept only when present, so formatting is the
    exact inverse of :func:`parse_timestamp` on its own output.
    """
    when = ensure_utc(when)
    if when.microsecond:
        return when.strftime("%Y-%m-%dT%H:%M:%S.%fZ")
    return when.strftime("%Y-%m-%dT%H:%M:%SZ")
