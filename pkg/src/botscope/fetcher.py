"""GitHub REST client for issue and pull-request comments.

Retrieval walks the paginated ``/repos/{owner}/{name}/issues/comments`` and
``/repos/{owner}/{name}/pulls/comments`` listings, honoring the
``X-RateLimit-Remaining`` / ``X-RateLimit-Reset`` headers, retrying
transient server errors with exponential backoff, and optionally caching
every successful response body on disk keyed by a hash of the canonical
request URL. A repeat run against a warm cache issues zero network requests.

The window filter is applied client-side on ``created_at``; when a listing
is served newest-first, retrieval stops as soon as a whole page falls before
the window start.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Mapping, Optional
from urllib.parse import urlencode

import requests

from .records import (
    ACTIVITY_KINDS,
    GHOST_LOGIN,
    ISSUE,
    PULL_REQUEST,
    ActivityComment,
    FetchWindow,
    RepoRef,
    parse_timestamp,
)

logger = logging.getLogger(__name__)

DEFAULT_BASE_URL = "https://api.github.com"
DEFAULT_PER_PAGE = 100
DEFAULT_MAX_RETRIES = 5

PROCEED = "proceed"
WAIT = "wait"
ABORT = "abort"

# Transient statuses worth retrying; 4xx others are handled by the caller.
_RETRYABLE_SERVER = frozenset({500, 502, 503, 504})
_RATE_LIMIT_STATUSES = frozenset({403, 429})
_BACKOFF_CAP_SECONDS = 60.0


class FetchError(Exception):
    """Base class for retrieval failures."""


class AuthenticationError(FetchError):
    """The token was rejected or lacks access."""


class RepositoryNotFoundError(FetchError):
    """The repository does not exist (or is invisible to this token)."""


class RateLimitExceededError(FetchError):
    """Retry budget exhausted while rate limited or erroring."""


class MalformedResponseError(FetchError):
    """The response payload was not the expected JSON shape."""


@dataclass(frozen=True)
class ThrottleDecision:
    action: str
    wait_seconds: float = 0.0

    def __post_init__(self):
        if self.action not in (PROCEED, WAIT, ABORT):
            raise ValueError(f"bad throttle action {self.action!r}")
        if self.action == WAIT and self.wait_seconds <= 0:
            raise ValueError("wait duration must be positive")


def plan_throttle(
    status: int,
    rate_headers: Mapping[str, str],
    attempt: int,
    now: datetime,
    max_retries: int = DEFAULT_MAX_RETRIES,
) -> ThrottleDecision:
    """Decide whether a request should proceed, wait and retry, or abort.

    Total over all inputs: successful and non-retryable statuses proceed;
    rate-limit exhaustion (remaining 0 plus a reset header) waits until the
    reset plus a 1 s safety margin; transient server errors wait 2^attempt
    seconds capped at 60; anything retryable past the budget aborts.
    """
    headers = {k.lower(): v for k, v in rate_headers.items()}
    rate_limited = (
        status in _RATE_LIMIT_STATUSES
        and headers.get("x-ratelimit-remaining") == "0"
        and "x-ratelimit-reset" in headers
    )
    retryable = rate_limited or status in _RETRYABLE_SERVER
    if not retryable:
        return ThrottleDecision(PROCEED)
    if attempt >= max_retries:
        return ThrottleDecision(ABORT)
    if rate_limited:
        try:
            reset = int(headers["x-ratelimit-reset"])
        except ValueError:
            return ThrottleDecision(WAIT, wait_seconds=1.0)
        now_epoch = now.replace(tzinfo=now.tzinfo or timezone.utc).timestamp()
        return ThrottleDecision(WAIT, wait_seconds=max(reset - now_epoch + 1.0, 1.0))
    return ThrottleDecision(WAIT, wait_seconds=min(float(2**attempt), _BACKOFF_CAP_SECONDS))


class ResponseCache:
    """One JSON file per request, named by a SHA-256 of the canonical URL."""

    def __init__(self, directory: Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path_for(self, url: str) -> Path:
        digest = hashlib.sha256(url.encode("utf-8")).hexdigest()
        return self.directory / f"{digest}.json"

    def get(self, url: str) -> Optional[dict]:
        path = self._path_for(url)
        if not path.exists():
            return None
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)

    def put(self, url: str, status: int, headers: Mapping[str, str], body: str) -> None:
        entry = {
            "url": url,
            "status": status,
            "headers": {k.lower(): v for k, v in headers.items() if k.lower() == "link"},
            "body": body,
        }
        with open(self._path_for(url), "w", encoding="utf-8") as handle:
            json.dump(entry, handle)


class GithubCommentClient:
    """Fetches issue/PR comments with pagination, throttling, and caching.

    ``sleeper`` and ``clock`` are injectable so tests can compute planned
    waits without actually sleeping.
    """

    def __init__(
        self,
        token: str,
        base_url: str = DEFAULT_BASE_URL,
        cache_dir: Optional[Path] = None,
        per_page: int = DEFAULT_PER_PAGE,
        max_retries: int = DEFAULT_MAX_RETRIES,
        session: Optional[requests.Session] = None,
        sleeper: Optional[Callable[[float], None]] = None,
        clock: Optional[Callable[[], datetime]] = None,
    ):
        if not token:
            raise AuthenticationError("a non-empty API token is required")
        self.base_url = base_url.rstrip("/")
        self.cache = ResponseCache(cache_dir) if cache_dir else None
        self.per_page = per_page
        self.max_retries = max_retries
        self.sleeper = sleeper if sleeper is not None else time.sleep
        self.clock = clock if clock is not None else (lambda: datetime.now(timezone.utc))
        self.network_requests = 0
        self.session = session or requests.Session()
        self.session.headers.update(
            {
                "Accept": "application/vnd.github+json",
                "Authorization": f"Bearer {token}",
                "User-Agent": "botscope",
            }
        )

    # -- request plumbing ---------------------------------------------------

    def _canonical_url(self, path: str, params: Mapping[str, object]) -> str:
        query = urlencode(sorted((k, str(v)) for k, v in params.items()))
        return f"{self.base_url}{path}?{query}"

    def _get(self, url: str) -> dict:
        """GET with caching and throttling; returns {status, headers, body}."""
        if self.cache is not None:
            cached = self.cache.get(url)
            if cached is not None:
                return cached
        attempt = 0
        while True:
            self.network_requests += 1
            response = self.session.get(url)
            decision = plan_throttle(
                response.status_code,
                response.headers,
                attempt,
                self.clock(),
                max_retries=self.max_retries,
            )
            if decision.action == WAIT:
                logger.info(
                    "retrying %s after %.1fs (status %s, attempt %d)",
                    url,
                    decision.wait_seconds,
                    response.status_code,
                    attempt,
                )
                self.sleeper(decision.wait_seconds)
                attempt += 1
                continue
            if decision.action == ABORT:
                raise RateLimitExceededError(
                    f"gave up on {url} after {attempt} retries (status {response.status_code})"
                )
            status = response.status_code
            if status in (401, 403):
                raise AuthenticationError(f"GitHub rejected the credentials ({status}) for {url}")
            if status == 404:
                raise RepositoryNotFoundError(f"not found: {url}")
            if status != 200:
                raise FetchError(f"unexpected status {status} for {url}")
            entry = {
                "url": url,
                "status": status,
                "headers": {k.lower(): v for k, v in response.headers.items()},
                "body": response.text,
            }
            if self.cache is not None:
                self.cache.put(url, status, response.headers, response.text)
            return entry

    def _pages(self, path: str, window: FetchWindow) -> Iterable[list]:
        """Yield parsed page payloads, following Link headers when present and
        falling back to page-number increments otherwise."""
        page = 1
        url = self._canonical_url(path, {"per_page": self.per_page, "page": page})
        while url is not None:
            entry = self._get(url)
            try:
                payload = json.loads(entry["body"])
            except json.JSONDecodeError as exc:
                raise MalformedResponseError(f"{url}: body is not JSON ({exc})") from None
            if not isinstance(payload, list):
                raise MalformedResponseError(f"{url}: expected a JSON array")
            if not payload:
                return
            yield payload
            if self._served_newest_first(payload) and self._page_before_window(payload, window):
                return
            link = entry["headers"].get("link", "")
            if link:
                url = _next_link(link)
            elif len(payload) == self.per_page:
                page += 1
                url = self._canonical_url(path, {"per_page": self.per_page, "page": page})
            else:
                url = None

    @staticmethod
    def _served_newest_first(payload: list) -> bool:
        stamps = [item.get("created_at") for item in payload if isinstance(item, dict)]
        stamps = [s for s in stamps if s]
        return len(stamps) >= 2 and stamps == sorted(stamps, reverse=True)

    @staticmethod
    def _page_before_window(payload: list, window: FetchWindow) -> bool:
        try:
            newest = max(parse_timestamp(item["created_at"]) for item in payload)
        except (KeyError, ValueError, TypeError):
            return False
        return newest < window.since

    # -- comment retrieval --------------------------------------------------

    def fetch_comments(
        self,
        repo: RepoRef,
        window: FetchWindow,
        kinds: Iterable[str] = ACTIVITY_KINDS,
        include_review_comments: bool = True,
    ) -> list:
        """Fetch every comment of the requested kinds with created_at inside
        the window, deduplicated by comment id and sorted by creation time."""
        kinds = set(kinds)
        if not kinds:
            raise ValueError("at least one activity kind is required")
        unknown = kinds - set(ACTIVITY_KINDS)
        if unknown:
            raise ValueError(f"unknown activity kinds: {sorted(unknown)}")

        by_id: dict = {}
        issue_path = f"/repos/{repo.owner}/{repo.name}/issues/comments"
        for payload in self._pages(issue_path, window):
            for item in payload:
                comment = self._parse_issue_comment(repo, item)
                if comment.kind in kinds and window.contains(comment.created_at):
                    by_id[comment.comment_id] = comment
        if PULL_REQUEST in kinds and include_review_comments:
            review_path = f"/repos/{repo.owner}/{repo.name}/pulls/comments"
            for payload in self._pages(review_path, window):
                for item in payload:
                    comment = self._parse_review_comment(repo, item)
                    if window.contains(comment.created_at):
                        by_id.setdefault(comment.comment_id, comment)
        return sorted(by_id.values(), key=lambda c: (c.created_at, c.comment_id))

    def _parse_issue_comment(self, repo: RepoRef, item: dict) -> ActivityComment:
        html_url = _require(item, "html_url")
        kind = PULL_REQUEST if "/pull/" in html_url else ISSUE
        number = _trailing_number(_require(item, "issue_url"))
        return self._build_comment(repo, item, kind, number)

    def _parse_review_comment(self, repo: RepoRef, item: dict) -> ActivityComment:
        number = _trailing_number(_require(item, "pull_request_url"))
        return self._build_comment(repo, item, PULL_REQUEST, number)

    def _build_comment(
        self, repo: RepoRef, item: dict, kind: str, number: int
    ) -> ActivityComment:
        user = item.get("user") or {}
        author = user.get("login") or GHOST_LOGIN
        try:
            return ActivityComment(
                repo=repo,
                kind=kind,
                number=number,
                comment_id=int(_require(item, "id")),
                author=author,
                created_at=parse_timestamp(_require(item, "created_at")),
                body=item.get("body") or "",
            )
        except ValueError as exc:
            raise MalformedResponseError(f"bad comment object: {exc}") from None


def _require(item: dict, field: str):
    try:
        value = item[field]
    except (KeyError, TypeError):
        raise MalformedResponseError(f"comment object missing {field!r}") from None
    if value is None:
        raise MalformedResponseError(f"comment object has null {field!r}")
    return value


def _trailing_number(url: str) -> int:
    tail = url.rstrip("/").rsplit("/", 1)[-1]
    try:
        return int(tail)
    except ValueError:
        raise MalformedResponseError(f"cannot extract issue/PR number from {url!r}") from None


def _next_link(link_header: str) -> Optional[str]:
    """Extract the rel="next" target from a Link header, if any."""
    for part in link_header.split(","):
        section = part.split(";")
        if len(section) < 2:
            continue
        url = section[0].strip().strip("<>")
        if any(s.strip() == 'rel="next"' for s in section[1:]):
            return url
    return None


def fetch_comments(
    repo: RepoRef,
    token: str,
    window: FetchWindow,
    kinds: Iterable[str] = ACTIVITY_KINDS,
    cache_dir: Optional[Path] = None,
    base_url: str = DEFAULT_BASE_URL,
    include_review_comments: bool = True,
    **client_kwargs,
) -> list:
    """Module-level convenience wrapper around :class:`GithubCommentClient`."""
    client = GithubCommentClient(
        token=token, base_url=base_url, cache_dir=cache_dir, **client_kwargs
    )
    return client.fetch_comments(
        repo, window, kinds=kinds, include_review_comments=include_review_comments
    )
