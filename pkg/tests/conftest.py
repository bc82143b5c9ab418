"""Shared fixtures: record builders and a scriptable in-process GitHub mock."""

from __future__ import annotations

import json
import threading
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

import pytest

from botscope.records import ActivityComment, FetchWindow, RepoRef


def utc(year, month, day, hour=0, minute=0, second=0):
    return datetime(year, month, day, hour, minute, second, tzinfo=timezone.utc)


@pytest.fixture
def repo():
    return RepoRef(owner="acme", name="turbine")


@pytest.fixture
def window():
    return FetchWindow(since=utc(2021, 12, 1), until=utc(2022, 2, 1))


def make_comment(repo, comment_id, author="alice", body="looks good", kind="issue",
                 number=1, created_at=None):
    return ActivityComment(
        repo=repo,
        kind=kind,
        number=number,
        comment_id=comment_id,
        author=author,
        created_at=created_at or utc(2021, 12, 10, 12, 0, comment_id % 60),
        body=body,
    )


def issue_comment_doc(repo, comment_id, author="alice", body="looks good",
                      number=1, created_at="2021-12-10T12:00:00Z", is_pr=False,
                      deleted_author=False):
    kind_path = "pull" if is_pr else "issues"
    return {
        "id": comment_id,
        "user": None if deleted_author else {"login": author},
        "body": body,
        "created_at": created_at,
        "html_url": f"https://example.test/{repo}/{kind_path}/{number}#issuecomment-{comment_id}",
        "issue_url": f"https://example.test/repos/{repo}/issues/{number}",
    }


def review_comment_doc(repo, comment_id, author="alice", body="nit: rename",
                       number=1, created_at="2021-12-10T12:00:00Z"):
    return {
        "id": comment_id,
        "user": {"login": author},
        "body": body,
        "created_at": created_at,
        "html_url": f"https://example.test/{repo}/pull/{number}#discussion_r{comment_id}",
        "pull_request_url": f"https://example.test/repos/{repo}/pulls/{number}",
    }


class MockGithub:
    """Stdlib HTTP server emulating the two comment listings.

    ``scripted`` responses (status, headers, body) are served first, in
    order, before normal routing; every request is logged.
    """

    def __init__(self):
        self.issue_comments = []
        self.review_comments = []
        self.scripted = []
        self.requests = []
        self.use_link_header = True
        self._server = None
        self._thread = None

    @property
    def request_count(self):
        return len(self.requests)

    def start(self):
        mock = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_GET(self):
                parsed = urlparse(self.path)
                query = {k: v[0] for k, v in parse_qs(parsed.query).items()}
                mock.requests.append((parsed.path, query))
                if mock.scripted:
                    status, headers, body = mock.scripted.pop(0)
                    self._reply(status, headers, body)
                    return
                if parsed.path.endswith("/issues/comments"):
                    data = mock.issue_comments
                elif parsed.path.endswith("/pulls/comments"):
                    data = mock.review_comments
                else:
                    self._reply(404, {}, json.dumps({"message": "Not Found"}))
                    return
                page = int(query.get("page", "1"))
                per_page = int(query.get("per_page", "30"))
                start = (page - 1) * per_page
                chunk = data[start : start + per_page]
                headers = {"X-RateLimit-Remaining": "4999"}
                if mock.use_link_header and start + per_page < len(data):
                    host = self.headers["Host"]
                    next_url = (
                        f"http://{host}{parsed.path}?page={page + 1}&per_page={per_page}"
                    )
                    headers["Link"] = f'<{next_url}>; rel="next"'
                self._reply(200, headers, json.dumps(chunk))

            def _reply(self, status, headers, body):
                payload = body.encode("utf-8")
                self.send_response(status)
                for key, value in headers.items():
                    self.send_header(key, value)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    @property
    def base_url(self):
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    def stop(self):
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()


@pytest.fixture
def mock_github():
    server = MockGithub().start()
    yield server
    server.stop()
