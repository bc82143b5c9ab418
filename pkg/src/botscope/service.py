"""HTTP review service: browse predictions, rectify types, persist overrides.

Single source of truth is the predictions CSV. Overrides are serialized
through one writer lock and persisted atomically before the response goes
out, so every successful POST survives a service restart. Reads always see
the latest committed snapshot (record lists are immutable; mutation swaps
the whole list).

The service is an operator tool for a trusted host: it has no
authentication and allows all CORS origins.
"""

from __future__ import annotations

import os
import tempfile
import threading
from pathlib import Path
from typing import Literal, Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import store
from .corpus import build_profiles, read_activity_csv
from .records import RepoRef

MAX_SAMPLE_COMMENTS = 5


class OverrideRequest(BaseModel):
    repository: str
    login: str
    type: Literal["bot", "human", "clear"]


class PredictionStore:
    """Thread-safe view over a predictions CSV plus optional sample comments."""

    def __init__(self, predictions_path: Path, activity_path: Optional[Path] = None):
        self.predictions_path = Path(predictions_path)
        self._records = store.load_predictions(self.predictions_path)
        self._write_lock = threading.Lock()
        self._samples = self._load_samples(activity_path) if activity_path else {}

    @staticmethod
    def _load_samples(activity_path: Path) -> dict:
        profiles = build_profiles(read_activity_csv(activity_path), window=None)
        return {
            (profile.repo.full_name, profile.login): list(
                profile.comments[:MAX_SAMPLE_COMMENTS]
            )
            for profile in profiles
        }

    @property
    def records(self) -> list:
        return self._records

    def summaries(self) -> list:
        return [summary.as_doc() for summary in store.summarize(self._records)]

    def contributors(
        self,
        repo: RepoRef,
        type_filter: Optional[str] = None,
        sort: str = "login",
    ) -> list:
        rows = [record for record in self._records if record.repo == repo]
        if not rows:
            raise KeyError(repo.full_name)
        if type_filter:
            rows = [record for record in rows if record.effective == type_filter]
        if sort == "confidence":
            rows.sort(key=lambda r: (-r.confidence, r.login))
        else:
            rows.sort(key=lambda r: r.login)
        docs = []
        for record in rows:
            doc = store.record_to_doc(record)
            doc["samples"] = self._samples.get(record.key, [])
            docs.append(doc)
        return docs

    def set_override(self, repo: RepoRef, login: str, action: str) -> dict:
        """Apply one override, persist the full CSV atomically, and return
        the updated record document."""
        with self._write_lock:
            updated = store.apply_override(self._records, repo, login, action)
            self._persist(updated)
            self._records = updated
        target = (repo.full_name, login)
        record = next(r for r in updated if r.key == target)
        doc = store.record_to_doc(record)
        doc["samples"] = self._samples.get(record.key, [])
        return doc

    def _persist(self, records: list) -> None:
        directory = self.predictions_path.parent
        fd, tmp_name = tempfile.mkstemp(dir=directory, prefix=f".{self.predictions_path.name}.")
        os.close(fd)
        try:
            store.persist_predictions(records, Path(tmp_name))
            os.replace(tmp_name, self.predictions_path)
        except BaseException:
            try:
                os.unlink(tmp_name)
            except OSError:
                pass
            raise


def create_app(prediction_store: PredictionStore, ui_dir: Optional[Path] = None) -> FastAPI:
    app = FastAPI(title="botscope review service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.get("/api/repos")
    def get_summaries() -> list:
        return prediction_store.summaries()

    @app.get("/api/repos/{owner}/{name}/contributors")
    def get_contributors(
        owner: str,
        name: str,
        type: Optional[Literal["bot", "human", "unknown"]] = None,
        sort: Literal["login", "confidence"] = "login",
    ) -> list:
        try:
            repo = RepoRef(owner=owner, name=name)
            return prediction_store.contributors(repo, type_filter=type, sort=sort)
        except (KeyError, ValueError):
            raise HTTPException(status_code=404, detail=f"unknown repository {owner}/{name}")

    @app.post("/api/overrides")
    def post_override(request: OverrideRequest) -> dict:
        try:
            repo = RepoRef.parse(request.repository)
        except ValueError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        try:
            return prediction_store.set_override(repo, request.login, request.type)
        except store.UnknownContributorError:
            raise HTTPException(
                status_code=404,
                detail=f"no contributor {request.login} in {request.repository}",
            )

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="dashboard")

    return app
