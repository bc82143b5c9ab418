"""Prediction persistence, operator overrides, identity merging, and exports.

Predictions live in a CSV with the exact header
``repository,login,num_comments,num_empty,num_patterns,gini,pattern_ratio,predicted,confidence,override,effective``.
Real-valued columns are rendered with 6 decimal places, so load/persist are
inverses for records whose reals carry at most that precision (everything
the pipeline itself produces).

The model's prediction is never overwritten: operator rectifications land in
the ``override`` column and only the derived ``effective`` label changes.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .features import FeatureVector
from .records import RepoRef, format_timestamp

PREDICTIONS_HEADER = [
    "repository",
    "login",
    "num_comments",
    "num_empty",
    "num_patterns",
    "gini",
    "pattern_ratio",
    "predicted",
    "confidence",
    "override",
    "effective",
]

BOT = "bot"
HUMAN = "human"
UNKNOWN = "unknown"
PREDICTED_VALUES = (BOT, HUMAN, UNKNOWN)
OVERRIDE_VALUES = (BOT, HUMAN)
CLEAR = "clear"

DEFAULT_MIN_COMMENTS = 10


class PredictionCsvError(ValueError):
    """Raised for missing files, bad headers, or bad rows in predictions CSVs."""


class UnknownContributorError(KeyError):
    """Raised when an override names a (repository, login) absent from the records."""


class AliasConflictError(ValueError):
    """Raised when alias groups overlap or an alias doubles as another canonical name."""


@dataclass(frozen=True)
class PredictionRecord:
    """One contributor's stored prediction with optional operator override."""

    repo: RepoRef
    login: str
    features: FeatureVector
    predicted: str
    confidence: float
    override: Optional[str] = None

    def __post_init__(self):
        if not self.login:
            raise ValueError("login must be non-empty")
        if self.predicted not in PREDICTED_VALUES:
            raise ValueError(f"predicted must be one of {PREDICTED_VALUES}")
        if self.override is not None and self.override not in OVERRIDE_VALUES:
            raise ValueError(f"override must be one of {OVERRIDE_VALUES} or None")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must lie in [0, 1]")
        if (self.confidence == 0.0) != (self.predicted == UNKNOWN):
            raise ValueError("confidence is 0 exactly for unknown predictions")

    @property
    def effective(self) -> str:
        return self.override if self.override is not None else self.predicted

    @property
    def key(self) -> tuple:
        return (self.repo.full_name, self.login)


@dataclass(frozen=True)
class RepoSummary:
    """Per-repository tally of effective contributor types."""

    repo: RepoRef
    total: int
    bots: int
    humans: int
    unknowns: int

    def __post_init__(self):
        if min(self.total, self.bots, self.humans, self.unknowns) < 0:
            raise ValueError("summary counts must be non-negative")
        if self.bots + self.humans + self.unknowns != self.total:
            raise ValueError("bots + humans + unknowns must equal total")

    def as_doc(self) -> dict:
        return {
            "repository": self.repo.full_name,
            "total": self.total,
            "bots": self.bots,
            "humans": self.humans,
            "unknowns": self.unknowns,
        }


def _render_real(value: float) -> str:
    return f"{value:.6f}"


def persist_predictions(records: Iterable[PredictionRecord], path: Path) -> None:
    """Write records to ``path`` in the predictions CSV format."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(PREDICTIONS_HEADER)
        for record in records:
            fv = record.features
            writer.writerow(
                [
                    record.repo.full_name,
                    record.login,
                    fv.num_comments,
                    fv.num_empty,
                    fv.num_patterns,
                    _render_real(fv.gini),
                    _render_real(fv.pattern_ratio),
                    record.predicted,
                    _render_real(record.confidence),
                    record.override or "",
                    record.effective,
                ]
            )


def load_predictions(path: Path) -> list:
    """Read a predictions CSV, validating rows and reporting 1-based line numbers."""
    path = Path(path)
    if not path.exists():
        raise PredictionCsvError(f"predictions CSV not found: {path}")
    records = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise PredictionCsvError(f"{path}: empty file, expected header") from None
        if header != PREDICTIONS_HEADER:
            raise PredictionCsvError(
                f"{path}: bad header {header!r}, expected {PREDICTIONS_HEADER!r}"
            )
        for row in reader:
            line = reader.line_num
            if len(row) != len(PREDICTIONS_HEADER):
                raise PredictionCsvError(
                    f"{path}:{line}: expected {len(PREDICTIONS_HEADER)} fields, got {len(row)}"
                )
            try:
                record = _record_from_row(row)
            except (ValueError, KeyError) as exc:
                raise PredictionCsvError(f"{path}:{line}: {exc}") from None
            if record.effective != row[10]:
                raise PredictionCsvError(
                    f"{path}:{line}: effective column {row[10]!r} does not follow "
                    f"from predicted/override"
                )
            records.append(record)
    return records


def _record_from_row(row: Sequence[str]) -> PredictionRecord:
    features = FeatureVector(
        num_comments=int(row[2]),
        num_empty=int(row[3]),
        num_patterns=int(row[4]),
        gini=float(row[5]),
        pattern_ratio=float(row[6]),
    )
    return PredictionRecord(
        repo=RepoRef.parse(row[0]),
        login=row[1],
        features=features,
        predicted=row[7],
        confidence=float(row[8]),
        override=row[9] or None,
    )


def apply_override(
    records: Sequence[PredictionRecord], repo: RepoRef, login: str, action: str
) -> list:
    """Return a new record list with one contributor's override set or cleared.

    ``bot``/``human`` set the override (and thus the effective label);
    ``clear`` removes it. The stored prediction and confidence are never
    touched.
    """
    if action not in (BOT, HUMAN, CLEAR):
        raise ValueError(f"action must be bot, human, or clear, got {action!r}")
    target = (repo.full_name, login)
    updated = []
    found = False
    for record in records:
        if record.key == target:
            found = True
            record = replace(record, override=None if action == CLEAR else action)
        updated.append(record)
    if not found:
        raise UnknownContributorError(f"no record for {target[0]}#{login}")
    return updated


def load_overrides_csv(path: Path) -> list:
    """Parse an overrides CSV (header ``repository,login,override``) into
    (RepoRef, login, action) triples; action is bot, human, or clear."""
    path = Path(path)
    if not path.exists():
        raise PredictionCsvError(f"overrides CSV not found: {path}")
    expected = ["repository", "login", "override"]
    triples = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise PredictionCsvError(f"{path}: empty file, expected header") from None
        if header != expected:
            raise PredictionCsvError(f"{path}: bad header {header!r}, expected {expected!r}")
        for row in reader:
            line = reader.line_num
            if len(row) != 3:
                raise PredictionCsvError(f"{path}:{line}: expected 3 fields, got {len(row)}")
            repo_text, login, action = row
            if action not in (BOT, HUMAN, CLEAR):
                raise PredictionCsvError(
                    f"{path}:{line}: override must be bot, human, or clear, got {action!r}"
                )
            try:
                repo = RepoRef.parse(repo_text)
            except ValueError as exc:
                raise PredictionCsvError(f"{path}:{line}: {exc}") from None
            triples.append((repo, login, action))
    return triples


def apply_overrides_csv(records: Sequence[PredictionRecord], path: Path) -> list:
    """Apply every row of an overrides CSV in file order."""
    for repo, login, action in load_overrides_csv(path):
        records = apply_override(records, repo, login, action)
    return list(records)


def load_alias_map(path: Path) -> dict:
    """Parse an alias map file with ``canonical: alias1, alias2`` lines.

    Blank lines and ``#`` comments are skipped.
    """
    path = Path(path)
    if not path.exists():
        raise PredictionCsvError(f"alias map not found: {path}")
    aliases: dict = {}
    with open(path, "r", encoding="utf-8") as handle:
        for number, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if ":" not in line:
                raise PredictionCsvError(
                    f"{path}:{number}: expected 'canonical: alias1, alias2', got {line!r}"
                )
            canonical, _, rest = line.partition(":")
            canonical = canonical.strip()
            names = {name.strip() for name in rest.split(",") if name.strip()}
            if not canonical or not names:
                raise PredictionCsvError(
                    f"{path}:{number}: canonical name and at least one alias required"
                )
            aliases.setdefault(canonical, set()).update(names)
    return aliases


def merge_identities(
    records: Sequence[PredictionRecord], aliases: Mapping[str, set]
) -> list:
    """Collapse alias logins into their canonical identity within each repo.

    Count features are summed; ``gini`` and ``pattern_ratio`` cannot be
    recomputed once the raw comments are gone, so they are copied from the
    constituent with the most comments (a documented approximation). The
    merged label is bot if any constituent is effectively a bot, else human
    if any is human, else unknown; confidence is the max over constituents
    sharing that label. Aliases that match no record are ignored.
    """
    _check_alias_groups(aliases)
    canonical_of = {}
    for canonical, group in aliases.items():
        canonical_of[canonical] = canonical
        for alias in group:
            canonical_of[alias] = canonical

    merged: dict = {}
    order: list = []
    for record in records:
        canonical = canonical_of.get(record.login, record.login)
        key = (record.repo.full_name, canonical)
        if key not in merged:
            order.append(key)
        merged.setdefault(key, []).append(record)

    out = []
    for key in order:
        group = merged[key]
        if len(group) == 1:
            # Lone member: keep the record as-is (renamed if it was an alias).
            out.append(replace(group[0], login=key[1]))
            continue
        out.append(_merge_group(key[1], group))
    return out


def _check_alias_groups(aliases: Mapping[str, set]) -> None:
    seen: dict = {}
    for canonical, group in aliases.items():
        for name in list(group) + [canonical]:
            owner = seen.setdefault(name, canonical)
            if owner != canonical:
                raise AliasConflictError(
                    f"login {name!r} appears in alias groups {owner!r} and {canonical!r}"
                )


def _merge_group(canonical: str, group: Sequence[PredictionRecord]) -> PredictionRecord:
    largest = max(group, key=lambda r: (r.features.num_comments, r.login == canonical))
    features = FeatureVector(
        num_comments=sum(r.features.num_comments for r in group),
        num_empty=sum(r.features.num_empty for r in group),
        num_patterns=sum(r.features.num_patterns for r in group),
        gini=largest.features.gini,
        pattern_ratio=largest.features.pattern_ratio,
    )
    labels = [r.effective for r in group]
    if BOT in labels:
        label = BOT
    elif HUMAN in labels:
        label = HUMAN
    else:
        label = UNKNOWN
    confidence = max(r.confidence for r in group if r.effective == label)
    if label != UNKNOWN and confidence == 0.0:
        # The label exists only through overrides of unknown predictions, so
        # keep it as an override to preserve the confidence/unknown pairing.
        return PredictionRecord(
            repo=group[0].repo,
            login=canonical,
            features=features,
            predicted=UNKNOWN,
            confidence=0.0,
            override=label,
        )
    return PredictionRecord(
        repo=group[0].repo,
        login=canonical,
        features=features,
        predicted=label,
        confidence=confidence,
        override=None,
    )


def summarize(records: Iterable[PredictionRecord]) -> list:
    """One RepoSummary per distinct repo, counting effective labels,
    ordered by repository full name."""
    tallies: dict = {}
    for record in records:
        repo_tally = tallies.setdefault(record.repo, {BOT: 0, HUMAN: 0, UNKNOWN: 0})
        repo_tally[record.effective] += 1
    summaries = []
    for repo in sorted(tallies, key=lambda r: r.full_name):
        tally = tallies[repo]
        summaries.append(
            RepoSummary(
                repo=repo,
                total=sum(tally.values()),
                bots=tally[BOT],
                humans=tally[HUMAN],
                unknowns=tally[UNKNOWN],
            )
        )
    return summaries


def record_to_doc(record: PredictionRecord) -> dict:
    """Flatten a record into a plain document (for JSON APIs and bulk export)."""
    fv = record.features
    return {
        "repository": record.repo.full_name,
        "login": record.login,
        "num_comments": fv.num_comments,
        "num_empty": fv.num_empty,
        "num_patterns": fv.num_patterns,
        "gini": fv.gini,
        "pattern_ratio": fv.pattern_ratio,
        "predicted": record.predicted,
        "confidence": record.confidence,
        "override": record.override,
        "effective": record.effective,
    }


def export_bulk_ndjson(
    records: Iterable[PredictionRecord],
    index_name: str,
    generated_at: Optional[datetime] = None,
) -> str:
    """Render records as search-engine bulk NDJSON: one action line and one
    source line per record, each newline-terminated."""
    if not index_name:
        raise ValueError("index_name must be non-empty")
    stamp = format_timestamp(generated_at or datetime.now(timezone.utc))
    lines = []
    for record in records:
        action = {
            "index": {
                "_index": index_name,
                "_id": f"{record.repo.full_name}#{record.login}",
            }
        }
        source = record_to_doc(record)
        source["generated_at"] = stamp
        lines.append(json.dumps(action, separators=(",", ":")))
        lines.append(json.dumps(source, separators=(",", ":")))
    if not lines:
        return ""
    return "\n".join(lines) + "\n"


def render_report(summaries: Sequence[RepoSummary], format: str = "table") -> str:
    """Render summaries as an aligned text table or a JSON array."""
    if format == "json":
        return json.dumps([s.as_doc() for s in summaries], indent=2) + "\n"
    if format != "table":
        raise ValueError(f"format must be 'table' or 'json', got {format!r}")
    if not summaries:
        return "no predictions\n"
    lines = ["repository  total  bots  humans  unknowns"]
    for s in summaries:
        lines.append(f"{s.repo.full_name}  {s.total}  {s.bots}  {s.humans}  {s.unknowns}")
    return "\n".join(lines) + "\n"
