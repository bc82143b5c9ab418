"""Command-line pipeline: fetch -> predict -> train -> report -> override -> serve.

Exit codes: 0 success, 2 usage error, 3 environment/credential error,
4 data error, 5 network/retrieval error.

Tokens are passed indirectly via ``--token-env VAR`` so secrets never land
in shell history. All output files are written atomically (temp + rename),
and ``predict`` output is deterministic: the same input and flags produce a
byte-identical file.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path
from typing import Callable, Mapping, Optional, Sequence

from . import corpus, fetcher, store, tree
from .estimators import classify_profiles
from .features import DEFAULT_EPS
from .records import ACTIVITY_KINDS, FetchWindow, RepoRef, parse_timestamp

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_ENVIRONMENT = 3
EXIT_DATA = 4
EXIT_NETWORK = 5

BASE_URL_ENV = "BOTSCOPE_BASE_URL"

_KIND_FLAGS = {"issues": "issue", "prs": "pull_request"}


def run(argv: Sequence[str], environment: Optional[Mapping[str, str]] = None) -> int:
    """Dispatch a CLI invocation; returns the process exit code."""
    environment = os.environ if environment is None else environment
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        # argparse exits 0 for --help and 2 for usage errors.
        return int(exc.code or 0)
    try:
        return args.handler(args, environment)
    except fetcher.AuthenticationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENVIRONMENT
    except (fetcher.FetchError, ConnectionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NETWORK
    except (
        corpus.ActivityCsvError,
        store.PredictionCsvError,
        store.UnknownContributorError,
        store.AliasConflictError,
        tree.ModelFormatError,
        FileNotFoundError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(run(sys.argv[1:]))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="botscope",
        description="Classify GitHub commenters as bots or humans from their comment patterns.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fetch = sub.add_parser("fetch", help="retrieve issue/PR comments into an activity CSV")
    p_fetch.add_argument("--repo", required=True, metavar="OWNER/NAME")
    p_fetch.add_argument(
        "--token-env",
        default="GITHUB_TOKEN",
        metavar="VAR",
        help="environment variable holding the API token (default: GITHUB_TOKEN)",
    )
    p_fetch.add_argument("--since", required=True, help="window start, ISO-8601 UTC, inclusive")
    p_fetch.add_argument("--until", required=True, help="window end, ISO-8601 UTC, exclusive")
    p_fetch.add_argument(
        "--kinds",
        default="issues,prs",
        help="comma-separated activity kinds: issues,prs (default: both)",
    )
    p_fetch.add_argument(
        "--base-url",
        default=None,
        help=f"API base URL (default: ${BASE_URL_ENV} or {fetcher.DEFAULT_BASE_URL})",
    )
    p_fetch.add_argument("--cache", default=None, metavar="DIR", help="response cache directory")
    p_fetch.add_argument(
        "--no-review-comments",
        action="store_true",
        help="exclude inline PR review comments",
    )
    p_fetch.add_argument("--out", required=True, metavar="FILE")
    p_fetch.set_defaults(handler=cmd_fetch)

    p_predict = sub.add_parser("predict", help="classify contributors in an activity CSV")
    p_predict.add_argument("--in", dest="infile", required=True, metavar="FILE")
    p_predict.add_argument(
        "--model",
        default="default",
        help="'default' for the packaged tree, or a path to a model JSON file",
    )
    p_predict.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p_predict.add_argument("--min-comments", type=int, default=store.DEFAULT_MIN_COMMENTS)
    p_predict.add_argument("--cap", type=int, default=corpus.DEFAULT_COMMENT_CAP)
    p_predict.add_argument("--out", required=True, metavar="FILE")
    p_predict.set_defaults(handler=cmd_predict)

    p_train = sub.add_parser("train", help="train a tree from labeled predictions")
    p_train.add_argument("--features", required=True, metavar="FILE", help="predictions CSV")
    p_train.add_argument(
        "--labels", required=True, metavar="FILE", help="CSV with header repository,login,label"
    )
    p_train.add_argument("--max-depth", type=int, default=tree.DEFAULT_MAX_DEPTH)
    p_train.add_argument("--min-leaf", type=int, default=tree.DEFAULT_MIN_LEAF)
    p_train.add_argument("--out", required=True, metavar="FILE")
    p_train.set_defaults(handler=cmd_train)

    p_report = sub.add_parser("report", help="aggregate predictions per repository")
    p_report.add_argument("--in", dest="infile", required=True, metavar="FILE")
    p_report.add_argument("--format", choices=["table", "json", "ndjson"], default="table")
    p_report.add_argument("--index", default="bot-predictions", help="NDJSON index name")
    p_report.add_argument(
        "--aliases", default=None, metavar="FILE", help="identity merge map (canonical: alias1, alias2)"
    )
    p_report.set_defaults(handler=cmd_report)

    p_override = sub.add_parser("override", help="rectify a contributor's type")
    p_override.add_argument("--in", dest="infile", required=True, metavar="FILE")
    p_override.add_argument("--repo", metavar="OWNER/NAME")
    p_override.add_argument("--login", metavar="LOGIN")
    p_override.add_argument("--set", dest="action", choices=["bot", "human", "clear"])
    p_override.add_argument(
        "--from-file",
        default=None,
        metavar="FILE",
        help="apply a whole overrides CSV (repository,login,override)",
    )
    p_override.add_argument("--out", required=True, metavar="FILE")
    p_override.set_defaults(handler=cmd_override)

    p_serve = sub.add_parser("serve", help="serve predictions and the review dashboard")
    p_serve.add_argument("--in", dest="infile", required=True, metavar="FILE")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--ui-dir", default=None, metavar="DIR")
    p_serve.add_argument(
        "--activity",
        default=None,
        metavar="FILE",
        help="activity CSV used to show sample comments per contributor",
    )
    p_serve.set_defaults(handler=cmd_serve)

    return parser


def write_atomic(path: Path, content: str) -> None:
    """Write via a sibling temp file and rename, so readers never see partials."""
    path = Path(path)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent or Path("."), prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(content)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def _write_with(path: Path, writer: Callable[[Path], None]) -> None:
    path = Path(path)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent or Path("."), prefix=f".{path.name}.")
    os.close(fd)
    try:
        writer(Path(tmp_name))
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def _parse_window(since_text: str, until_text: str) -> FetchWindow:
    return FetchWindow(since=parse_timestamp(since_text), until=parse_timestamp(until_text))


def _parse_kinds(text: str) -> set:
    kinds = set()
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if token not in _KIND_FLAGS:
            raise ValueError(f"--kinds accepts issues,prs; got {token!r}")
        kinds.add(_KIND_FLAGS[token])
    if not kinds:
        raise ValueError("--kinds must name at least one of issues,prs")
    return kinds


def cmd_fetch(args, environment: Mapping[str, str]) -> int:
    token = environment.get(args.token_env, "")
    if not token:
        print(
            f"error: environment variable {args.token_env} is unset or empty",
            file=sys.stderr,
        )
        return EXIT_ENVIRONMENT
    repo = RepoRef.parse(args.repo)
    window = _parse_window(args.since, args.until)
    base_url = args.base_url or environment.get(BASE_URL_ENV) or fetcher.DEFAULT_BASE_URL
    records = fetcher.fetch_comments(
        repo=repo,
        token=token,
        window=window,
        kinds=_parse_kinds(args.kinds),
        cache_dir=Path(args.cache) if args.cache else None,
        base_url=base_url,
        include_review_comments=not args.no_review_comments,
    )
    _write_with(Path(args.out), lambda tmp: corpus.write_activity_csv(records, tmp))
    print(f"fetched {len(records)} comments from {repo} into {args.out}")
    return EXIT_OK


def load_model_arg(model_arg: str) -> tree.TrainedModel:
    if model_arg == "default":
        return tree.default_model()
    return tree.load_model(Path(model_arg))


def predict_records(
    activity: Sequence,
    model: tree.TrainedModel,
    eps: float = DEFAULT_EPS,
    min_comments: int = store.DEFAULT_MIN_COMMENTS,
    cap: int = corpus.DEFAULT_COMMENT_CAP,
) -> list:
    """Run the activity->profiles->features->tree pipeline into prediction
    records, labeling contributors below ``min_comments`` as unknown."""
    profiles = corpus.build_profiles(activity, window=None, cap=cap)
    records = []
    for profile, fv, prediction in classify_profiles(profiles, model=model, eps=eps):
        if fv.num_comments < min_comments:
            predicted, confidence = store.UNKNOWN, 0.0
        else:
            predicted, confidence = prediction.label, prediction.confidence
        records.append(
            store.PredictionRecord(
                repo=profile.repo,
                login=profile.login,
                features=fv,
                predicted=predicted,
                confidence=confidence,
            )
        )
    records.sort(key=lambda r: r.key)
    return records


def cmd_predict(args, environment: Mapping[str, str]) -> int:
    if args.eps <= 0 or args.eps > 1:
        raise ValueError(f"--eps must lie in (0, 1], got {args.eps}")
    if args.cap < 1:
        raise ValueError("--cap must be >= 1")
    model = load_model_arg(args.model)
    activity = corpus.read_activity_csv(Path(args.infile))
    records = predict_records(
        activity, model, eps=args.eps, min_comments=args.min_comments, cap=args.cap
    )
    _write_with(Path(args.out), lambda tmp: store.persist_predictions(records, tmp))
    print(f"classified {len(records)} contributors into {args.out}")
    return EXIT_OK


def _read_labels_csv(path: Path) -> list:
    import csv as _csv

    path = Path(path)
    if not path.exists():
        raise store.PredictionCsvError(f"labels CSV not found: {path}")
    expected = ["repository", "login", "label"]
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = _csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise store.PredictionCsvError(f"{path}: empty file, expected header") from None
        if header != expected:
            raise store.PredictionCsvError(
                f"{path}: bad header {header!r}, expected {expected!r}"
            )
        for row in reader:
            line = reader.line_num
            if len(row) != 3:
                raise store.PredictionCsvError(f"{path}:{line}: expected 3 fields, got {len(row)}")
            repo_text, login, label = row
            if label not in (store.BOT, store.HUMAN):
                raise store.PredictionCsvError(
                    f"{path}:{line}: label must be bot or human, got {label!r}"
                )
            rows.append((RepoRef.parse(repo_text).full_name, login, label))
    return rows


def cmd_train(args, environment: Mapping[str, str]) -> int:
    features = store.load_predictions(Path(args.features))
    by_key = {record.key: record for record in features}
    dataset = []
    for repo_name, login, label in _read_labels_csv(Path(args.labels)):
        record = by_key.get((repo_name, login))
        if record is None:
            raise store.PredictionCsvError(
                f"label for {repo_name}#{login} has no matching row in {args.features}"
            )
        dataset.append((record.features, label))
    if not dataset:
        raise store.PredictionCsvError(f"{args.labels}: no labeled rows")
    model = tree.train_tree(dataset, max_depth=args.max_depth, min_leaf=args.min_leaf)
    _write_with(Path(args.out), lambda tmp: tree.save_model(model, tmp))
    print(f"trained a depth-{model.depth} tree on {len(dataset)} samples into {args.out}")
    return EXIT_OK


def cmd_report(args, environment: Mapping[str, str]) -> int:
    records = store.load_predictions(Path(args.infile))
    if args.aliases:
        records = store.merge_identities(records, store.load_alias_map(Path(args.aliases)))
    if args.format == "ndjson":
        sys.stdout.write(store.export_bulk_ndjson(records, index_name=args.index))
    else:
        sys.stdout.write(store.render_report(store.summarize(records), format=args.format))
    return EXIT_OK


def cmd_override(args, environment: Mapping[str, str]) -> int:
    records = store.load_predictions(Path(args.infile))
    if args.from_file:
        records = store.apply_overrides_csv(records, Path(args.from_file))
    else:
        if not (args.repo and args.login and args.action):
            print(
                "error: provide --repo, --login and --set, or --from-file",
                file=sys.stderr,
            )
            return EXIT_USAGE
        records = store.apply_override(
            records, RepoRef.parse(args.repo), args.login, args.action
        )
    _write_with(Path(args.out), lambda tmp: store.persist_predictions(records, tmp))
    print(f"wrote {len(records)} records to {args.out}")
    return EXIT_OK


def cmd_serve(args, environment: Mapping[str, str]) -> int:
    import uvicorn

    from .service import PredictionStore, create_app

    prediction_store = PredictionStore(
        Path(args.infile),
        activity_path=Path(args.activity) if args.activity else None,
    )
    app = create_app(prediction_store, ui_dir=Path(args.ui_dir) if args.ui_dir else None)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


if __name__ == "__main__":
    main()
