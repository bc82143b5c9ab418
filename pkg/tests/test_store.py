"""Prediction persistence, overrides, identity merging, summaries, exports."""

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from botscope.features import FeatureVector
from botscope.records import RepoRef
from botscope.store import (
    PREDICTIONS_HEADER,
    AliasConflictError,
    PredictionCsvError,
    PredictionRecord,
    RepoSummary,
    UnknownContributorError,
    apply_override,
    apply_overrides_csv,
    export_bulk_ndjson,
    load_alias_map,
    load_predictions,
    merge_identities,
    persist_predictions,
    render_report,
    summarize,
)

from conftest import utc

DIEM = RepoRef.parse("diem/diem")
SUBSTRATE = RepoRef.parse("paritytech/substrate")
SERVO = RepoRef.parse("servo/servo")


def record(repo=DIEM, login="alice", num_comments=20, num_empty=0, num_patterns=10,
           gini=0.25, pattern_ratio=0.5, predicted="human", confidence=0.8,
           override=None):
    return PredictionRecord(
        repo=repo,
        login=login,
        features=FeatureVector(num_comments, num_empty, num_patterns, gini, pattern_ratio),
        predicted=predicted,
        confidence=confidence,
        override=override,
    )


def paper_style_records():
    """Three repos with the bot/human mix used throughout the reports."""
    rows = []
    for repo, bots, humans in [(SUBSTRATE, 6, 31), (DIEM, 8, 16), (SERVO, 2, 4)]:
        for i in range(bots):
            rows.append(
                record(repo=repo, login=f"helper-bot-{i}", num_patterns=2,
                       pattern_ratio=0.1, predicted="bot", confidence=0.9)
            )
        for i in range(humans):
            rows.append(record(repo=repo, login=f"person-{i}"))
    return rows


class TestPersistence:
    def test_round_trip(self, tmp_path):
        records = [
            record(),
            record(login="bot-guy", predicted="bot", confidence=0.9, override="human"),
            record(login="quiet", num_comments=3, num_patterns=3, pattern_ratio=1.0,
                   predicted="unknown", confidence=0.0),
        ]
        path = tmp_path / "p.csv"
        persist_predictions(records, path)
        assert load_predictions(path) == records

    def test_empty_list_gives_header_only(self, tmp_path):
        path = tmp_path / "p.csv"
        persist_predictions([], path)
        assert path.read_text(encoding="utf-8") == ",".join(PREDICTIONS_HEADER) + "\n"

    def test_override_and_effective_columns(self, tmp_path):
        path = tmp_path / "p.csv"
        persist_predictions([record(predicted="human", override="bot")], path)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[1].endswith("human,0.800000,bot,bot")

    def test_reals_carry_six_decimals(self, tmp_path):
        path = tmp_path / "p.csv"
        persist_predictions([record(gini=0.5, pattern_ratio=0.5)], path)
        assert "0.500000,0.500000" in path.read_text(encoding="utf-8")

    def test_missing_file(self, tmp_path):
        with pytest.raises(PredictionCsvError, match="not found"):
            load_predictions(tmp_path / "absent.csv")

    def test_header_mismatch(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text("login,predicted\n", encoding="utf-8")
        with pytest.raises(PredictionCsvError, match="bad header"):
            load_predictions(path)

    def test_bad_row_names_line(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text(
            ",".join(PREDICTIONS_HEADER)
            + "\ndiem/diem,alice,20,0,10,0.250000,0.500000,android,0.800000,,android\n",
            encoding="utf-8",
        )
        with pytest.raises(PredictionCsvError, match=r":2:"):
            load_predictions(path)

    def test_inconsistent_effective_rejected(self, tmp_path):
        path = tmp_path / "p.csv"
        path.write_text(
            ",".join(PREDICTIONS_HEADER)
            + "\ndiem/diem,alice,20,0,10,0.250000,0.500000,human,0.800000,,bot\n",
            encoding="utf-8",
        )
        with pytest.raises(PredictionCsvError, match="effective"):
            load_predictions(path)

    @given(
        rows=st.lists(
            st.tuples(
                st.sampled_from(["alice", "bob", "carol", "dan"]),
                st.integers(min_value=10, max_value=90),
                st.integers(min_value=0, max_value=999999),
                st.sampled_from(["bot", "human"]),
                st.sampled_from([None, "bot", "human"]),
            ),
            max_size=10,
        )
    )
    def test_round_trip_property(self, rows, tmp_path_factory):
        records = []
        for index, (login, n, micro, predicted, override) in enumerate(rows):
            patterns = max(1, n // 3)
            records.append(
                PredictionRecord(
                    repo=DIEM,
                    login=f"{login}{index}",
                    features=FeatureVector(n, 0, patterns, micro / 1_000_000, round(patterns / n, 6)),
                    predicted=predicted,
                    confidence=0.75,
                    override=override,
                )
            )
        path = tmp_path_factory.mktemp("store") / "p.csv"
        persist_predictions(records, path)
        assert load_predictions(path) == records


class TestApplyOverride:
    def test_set_bot_override(self):
        records = [record(login="alice"), record(login="bob")]
        updated = apply_override(records, DIEM, "alice", "bot")
        assert updated[0].override == "bot"
        assert updated[0].effective == "bot"
        assert updated[0].predicted == "human"
        assert updated[0].confidence == 0.8
        assert updated[1] == records[1]

    def test_clear_restores_original(self):
        records = [record(login="alice")]
        overridden = apply_override(records, DIEM, "alice", "bot")
        cleared = apply_override(overridden, DIEM, "alice", "clear")
        assert cleared == records

    def test_unknown_login_raises(self):
        records = [record(login="alice")]
        with pytest.raises(UnknownContributorError):
            apply_override(records, DIEM, "nobody", "bot")
        assert records == [record(login="alice")]

    def test_bad_action_rejected(self):
        with pytest.raises(ValueError, match="action"):
            apply_override([record()], DIEM, "alice", "robot")


class TestOverridesCsv:
    def test_apply_file(self, tmp_path):
        records = [record(login="alice"), record(login="bob")]
        path = tmp_path / "ov.csv"
        path.write_text(
            "repository,login,override\ndiem/diem,alice,bot\ndiem/diem,bob,human\n",
            encoding="utf-8",
        )
        updated = apply_overrides_csv(records, path)
        assert [r.effective for r in updated] == ["bot", "human"]

    def test_bad_value_rejected(self, tmp_path):
        path = tmp_path / "ov.csv"
        path.write_text("repository,login,override\ndiem/diem,alice,maybe\n", encoding="utf-8")
        with pytest.raises(PredictionCsvError, match="maybe"):
            apply_overrides_csv([record()], path)


class TestMergeIdentities:
    def test_any_bot_wins_and_confidence_is_max_of_that_label(self):
        records = [
            record(login="bors", predicted="bot", confidence=0.9, num_patterns=2,
                   pattern_ratio=0.1),
            record(login="bors-servo", predicted="human", confidence=0.8),
        ]
        merged = merge_identities(records, {"bors": {"bors-servo"}})
        assert len(merged) == 1
        assert merged[0].login == "bors"
        assert merged[0].effective == "bot"
        assert merged[0].confidence == 0.9
        assert merged[0].features.num_comments == 40

    def test_feature_fields_from_largest_constituent(self):
        records = [
            record(login="big", num_comments=30, num_patterns=3, gini=0.5, pattern_ratio=0.1),
            record(login="small", num_comments=10, num_patterns=5, gini=0.2, pattern_ratio=0.5),
        ]
        merged = merge_identities(records, {"big": {"small"}})
        assert merged[0].features.num_comments == 40
        assert merged[0].features.num_patterns == 8
        assert merged[0].features.gini == 0.5
        assert merged[0].features.pattern_ratio == 0.1

    def test_empty_alias_map_is_identity(self):
        records = [record(login="alice"), record(login="bob")]
        assert merge_identities(records, {}) == records

    def test_absent_alias_ignored(self):
        records = [record(login="alice")]
        merged = merge_identities(records, {"alice": {"ghost-of-alice"}})
        assert merged == records

    def test_lone_alias_renamed_to_canonical(self):
        records = [record(login="a-bot", predicted="bot", confidence=0.9, override="human")]
        merged = merge_identities(records, {"the-bot": {"a-bot"}})
        assert merged[0].login == "the-bot"
        assert merged[0].override == "human"
        assert merged[0].predicted == "bot"

    def test_overlapping_groups_rejected(self):
        with pytest.raises(AliasConflictError):
            merge_identities([record()], {"a": {"x"}, "b": {"x"}})

    def test_merge_keeps_repos_separate(self):
        records = [
            record(repo=DIEM, login="bors"),
            record(repo=SERVO, login="bors-servo"),
        ]
        merged = merge_identities(records, {"bors": {"bors-servo"}})
        assert len(merged) == 2
        assert {r.repo.full_name for r in merged} == {"diem/diem", "servo/servo"}

    def test_override_only_bot_label_survives_merge(self):
        records = [
            record(login="quiet-a", num_comments=3, num_patterns=3, pattern_ratio=1.0,
                   predicted="unknown", confidence=0.0, override="bot"),
            record(login="quiet-b", num_comments=2, num_patterns=2, pattern_ratio=1.0,
                   predicted="unknown", confidence=0.0),
        ]
        merged = merge_identities(records, {"quiet-a": {"quiet-b"}})
        assert merged[0].effective == "bot"
        assert merged[0].confidence == 0.0

    def test_summaries_shrink_by_collapsed_alias_count(self):
        records = paper_style_records()
        aliases = {"person-0": {"person-1", "person-2"}}
        before = {s.repo.full_name: s.total for s in summarize(records)}
        after = {s.repo.full_name: s.total for s in summarize(merge_identities(records, aliases))}
        # person-1/person-2 collapse into person-0 within every repo.
        assert after["diem/diem"] == before["diem/diem"] - 2
        assert after["servo/servo"] == before["servo/servo"] - 2
        assert all(after[k] <= before[k] for k in before)


class TestAliasMapFile:
    def test_parse(self, tmp_path):
        path = tmp_path / "aliases.txt"
        path.write_text(
            "# merged identities\nbors: bors-servo, bors-diem\n\nrustbot: rust-timer\n",
            encoding="utf-8",
        )
        assert load_alias_map(path) == {
            "bors": {"bors-servo", "bors-diem"},
            "rustbot": {"rust-timer"},
        }

    def test_bad_line_rejected(self, tmp_path):
        path = tmp_path / "aliases.txt"
        path.write_text("just-a-name\n", encoding="utf-8")
        with pytest.raises(PredictionCsvError, match=":1:"):
            load_alias_map(path)


class TestSummarize:
    def test_reported_counts(self):
        summaries = summarize(paper_style_records())
        by_name = {s.repo.full_name: s for s in summaries}
        assert (by_name["diem/diem"].total, by_name["diem/diem"].bots,
                by_name["diem/diem"].humans, by_name["diem/diem"].unknowns) == (24, 8, 16, 0)
        assert (by_name["paritytech/substrate"].total,
                by_name["paritytech/substrate"].bots) == (37, 6)
        assert (by_name["servo/servo"].total, by_name["servo/servo"].bots) == (6, 2)

    def test_ordered_by_repo_name(self):
        summaries = summarize(paper_style_records())
        names = [s.repo.full_name for s in summaries]
        assert names == sorted(names)

    def test_all_human_repo(self):
        # A repo can legitimately have no bot commenters at all.
        rows = [
            record(repo=RepoRef.parse("tokio-rs/tokio"), login=f"dev-{i}")
            for i in range(14)
        ]
        (summary,) = summarize(rows)
        assert (summary.total, summary.bots, summary.humans, summary.unknowns) == (14, 0, 14, 0)

    def test_overrides_shift_counts(self):
        records = paper_style_records()
        updated = apply_override(records, DIEM, "person-3", "bot")
        by_name = {s.repo.full_name: s for s in summarize(updated)}
        assert by_name["diem/diem"].bots == 9
        assert by_name["diem/diem"].humans == 15

    @given(
        counts=st.lists(
            st.tuples(
                st.sampled_from(["a/a", "b/b", "c/c"]),
                st.sampled_from(["bot", "human", "unknown"]),
            ),
            max_size=40,
        )
    )
    def test_tallies_always_balance(self, counts):
        records = []
        for index, (repo_name, label) in enumerate(counts):
            confidence = 0.0 if label == "unknown" else 0.9
            records.append(
                record(repo=RepoRef.parse(repo_name), login=f"user{index}",
                       predicted=label, confidence=confidence)
            )
        for summary in summarize(records):
            assert summary.bots + summary.humans + summary.unknowns == summary.total

    def test_summary_validates_balance(self):
        with pytest.raises(ValueError):
            RepoSummary(repo=DIEM, total=5, bots=1, humans=1, unknowns=1)


class TestBulkExport:
    def test_empty_records(self):
        assert export_bulk_ndjson([], "idx") == ""

    def test_single_record_shape(self):
        text = export_bulk_ndjson([record()], "contributors", generated_at=utc(2022, 1, 31))
        lines = text.splitlines()
        assert len(lines) == 2
        action = json.loads(lines[0])
        assert action == {"index": {"_index": "contributors", "_id": "diem/diem#alice"}}
        source = json.loads(lines[1])
        assert source["effective"] == "human"
        assert source["generated_at"] == "2022-01-31T00:00:00Z"

    def test_two_lines_per_record(self):
        records = [record(login=f"user{i}") for i in range(24)]
        text = export_bulk_ndjson(records, "idx")
        lines = text.splitlines()
        assert len(lines) == 48
        assert text.endswith("\n")
        for i, line in enumerate(lines):
            doc = json.loads(line)
            if i % 2 == 0:
                assert set(doc) == {"index"}

    def test_empty_index_rejected(self):
        with pytest.raises(ValueError):
            export_bulk_ndjson([record()], "")


class TestRenderReport:
    def test_table_contains_expected_row(self):
        text = render_report(summarize(paper_style_records()), format="table")
        assert "diem/diem  24  8  16  0" in text
        assert "paritytech/substrate  37  6  31  0" in text
        assert "servo/servo  6  2  4  0" in text

    def test_empty_summaries_sentinel(self):
        assert render_report([], format="table") == "no predictions\n"

    def test_json_document_array(self):
        docs = json.loads(render_report(summarize([record()]), format="json"))
        assert docs == [
            {"repository": "diem/diem", "total": 1, "bots": 0, "humans": 1, "unknowns": 0}
        ]

    def test_unknown_format_rejected(self):
        with pytest.raises(ValueError):
            render_report([], format="xml")
