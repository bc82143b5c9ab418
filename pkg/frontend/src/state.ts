/** View state and its pure transitions.
 *
 * The table and the chart are both derived from one fetched snapshot
 * (`summaries` + `rows`), so their per-type counts can never disagree. Every
 * mutation round-trips through the service before the state changes.
 */

import type { ContributorRow, RepoSummary } from "./api.js";

export type TypeFilter = "all" | "bot" | "human" | "unknown";
export type SortKey = "login" | "confidence";

export interface ViewState {
  summaries: RepoSummary[];
  selectedRepo: string | null;
  /** Unfiltered contributor snapshot for the selected repo. */
  rows: ContributorRow[];
  filter: TypeFilter;
  sort: SortKey;
}

export function initialState(): ViewState {
  return { summaries: [], selectedRepo: null, rows: [], filter: "all", sort: "login" };
}

export function withSummaries(state: ViewState, summaries: RepoSummary[]): ViewState {
  const stillThere = summaries.some((s) => s.repository === state.selectedRepo);
  return {
    ...state,
    summaries,
    selectedRepo: stillThere ? state.selectedRepo : null,
    rows: stillThere ? state.rows : [],
  };
}

export function withRepoRows(
  state: ViewState,
  repository: string,
  rows: ContributorRow[],
): ViewState {
  return { ...state, selectedRepo: repository, rows };
}

export function withFilter(state: ViewState, filter: TypeFilter): ViewState {
  return { ...state, filter };
}

export function withSort(state: ViewState, sort: SortKey): ViewState {
  return { ...state, sort };
}

/** Replace one contributor row with the service's post-override response. */
export function withUpdatedRow(state: ViewState, updated: ContributorRow): ViewState {
  const rows = state.rows.map((row) =>
    row.login === updated.login && row.repository === updated.repository ? updated : row,
  );
  return { ...state, rows };
}

export function visibleRows(state: ViewState): ContributorRow[] {
  const filtered =
    state.filter === "all"
      ? state.rows.slice()
      : state.rows.filter((row) => row.effective === state.filter);
  if (state.sort === "confidence") {
    filtered.sort(
      (a, b) => b.confidence - a.confidence || a.login.localeCompare(b.login),
    );
  } else {
    filtered.sort((a, b) => a.login.localeCompare(b.login));
  }
  return filtered;
}

export interface TypeCounts {
  bot: number;
  human: number;
  unknown: number;
}

export function typeCounts(rows: ContributorRow[]): TypeCounts {
  const counts: TypeCounts = { bot: 0, human: 0, unknown: 0 };
  for (const row of rows) {
    if (row.effective === "bot") counts.bot += 1;
    else if (row.effective === "human") counts.human += 1;
    else counts.unknown += 1;
  }
  return counts;
}

/** Local summary recomputation from the row snapshot, used to keep the chart
 * consistent with the table between summary refetches. */
export function summariesWithRowCounts(state: ViewState): RepoSummary[] {
  if (state.selectedRepo === null) {
    return state.summaries;
  }
  const counts = typeCounts(state.rows);
  return state.summaries.map((summary) =>
    summary.repository === state.selectedRepo
      ? {
          repository: summary.repository,
          total: state.rows.length,
          bots: counts.bot,
          humans: counts.human,
          unknowns: counts.unknown,
        }
      : summary,
  );
}

export function formatConfidence(confidence: number): string {
  return `${(confidence * 100).toFixed(1)}%`;
}
