/** Dashboard bootstrap and DOM wiring.
 *
 * Single page, no routing: state lives in memory and re-syncs from the
 * service after every mutation, so the service stays the single source of
 * truth. Overrides wait for the server response before any state changes;
 * a failed POST leaves the view untouched and surfaces a toast.
 */

import { ApiClient, ApiError } from "./api.js";
import type { ContributorRow, OverrideChoice } from "./api.js";
import { renderChart } from "./chart.js";
import {
  initialState,
  summariesWithRowCounts,
  visibleRows,
  withFilter,
  withRepoRows,
  withSort,
  withSummaries,
  withUpdatedRow,
  type SortKey,
  type TypeFilter,
  type ViewState,
} from "./state.js";
import { renderTable } from "./table.js";

const client = new ApiClient("");
let state: ViewState = initialState();

function el<T extends Element>(selector: string): T {
  const found = document.querySelector(selector);
  if (!found) {
    throw new Error(`missing element ${selector}`);
  }
  return found as T;
}

function showBanner(message: string): void {
  const banner = el<HTMLElement>("#error-banner");
  el<HTMLElement>("#error-message").textContent = message;
  banner.hidden = false;
}

function hideBanner(): void {
  el<HTMLElement>("#error-banner").hidden = true;
}

function toast(message: string): void {
  const host = el<HTMLElement>("#toasts");
  const note = document.createElement("div");
  note.className = "toast";
  note.textContent = message;
  host.appendChild(note);
  setTimeout(() => note.remove(), 4000);
}

function render(): void {
  const summaries = summariesWithRowCounts(state);

  const select = el<HTMLSelectElement>("#repo-select");
  select.textContent = "";
  const placeholder = document.createElement("option");
  placeholder.value = "";
  placeholder.textContent =
    summaries.length === 0 ? "no predictions" : "select a repository";
  select.appendChild(placeholder);
  for (const summary of summaries) {
    const option = document.createElement("option");
    option.value = summary.repository;
    option.textContent = `${summary.repository} (${summary.total})`;
    option.selected = summary.repository === state.selectedRepo;
    select.appendChild(option);
  }

  renderChart(el("#chart"), summaries, state.selectedRepo, (repository) => {
    void selectRepo(repository);
  });

  const controls = el<HTMLElement>("#table-controls");
  controls.hidden = state.selectedRepo === null;
  if (state.selectedRepo !== null) {
    renderTable(el("#table-host"), visibleRows(state), {
      onOverride: (row, choice) => void applyOverride(row, choice),
    });
  } else {
    el("#table-host").textContent = "";
    if (summaries.length === 0) {
      const empty = document.createElement("p");
      empty.className = "empty-state";
      empty.textContent = "no predictions";
      el("#table-host").appendChild(empty);
    }
  }
}

async function loadSummaries(): Promise<void> {
  try {
    state = withSummaries(state, await client.getSummaries());
    hideBanner();
  } catch (error) {
    showBanner(describe(error));
    throw error;
  }
}

async function selectRepo(repository: string): Promise<void> {
  if (!repository) {
    state = { ...state, selectedRepo: null, rows: [] };
    render();
    return;
  }
  try {
    state = withRepoRows(state, repository, await client.getContributors(repository));
    hideBanner();
    render();
  } catch (error) {
    showBanner(describe(error));
  }
}

async function applyOverride(row: ContributorRow, choice: OverrideChoice): Promise<void> {
  try {
    const updated = await client.postOverride(row.repository, row.login, choice);
    state = withUpdatedRow(state, updated);
    render(); // chart + table from the updated snapshot, no page reload
    state = withSummaries(state, await client.getSummaries());
    render(); // confirmed summary refresh from the service
  } catch (error) {
    render(); // revert: state was never mutated on failure
    toast(`override failed: ${describe(error)}`);
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) {
    return `${error.status}: ${error.message}`;
  }
  if (error instanceof Error) {
    return error.message;
  }
  return String(error);
}

async function boot(): Promise<void> {
  el<HTMLSelectElement>("#repo-select").addEventListener("change", (event) => {
    void selectRepo((event.target as HTMLSelectElement).value);
  });
  el<HTMLSelectElement>("#filter-select").addEventListener("change", (event) => {
    state = withFilter(state, (event.target as HTMLSelectElement).value as TypeFilter);
    render();
  });
  el<HTMLSelectElement>("#sort-select").addEventListener("change", (event) => {
    state = withSort(state, (event.target as HTMLSelectElement).value as SortKey);
    render();
  });
  el<HTMLButtonElement>("#retry").addEventListener("click", () => {
    void loadSummaries().then(render, () => undefined);
  });
  try {
    await loadSummaries();
    render();
  } catch {
    // banner already shown; retry button stays available
  }
}

void boot();
