/** Contributor table: one row per account with feature columns, an effective
 * badge, a sample-comments expander, and override controls. */

import type { ContributorRow, OverrideChoice } from "./api.js";
import { formatConfidence } from "./state.js";

export interface TableCallbacks {
  onOverride: (row: ContributorRow, choice: OverrideChoice) => void;
}

const HEADERS = [
  "login",
  "comments",
  "empty",
  "patterns",
  "gini",
  "pattern ratio",
  "predicted",
  "confidence",
  "effective",
  "rectify",
];

export function renderTable(
  container: Element,
  rows: ContributorRow[],
  callbacks: TableCallbacks,
): void {
  container.textContent = "";
  if (rows.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "no predictions";
    container.appendChild(empty);
    return;
  }
  const table = document.createElement("table");
  table.className = "contributors";
  const head = table.createTHead().insertRow();
  for (const label of HEADERS) {
    const cell = document.createElement("th");
    cell.textContent = label;
    head.appendChild(cell);
  }
  const body = table.createTBody();
  for (const row of rows) {
    body.appendChild(contributorRow(row, callbacks));
  }
  container.appendChild(table);
}

function contributorRow(row: ContributorRow, callbacks: TableCallbacks): HTMLTableRowElement {
  const tr = document.createElement("tr");
  tr.dataset.login = row.login;
  if (row.effective === "unknown") {
    tr.classList.add("unknown-row");
  }

  const login = tr.insertCell();
  if (row.samples.length > 0) {
    const details = document.createElement("details");
    const summary = document.createElement("summary");
    summary.textContent = row.login;
    details.appendChild(summary);
    const list = document.createElement("ul");
    list.className = "samples";
    for (const sample of row.samples) {
      const item = document.createElement("li");
      item.textContent = sample === "" ? "(empty comment)" : sample;
      list.appendChild(item);
    }
    details.appendChild(list);
    login.appendChild(details);
  } else {
    login.textContent = row.login;
  }

  tr.insertCell().textContent = String(row.num_comments);
  tr.insertCell().textContent = String(row.num_empty);
  tr.insertCell().textContent = String(row.num_patterns);
  tr.insertCell().textContent = row.gini.toFixed(3);
  tr.insertCell().textContent = row.pattern_ratio.toFixed(3);
  tr.insertCell().textContent = row.predicted;
  tr.insertCell().textContent =
    row.predicted === "unknown" ? "–" : formatConfidence(row.confidence);

  const badgeCell = tr.insertCell();
  const badge = document.createElement("span");
  badge.className = `badge badge-${row.effective}`;
  badge.textContent = row.override ? `${row.effective} (override)` : row.effective;
  badgeCell.appendChild(badge);

  const actions = tr.insertCell();
  actions.className = "actions";
  for (const choice of ["bot", "human"] as const) {
    const button = document.createElement("button");
    button.textContent = choice;
    button.disabled = row.effective === choice;
    button.addEventListener("click", () => callbacks.onOverride(row, choice));
    actions.appendChild(button);
  }
  const clear = document.createElement("button");
  clear.textContent = "clear";
  clear.disabled = row.override === null;
  clear.addEventListener("click", () => callbacks.onOverride(row, "clear"));
  actions.appendChild(clear);

  return tr;
}
