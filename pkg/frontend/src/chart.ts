/** Grouped bar chart of per-repo bot/human counts, rendered as plain SVG.
 *
 * Unknowns are intentionally not drawn as bars; they appear in the summary
 * table column instead. Layout is a pure function so tests can assert on
 * geometry without a DOM.
 */

import type { RepoSummary } from "./api.js";

export const BOT_COLOR = "#d95f52";
export const HUMAN_COLOR = "#4878a8";

export interface BarSpec {
  repository: string;
  kind: "bot" | "human";
  value: number;
  x: number;
  y: number;
  width: number;
  height: number;
  color: string;
}

export interface GroupLabel {
  repository: string;
  x: number;
  selected: boolean;
}

export interface ChartLayout {
  width: number;
  height: number;
  plotBottom: number;
  maxValue: number;
  bars: BarSpec[];
  labels: GroupLabel[];
}

const MARGIN = { top: 12, right: 12, bottom: 28, left: 12 };

export function layoutGroupedBars(
  summaries: RepoSummary[],
  width = 640,
  height = 220,
  selectedRepo: string | null = null,
): ChartLayout {
  const plotBottom = height - MARGIN.bottom;
  const plotHeight = plotBottom - MARGIN.top;
  const plotWidth = width - MARGIN.left - MARGIN.right;
  const maxValue = Math.max(1, ...summaries.map((s) => Math.max(s.bots, s.humans)));
  const groupWidth = summaries.length > 0 ? plotWidth / summaries.length : plotWidth;
  const barWidth = Math.min(34, groupWidth / 3);

  const bars: BarSpec[] = [];
  const labels: GroupLabel[] = [];
  summaries.forEach((summary, index) => {
    const groupCenter = MARGIN.left + groupWidth * index + groupWidth / 2;
    labels.push({
      repository: summary.repository,
      x: groupCenter,
      selected: summary.repository === selectedRepo,
    });
    const pairs: Array<["bot" | "human", number, string]> = [
      ["bot", summary.bots, BOT_COLOR],
      ["human", summary.humans, HUMAN_COLOR],
    ];
    pairs.forEach(([kind, value, color], slot) => {
      const barHeight = (value / maxValue) * plotHeight;
      bars.push({
        repository: summary.repository,
        kind,
        value,
        x: groupCenter + (slot === 0 ? -barWidth - 2 : 2),
        y: plotBottom - barHeight,
        width: barWidth,
        height: barHeight,
        color,
      });
    });
  });
  return { width, height, plotBottom, maxValue, bars, labels };
}

const SVG_NS = "http://www.w3.org/2000/svg";

export function renderChart(
  container: Element,
  summaries: RepoSummary[],
  selectedRepo: string | null,
  onSelect: (repository: string) => void,
): void {
  const layout = layoutGroupedBars(summaries, 640, 220, selectedRepo);
  container.textContent = "";
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${layout.width} ${layout.height}`);
  svg.setAttribute("role", "img");
  svg.classList.add("repo-chart");

  const axis = document.createElementNS(SVG_NS, "line");
  axis.setAttribute("x1", "0");
  axis.setAttribute("x2", String(layout.width));
  axis.setAttribute("y1", String(layout.plotBottom));
  axis.setAttribute("y2", String(layout.plotBottom));
  axis.setAttribute("stroke", "#999");
  svg.appendChild(axis);

  for (const bar of layout.bars) {
    const rect = document.createElementNS(SVG_NS, "rect");
    rect.setAttribute("x", String(bar.x));
    rect.setAttribute("y", String(bar.y));
    rect.setAttribute("width", String(bar.width));
    rect.setAttribute("height", String(bar.height));
    rect.setAttribute("fill", bar.color);
    rect.setAttribute("data-repo", bar.repository);
    rect.setAttribute("data-kind", bar.kind);
    rect.setAttribute("data-value", String(bar.value));
    rect.addEventListener("click", () => onSelect(bar.repository));
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = `${bar.repository}: ${bar.value} ${bar.kind}`;
    rect.appendChild(title);
    svg.appendChild(rect);

    if (bar.value > 0) {
      const count = document.createElementNS(SVG_NS, "text");
      count.setAttribute("x", String(bar.x + bar.width / 2));
      count.setAttribute("y", String(bar.y - 3));
      count.setAttribute("text-anchor", "middle");
      count.classList.add("bar-count");
      count.textContent = String(bar.value);
      svg.appendChild(count);
    }
  }

  for (const label of layout.labels) {
    const text = document.createElementNS(SVG_NS, "text");
    text.setAttribute("x", String(label.x));
    text.setAttribute("y", String(layout.plotBottom + 16));
    text.setAttribute("text-anchor", "middle");
    text.classList.add("group-label");
    if (label.selected) {
      text.classList.add("selected");
    }
    text.textContent = label.repository;
    text.addEventListener("click", () => onSelect(label.repository));
    svg.appendChild(text);
  }

  container.appendChild(svg);
}
