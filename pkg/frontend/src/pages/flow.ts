// Flow page: parameter table plus one dot strip per task, optionally
// colored by a numeric parameter on a blue -> red scale.

import { dotStrip, StripRow } from "../chart.js";
import { colorScale, interpolate, MISSING_COLOR } from "../color.js";
import { escapeHtml, fmt, fmtDate } from "../format.js";
import { Flow, FlowResults } from "../types.js";

export interface FlowPageModel {
  flow: Flow;
  results: FlowResults;
}

function numericColors(results: FlowResults): number[] {
  const values: number[] = [];
  for (const series of results.series) {
    for (const point of series.points) {
      if (typeof point.color === "number") values.push(point.color);
    }
  }
  return values;
}

export function flowResultRows(results: FlowResults): {
  rows: StripRow[];
  legend: string;
} {
  const mapped = results.color_parameter !== null;
  const values = mapped ? numericColors(results) : [];
  const scale = values.length > 0 ? colorScale(values) : null;
  const rows = results.series.map((series) => ({
    label: `task ${series.task_id} · ${series.measure}`,
    href: `#/t/${series.task_id}`,
    points: series.points.map((point) => {
      const colored =
        scale !== null && typeof point.color === "number"
          ? scale.color(point.color)
          : mapped
            ? MISSING_COLOR
            : undefined;
      const suffix =
        mapped && point.color !== null && point.color !== undefined
          ? ` · ${results.color_parameter}=${String(point.color)}`
          : "";
      return {
        x: point.value,
        title: `run ${point.run_id} · ${fmt(point.value)}${suffix} · ${point.uploader} · ${fmtDate(point.uploaded_at)}`,
        href: `#/r/${point.run_id}`,
        runId: point.run_id,
        color: colored,
      };
    }),
  }));
  let legend = "";
  if (scale !== null && results.color_parameter !== null) {
    const stops = [0, 0.25, 0.5, 0.75, 1]
      .map((t) => `<stop offset="${t * 100}%" stop-color="${interpolate(t)}"/>`)
      .join("");
    legend = [
      `<svg xmlns="http://www.w3.org/2000/svg" class="legend" width="260" height="34" viewBox="0 0 260 34" role="img">`,
      `<defs><linearGradient id="param-scale" x1="0" y1="0" x2="1" y2="0">${stops}</linearGradient></defs>`,
      `<text x="0" y="13" class="legend-name">${escapeHtml(results.color_parameter)}</text>`,
      `<rect x="0" y="18" width="200" height="10" fill="url(#param-scale)"/>`,
      `<text x="0" y="16" class="tick legend-min">${fmt(scale.min)}</text>`,
      `<text x="200" y="16" text-anchor="end" class="tick legend-max">${fmt(scale.max)}</text>`,
      `</svg>`,
    ].join("");
  }
  return { rows, legend };
}

export function renderFlowPage(model: FlowPageModel): string {
  const { flow, results } = model;
  const parameters =
    flow.parameters.length === 0
      ? `<p class="empty">No declared parameters.</p>`
      : `<table class="parameters"><thead><tr><th>name</th><th>type</th><th>default</th><th>range</th><th>description</th></tr></thead><tbody>` +
        flow.parameters
          .map(
            (p) =>
              `<tr><td><code>${escapeHtml(p.name)}</code></td><td>${escapeHtml(p.data_type)}</td><td>${escapeHtml(String(p.default ?? "—"))}</td><td>${escapeHtml(p.recommended_range === null || p.recommended_range === undefined ? "—" : JSON.stringify(p.recommended_range))}</td><td>${escapeHtml(p.description ?? "")}</td></tr>`
          )
          .join("") +
        `</tbody></table>`;
  const { rows, legend } = flowResultRows(results);
  const chart =
    results.series.length === 0
      ? `<p class="empty">No results for this flow yet.</p>`
      : `<div class="chart-holder">${dotStrip(rows)}</div><button class="export-svg" type="button">export SVG</button>`;
  return [
    `<article class="page flow-page" data-flow-id="${flow.flow_id}">`,
    `<h1>${escapeHtml(flow.name)} <span class="version">v${flow.version}</span></h1>`,
    `<p class="meta">uploaded by ${escapeHtml(flow.uploader_name ?? String(flow.uploader))} on ${fmtDate(flow.uploaded_at)} · licence ${escapeHtml(flow.licence ?? "—")}</p>`,
    flow.description ? `<p class="description">${escapeHtml(flow.description)}</p>` : "",
    `<h2>Parameters</h2>`,
    parameters,
    `<h2>Results by task</h2>`,
    legend,
    chart,
    `</article>`,
  ].join("\n");
}
