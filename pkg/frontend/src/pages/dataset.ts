// Dataset page: metadata, the qualities table, and one leaderboard strip
// per task on the dataset. Row order inside each strip is exactly the
// series order the results endpoint returned; this page never re-sorts.

import { dotStrip, StripRow } from "../chart.js";
import { escapeHtml, fmt, fmtDate } from "../format.js";
import { Dataset, QualitiesResponse, TaskListItem, TaskResults } from "../types.js";

export const CLASSIFICATION_MEASURES = [
  "predictive_accuracy",
  "kappa",
  "precision",
  "recall",
  "f_measure",
  "weighted_precision",
  "weighted_recall",
  "weighted_f_measure",
  "area_under_roc_curve",
];

export const REGRESSION_MEASURES = ["mean_absolute_error", "root_mean_squared_error"];

export function measuresFor(taskType: string): string[] {
  return taskType === "supervised_regression" ? REGRESSION_MEASURES : CLASSIFICATION_MEASURES;
}

export interface TaskBlock {
  task: TaskListItem;
  results: TaskResults;
}

export interface DatasetPageModel {
  dataset: Dataset;
  qualities: QualitiesResponse;
  taskBlocks: TaskBlock[];
}

export function leaderboardRows(results: TaskResults): StripRow[] {
  return results.series.map((series) => ({
    label: `${series.flow_name} v${series.flow_version}`,
    title: `best ${results.measure}: ${fmt(series.best)}`,
    href: `#/f/${series.flow_id}`,
    points: series.points.map((point) => ({
      x: point.value,
      title: `run ${point.run_id} · ${fmt(point.value)} · ${point.uploader} · ${fmtDate(point.uploaded_at)}`,
      href: `#/r/${point.run_id}`,
      runId: point.run_id,
    })),
  }));
}

function measureSelector(taskId: number, taskType: string, selected: string): string {
  const options = measuresFor(taskType)
    .map(
      (name) =>
        `<option value="${name}"${name === selected ? " selected" : ""}>${name}</option>`
    )
    .join("");
  return `<label class="measure-pick">measure <select class="measure" data-task-id="${taskId}">${options}</select></label>`;
}

export function renderTaskBlock(block: TaskBlock): string {
  const { task, results } = block;
  return [
    `<section class="task-block" data-task-id="${task.task_id}">`,
    `<h3><a href="#/t/${task.task_id}">Task ${task.task_id}</a> · ${escapeHtml(task.task_type)} on <code>${escapeHtml(task.target_feature)}</code></h3>`,
    measureSelector(task.task_id, task.task_type, results.measure),
    `<div class="chart-holder">${dotStrip(leaderboardRows(results))}</div>`,
    `<button class="export-svg" type="button">export SVG</button>`,
    `</section>`,
  ].join("\n");
}

export function renderDatasetPage(model: DatasetPageModel): string {
  const { dataset, qualities, taskBlocks } = model;
  const rows = Object.entries(qualities.qualities)
    .map(
      ([name, value]) =>
        `<tr><td>${escapeHtml(name)}</td><td class="num">${fmt(value)}</td></tr>`
    )
    .join("");
  const header = [
    `<h1>${escapeHtml(dataset.name)} <span class="version">v${dataset.version}</span> <span class="badge status-${escapeHtml(dataset.status)}">${escapeHtml(dataset.status)}</span></h1>`,
    `<p class="meta">uploaded by ${escapeHtml(dataset.uploader_name ?? String(dataset.uploader))} on ${fmtDate(dataset.uploaded_at)} · licence ${escapeHtml(dataset.licence ?? "—")} · default target <code>${escapeHtml(dataset.default_target ?? "—")}</code></p>`,
    dataset.description ? `<p class="description">${escapeHtml(dataset.description)}</p>` : "",
  ].join("\n");
  const tasks =
    taskBlocks.length === 0
      ? `<p class="empty">No tasks on this dataset yet.</p>`
      : taskBlocks.map(renderTaskBlock).join("\n");
  return [
    `<article class="page dataset-page" data-dataset-id="${dataset.dataset_id}">`,
    header,
    `<h2>Tasks &amp; results</h2>`,
    tasks,
    `<h2>Data characteristics</h2>`,
    `<table class="qualities"><thead><tr><th>characteristic</th><th>value</th></tr></thead><tbody>${rows}</tbody></table>`,
    `</article>`,
  ].join("\n");
}
