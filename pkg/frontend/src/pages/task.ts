// Task page: the protocol fields plus the same leaderboard strip the
// dataset page shows, for this one task.

import { dotStrip } from "../chart.js";
import { escapeHtml, fmt } from "../format.js";
import { TaskDescription, TaskResults } from "../types.js";
import { leaderboardRows, measuresFor } from "./dataset.js";

export interface TaskPageModel {
  task: TaskDescription;
  results: TaskResults;
  datasetName: string;
}

function estimationSummary(task: TaskDescription): string {
  const est = task.estimation_procedure;
  const core =
    est.type === "holdout"
      ? `holdout ${fmt((est.holdout_fraction ?? 0) * 100)}% test`
      : `${est.folds}-fold cross-validation`;
  const strat = est.stratified ? "stratified" : "unstratified";
  const repeats = est.repeats > 1 ? `, ${est.repeats} repeats` : "";
  return `${strat} ${core}${repeats}, seed ${est.seed}`;
}

export function renderTaskPage(model: TaskPageModel): string {
  const { task, results, datasetName } = model;
  const options = measuresFor(task.task_type)
    .map(
      (name) =>
        `<option value="${name}"${name === results.measure ? " selected" : ""}>${name}</option>`
    )
    .join("");
  return [
    `<article class="page task-page" data-task-id="${task.task_id}">`,
    `<h1>Task ${task.task_id} <span class="badge">${escapeHtml(task.task_type)}</span></h1>`,
    `<p class="meta">dataset <a href="#/d/${task.dataset_id}">${escapeHtml(datasetName)}</a> · target <code>${escapeHtml(task.target_feature)}</code> · ${escapeHtml(estimationSummary(task))} · optimizes <code>${escapeHtml(task.evaluation_measure)}</code></p>`,
    `<h2>Leaderboard</h2>`,
    `<label class="measure-pick">measure <select class="measure" data-task-id="${task.task_id}">${options}</select></label>`,
    `<div class="chart-holder">${dotStrip(leaderboardRows(results))}</div>`,
    `<button class="export-svg" type="button">export SVG</button>`,
    `</article>`,
  ].join("\n");
}
