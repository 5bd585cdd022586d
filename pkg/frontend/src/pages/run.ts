// Run page: headline measure with its fold spread, the full per-fold
// table, confusion matrix, per-class scores, and the submitted settings.
// A run whose evaluation failed gets an error panel instead of numbers.

import { escapeHtml, fmt, fmtDate, plusMinus } from "../format.js";
import { Evaluation, Run } from "../types.js";

export interface RunPageModel {
  run: Run;
}

function foldTable(evaluation: Evaluation): string {
  const names = Object.keys(evaluation.measures);
  const foldCount = Math.max(
    ...names.map((name) => evaluation.measures[name]?.fold_values.length ?? 0)
  );
  const head = names.map((name) => `<th>${escapeHtml(name)}</th>`).join("");
  const body: string[] = [];
  for (let fold = 0; fold < foldCount; fold++) {
    const cells = names
      .map((name) => {
        const value = evaluation.measures[name]?.fold_values[fold];
        return `<td class="num">${fmt(value)}</td>`;
      })
      .join("");
    body.push(`<tr><td>fold ${fold}</td>${cells}</tr>`);
  }
  const means = names
    .map((name) => `<td class="num">${fmt(evaluation.measures[name]?.mean)}</td>`)
    .join("");
  const stds = names
    .map((name) => `<td class="num">${plusMinus(evaluation.measures[name]?.std)}</td>`)
    .join("");
  return [
    `<table class="folds"><thead><tr><th></th>${head}</tr></thead><tbody>`,
    body.join(""),
    `<tr class="mean"><td>mean</td>${means}</tr>`,
    `<tr class="std"><td>std</td>${stds}</tr>`,
    `</tbody></table>`,
  ].join("");
}

function confusionMatrix(evaluation: Evaluation): string {
  const labels = evaluation.class_labels ?? [];
  const matrix = evaluation.confusion_matrix ?? [];
  if (labels.length === 0 || matrix.length === 0) return "";
  const head = labels
    .map((label) => `<th class="pred">${escapeHtml(label)}</th>`)
    .join("");
  const rows = matrix
    .map((row, i) => {
      const cells = row
        .map(
          (count, j) =>
            `<td class="num${i === j ? " diag" : ""}">${count}</td>`
        )
        .join("");
      return `<tr><th class="truth">${escapeHtml(labels[i] ?? "")}</th>${cells}</tr>`;
    })
    .join("");
  return [
    `<h2>Confusion matrix <span class="hint">(rows: truth, columns: predicted)</span></h2>`,
    `<table class="confusion"><thead><tr><th></th>${head}</tr></thead><tbody>${rows}</tbody></table>`,
  ].join("\n");
}

function perClassTable(evaluation: Evaluation): string {
  const labels = evaluation.class_labels ?? [];
  const perClass = evaluation.per_class ?? {};
  if (labels.length === 0) return "";
  const rows = labels
    .map((label) => {
      const scores = perClass[label];
      if (!scores) return "";
      return `<tr><td>${escapeHtml(label)}</td><td class="num">${fmt(scores.precision)}</td><td class="num">${fmt(scores.recall)}</td><td class="num">${fmt(scores.f1)}</td></tr>`;
    })
    .join("");
  return [
    `<h2>Per-class scores</h2>`,
    `<table class="per-class"><thead><tr><th>class</th><th>precision</th><th>recall</th><th>F1</th></tr></thead><tbody>${rows}</tbody></table>`,
  ].join("\n");
}

function settingsBlock(run: Run): string {
  const settings =
    run.parameter_settings.length === 0
      ? `<li class="empty">none (flow defaults)</li>`
      : run.parameter_settings
          .map(
            ([name, value]) =>
              `<li><code>${escapeHtml(name)}</code> = ${escapeHtml(String(value))}</li>`
          )
          .join("");
  return [
    `<h2>Parameter settings <span class="badge origin-${escapeHtml(run.setting_origin)}">${escapeHtml(run.setting_origin)}</span></h2>`,
    `<ul class="settings">${settings}</ul>`,
  ].join("\n");
}

export function renderRunPage(model: RunPageModel): string {
  const { run } = model;
  const header = [
    `<h1>Run ${run.run_id}</h1>`,
    `<p class="meta"><a href="#/t/${run.task_id}">task ${run.task_id}</a> · <a href="#/f/${run.flow_id}">flow ${run.flow_id}</a> · uploaded by ${escapeHtml(run.uploader_name ?? String(run.uploader))} on ${fmtDate(run.uploaded_at)}</p>`,
  ].join("\n");

  if (!run.evaluation || run.evaluation_error) {
    return [
      `<article class="page run-page failed" data-run-id="${run.run_id}">`,
      header,
      `<div class="error-panel"><h2>Evaluation failed</h2><p>${escapeHtml(run.evaluation_error ?? "no evaluation stored")}</p></div>`,
      settingsBlock(run),
      `</article>`,
    ].join("\n");
  }

  const evaluation = run.evaluation;
  const headlineEntry = evaluation.measures[evaluation.headline_measure];
  const predictions = run.predictions_url
    ? `<p><a href="${escapeHtml(run.predictions_url)}" class="download">download predictions</a></p>`
    : "";
  return [
    `<article class="page run-page" data-run-id="${run.run_id}">`,
    header,
    `<div class="headline"><span class="measure-name">${escapeHtml(evaluation.headline_measure)}</span> <span class="value">${fmt(evaluation.headline)}</span> <span class="std">${plusMinus(headlineEntry?.std)}</span></div>`,
    settingsBlock(run),
    `<h2>Per-fold measures</h2>`,
    `<div class="table-scroll">${foldTable(evaluation)}</div>`,
    confusionMatrix(evaluation),
    perClassTable(evaluation),
    predictions,
    `</article>`,
  ].join("\n");
}
