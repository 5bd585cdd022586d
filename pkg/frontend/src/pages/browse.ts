// Browse pages: keyword-filtered tables of datasets, tasks, and flows.
// The filter box re-queries the corresponding list endpoint.

import { escapeHtml, fmt, fmtDate } from "../format.js";
import { Dataset, Flow, Page, TaskListItem } from "../types.js";

function searchBox(kind: string, query: string): string {
  return [
    `<form class="search" data-kind="${kind}">`,
    `<input type="search" name="q" placeholder="keyword filter" value="${escapeHtml(query)}"/>`,
    `<button type="submit">search</button>`,
    `</form>`,
  ].join("");
}

function counts(page: Page<unknown>): string {
  const shown = page.items.length;
  return `<p class="meta">${shown} of ${page.total} shown</p>`;
}

export function renderDatasetList(page: Page<Dataset>, query = ""): string {
  const rows = page.items
    .map((d) => {
      const instances = d.qualities?.["NumberOfInstances"];
      return `<tr><td><a href="#/d/${d.dataset_id}">${escapeHtml(d.name)}</a></td><td>v${d.version}</td><td><span class="badge status-${escapeHtml(d.status)}">${escapeHtml(d.status)}</span></td><td class="num">${instances === undefined ? "—" : fmt(instances)}</td><td>${escapeHtml(d.uploader_name ?? String(d.uploader))}</td><td>${fmtDate(d.uploaded_at)}</td></tr>`;
    })
    .join("");
  return [
    `<article class="page browse-page" data-kind="datasets">`,
    `<h1>Datasets</h1>`,
    searchBox("datasets", query),
    counts(page),
    `<table class="listing"><thead><tr><th>name</th><th>version</th><th>status</th><th>instances</th><th>uploader</th><th>uploaded</th></tr></thead><tbody>${rows}</tbody></table>`,
    `</article>`,
  ].join("\n");
}

export function renderTaskList(page: Page<TaskListItem>, query = ""): string {
  const rows = page.items
    .map(
      (t) =>
        `<tr><td><a href="#/t/${t.task_id}">task ${t.task_id}</a></td><td>${escapeHtml(t.task_type)}</td><td><a href="#/d/${t.dataset_id}">${escapeHtml(t.dataset_name)}</a></td><td><code>${escapeHtml(t.target_feature)}</code></td><td>${escapeHtml(t.evaluation_measure)}</td></tr>`
    )
    .join("");
  return [
    `<article class="page browse-page" data-kind="tasks">`,
    `<h1>Tasks</h1>`,
    searchBox("tasks", query),
    counts(page),
    `<table class="listing"><thead><tr><th>task</th><th>type</th><th>dataset</th><th>target</th><th>measure</th></tr></thead><tbody>${rows}</tbody></table>`,
    `</article>`,
  ].join("\n");
}

export function renderFlowList(page: Page<Flow>, query = ""): string {
  const rows = page.items
    .map(
      (f) =>
        `<tr><td><a href="#/f/${f.flow_id}">${escapeHtml(f.name)}</a></td><td>v${f.version}</td><td>${escapeHtml(f.uploader_name ?? String(f.uploader))}</td><td>${fmtDate(f.uploaded_at)}</td></tr>`
    )
    .join("");
  return [
    `<article class="page browse-page" data-kind="flows">`,
    `<h1>Flows</h1>`,
    searchBox("flows", query),
    counts(page),
    `<table class="listing"><thead><tr><th>name</th><th>version</th><th>uploader</th><th>uploaded</th></tr></thead><tbody>${rows}</tbody></table>`,
    `</article>`,
  ].join("\n");
}
