// Hash router and event wiring. All rendering is done by the pure page
// modules; this file only fetches, mounts, and reacts.

import { api, getJSON } from "./api.js";
import {
  Dataset,
  Flow,
  FlowResults,
  Page,
  QualitiesResponse,
  Run,
  TaskDescription,
  TaskListItem,
  TaskResults,
} from "./types.js";
import { renderDatasetPage, renderTaskBlock, TaskBlock } from "./pages/dataset.js";
import { renderFlowPage } from "./pages/flow.js";
import { renderRunPage } from "./pages/run.js";
import { renderTaskPage } from "./pages/task.js";
import { renderDatasetList, renderFlowList, renderTaskList } from "./pages/browse.js";

const root = (): HTMLElement => document.getElementById("root") as HTMLElement;

function mount(html: string): void {
  root().innerHTML = html;
}

function fail(error: unknown): void {
  mount(`<article class="page"><div class="error-panel"><h2>Request failed</h2><p>${String(error)}</p></div></article>`);
}

async function showDataset(id: number): Promise<void> {
  const [dataset, qualities, tasks] = await Promise.all([
    getJSON<Dataset>(api.dataset(id)),
    getJSON<QualitiesResponse>(api.datasetQualities(id)),
    getJSON<Page<TaskListItem>>(api.tasksOfDataset(id)),
  ]);
  const taskBlocks: TaskBlock[] = await Promise.all(
    tasks.items.map(async (task) => ({
      task,
      results: await getJSON<TaskResults>(api.taskResults(task.task_id)),
    }))
  );
  mount(renderDatasetPage({ dataset, qualities, taskBlocks }));
}

async function showTask(id: number): Promise<void> {
  const task = await getJSON<TaskDescription>(api.task(id));
  const [results, dataset] = await Promise.all([
    getJSON<TaskResults>(api.taskResults(id)),
    getJSON<Dataset>(api.dataset(task.dataset_id)),
  ]);
  mount(renderTaskPage({ task, results, datasetName: dataset.name }));
}

async function showFlow(id: number): Promise<void> {
  const flow = await getJSON<Flow>(api.flow(id));
  // color by the first declared parameter when there is one
  const colorParameter = flow.parameters[0]?.name;
  const results = await getJSON<FlowResults>(api.flowResults(id, colorParameter));
  mount(renderFlowPage({ flow, results }));
}

async function showRun(id: number): Promise<void> {
  const run = await getJSON<Run>(api.run(id));
  mount(renderRunPage({ run }));
}

async function showBrowse(kind: string, query: string): Promise<void> {
  if (kind === "datasets") {
    mount(renderDatasetList(await getJSON<Page<Dataset>>(api.datasetList(query)), query));
  } else if (kind === "tasks") {
    mount(renderTaskList(await getJSON<Page<TaskListItem>>(api.taskList(query)), query));
  } else {
    mount(renderFlowList(await getJSON<Page<Flow>>(api.flowList(query)), query));
  }
}

export async function route(): Promise<void> {
  const hash = window.location.hash || "#/datasets";
  const entity = hash.match(/^#\/([dftr])\/(\d+)$/);
  try {
    if (entity) {
      const id = Number(entity[2]);
      if (entity[1] === "d") await showDataset(id);
      else if (entity[1] === "f") await showFlow(id);
      else if (entity[1] === "t") await showTask(id);
      else await showRun(id);
      return;
    }
    const browse = hash.match(/^#\/(datasets|tasks|flows)(?:\?q=(.*))?$/);
    if (browse) {
      await showBrowse(browse[1] as string, decodeURIComponent(browse[2] ?? ""));
      return;
    }
    mount(`<article class="page"><h1>Not found</h1><p>Unknown page ${hash}</p></article>`);
  } catch (error) {
    fail(error);
  }
}

// measure selector: re-query the aggregation endpoint and swap the block
async function onMeasureChange(select: HTMLSelectElement): Promise<void> {
  const taskId = Number(select.dataset["taskId"]);
  const results = await getJSON<TaskResults>(api.taskResults(taskId, select.value));
  const block = select.closest(".task-block");
  if (block) {
    const holder = document.createElement("div");
    holder.innerHTML = renderTaskBlock({
      task: {
        task_id: taskId,
        task_type: "supervised_classification",
        dataset_id: 0,
        dataset_name: "",
        target_feature: block.querySelector("code")?.textContent ?? "",
        evaluation_measure: results.measure,
      },
      results,
    });
    const next = holder.firstElementChild;
    if (next) block.replaceWith(next);
  } else {
    await route(); // task page: simplest correct refresh
  }
}

// dot hover: enrich the tooltip with run metadata, fetched once
const hovered = new Set<number>();
async function onDotHover(circle: SVGCircleElement): Promise<void> {
  const runId = Number(circle.dataset["runId"]);
  if (!runId || hovered.has(runId)) return;
  hovered.add(runId);
  try {
    const run = await getJSON<Run>(api.run(runId));
    const title = circle.querySelector("title");
    if (title) {
      title.textContent =
        `run ${run.run_id} · flow ${run.flow_id} · ${run.setting_origin}` +
        (run.parameter_settings.length
          ? ` · ${run.parameter_settings.map(([k, v]) => `${k}=${String(v)}`).join(", ")}`
          : "");
    }
  } catch {
    hovered.delete(runId); // retry on next hover
  }
}

function exportSvg(button: HTMLElement): void {
  const svg = button.parentElement?.querySelector("svg.dot-strip");
  if (!svg) return;
  const blob = new Blob([svg.outerHTML], { type: "image/svg+xml" });
  const link = document.createElement("a");
  link.href = URL.createObjectURL(blob);
  link.download = "chart.svg";
  link.click();
  URL.revokeObjectURL(link.href);
}

export function wire(): void {
  window.addEventListener("hashchange", () => void route());
  document.addEventListener("change", (event) => {
    const target = event.target as HTMLElement;
    if (target.matches("select.measure")) void onMeasureChange(target as HTMLSelectElement);
  });
  document.addEventListener("submit", (event) => {
    const form = event.target as HTMLFormElement;
    if (!form.matches("form.search")) return;
    event.preventDefault();
    const q = (form.elements.namedItem("q") as HTMLInputElement).value;
    window.location.hash = `#/${form.dataset["kind"]}?q=${encodeURIComponent(q)}`;
  });
  document.addEventListener("mouseover", (event) => {
    const target = event.target as Element;
    if (target instanceof SVGCircleElement && target.classList.contains("dot")) {
      void onDotHover(target);
    }
  });
  document.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.matches("button.export-svg")) exportSvg(target);
  });
  void route();
}

if (typeof document !== "undefined" && document.getElementById("root")) {
  wire();
}
