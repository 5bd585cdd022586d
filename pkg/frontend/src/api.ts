// Thin fetch wrapper over the /api/v1 routes this UI is allowed to use.

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: unknown
  ) {
    super(`API error ${status}`);
  }
}

export async function getJSON<T>(path: string): Promise<T> {
  const response = await fetch(path);
  if (!response.ok) {
    let detail: unknown = null;
    try {
      detail = (await response.json()).detail;
    } catch {
      detail = await response.text();
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export const api = {
  dataset: (id: number) => `/api/v1/data/${id}`,
  datasetQualities: (id: number) => `/api/v1/data/${id}/qualities`,
  datasetList: (q: string) => `/api/v1/data?filter=${encodeURIComponent(q)}`,
  taskList: (q: string) => `/api/v1/task?filter=${encodeURIComponent(q)}`,
  tasksOfDataset: (id: number) => `/api/v1/task?dataset_id=${id}`,
  task: (id: number) => `/api/v1/task/${id}`,
  taskResults: (id: number, measure?: string) =>
    measure
      ? `/api/v1/task/${id}/results?measure=${encodeURIComponent(measure)}`
      : `/api/v1/task/${id}/results`,
  flow: (id: number) => `/api/v1/flow/${id}`,
  flowList: (q: string) => `/api/v1/flow?filter=${encodeURIComponent(q)}`,
  flowResults: (id: number, colorParameter?: string) =>
    colorParameter
      ? `/api/v1/flow/${id}/results?color_parameter=${encodeURIComponent(colorParameter)}`
      : `/api/v1/flow/${id}/results`,
  run: (id: number) => `/api/v1/run/${id}`,
};
