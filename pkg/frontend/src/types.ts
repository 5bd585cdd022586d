// Shapes of the /api/v1 JSON responses the pages consume.
// Nothing on screen is allowed to come from anywhere else.

export interface Page<T> {
  total: number;
  offset: number;
  limit: number;
  items: T[];
}

export interface Dataset {
  dataset_id: number;
  name: string;
  version: number;
  version_label: string | null;
  description: string | null;
  licence: string | null;
  citation: string | null;
  paper_url: string | null;
  default_target: string | null;
  row_id_attribute: string | null;
  uploader: number;
  uploader_name?: string;
  uploaded_at: string;
  status: string;
  status_reason?: string | null;
  qualities?: Record<string, number> | null;
}

export interface QualitiesResponse {
  dataset_id: number;
  qualities: Record<string, number>;
  quality_meta: Record<string, unknown>;
}

export interface TaskListItem {
  task_id: number;
  task_type: string;
  dataset_id: number;
  dataset_name: string;
  target_feature: string;
  evaluation_measure: string;
}

export interface TaskDescription {
  task_id: number;
  task_type: string;
  dataset_id: number;
  target_feature: string;
  estimation_procedure: {
    type: string;
    repeats: number;
    folds?: number | null;
    holdout_fraction?: number | null;
    stratified: boolean;
    seed: number;
  };
  evaluation_measure: string;
  dataset_url: string;
  splits_url: string;
  excluded_rowids: number[];
}

export interface LeaderboardPoint {
  run_id: number;
  value: number;
  uploader: string;
  uploaded_at: string;
}

export interface LeaderboardSeries {
  flow_id: number;
  flow_name: string;
  flow_version: number;
  best: number;
  points: LeaderboardPoint[];
}

export interface TaskResults {
  task_id: number;
  measure: string;
  higher_is_better: boolean;
  series: LeaderboardSeries[];
}

export interface FlowParameter {
  name: string;
  data_type: string;
  default: unknown;
  recommended_range: unknown;
  description: string | null;
}

export interface Flow {
  flow_id: number;
  name: string;
  version: number;
  version_label: string | null;
  description: string | null;
  licence: string | null;
  uploader: number;
  uploader_name?: string;
  uploaded_at: string;
  parameters: FlowParameter[];
  annotations: Record<string, boolean>;
}

export interface FlowResultPoint {
  run_id: number;
  value: number;
  color: unknown;
  uploader: string;
  uploaded_at: string;
}

export interface FlowResultSeries {
  task_id: number;
  measure: string;
  points: FlowResultPoint[];
}

export interface FlowResults {
  flow_id: number;
  flow_name: string;
  flow_version: number;
  color_parameter: string | null;
  series: FlowResultSeries[];
}

export interface MeasureEntry {
  name: string;
  fold_values: (number | null)[];
  mean: number;
  std: number | null;
  flags?: string[];
}

export interface Evaluation {
  measures: Record<string, MeasureEntry>;
  headline_measure: string;
  headline: number;
  n_predictions: number;
  measure_set_version: string;
  confusion_matrix?: number[][];
  class_labels?: string[];
  per_class?: Record<string, { precision: number; recall: number; f1: number }>;
  flags?: string[] | null;
}

export interface Run {
  run_id: number;
  task_id: number;
  flow_id: number;
  uploader: number;
  uploader_name?: string;
  uploaded_at: string;
  parameter_settings: [string, unknown][];
  setting_origin: string;
  user_evaluations: unknown;
  hardware_note: string | null;
  predictions_url?: string;
  evaluation: Evaluation | null;
  evaluation_error?: string;
}
