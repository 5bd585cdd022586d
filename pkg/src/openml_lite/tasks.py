"""Task types, task creation, and machine-readable task descriptions.

A task pins everything a client needs to produce comparable results: the
dataset, the target attribute, the resampling procedure (with seed), and
the measure to optimize.  Creating the same task twice returns the first
task's id instead of a duplicate.  The description is rendered as JSON or
XML with an identical field set in a fixed order:

    task_id, task_type, dataset_id, target_feature,
    estimation_procedure{type, repeats, folds|holdout_fraction, stratified, seed},
    evaluation_measure, dataset_url, splits_url, excluded_rowids
"""

from __future__ import annotations

import json
from xml.sax.saxutils import escape

from .arff import parse_arff, validate_for_task, write_arff
from .errors import NotFoundError, ValidationError
from .metrics import MEASURES
from .splits import (
    DEFAULT_ESTIMATION,
    EstimationProcedure,
    SplitTable,
    excluded_rowids,
    generate_splits,
)
from .store import Registry, utcnow

SUPERVISED_CLASSIFICATION = "supervised_classification"
SUPERVISED_REGRESSION = "supervised_regression"

TASK_TYPES = (
    {
        "task_type_id": 1,
        "name": SUPERVISED_CLASSIFICATION,
        "required_inputs": ["dataset_id", "target_feature", "estimation_procedure"],
        "required_outputs": ["predictions"],
        "protocol_text": (
            "Train on every TRAIN partition of the split table, predict each "
            "TEST row's class (optionally with per-class confidences), and "
            "submit one predictions file covering all repeats and folds."
        ),
    },
    {
        "task_type_id": 2,
        "name": SUPERVISED_REGRESSION,
        "required_inputs": ["dataset_id", "target_feature", "estimation_procedure"],
        "required_outputs": ["predictions"],
        "protocol_text": (
            "Train on every TRAIN partition of the split table, predict each "
            "TEST row's numeric target, and submit one predictions file "
            "covering all repeats and folds."
        ),
    },
)

DEFAULT_MEASURE = {
    SUPERVISED_CLASSIFICATION: "predictive_accuracy",
    SUPERVISED_REGRESSION: "root_mean_squared_error",
}

XML_NAMESPACE = "urn:openml-lite:task"


def task_type_by_name(name: str) -> dict:
    for task_type in TASK_TYPES:
        if task_type["name"] == name:
            return task_type
    raise ValidationError(
        f"unknown task type '{name}' (choose from {[t['name'] for t in TASK_TYPES]})"
    )


def default_estimation(task_type_name: str) -> EstimationProcedure:
    """Stratified 10-fold CV, seed 0; regression drops stratification."""
    if task_type_name == SUPERVISED_CLASSIFICATION:
        return DEFAULT_ESTIMATION
    return EstimationProcedure(
        kind="crossvalidation", repeats=1, folds=10, stratified=False, seed=0
    )


def create_task(
    registry: Registry,
    actor_key: str,
    task_type_name: str,
    dataset_id: int,
    target: str,
    estimation: EstimationProcedure | None = None,
    optimization_measure: str | None = None,
) -> int:
    """Create (or find) the task for this exact 5-tuple and return its id.

    Splits are generated eagerly so an active task always has its split
    blob; the task content is immutable afterwards.
    """
    user = registry.resolve_key(actor_key)
    task_type = task_type_by_name(task_type_name)
    dataset = registry.get_dataset(dataset_id)
    if dataset["status"] != "active":
        raise ValidationError(
            f"dataset {dataset_id} is {dataset['status']}; tasks need an active dataset"
        )
    if estimation is None:
        estimation = default_estimation(task_type_name)
    estimation.validate()
    if estimation.stratified and task_type_name != SUPERVISED_CLASSIFICATION:
        raise ValidationError("stratified estimation is only valid for classification")
    measure = optimization_measure or DEFAULT_MEASURE[task_type_name]
    if measure not in MEASURES:
        raise ValidationError(f"unknown measure '{measure}'")
    if task_type_name not in MEASURES[measure].task_types:
        raise ValidationError(f"measure '{measure}' does not apply to {task_type_name}")

    relation = parse_arff(registry.get_blob(dataset["source"]["blob"]))
    findings = validate_for_task(relation, target, task_type_name)
    if findings:
        raise ValidationError("; ".join(findings))

    wire_estimation = estimation.to_wire()
    with registry.lock:
        for existing in registry.all_tasks():
            if (
                existing["task_type"] == task_type_name
                and existing["dataset_id"] == dataset_id
                and existing["target_feature"] == target
                and existing["estimation_procedure"] == wire_estimation
                and existing["evaluation_measure"] == measure
            ):
                return existing["task_id"]
        table = generate_splits(relation, target, estimation)
        splits_blob = registry.put_blob(write_arff(table.to_relation()))
        payload = {
            "task_type": task_type_name,
            "task_type_id": task_type["task_type_id"],
            "dataset_id": dataset_id,
            "target_feature": target,
            "estimation_procedure": wire_estimation,
            "evaluation_measure": measure,
            "splits_blob": splits_blob,
            "excluded_rowids": excluded_rowids(relation, target),
            "created_by": user["user_id"],
            "created_at": utcnow(),
        }
        return registry.put_task(payload, actor=user["user_id"])


def get_task_splits(registry: Registry, task_id: int) -> bytes:
    task = registry.get_task(task_id)
    return registry.get_blob(task["splits_blob"])


def load_split_table(registry: Registry, task_id: int) -> SplitTable:
    return SplitTable.from_relation(parse_arff(get_task_splits(registry, task_id)))


def description_fields(registry: Registry, task_id: int) -> dict:
    """The pinned field set, in canonical order."""
    task = registry.get_task(task_id)
    return {
        "task_id": task["task_id"],
        "task_type": task["task_type"],
        "dataset_id": task["dataset_id"],
        "target_feature": task["target_feature"],
        "estimation_procedure": task["estimation_procedure"],
        "evaluation_measure": task["evaluation_measure"],
        "dataset_url": f"/api/v1/data/{task['dataset_id']}/file",
        "splits_url": f"/api/v1/task/{task['task_id']}/splits",
        "excluded_rowids": list(task["excluded_rowids"]),
    }


def render_task_description(registry: Registry, task_id: int, fmt: str = "json") -> tuple[str, bytes]:
    """Render the task description; returns (content_type, body)."""
    fields = description_fields(registry, task_id)
    if fmt == "json":
        body = json.dumps(fields, indent=2) + "\n"
        return "application/json", body.encode()
    if fmt != "xml":
        raise ValidationError(f"unknown task description format '{fmt}'")

    def xml_value(value) -> str:
        if isinstance(value, bool):
            return "true" if value else "false"
        return escape(str(value))

    lines = [f'<oml:task xmlns:oml="{XML_NAMESPACE}">']
    for key, value in fields.items():
        if key == "estimation_procedure":
            lines.append("  <oml:estimation_procedure>")
            for sub_key, sub_value in value.items():
                lines.append(
                    f"    <oml:{sub_key}>{xml_value(sub_value)}</oml:{sub_key}>"
                )
            lines.append("  </oml:estimation_procedure>")
        elif key == "excluded_rowids":
            joined = ",".join(str(v) for v in value)
            lines.append(f"  <oml:excluded_rowids>{joined}</oml:excluded_rowids>")
        else:
            lines.append(f"  <oml:{key}>{xml_value(value)}</oml:{key}>")
    lines.append("</oml:task>")
    return "application/xml", ("\n".join(lines) + "\n").encode()
