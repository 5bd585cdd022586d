"""Server-side evaluation of uploaded prediction files.

A prediction file is ARFF with attributes ``repeat``, ``fold``, ``row_id``,
``prediction``, and (classification only) one ``confidence.<label>`` column
per declared target label.  Evaluation checks that the records cover every
TEST rowid of every (repeat, fold) exactly once, then computes every
applicable measure per fold plus a pooled confusion matrix and per-class
scores.  The headline value is the mean of the task's optimization measure
over folds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .arff import NOMINAL, NUMERIC, AttributeSpec, Relation
from .metrics import (
    MEASURES,
    UndefinedError,
    accuracy,
    averaged_scores,
    confusion_matrix,
    kappa,
    mean_absolute_error,
    multiclass_auc,
    per_class_scores,
    root_mean_squared_error,
)
from .splits import SplitTable

MEASURE_SET_VERSION = "1"

CONFIDENCE_SUM_TOLERANCE = 1e-6


class CoverageError(Exception):
    """Predictions do not cover the task's test rowids exactly once."""


class LabelError(Exception):
    """A predicted label is not among the target's declared labels."""


class ConsistencyError(Exception):
    """A confidence vector is missing, negative, or does not sum to 1."""


@dataclass(frozen=True)
class PredictionRecord:
    repeat: int
    fold: int
    row_id: int
    predicted: str | float
    confidences: dict[str, float] | None = None


@dataclass
class MeasureResult:
    """One measure across folds: values indexed repeat-major, their mean,
    and the unbiased sample std (absent for a single fold)."""

    name: str
    fold_values: list[float | None]
    mean: float
    std: float | None
    flags: tuple[str, ...] = ()

    def to_json_dict(self) -> dict:
        out = {
            "name": self.name,
            "fold_values": self.fold_values,
            "mean": self.mean,
            "std": self.std,
        }
        if self.flags:
            out["flags"] = list(self.flags)
        return out


@dataclass
class EvaluationResult:
    measures: dict[str, MeasureResult]
    headline_measure: str
    headline: float | None
    n_predictions: int
    confusion_matrix: list[list[int]] | None = None
    class_labels: tuple[str, ...] | None = None
    per_class: dict[str, dict] | None = None
    measure_set_version: str = MEASURE_SET_VERSION
    flags: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        out = {
            "measures": {k: m.to_json_dict() for k, m in self.measures.items()},
            "headline_measure": self.headline_measure,
            "headline": self.headline,
            "n_predictions": self.n_predictions,
            "measure_set_version": self.measure_set_version,
        }
        if self.confusion_matrix is not None:
            out["confusion_matrix"] = self.confusion_matrix
            out["class_labels"] = list(self.class_labels)
            out["per_class"] = self.per_class
        if self.flags:
            out["flags"] = self.flags
        return out


def records_to_relation(
    records: list[PredictionRecord], class_labels: tuple[str, ...] | None
) -> Relation:
    """Canonical prediction file: rows sorted by (repeat, fold, row_id);
    classification adds one confidence column per declared label."""
    attrs = [
        AttributeSpec("repeat", NUMERIC),
        AttributeSpec("fold", NUMERIC),
        AttributeSpec("row_id", NUMERIC),
    ]
    with_confidences = class_labels is not None and any(
        r.confidences is not None for r in records
    )
    if class_labels is not None:
        attrs.append(AttributeSpec("prediction", NOMINAL, labels=class_labels))
        if with_confidences:
            for label in class_labels:
                attrs.append(AttributeSpec(f"confidence.{label}", NUMERIC))
    else:
        attrs.append(AttributeSpec("prediction", NUMERIC))
    rows = []
    for rec in sorted(records, key=lambda r: (r.repeat, r.fold, r.row_id)):
        row = [float(rec.repeat), float(rec.fold), float(rec.row_id), rec.predicted]
        if with_confidences:
            conf = rec.confidences or {}
            row.extend(conf.get(label) for label in class_labels)
        rows.append(row)
    return Relation("predictions", attrs, rows)


def relation_to_records(
    rel: Relation, class_labels: tuple[str, ...] | None
) -> list[PredictionRecord]:
    """Parse and validate an uploaded prediction relation.

    Classification files must carry either a complete set of
    ``confidence.<label>`` columns or none at all; each present vector must
    be nonnegative and sum to 1 within 1e-6.
    """
    try:
        i_rep = rel.attribute_index("repeat")
        i_fold = rel.attribute_index("fold")
        i_row = rel.attribute_index("row_id")
        i_pred = rel.attribute_index("prediction")
    except KeyError as exc:
        raise ConsistencyError(f"prediction file is missing attribute {exc}") from None

    conf_idx: dict[str, int] = {}
    for i, attr in enumerate(rel.attributes):
        if attr.name.startswith("confidence."):
            conf_idx[attr.name[len("confidence."):]] = i
    if class_labels is None:
        if conf_idx:
            raise ConsistencyError("regression predictions cannot carry confidence columns")
    elif conf_idx and set(conf_idx) != set(class_labels):
        raise ConsistencyError(
            "confidence columns must cover every declared class or be absent entirely"
        )

    records = []
    for row in rel.rows:
        if row[i_rep] is None or row[i_fold] is None or row[i_row] is None:
            raise ConsistencyError("repeat/fold/row_id cells cannot be missing")
        predicted = row[i_pred]
        if predicted is None:
            raise ConsistencyError("prediction cells cannot be missing")
        if class_labels is not None:
            predicted = str(predicted)
            if predicted not in class_labels:
                raise LabelError(f"predicted label '{predicted}' is not declared on the target")
            confidences = None
            if conf_idx:
                confidences = {}
                for label, i in conf_idx.items():
                    value = row[i]
                    if value is None:
                        raise ConsistencyError("confidence cells cannot be missing")
                    if value < 0:
                        raise ConsistencyError("confidences must be nonnegative")
                    confidences[label] = value
                total = sum(confidences[label] for label in class_labels)
                if abs(total - 1.0) > CONFIDENCE_SUM_TOLERANCE:
                    raise ConsistencyError(
                        f"confidence vector sums to {total!r}, expected 1 +- 1e-6"
                    )
        else:
            if not isinstance(predicted, float):
                raise ConsistencyError("regression predictions must be numeric")
            confidences = None
        records.append(
            PredictionRecord(
                int(row[i_rep]), int(row[i_fold]), int(row[i_row]), predicted, confidences
            )
        )
    return records


def _check_coverage(table: SplitTable, records: list[PredictionRecord]) -> None:
    seen: set[tuple[int, int, int]] = set()
    by_fold: dict[tuple[int, int], set[int]] = {}
    for rec in records:
        key = (rec.repeat, rec.fold, rec.row_id)
        if key in seen:
            raise CoverageError(
                f"duplicate prediction for repeat {rec.repeat} fold {rec.fold} row_id {rec.row_id}"
            )
        seen.add(key)
        by_fold.setdefault((rec.repeat, rec.fold), set()).add(rec.row_id)

    expected_folds = {(row[2], row[3]) for row in table.rows}
    for rep, fold in sorted(expected_folds):
        expected = set(table.test_ids(rep, fold))
        got = by_fold.pop((rep, fold), set())
        missing = sorted(expected - got)
        extra = sorted(got - expected)
        if missing or extra:
            parts = [f"repeat {rep} fold {fold}:"]
            if missing:
                parts.append(f"missing row_ids {missing[:20]}")
            if extra:
                parts.append(f"unexpected row_ids {extra[:20]}")
            raise CoverageError(" ".join(parts))
    if by_fold:
        rep, fold = sorted(by_fold)[0]
        raise CoverageError(f"predictions for nonexistent repeat {rep} fold {fold}")


def _mean_std(values: list[float]) -> tuple[float, float | None]:
    # exactly rounded summation: k identical fold values average to that
    # exact value, so pooled and averaged accuracy agree on divisible folds
    mean = math.fsum(values) / len(values)
    if len(values) < 2:
        return mean, None
    var = math.fsum((v - mean) ** 2 for v in values) / (len(values) - 1)
    return mean, math.sqrt(var)


def _fold_measure(name: str, fold_values: list[float | None], flags=()) -> MeasureResult:
    defined = [v for v in fold_values if v is not None]
    mean, std = _mean_std(defined)
    return MeasureResult(name, fold_values, mean, std, tuple(flags))


def evaluate_run(
    relation: Relation,
    target: str,
    task_type: str,
    table: SplitTable,
    optimization_measure: str,
    records: list[PredictionRecord],
) -> EvaluationResult:
    """Compute all applicable measures for a run's predictions.

    Raises CoverageError / LabelError / ConsistencyError on invalid input.
    AUC is omitted (with a result-level flag) when confidences are absent
    or undefined on every fold.
    """
    _check_coverage(table, records)
    target_idx = relation.attribute_index(target)
    labels = relation.attributes[target_idx].labels
    classification = task_type == "supervised_classification"

    fold_keys = sorted({(r.repeat, r.fold) for r in records})
    by_fold = {key: [] for key in fold_keys}
    for rec in records:
        by_fold[(rec.repeat, rec.fold)].append(rec)
    for key in fold_keys:
        by_fold[key].sort(key=lambda r: r.row_id)

    def truth(rec: PredictionRecord):
        return relation.rows[rec.row_id][target_idx]

    measures: dict[str, MeasureResult] = {}
    result_flags: list[str] = []

    if classification:
        acc_folds, kappa_folds = [], []
        macro = {"precision": [], "recall": [], "f1": []}
        weighted = {"precision": [], "recall": [], "f1": []}
        auc_folds: list[float | None] = []
        have_conf = all(rec.confidences is not None for rec in records)
        all_truths: list[str] = []
        all_preds: list[str] = []
        for key in fold_keys:
            recs = by_fold[key]
            truths = [truth(r) for r in recs]
            preds = [r.predicted for r in recs]
            all_truths.extend(truths)
            all_preds.extend(preds)
            acc_folds.append(accuracy(truths, preds))
            kappa_folds.append(kappa(truths, preds))
            fold_matrix = confusion_matrix(truths, preds, labels)
            avg = averaged_scores(fold_matrix, labels)
            for fld in ("precision", "recall", "f1"):
                macro[fld].append(avg[f"macro_{fld}"])
                weighted[fld].append(avg[f"weighted_{fld}"])
            if have_conf:
                try:
                    auc_folds.append(
                        multiclass_auc(truths, [r.confidences for r in recs], labels)
                    )
                except UndefinedError:
                    auc_folds.append(None)

        measures["predictive_accuracy"] = _fold_measure("predictive_accuracy", acc_folds)
        measures["kappa"] = _fold_measure("kappa", kappa_folds)
        names = {"precision": "precision", "recall": "recall", "f1": "f_measure"}
        for fld, public in names.items():
            measures[public] = _fold_measure(public, macro[fld])
            measures[f"weighted_{public}"] = _fold_measure(f"weighted_{public}", weighted[fld])
        if not have_conf:
            result_flags.append("area_under_roc_curve omitted: no confidences supplied")
        elif all(v is None for v in auc_folds):
            result_flags.append("area_under_roc_curve omitted: undefined on every fold")
        else:
            flags = [
                f"undefined for repeat {key[0]} fold {key[1]}"
                for key, v in zip(fold_keys, auc_folds)
                if v is None
            ]
            measures["area_under_roc_curve"] = _fold_measure(
                "area_under_roc_curve", auc_folds, flags
            )

        pooled = confusion_matrix(all_truths, all_preds, labels)
        scores = per_class_scores(pooled, labels)
        per_class = {
            label: {
                "precision": s.precision,
                "recall": s.recall,
                "f1": s.f1,
                **({"flags": list(s.flags)} if s.flags else {}),
            }
            for label, s in scores.items()
        }
        confusion = pooled
    else:
        mae_folds, rmse_folds = [], []
        for key in fold_keys:
            recs = by_fold[key]
            truths = [truth(r) for r in recs]
            preds = [r.predicted for r in recs]
            mae_folds.append(mean_absolute_error(truths, preds))
            rmse_folds.append(root_mean_squared_error(truths, preds))
        measures["mean_absolute_error"] = _fold_measure("mean_absolute_error", mae_folds)
        measures["root_mean_squared_error"] = _fold_measure(
            "root_mean_squared_error", rmse_folds
        )
        confusion = None
        per_class = None

    if optimization_measure not in MEASURES:
        raise ValueError(f"unknown optimization measure '{optimization_measure}'")
    headline = None
    if optimization_measure in measures:
        headline = measures[optimization_measure].mean
    else:
        result_flags.append(f"headline measure '{optimization_measure}' unavailable")

    return EvaluationResult(
        measures=measures,
        headline_measure=optimization_measure,
        headline=headline,
        n_predictions=len(records),
        confusion_matrix=confusion,
        class_labels=labels if classification else None,
        per_class=per_class,
        flags=result_flags,
    )
