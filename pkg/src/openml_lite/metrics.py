"""Evaluation measures for classification and regression predictions.

Classification measures work over a fixed declared label order so that
confusion matrices and per-class vectors are indexable by class.  The AUC
is the Mann-Whitney statistic computed with midranks; multiclass AUC is the
prevalence-weighted one-vs-rest average (for binary problems with
complementary confidence columns this equals the classic positive-class
AUC).
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class UndefinedError(Exception):
    """Measure has no defined value for these inputs (e.g. single-class AUC)."""


@dataclass(frozen=True)
class MeasureSpec:
    name: str
    task_types: tuple[str, ...]
    needs_confidences: bool = False
    higher_is_better: bool = True


MEASURES: dict[str, MeasureSpec] = {
    spec.name: spec
    for spec in (
        MeasureSpec("predictive_accuracy", ("supervised_classification",)),
        MeasureSpec("kappa", ("supervised_classification",)),
        MeasureSpec("precision", ("supervised_classification",)),
        MeasureSpec("recall", ("supervised_classification",)),
        MeasureSpec("f_measure", ("supervised_classification",)),
        MeasureSpec("weighted_precision", ("supervised_classification",)),
        MeasureSpec("weighted_recall", ("supervised_classification",)),
        MeasureSpec("weighted_f_measure", ("supervised_classification",)),
        MeasureSpec(
            "area_under_roc_curve", ("supervised_classification",), needs_confidences=True
        ),
        MeasureSpec(
            "mean_absolute_error", ("supervised_regression",), higher_is_better=False
        ),
        MeasureSpec(
            "root_mean_squared_error", ("supervised_regression",), higher_is_better=False
        ),
    )
}


def accuracy(truths: list, preds: list) -> float:
    """Fraction of exact matches."""
    if len(truths) != len(preds) or not truths:
        raise ValueError("need equal-length nonempty truth/prediction lists")
    return sum(t == p for t, p in zip(truths, preds)) / len(truths)


def kappa(truths: list, preds: list) -> float:
    """Cohen's kappa: (p_o - p_e) / (1 - p_e), 0 when p_e = 1.

    p_e = sum over classes of (row marginal * column marginal) / n^2.
    """
    if len(truths) != len(preds) or not truths:
        raise ValueError("need equal-length nonempty truth/prediction lists")
    n = len(truths)
    classes = list(dict.fromkeys(list(truths) + list(preds)))
    row = {c: 0 for c in classes}
    col = {c: 0 for c in classes}
    for t, p in zip(truths, preds):
        row[t] += 1
        col[p] += 1
    p_o = accuracy(truths, preds)
    p_e = sum(row[c] * col[c] for c in classes) / (n * n)
    if p_e == 1.0:
        return 0.0
    return (p_o - p_e) / (1.0 - p_e)


def confusion_matrix(truths: list, preds: list, labels: tuple[str, ...]) -> list[list[int]]:
    """Square matrix indexed [truth][predicted] in declared label order."""
    index = {label: i for i, label in enumerate(labels)}
    matrix = [[0] * len(labels) for _ in labels]
    for t, p in zip(truths, preds):
        matrix[index[t]][index[p]] += 1
    return matrix


@dataclass
class ClassScores:
    precision: float
    recall: float
    f1: float
    flags: tuple[str, ...] = ()


def per_class_scores(matrix: list[list[int]], labels: tuple[str, ...]) -> dict[str, ClassScores]:
    """Precision/recall/F1 per declared class from a confusion matrix.

    A class nobody predicted gets precision 0 (flagged); a class with no
    actual instances gets recall 0 (flagged).
    """
    out: dict[str, ClassScores] = {}
    for i, label in enumerate(labels):
        tp = matrix[i][i]
        actual = sum(matrix[i])
        predicted = sum(row[i] for row in matrix)
        flags = []
        if predicted == 0:
            precision = 0.0
            flags.append("no_predicted_instances")
        else:
            precision = tp / predicted
        if actual == 0:
            recall = 0.0
            flags.append("no_actual_instances")
        else:
            recall = tp / actual
        f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
        out[label] = ClassScores(precision, recall, f1, tuple(flags))
    return out


def averaged_scores(matrix: list[list[int]], labels: tuple[str, ...]) -> dict[str, float]:
    """Macro and prevalence-weighted averages of the per-class scores."""
    scores = per_class_scores(matrix, labels)
    n = sum(sum(row) for row in matrix)
    out = {}
    for field in ("precision", "recall", "f1"):
        values = [getattr(scores[label], field) for label in labels]
        out[f"macro_{field}"] = sum(values) / len(labels)
        out[f"weighted_{field}"] = sum(
            sum(matrix[i]) / n * getattr(scores[label], field)
            for i, label in enumerate(labels)
        )
    return out


def auc(truth_flags: list[bool], scores: list[float]) -> float:
    """Mann-Whitney AUC with midranks for ties.

    AUC = (R+ - n_pos(n_pos+1)/2) / (n_pos * n_neg) where R+ is the sum of
    the positives' midranks in the ascending score ranking.
    """
    if len(truth_flags) != len(scores) or not scores:
        raise ValueError("need equal-length nonempty flag/score lists")
    n_pos = sum(1 for f in truth_flags if f)
    n_neg = len(truth_flags) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedError("AUC needs at least one positive and one negative")
    order = sorted(range(len(scores)), key=lambda i: scores[i])
    ranks = [0.0] * len(scores)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and scores[order[j + 1]] == scores[order[i]]:
            j += 1
        midrank = (i + 1 + j + 1) / 2.0
        for pos in range(i, j + 1):
            ranks[order[pos]] = midrank
        i = j + 1
    r_pos = sum(r for r, f in zip(ranks, truth_flags) if f)
    return (r_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def multiclass_auc(
    truths: list[str], confidences: list[dict[str, float]], labels: tuple[str, ...]
) -> float:
    """Prevalence-weighted one-vs-rest AUC over the observed classes."""
    n = len(truths)
    total = 0.0
    any_defined = False
    for label in labels:
        flags = [t == label for t in truths]
        n_pos = sum(flags)
        if n_pos == 0:
            continue
        if n_pos == n:
            raise UndefinedError(f"all instances belong to class '{label}'")
        scores = [c[label] for c in confidences]
        total += n_pos / n * auc(flags, scores)
        any_defined = True
    if not any_defined:
        raise UndefinedError("no class with both positives and negatives")
    return total


def mean_absolute_error(truths: list[float], preds: list[float]) -> float:
    if len(truths) != len(preds) or not truths:
        raise ValueError("need equal-length nonempty truth/prediction lists")
    return sum(abs(t - p) for t, p in zip(truths, preds)) / len(truths)


def root_mean_squared_error(truths: list[float], preds: list[float]) -> float:
    if len(truths) != len(preds) or not truths:
        raise ValueError("need equal-length nonempty truth/prediction lists")
    return math.sqrt(sum((t - p) ** 2 for t, p in zip(truths, preds)) / len(truths))
