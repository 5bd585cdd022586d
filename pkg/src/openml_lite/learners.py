"""Small deterministic classifiers used as landmarkers and reference flows.

All four learners share one contract: ``fit(rows, attributes, target)``
returns a fitted model whose ``predict(row)`` yields ``(label, confidences)``
with confidences keyed by the declared target labels, nonnegative, summing
to 1 within 1e-9.  Nothing here uses randomness; identical inputs give
identical models.  String and date attributes are ignored as features.

Tie rules are part of the contract:
  - predicted label on equal confidence: lowest declared class index
  - stump split on equal gain: lowest attribute index, then lowest threshold
  - nearest neighbor at equal distance: lowest training row index
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .arff import NOMINAL, NUMERIC, AttributeSpec

Row = list


def _argmax_label(probs: list[float], labels: tuple[str, ...]) -> str:
    best = 0
    for i in range(1, len(probs)):
        if probs[i] > probs[best]:
            best = i
    return labels[best]


def _normalize(counts: list[float]) -> list[float]:
    total = sum(counts)
    if total <= 0:
        return [1.0 / len(counts)] * len(counts)
    return [c / total for c in counts]


@dataclass
class _Problem:
    """Resolved schema: target position, class labels, usable feature columns."""

    target_idx: int
    labels: tuple[str, ...]
    feature_idx: list[int]
    attributes: list[AttributeSpec]

    @classmethod
    def resolve(cls, attributes: list[AttributeSpec], target: str) -> "_Problem":
        target_idx = next(i for i, a in enumerate(attributes) if a.name == target)
        target_attr = attributes[target_idx]
        if target_attr.kind != NOMINAL:
            raise ValueError(f"target '{target}' must be nominal")
        feature_idx = [
            i
            for i, a in enumerate(attributes)
            if i != target_idx and a.kind in (NUMERIC, NOMINAL)
        ]
        return cls(target_idx, target_attr.labels, feature_idx, attributes)

    def label_index(self, label: str) -> int:
        return self.labels.index(label)


def _class_counts(rows: list[Row], problem: _Problem) -> list[int]:
    counts = [0] * len(problem.labels)
    for row in rows:
        value = row[problem.target_idx]
        if value is not None:
            counts[problem.label_index(value)] += 1
    return counts


class MajorityModel:
    def __init__(self, problem: _Problem, counts: list[int]):
        self._labels = problem.labels
        self._probs = _normalize([float(c) for c in counts])
        best = max(range(len(counts)), key=lambda i: (counts[i], -i))
        self._label = problem.labels[best]

    def predict(self, row: Row) -> tuple[str, dict[str, float]]:
        return self._label, dict(zip(self._labels, self._probs))


class MajorityLearner:
    """Predicts the most frequent training class; confidences are the
    training class frequencies."""

    def fit(self, rows: list[Row], attributes: list[AttributeSpec], target: str) -> MajorityModel:
        problem = _Problem.resolve(attributes, target)
        counts = _class_counts(rows, problem)
        if sum(counts) == 0:
            raise ValueError("no training rows with an observed target")
        return MajorityModel(problem, counts)


def _entropy_of_counts(counts) -> float:
    total = sum(counts)
    if total == 0:
        return 0.0
    h = 0.0
    for c in counts:
        if c:
            p = c / total
            h -= p * math.log2(p)
    return h


class StumpModel:
    def __init__(self, problem: _Problem, root: list[float], split, left: list[float], right: list[float]):
        self._problem = problem
        self._root = root
        self._split = split  # (attr_idx, kind, threshold_or_label) or None
        self._left = left
        self._right = right

    def predict(self, row: Row) -> tuple[str, dict[str, float]]:
        probs = self._root
        if self._split is not None:
            attr_idx, kind, pivot = self._split
            value = row[attr_idx]
            if value is not None:
                if kind == NUMERIC:
                    probs = self._left if value <= pivot else self._right
                else:
                    probs = self._left if value == pivot else self._right
        labels = self._problem.labels
        return _argmax_label(probs, labels), dict(zip(labels, probs))


class StumpLearner:
    """Single-split decision stump maximizing information gain.

    Numeric candidates are midpoints between sorted adjacent distinct
    observed values; nominal candidates are one-vs-rest per declared label.
    Gain for a candidate is computed over the rows where that attribute is
    observed.  A stump with no positive-gain candidate predicts the global
    training distribution.
    """

    def fit(self, rows: list[Row], attributes: list[AttributeSpec], target: str) -> StumpModel:
        problem = _Problem.resolve(attributes, target)
        labeled = [r for r in rows if r[problem.target_idx] is not None]
        if not labeled:
            raise ValueError("no training rows with an observed target")
        n_labels = len(problem.labels)
        root_counts = _class_counts(labeled, problem)

        best = None  # (gain, attr_pos, pivot_pos, split, left_counts, right_counts)
        for attr_pos, attr_idx in enumerate(problem.feature_idx):
            attr = problem.attributes[attr_idx]
            observed = [r for r in labeled if r[attr_idx] is not None]
            if not observed:
                continue
            base_counts = _class_counts(observed, problem)
            base_h = _entropy_of_counts(base_counts)
            n_obs = len(observed)

            if attr.kind == NUMERIC:
                pairs = sorted((r[attr_idx], problem.label_index(r[problem.target_idx])) for r in observed)
                distinct = sorted({v for v, _ in pairs})
                candidates = [
                    (pos, (distinct[pos] + distinct[pos + 1]) / 2.0)
                    for pos in range(len(distinct) - 1)
                ]
                for pivot_pos, threshold in candidates:
                    left = [0] * n_labels
                    right = [0] * n_labels
                    for value, ci in pairs:
                        if value <= threshold:
                            left[ci] += 1
                        else:
                            right[ci] += 1
                    gain = base_h - (
                        sum(left) / n_obs * _entropy_of_counts(left)
                        + sum(right) / n_obs * _entropy_of_counts(right)
                    )
                    if gain > 0 and (best is None or gain > best[0]):
                        best = (gain, attr_pos, pivot_pos, (attr_idx, NUMERIC, threshold), left, right)
            else:
                for pivot_pos, label in enumerate(attr.labels):
                    left = [0] * n_labels
                    right = [0] * n_labels
                    for r in observed:
                        ci = problem.label_index(r[problem.target_idx])
                        if r[attr_idx] == label:
                            left[ci] += 1
                        else:
                            right[ci] += 1
                    gain = base_h - (
                        sum(left) / n_obs * _entropy_of_counts(left)
                        + sum(right) / n_obs * _entropy_of_counts(right)
                    )
                    if gain > 0 and (best is None or gain > best[0]):
                        best = (gain, attr_pos, pivot_pos, (attr_idx, NOMINAL, label), left, right)

        root = _normalize([float(c) for c in root_counts])
        if best is None:
            return StumpModel(problem, root, None, root, root)
        _, _, _, split, left_counts, right_counts = best
        left = _normalize([float(c) for c in left_counts]) if sum(left_counts) else root
        right = _normalize([float(c) for c in right_counts]) if sum(right_counts) else root
        return StumpModel(problem, root, split, left, right)


class KnnModel:
    def __init__(self, problem: _Problem, rows: list[Row], scale: dict[int, tuple[float, float]], k: int):
        self._problem = problem
        self._rows = rows
        self._scale = scale  # attr_idx -> (min, span)
        self._k = k

    def _scaled(self, attr_idx: int, value: float) -> float:
        lo, span = self._scale[attr_idx]
        if span == 0.0:
            return 0.0
        return (value - lo) / span

    def _distance(self, a: Row, b: Row) -> float:
        total = 0.0
        for attr_idx in self._problem.feature_idx:
            va, vb = a[attr_idx], b[attr_idx]
            if va is None or vb is None:
                total += 1.0
            elif self._problem.attributes[attr_idx].kind == NUMERIC:
                d = self._scaled(attr_idx, va) - self._scaled(attr_idx, vb)
                total += d * d
            elif va != vb:
                total += 1.0
        return math.sqrt(total)

    def predict(self, row: Row) -> tuple[str, dict[str, float]]:
        scored = []
        for idx, train_row in enumerate(self._rows):
            scored.append((self._distance(row, train_row), idx))
        scored.sort()  # ties resolve to lower training row index
        k = min(self._k, len(scored))
        votes = [0] * len(self._problem.labels)
        for _, idx in scored[:k]:
            votes[self._problem.label_index(self._rows[idx][self._problem.target_idx])] += 1
        probs = _normalize([float(v) for v in votes])
        return _argmax_label(probs, self._problem.labels), dict(zip(self._problem.labels, probs))


class KnnLearner:
    """Nearest neighbors over min-max rescaled numerics plus Hamming nominals.

    A missing value on either side contributes 1 to the squared distance for
    that attribute.  ``k`` defaults to 1; larger k takes a majority vote
    among the k nearest (distance ties favor lower training row index).
    """

    def __init__(self, k: int = 1):
        if not 1 <= k <= 25:
            raise ValueError("k must be in [1, 25]")
        self.k = k

    def fit(self, rows: list[Row], attributes: list[AttributeSpec], target: str) -> KnnModel:
        problem = _Problem.resolve(attributes, target)
        labeled = [r for r in rows if r[problem.target_idx] is not None]
        if not labeled:
            raise ValueError("no training rows with an observed target")
        scale: dict[int, tuple[float, float]] = {}
        for attr_idx in problem.feature_idx:
            if problem.attributes[attr_idx].kind != NUMERIC:
                continue
            observed = [r[attr_idx] for r in labeled if r[attr_idx] is not None]
            if observed:
                lo, hi = min(observed), max(observed)
                scale[attr_idx] = (lo, hi - lo)
            else:
                scale[attr_idx] = (0.0, 0.0)
        return KnnModel(problem, labeled, scale, self.k)


class NaiveBayesModel:
    def __init__(self, problem, priors, nominal_tables, gaussians, class_counts):
        self._problem = problem
        self._priors = priors
        self._nominal = nominal_tables  # attr_idx -> label -> per-class prob
        self._gauss = gaussians  # attr_idx -> per-class (mean, var) or None
        self._counts = class_counts

    def predict(self, row: Row) -> tuple[str, dict[str, float]]:
        problem = self._problem
        n_labels = len(problem.labels)
        scores = []
        for ci in range(n_labels):
            if self._priors[ci] == 0.0:
                scores.append(float("-inf"))
                continue
            s = math.log(self._priors[ci])
            for attr_idx in problem.feature_idx:
                value = row[attr_idx]
                if value is None:
                    continue
                if problem.attributes[attr_idx].kind == NOMINAL:
                    table = self._nominal[attr_idx]
                    s += math.log(table[value][ci])
                else:
                    stats = self._gauss[attr_idx]
                    if stats is None:
                        continue
                    mean, var = stats[ci]
                    s += -0.5 * math.log(2.0 * math.pi * var) - (value - mean) ** 2 / (2.0 * var)
            scores.append(s)
        peak = max(scores)
        if peak == float("-inf"):
            probs = [1.0 / n_labels] * n_labels
        else:
            raw = [math.exp(s - peak) if s != float("-inf") else 0.0 for s in scores]
            probs = _normalize(raw)
        return _argmax_label(probs, problem.labels), dict(zip(problem.labels, probs))


class NaiveBayesLearner:
    """Naive Bayes: add-1 smoothed multinomials for nominal attributes and
    per-class Gaussians (variance floor 1e-9) for numeric ones.

    Priors are unsmoothed class frequencies.  Missing values are skipped in
    both training counts and the prediction-time likelihood product.  A
    class with no observed values for a numeric attribute falls back to that
    attribute's global training mean/variance.
    """

    VAR_FLOOR = 1e-9

    def fit(self, rows: list[Row], attributes: list[AttributeSpec], target: str) -> NaiveBayesModel:
        problem = _Problem.resolve(attributes, target)
        labeled = [r for r in rows if r[problem.target_idx] is not None]
        if not labeled:
            raise ValueError("no training rows with an observed target")
        n_labels = len(problem.labels)
        counts = _class_counts(labeled, problem)
        total = sum(counts)
        priors = [c / total for c in counts]

        nominal_tables: dict[int, dict[str, list[float]]] = {}
        gaussians: dict[int, list[tuple[float, float]] | None] = {}
        for attr_idx in problem.feature_idx:
            attr = problem.attributes[attr_idx]
            if attr.kind == NOMINAL:
                per_class_obs = [0] * n_labels
                value_counts = {label: [0] * n_labels for label in attr.labels}
                for r in labeled:
                    v = r[attr_idx]
                    if v is None:
                        continue
                    ci = problem.label_index(r[problem.target_idx])
                    per_class_obs[ci] += 1
                    value_counts[v][ci] += 1
                n_vals = len(attr.labels)
                nominal_tables[attr_idx] = {
                    label: [
                        (value_counts[label][ci] + 1.0) / (per_class_obs[ci] + n_vals)
                        for ci in range(n_labels)
                    ]
                    for label in attr.labels
                }
            else:
                per_class: list[list[float]] = [[] for _ in range(n_labels)]
                everything: list[float] = []
                for r in labeled:
                    v = r[attr_idx]
                    if v is None:
                        continue
                    per_class[problem.label_index(r[problem.target_idx])].append(v)
                    everything.append(v)
                if not everything:
                    gaussians[attr_idx] = None
                    continue
                everything.sort()
                g_mean = sum(everything) / len(everything)
                g_var = max(
                    sum((v - g_mean) ** 2 for v in everything) / len(everything),
                    self.VAR_FLOOR,
                )
                stats = []
                for ci in range(n_labels):
                    values = sorted(per_class[ci])
                    if not values:
                        stats.append((g_mean, g_var))
                        continue
                    mean = sum(values) / len(values)
                    var = max(
                        sum((v - mean) ** 2 for v in values) / len(values),
                        self.VAR_FLOOR,
                    )
                    stats.append((mean, var))
                gaussians[attr_idx] = stats
        return NaiveBayesModel(problem, priors, nominal_tables, gaussians, counts)


LEARNERS = {
    "stump": StumpLearner,
    "1nn": KnnLearner,
    "naive_bayes": NaiveBayesLearner,
    "majority": MajorityLearner,
}


def make_learner(name: str, params: dict | None = None):
    """Instantiate a reference learner by its public name."""
    params = dict(params or {})
    if name not in LEARNERS:
        raise ValueError(f"unknown learner '{name}' (choose from {sorted(LEARNERS)})")
    if name == "1nn":
        k = int(params.pop("k", 1))
        if params:
            raise ValueError(f"unknown parameters for 1nn: {sorted(params)}")
        return KnnLearner(k=k)
    if params:
        raise ValueError(f"learner '{name}' takes no parameters")
    return LEARNERS[name]()
