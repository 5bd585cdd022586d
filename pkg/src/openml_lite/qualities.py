"""Dataset characterization: simple counts, statistical and
information-theoretic measures, and landmarkers.

The implemented vocabulary is a fixed set of 24 quality names (see
QUALITY_NAMES); these exact CamelCase spellings are the wire format of the
qualities endpoint.  Qualities that are undefined for a dataset (for
example class-based measures of a regression target, or ratio measures
when MeanMutualInformation is 0) are omitted from the result map rather
than stored as NaN.

Every quality is invariant under row permutation.  Counting measures are
trivially so; floating-point accumulations sort their inputs first, and
landmarkers canonicalize the row order before deriving their internal
cross-validation folds.
"""

from __future__ import annotations

import math

from .arff import NOMINAL, NUMERIC, AttributeSpec, Relation, write_arff
from .errors import TooFewInstancesError
from .learners import LEARNERS, make_learner
from .splits import EstimationProcedure, generate_splits

DISCRETIZATION_BINS = 10
STORED_LANDMARKER_SEED = 1

QUALITY_NAMES = (
    "NumberOfInstances",
    "NumberOfFeatures",
    "NumberOfNumericFeatures",
    "NumberOfNominalFeatures",
    "NumberOfClasses",
    "NumberOfMissingValues",
    "PercentageOfMissingValues",
    "NumberOfInstancesWithMissing",
    "Dimensionality",
    "MajorityClassPercentage",
    "MinorityClassPercentage",
    "DefaultAccuracy",
    "MeanSkewnessOfNumeric",
    "MeanKurtosisOfNumeric",
    "MeanStdDevOfNumeric",
    "ClassEntropy",
    "MeanAttributeEntropy",
    "MeanMutualInformation",
    "EquivalentNumberOfAttributes",
    "NoiseSignalRatio",
    "StumpLandmarker",
    "OneNNLandmarker",
    "NaiveBayesLandmarker",
    "MajorityLandmarker",
)

LANDMARKER_QUALITIES = {
    "StumpLandmarker": "stump",
    "OneNNLandmarker": "1nn",
    "NaiveBayesLandmarker": "naive_bayes",
    "MajorityLandmarker": "majority",
}


class DegenerateError(Exception):
    """The relation has no rows at all."""


def entropy(values) -> float:
    """Shannon entropy in bits over the observed value frequencies.

    ``None`` entries are excluded.  The p*log2(p) terms are accumulated in
    sorted key order so the result does not depend on input order.
    """
    counts: dict = {}
    total = 0
    for v in values:
        if v is None:
            continue
        counts[v] = counts.get(v, 0) + 1
        total += 1
    if total == 0:
        return 0.0
    h = 0.0
    for key in sorted(counts):
        p = counts[key] / total
        h -= p * math.log2(p)
    return h


def discretize(values: list) -> list:
    """Map numeric observations into 10 equal-width bins between the
    observed min and max (None passes through)."""
    observed = [v for v in values if v is not None]
    if not observed:
        return list(values)
    lo, hi = min(observed), max(observed)
    span = hi - lo
    out = []
    for v in values:
        if v is None:
            out.append(None)
        elif span == 0.0:
            out.append(0)
        else:
            out.append(min(int((v - lo) / span * DISCRETIZATION_BINS), DISCRETIZATION_BINS - 1))
    return out


def mutual_information(xs: list, cs: list) -> float:
    """I(X;C) = H(X) + H(C) - H(X,C) over rows where both are observed."""
    pairs = [(x, c) for x, c in zip(xs, cs) if x is not None and c is not None]
    if not pairs:
        return 0.0
    hx = entropy([x for x, _ in pairs])
    hc = entropy([c for _, c in pairs])
    hxc = entropy(pairs)
    return hx + hc - hxc


def _population_moments(values: list[float]) -> tuple[float, float, float, float]:
    """(mean, m2, m3, m4) with values summed in sorted order."""
    ordered = sorted(values)
    n = len(ordered)
    mean = sum(ordered) / n
    m2 = sum((v - mean) ** 2 for v in ordered) / n
    m3 = sum((v - mean) ** 3 for v in ordered) / n
    m4 = sum((v - mean) ** 4 for v in ordered) / n
    return mean, m2, m3, m4


def run_landmarker(relation: Relation, target: str, learner_name: str, seed: int) -> float:
    """Pooled accuracy of a reference learner under internal stratified
    10-fold cross-validation.

    Rows are first put into a canonical order (sorted by their serialized
    cell values) so the result is invariant under row permutation; the fold
    assignment then follows the standard split protocol with the given seed.
    """
    if learner_name not in LEARNERS:
        raise ValueError(f"unknown landmarker learner '{learner_name}'")
    target_idx = relation.attribute_index(target)
    if relation.attributes[target_idx].kind != NOMINAL:
        raise ValueError(f"landmarkers need a nominal target ('{target}')")
    eligible = [row for row in relation.rows if row[target_idx] is not None]
    if len(eligible) < 10:
        raise TooFewInstancesError(
            f"landmarkers need at least 10 rows with an observed target, have {len(eligible)}"
        )

    canonical = Relation(
        relation.name,
        relation.attributes,
        sorted(relation.rows, key=_row_sort_key(relation.attributes)),
    )
    estimation = EstimationProcedure(
        "crossvalidation", repeats=1, folds=10, stratified=True, seed=seed
    )
    table = generate_splits(canonical, target, estimation)

    correct = 0
    total = 0
    for fold in range(10):
        train = [canonical.rows[i] for i in table.train_ids(0, fold)]
        model = make_learner(learner_name).fit(train, canonical.attributes, target)
        for i in sorted(table.test_ids(0, fold)):
            row = canonical.rows[i]
            label, _ = model.predict(row)
            correct += label == row[target_idx]
            total += 1
    return correct / total


def _row_sort_key(attributes: list[AttributeSpec]):
    def key(row):
        parts = []
        for attr, cell in zip(attributes, row):
            if cell is None:
                parts.append("\x00")
            elif attr.kind == NUMERIC:
                parts.append(format(cell, ".17g"))
            else:
                parts.append(str(cell))
        return tuple(parts)

    return key


def compute_qualities(relation: Relation, target: str | None) -> dict[str, float]:
    """All applicable qualities of a dataset as a name -> value map.

    Class-based entries need a nominal target; landmarkers additionally
    need at least 10 rows with an observed target.  Inapplicable entries
    are omitted.  Raises DegenerateError for a relation with zero rows.
    """
    if not relation.rows:
        raise DegenerateError("dataset has no rows")

    n_rows = len(relation.rows)
    n_attrs = len(relation.attributes)
    out: dict[str, float] = {}
    out["NumberOfInstances"] = float(n_rows)
    out["NumberOfFeatures"] = float(n_attrs)
    out["NumberOfNumericFeatures"] = float(
        sum(1 for a in relation.attributes if a.kind == NUMERIC)
    )
    out["NumberOfNominalFeatures"] = float(
        sum(1 for a in relation.attributes if a.kind == NOMINAL)
    )
    missing = sum(1 for row in relation.rows for c in row if c is None)
    out["NumberOfMissingValues"] = float(missing)
    out["PercentageOfMissingValues"] = 100.0 * missing / (n_rows * n_attrs)
    out["NumberOfInstancesWithMissing"] = float(
        sum(1 for row in relation.rows if any(c is None for c in row))
    )
    out["Dimensionality"] = n_attrs / n_rows

    numeric_cols = [
        [row[i] for row in relation.rows]
        for i, a in enumerate(relation.attributes)
        if a.kind == NUMERIC
    ]
    skews: list[float] = []
    kurts: list[float] = []
    stds: list[float] = []
    for col in numeric_cols:
        observed = [v for v in col if v is not None]
        if not observed:
            continue
        _, m2, m3, m4 = _population_moments(observed)
        stds.append(math.sqrt(m2))
        if m2 > 0.0:
            skews.append(m3 / m2**1.5)
            kurts.append(m4 / m2**2 - 3.0)
    if stds:
        out["MeanStdDevOfNumeric"] = sum(sorted(stds)) / len(stds)
        out["MeanSkewnessOfNumeric"] = sum(sorted(skews)) / len(skews) if skews else 0.0
        out["MeanKurtosisOfNumeric"] = sum(sorted(kurts)) / len(kurts) if kurts else 0.0

    target_idx = None
    if target is not None:
        try:
            target_idx = relation.attribute_index(target)
        except KeyError:
            target_idx = None
    target_attr = relation.attributes[target_idx] if target_idx is not None else None

    # Attribute entropy family: nominal plus discretized numeric attributes,
    # excluding the target itself.
    entropy_cols: list[list] = []
    for i, attr in enumerate(relation.attributes):
        if i == target_idx:
            continue
        col = [row[i] for row in relation.rows]
        if attr.kind == NOMINAL:
            entropy_cols.append(col)
        elif attr.kind == NUMERIC:
            entropy_cols.append(discretize(col))
    if entropy_cols:
        attr_entropies = sorted(entropy(col) for col in entropy_cols)
        out["MeanAttributeEntropy"] = sum(attr_entropies) / len(attr_entropies)

    if target_attr is not None and target_attr.kind == NOMINAL:
        class_col = [row[target_idx] for row in relation.rows]
        observed = [v for v in class_col if v is not None]
        out["NumberOfClasses"] = float(len(target_attr.labels))
        if observed:
            counts: dict[str, int] = {}
            for v in observed:
                counts[v] = counts.get(v, 0) + 1
            majority = max(counts.values())
            minority = min(counts.values())
            out["MajorityClassPercentage"] = 100.0 * majority / len(observed)
            out["MinorityClassPercentage"] = 100.0 * minority / len(observed)
            out["DefaultAccuracy"] = majority / len(observed)
            out["ClassEntropy"] = entropy(observed)
            if entropy_cols:
                mis = sorted(mutual_information(col, class_col) for col in entropy_cols)
                mean_mi = sum(mis) / len(mis)
                out["MeanMutualInformation"] = mean_mi
                if mean_mi != 0.0:
                    out["EquivalentNumberOfAttributes"] = out["ClassEntropy"] / mean_mi
                    out["NoiseSignalRatio"] = (out["MeanAttributeEntropy"] - mean_mi) / mean_mi
            if len(observed) >= 10:
                for quality, learner_name in LANDMARKER_QUALITIES.items():
                    out[quality] = run_landmarker(
                        relation, target, learner_name, STORED_LANDMARKER_SEED
                    )
    return out
