"""Tests for dataset qualities: closed-form oracles, invariance properties,
and landmarker behavior on constructed datasets."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import cloud_dataset, euclidean, nominal_dataset
from openml_lite.arff import AttributeSpec, Relation
from openml_lite.errors import TooFewInstancesError
from openml_lite.qualities import (
    QUALITY_NAMES,
    DegenerateError,
    compute_qualities,
    discretize,
    entropy,
    mutual_information,
    run_landmarker,
)


def test_balanced_binary_target():
    rel = nominal_dataset(["a", "b"] * 50)
    q = compute_qualities(rel, "klass")
    assert q["ClassEntropy"] == 1.0
    assert q["DefaultAccuracy"] == 0.5
    assert q["NumberOfClasses"] == 2.0
    assert q["MajorityClassPercentage"] == 50.0
    assert q["MinorityClassPercentage"] == 50.0


def test_four_uniform_classes_entropy_two_bits():
    rel = nominal_dataset(["a", "b", "c", "d"] * 25)
    assert compute_qualities(rel, "klass")["ClassEntropy"] == 2.0


def test_copy_of_target_has_mi_equal_to_class_entropy():
    labels = ["a", "b", "c"] * 10
    rel = nominal_dataset(
        labels, extra_cols=[("copy", "nominal", ("a", "b", "c"), labels)]
    )
    xs = rel.column("copy")
    cs = rel.column("klass")
    assert abs(mutual_information(xs, cs) - entropy(cs)) < 1e-12


def test_symmetric_numeric_has_zero_skewness():
    attrs = [
        AttributeSpec("v", "numeric"),
        AttributeSpec("klass", "nominal", labels=("a", "b")),
    ]
    rows = [[v, "a" if v <= 0 else "b"] for v in (-2.0, -1.0, 0.0, 1.0, 2.0)]
    q = compute_qualities(Relation("d", attrs, rows), "klass")
    assert q["MeanSkewnessOfNumeric"] == 0.0


def test_counting_qualities():
    attrs = [
        AttributeSpec("u", "numeric"),
        AttributeSpec("v", "nominal", labels=("p", "q")),
        AttributeSpec("klass", "nominal", labels=("a", "b")),
    ]
    rows = [
        [1.0, "p", "a"],
        [None, "q", "b"],
        [2.0, None, "a"],
        [3.0, "p", "b"],
    ]
    q = compute_qualities(Relation("d", attrs, rows), "klass")
    assert q["NumberOfInstances"] == 4.0
    assert q["NumberOfFeatures"] == 3.0
    assert q["NumberOfNumericFeatures"] == 1.0
    assert q["NumberOfNominalFeatures"] == 2.0
    assert q["NumberOfMissingValues"] == 2.0
    assert q["PercentageOfMissingValues"] == 100.0 * 2 / 12
    assert q["NumberOfInstancesWithMissing"] == 2.0
    assert q["Dimensionality"] == 3 / 4


def test_closed_form_statistical_qualities():
    # values [1,2,3,4]: population var 1.25, skew 0, excess kurtosis m4/m2^2-3
    values = [1.0, 2.0, 3.0, 4.0]
    mean = 2.5
    m2 = sum((v - mean) ** 2 for v in values) / 4
    m4 = sum((v - mean) ** 4 for v in values) / 4
    attrs = [
        AttributeSpec("v", "numeric"),
        AttributeSpec("klass", "nominal", labels=("a", "b")),
    ]
    rows = [[v, "a" if v < 3 else "b"] for v in values]
    q = compute_qualities(Relation("d", attrs, rows), "klass")
    assert abs(q["MeanStdDevOfNumeric"] - math.sqrt(m2)) < 1e-15
    assert q["MeanSkewnessOfNumeric"] == 0.0
    assert abs(q["MeanKurtosisOfNumeric"] - (m4 / m2**2 - 3.0)) < 1e-15


def test_constant_numeric_excluded_from_skew_kurt_denominator():
    attrs = [
        AttributeSpec("flat", "numeric"),
        AttributeSpec("skewed", "numeric"),
        AttributeSpec("klass", "nominal", labels=("a", "b")),
    ]
    values = [0.0, 0.0, 0.0, 1.0]
    rows = [[5.0, v, "a" if v == 0 else "b"] for v in values]
    q = compute_qualities(Relation("d", attrs, rows), "klass")
    mean = 0.25
    m2 = sum((v - mean) ** 2 for v in values) / 4
    m3 = sum((v - mean) ** 3 for v in values) / 4
    assert abs(q["MeanSkewnessOfNumeric"] - m3 / m2**1.5) < 1e-12
    # std mean still counts the constant attribute (std 0)
    assert abs(q["MeanStdDevOfNumeric"] - math.sqrt(m2) / 2) < 1e-12


def test_zero_mean_mi_omits_ratio_qualities():
    # single constant feature: H(X) = 0 so MI = 0 for it
    rel = nominal_dataset(
        ["a", "b"] * 10,
        extra_cols=[("c", "nominal", ("only",), ["only"] * 20)],
    )
    # drop the informative x column by building a fresh relation
    attrs = [rel.attributes[1], rel.attributes[2]]
    rows = [[r[1], r[2]] for r in rel.rows]
    q = compute_qualities(Relation("d", attrs, rows), "klass")
    assert q["MeanMutualInformation"] == 0.0
    assert "EquivalentNumberOfAttributes" not in q
    assert "NoiseSignalRatio" not in q
    assert q["MeanAttributeEntropy"] == 0.0


def test_ratio_quality_definitions():
    labels = ["a", "b"] * 20
    rel = nominal_dataset(labels, extra_cols=[("copy", "nominal", ("a", "b"), labels)])
    q = compute_qualities(rel, "klass")
    assert abs(
        q["EquivalentNumberOfAttributes"] - q["ClassEntropy"] / q["MeanMutualInformation"]
    ) < 1e-12
    assert abs(
        q["NoiseSignalRatio"]
        - (q["MeanAttributeEntropy"] - q["MeanMutualInformation"]) / q["MeanMutualInformation"]
    ) < 1e-12


def test_degenerate_zero_rows():
    rel = Relation("d", [AttributeSpec("v", "numeric")], [])
    with pytest.raises(DegenerateError):
        compute_qualities(rel, None)


def test_regression_target_omits_class_based_entries():
    attrs = [
        AttributeSpec("u", "numeric"),
        AttributeSpec("y", "numeric"),
    ]
    rows = [[float(i), float(i * 2)] for i in range(12)]
    q = compute_qualities(Relation("d", attrs, rows), "y")
    for name in (
        "NumberOfClasses",
        "ClassEntropy",
        "DefaultAccuracy",
        "MajorityClassPercentage",
        "StumpLandmarker",
    ):
        assert name not in q
    assert q["NumberOfInstances"] == 12.0


def test_all_quality_names_present_on_a_rich_dataset():
    rng = random.Random(9)
    labels = [rng.choice(["a", "b", "c"]) for _ in range(60)]
    noise = [rng.uniform(0, 1) for _ in range(60)]
    rel = nominal_dataset(labels, extra_cols=[("noise", "numeric", None, noise)])
    q = compute_qualities(rel, "klass")
    assert set(q) == set(QUALITY_NAMES)
    for name, value in q.items():
        if "Percentage" in name:
            assert 0.0 <= value <= 100.0
        if "Landmarker" in name:
            assert 0.0 <= value <= 1.0
    assert q["Dimensionality"] == q["NumberOfFeatures"] / q["NumberOfInstances"]


def test_discretize_bins():
    values = [0.0, 1.0, 2.5, 10.0, None]
    bins = discretize(values)
    assert bins == [0, 1, 2, 9, None]
    assert discretize([3.0, 3.0]) == [0, 0]


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=1, max_size=60))
def test_entropy_bound_and_uniform_equality(values):
    h = entropy(values)
    distinct = len(set(values))
    assert -1e-9 <= h <= math.log2(distinct) + 1e-9
    counts = {v: values.count(v) for v in set(values)}
    if len(set(counts.values())) == 1:
        assert abs(h - math.log2(distinct)) < 1e-9


@settings(max_examples=150, deadline=None)
@given(
    st.lists(
        st.tuples(st.integers(0, 4), st.sampled_from(["a", "b", "c"])),
        min_size=1,
        max_size=50,
    )
)
def test_mutual_information_bounds(pairs):
    xs = [p[0] for p in pairs]
    cs = [p[1] for p in pairs]
    mi = mutual_information(xs, cs)
    assert mi >= -1e-9
    assert mi <= min(entropy(xs), entropy(cs)) + 1e-9


def test_row_permutation_leaves_all_qualities_identical():
    rng = random.Random(13)
    labels = [rng.choice(["a", "b", "c"]) for _ in range(40)]
    noise = [rng.uniform(-3, 3) for _ in range(40)]
    flags = [rng.choice(["p", "q"]) for _ in range(40)]
    rel = nominal_dataset(
        labels,
        extra_cols=[
            ("noise", "numeric", None, noise),
            ("flag", "nominal", ("p", "q"), flags),
        ],
    )
    q1 = compute_qualities(rel, "klass")
    for trial in range(3):
        rows = list(rel.rows)
        rng.shuffle(rows)
        q2 = compute_qualities(Relation(rel.name, rel.attributes, rows), "klass")
        assert q1 == q2  # bit-exact, landmarkers included


def test_majority_landmarker_is_exact_class_proportion():
    rel = nominal_dataset(["a"] * 70 + ["b"] * 30)
    assert run_landmarker(rel, "klass", "majority", seed=1) == 0.7


def test_1nn_landmarker_on_separated_clouds():
    rel = cloud_dataset()
    # oracle: globally, every point's nearest other point is in its own cloud
    target_idx = rel.attribute_index("cloud")
    for i, row in enumerate(rel.rows):
        best = None
        for j, other in enumerate(rel.rows):
            if i == j:
                continue
            d = euclidean(row[:2], other[:2])
            if best is None or d < best[0]:
                best = (d, j)
        assert rel.rows[best[1]][target_idx] == row[target_idx]
    assert run_landmarker(rel, "cloud", "1nn", seed=1) == 1.0


def test_stump_landmarker_on_perfect_feature():
    labels = ["a", "b"] * 30
    rel = nominal_dataset(labels, extra_cols=[("copy", "nominal", ("a", "b"), labels)])
    # oracle: exhaustive stump search over the copy feature finds zero error
    assert run_landmarker(rel, "klass", "stump", seed=1) == 1.0


def test_landmarker_determinism_and_seed_sensitivity():
    rng = random.Random(3)
    labels = [rng.choice(["a", "b"]) for _ in range(30)]
    noise = [rng.uniform(0, 1) for _ in range(30)]
    rel = nominal_dataset(labels, extra_cols=[("noise", "numeric", None, noise)])
    a = run_landmarker(rel, "klass", "naive_bayes", seed=7)
    b = run_landmarker(rel, "klass", "naive_bayes", seed=7)
    assert a == b


def test_landmarker_too_few_instances():
    rel = nominal_dataset(["a", "b"] * 4)
    with pytest.raises(TooFewInstancesError):
        run_landmarker(rel, "klass", "majority", seed=1)
    labels = ["a", "b"] * 6
    some_missing = labels[:9] + [None] * 3
    rel2 = nominal_dataset(some_missing, label_set=("a", "b"))
    with pytest.raises(TooFewInstancesError):
        run_landmarker(rel2, "klass", "majority", seed=1)
