"""Shared dataset builders for the test suite."""

import math
import random

from openml_lite.arff import AttributeSpec, Relation


def nominal_dataset(labels, label_set=None, extra_cols=None):
    """Numeric feature x = row index, nominal target, optional extra columns.

    extra_cols: list of (name, kind, labels_or_None, values).
    """
    label_set = tuple(label_set) if label_set else tuple(
        dict.fromkeys(v for v in labels if v is not None)
    )
    attrs = [AttributeSpec("x", "numeric")]
    cols = [[float(i) for i in range(len(labels))]]
    for name, kind, lab, values in extra_cols or []:
        attrs.append(AttributeSpec(name, kind, labels=tuple(lab) if lab else None))
        cols.append(list(values))
    attrs.append(AttributeSpec("klass", "nominal", labels=label_set))
    cols.append(list(labels))
    rows = [list(t) for t in zip(*cols)]
    return Relation("d", attrs, rows)


def cloud_dataset(n_per_cloud=50, centers=((0.0, 0.0), (10.0, 10.0)), radius=1.0, seed=77):
    """Two well-separated point clouds labeled by cloud membership."""
    rng = random.Random(seed)
    attrs = [
        AttributeSpec("x0", "numeric"),
        AttributeSpec("x1", "numeric"),
        AttributeSpec("cloud", "nominal", labels=("first", "second")),
    ]
    rows = []
    for label, (cx, cy) in zip(("first", "second"), centers):
        for _ in range(n_per_cloud):
            rows.append(
                [
                    cx + rng.uniform(-radius, radius),
                    cy + rng.uniform(-radius, radius),
                    label,
                ]
            )
    rng.shuffle(rows)
    return Relation("clouds", attrs, rows)


def euclidean(a, b):
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))


def rich_dataset(n=60, seed=9):
    """Classification dataset on which every quality is defined."""
    rng = random.Random(seed)
    labels = [rng.choice(["a", "b", "c"]) for _ in range(n)]
    noise = [rng.uniform(0, 1) for _ in range(n)]
    return nominal_dataset(labels, extra_cols=[("noise", "numeric", None, noise)])
