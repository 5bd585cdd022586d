"""Connection against a live server, including byte parity with the CLI."""

import contextlib
import io
import json
import time

import httpx
import pytest

from openml_lite.arff import NOMINAL, NUMERIC, AttributeSpec, Relation, write_arff
from openml_lite.cli import main as cli_main

from openml_lite_sdk import (
    AuthError,
    Connection,
    LearnerError,
    NotFoundError,
    TransportError,
)


def seed_relation() -> Relation:
    attributes = [
        AttributeSpec("x1", NUMERIC),
        AttributeSpec("x2", NUMERIC),
        AttributeSpec("klass", NOMINAL, labels=("yes", "no")),
    ]
    rows = [
        [float(i), (i * 13 % 100) / 7.0, "yes" if i < 60 else "no"]
        for i in range(100)
    ]
    return Relation("sdk-seed", attributes, rows)


@pytest.fixture(scope="session")
def world(live_server, tmp_path_factory):
    """Dataset + task + a plain flow, created over HTTP like any client."""
    url, key = live_server["url"], live_server["key"]
    headers = {"X-API-Key": key}
    upload = httpx.post(
        f"{url}/api/v1/data",
        files={"file": ("seed.arff", write_arff(seed_relation()))},
        data={"name": "sdk-seed", "licence": "CC0", "default_target": "klass"},
        headers=headers,
    ).json()
    dataset_id = upload["dataset_id"]
    deadline = time.time() + 30
    while time.time() < deadline:
        if httpx.get(f"{url}/api/v1/data/{dataset_id}").json()["status"] == "active":
            break
        time.sleep(0.05)
    task = httpx.post(
        f"{url}/api/v1/task",
        json={
            "task_type": "supervised_classification",
            "dataset_id": dataset_id,
            "target_feature": "klass",
        },
        headers=headers,
    ).json()
    flow = httpx.post(
        f"{url}/api/v1/flow",
        json={"name": "sdk-test-flow", "licence": "CC0", "code": "external"},
        headers=headers,
    ).json()
    return {
        "url": url,
        "key": key,
        "dataset_id": dataset_id,
        "task_id": task["task_id"],
        "flow_id": flow["flow_id"],
        "tmp": tmp_path_factory.mktemp("sdk-work"),
    }


def test_get_task_bundle(world):
    conn = Connection(world["url"])
    bundle = conn.get_task(world["task_id"])
    assert bundle.task_type == "supervised_classification"
    assert bundle.target == "klass"
    assert bundle.class_labels == ("yes", "no")
    assert bundle.evaluation_measure == "predictive_accuracy"
    assert bundle.estimation_procedure["folds"] == 10
    assert len(bundle.dataset.rows) == 100
    # each fold splits the rowids into disjoint, exhaustive train/test sets
    everything = set(range(100))
    for fold in range(10):
        train = set(bundle.splits.train_ids(0, fold))
        test = set(bundle.splits.test_ids(0, fold))
        assert train | test == everything
        assert train & test == set()


def test_typed_errors(world):
    conn = Connection(world["url"])
    with pytest.raises(NotFoundError) as exc_info:
        conn.get_task(999999)
    assert exc_info.value.status == 404

    bundle = conn.get_task(world["task_id"])
    artifact = conn.run_task(bundle, "majority")
    with pytest.raises(AuthError):
        conn.submit_run(artifact, world["flow_id"])  # no key configured
    with pytest.raises(AuthError):
        Connection(world["url"], api_key="bogus").submit_run(artifact, world["flow_id"])
    with pytest.raises(TransportError):
        Connection("http://127.0.0.1:9", timeout=1.0).get_task(1)


class ConstantLearner:
    """Always predicts the first declared label."""

    def fit(self, rows, attributes, target):
        labels = attributes[[a.name for a in attributes].index(target)].labels
        confidences = {label: 1.0 if label == labels[0] else 0.0 for label in labels}

        class Model:
            def predict(self, row):
                return labels[0], dict(confidences)

        return Model()


class BrokenAtFourthFold:
    def __init__(self):
        self.calls = 0

    def fit(self, rows, attributes, target):
        self.calls += 1
        if self.calls == 4:
            raise RuntimeError("synthetic failure")

        class Model:
            def predict(self, row):
                return "yes", {"yes": 1.0, "no": 0.0}

        return Model()


def test_run_task_covers_every_test_rowid_once(world):
    conn = Connection(world["url"])
    bundle = conn.get_task(world["task_id"])
    artifact = conn.run_task(bundle, ConstantLearner())
    seen = [(r.repeat, r.fold, r.row_id) for r in artifact.records]
    expected = [
        (0, fold, row_id)
        for fold in range(10)
        for row_id in bundle.splits.test_ids(0, fold)
    ]
    assert sorted(seen) == sorted(expected)
    assert len(seen) == len(set(seen)) == 100


def test_run_task_wraps_learner_failures_with_fold_context(world):
    conn = Connection(world["url"])
    bundle = conn.get_task(world["task_id"])
    with pytest.raises(LearnerError) as exc_info:
        conn.run_task(bundle, BrokenAtFourthFold())
    assert exc_info.value.repeat == 0
    assert exc_info.value.fold == 3
    assert "fold 3" in str(exc_info.value)


def test_majority_headline_equals_class_share(world):
    conn = Connection(world["url"], api_key=world["key"])
    bundle = conn.get_task(world["task_id"])
    artifact = conn.run_task(bundle, "majority")
    submitted = conn.submit_run(artifact, world["flow_id"])
    assert submitted.headline_measure == "predictive_accuracy"
    assert submitted.headline == 60 / 100

    again = conn.submit_run(artifact, world["flow_id"])
    assert again.run_id != submitted.run_id
    assert again.headline == submitted.headline


def run_cli(world, *argv) -> dict:
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = cli_main(
            ["--url", world["url"], "--key", world["key"], "--json", *argv]
        )
    assert code == 0, err.getvalue()
    return json.loads(out.getvalue())


def test_prediction_files_match_cli_byte_for_byte(world):
    """The SDK and the CLI serialize identical predictions identically."""
    conn = Connection(world["url"], api_key=world["key"])
    bundle = conn.get_task(world["task_id"])

    for learner, params in [("naive_bayes", None), ("1nn", {"k": 3})]:
        out_path = world["tmp"] / f"cli-{learner}.arff"
        argv = [
            "bench", "run", "--task", str(world["task_id"]),
            "--learner", learner, "--upload", "--out", str(out_path),
        ]
        if params:
            argv += ["--param", "k=3"]
        cli_result = run_cli(world, *argv)

        artifact = conn.run_task(bundle, learner, params)
        assert artifact.content == out_path.read_bytes(), learner

        flows = httpx.get(
            f"{world['url']}/api/v1/flow", params={"filter": f"ref.{learner}"}
        ).json()["items"]
        flow_id = next(f["flow_id"] for f in flows if f["name"] == f"ref.{learner}")
        submitted = conn.submit_run(
            artifact,
            flow_id,
            parameter_settings=params,
            setting_origin="sweep" if params else "default",
        )
        assert submitted.headline == cli_result["headline"], learner

        cli_eval = httpx.get(
            f"{world['url']}/api/v1/run/{cli_result['run_id']}"
        ).json()["evaluation"]
        sdk_eval = httpx.get(
            f"{world['url']}/api/v1/run/{submitted.run_id}"
        ).json()["evaluation"]
        assert sdk_eval == cli_eval, learner
