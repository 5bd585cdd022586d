"""Desk-scale guarantees for the whole service, checked end to end.

Each test here is one headline property: the CLI scenario round-trip, split
determinism, metric and quality oracles, landmarker reference values, query
fuzzing, concurrent versioning, and the flow comparison chart.  They run
against real servers (where a server is involved) with no shortcuts into
internals except to read expected state.
"""

import contextlib
import io
import json
import math
import random
import threading
from datetime import datetime

import httpx
import pytest

from openml_lite.arff import NOMINAL, NUMERIC, AttributeSpec, Relation, parse_arff, write_arff
from openml_lite.cli import main
from openml_lite.evaluate import evaluate_run, relation_to_records
from openml_lite.metrics import (
    accuracy,
    auc,
    averaged_scores,
    confusion_matrix,
    kappa,
    mean_absolute_error,
    root_mean_squared_error,
)
from openml_lite.qualities import compute_qualities, run_landmarker
from openml_lite.splits import EstimationProcedure, SplitTable, generate_splits
from openml_lite.store import Registry

from helpers import cloud_dataset, euclidean, rich_dataset


def run_cli_json(server: dict, *argv: str) -> dict:
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(["--url", server["url"], "--key", server["key"], "--json", *argv])
    assert code == 0, f"cli failed ({code}): {err.getvalue()}"
    return json.loads(out.getvalue())


def e2e_relation() -> Relation:
    """150 rows, four numeric features plus a 3-class target (60/50/40)."""
    attributes = [
        AttributeSpec("x1", NUMERIC),
        AttributeSpec("x2", NUMERIC),
        AttributeSpec("x3", NUMERIC),
        AttributeSpec("x4", NUMERIC),
        AttributeSpec("klass", NOMINAL, labels=("alpha", "beta", "gamma")),
    ]
    rows = []
    for i in range(150):
        label = "alpha" if i < 60 else ("beta" if i < 110 else "gamma")
        rows.append(
            [i * 0.5, (i * 37 % 150) / 10.0, float(i % 7), ((i * i) % 31) / 3.0, label]
        )
    return Relation("e2e", attributes, rows)


LEARNERS_IN_PLAY = ("majority", "stump", "1nn", "naive_bayes")


@pytest.fixture(scope="module")
def scenario(server_factory, tmp_path_factory):
    """Empty server; upload the 150-row dataset, create the default task,
    bench all four reference learners with upload.  Shared downstream."""
    server = server_factory("acceptance-store")
    tmp = tmp_path_factory.mktemp("acceptance")
    relation = e2e_relation()
    arff_path = tmp / "e2e.arff"
    arff_path.write_bytes(write_arff(relation))

    upload = run_cli_json(
        server,
        "dataset", "upload", "--file", str(arff_path),
        "--name", "e2e-150", "--default-target", "klass", "--wait",
    )
    assert upload["status"] == "active", upload
    task = run_cli_json(
        server,
        "task", "create", "--dataset", str(upload["dataset_id"]), "--target", "klass",
    )
    runs = {}
    for learner in LEARNERS_IN_PLAY:
        runs[learner] = run_cli_json(
            server,
            "bench", "run", "--task", str(task["task_id"]),
            "--learner", learner, "--upload",
            "--out", str(tmp / f"{learner}.arff"),
        )
    return {
        "server": server,
        "relation": relation,
        "dataset_id": upload["dataset_id"],
        "task_id": task["task_id"],
        "runs": runs,
        "tmp": tmp,
    }


def test_end_to_end_cli_scenario(scenario):
    server = scenario["server"]
    task_id = scenario["task_id"]
    runs = scenario["runs"]
    assert len(runs) == 4

    dataset_bytes = httpx.get(
        f"{server['url']}/api/v1/data/{scenario['dataset_id']}/file"
    ).content
    relation = parse_arff(dataset_bytes)
    labels = relation.attributes[relation.attribute_index("klass")].labels
    table = SplitTable.from_relation(
        parse_arff(httpx.get(f"{server['url']}/api/v1/task/{task_id}/splits").content)
    )

    for learner, submitted in runs.items():
        stored = httpx.get(f"{server['url']}/api/v1/run/{submitted['run_id']}").json()
        assert stored["evaluation"] is not None, learner
        predictions = httpx.get(
            f"{server['url']}{stored['predictions_url']}"
        ).content
        offline = evaluate_run(
            relation,
            "klass",
            "supervised_classification",
            table,
            "predictive_accuracy",
            relation_to_records(parse_arff(predictions), labels),
        )
        # the server's stored headline is reproducible offline, bit for bit
        assert stored["evaluation"]["headline"] == offline.headline, learner
        assert submitted["headline"] == offline.headline, learner

    assert runs["majority"]["headline"] == 60 / 150


def test_split_determinism_and_stratification_bounds():
    rng = random.Random(424242)
    for case in range(50):
        n = rng.randint(20, 500)
        n_classes = rng.randint(2, 5)
        k = rng.choice([2, 5, 10])
        seed = rng.randrange(2**32)
        label_names = tuple(f"c{i}" for i in range(n_classes))
        labels = [label_names[rng.randrange(n_classes)] for _ in range(n)]
        relation = Relation(
            "case",
            [
                AttributeSpec("x", NUMERIC),
                AttributeSpec("y", NOMINAL, labels=label_names),
            ],
            [[float(i), labels[i]] for i in range(n)],
        )
        estimation = EstimationProcedure(
            kind="crossvalidation", folds=k, stratified=True, seed=seed
        )
        first = generate_splits(relation, "y", estimation)
        second = generate_splits(relation, "y", estimation)
        assert write_arff(first.to_relation()) == write_arff(second.to_relation()), case

        seen = []
        for fold in range(k):
            test_ids = first.test_ids(0, fold)
            train_ids = first.train_ids(0, fold)
            assert set(test_ids) & set(train_ids) == set()
            assert sorted(set(test_ids) | set(train_ids)) == list(range(n))
            seen.extend(test_ids)
        assert sorted(seen) == list(range(n))  # each row tested exactly once

        counts = {label: labels.count(label) for label in label_names}
        for fold in range(k):
            fold_labels = [labels[i] for i in first.test_ids(0, fold)]
            for label in label_names:
                expected = counts[label] / k
                assert abs(fold_labels.count(label) - expected) <= 1, (case, fold)


def _oracle_auc(flags, scores):
    wins = ties = 0
    positives = [s for s, f in zip(scores, flags) if f]
    negatives = [s for s, f in zip(scores, flags) if not f]
    for p in positives:
        for q in negatives:
            if p > q:
                wins += 1
            elif p == q:
                ties += 1
    return (wins + 0.5 * ties) / (len(positives) * len(negatives))


def _oracle_kappa(truths, preds):
    n = len(truths)
    classes = sorted(set(truths) | set(preds))
    p_o = sum(t == p for t, p in zip(truths, preds)) / n
    p_e = sum(truths.count(c) * preds.count(c) for c in classes) / (n * n)
    return 0.0 if p_e == 1.0 else (p_o - p_e) / (1.0 - p_e)


def _oracle_prf(truths, preds, labels):
    per = {}
    for label in labels:
        tp = sum(1 for t, p in zip(truths, preds) if t == label and p == label)
        predicted = preds.count(label)
        actual = truths.count(label)
        precision = tp / predicted if predicted else 0.0
        recall = tp / actual if actual else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per[label] = (precision, recall, f1)
    macro = [sum(v[i] for v in per.values()) / len(labels) for i in range(3)]
    n = len(truths)
    weighted = [
        sum(truths.count(label) / n * per[label][i] for label in labels)
        for i in range(3)
    ]
    return macro, weighted


def test_metrics_match_brute_force_oracles():
    rng = random.Random(77001)
    tolerance = 1e-12
    for case in range(100):
        n = rng.randint(5, 120)
        labels = tuple(f"l{i}" for i in range(rng.randint(2, 4)))
        truths = [rng.choice(labels) for _ in range(n)]
        preds = [rng.choice(labels) for _ in range(n)]

        assert abs(accuracy(truths, preds) - sum(t == p for t, p in zip(truths, preds)) / n) <= tolerance
        assert abs(kappa(truths, preds) - _oracle_kappa(truths, preds)) <= tolerance

        matrix = confusion_matrix(truths, preds, labels)
        averages = averaged_scores(matrix, labels)
        macro, weighted = _oracle_prf(truths, preds, labels)
        assert abs(averages["macro_precision"] - macro[0]) <= tolerance
        assert abs(averages["macro_recall"] - macro[1]) <= tolerance
        assert abs(averages["macro_f1"] - macro[2]) <= tolerance
        assert abs(averages["weighted_precision"] - weighted[0]) <= tolerance
        assert abs(averages["weighted_recall"] - weighted[1]) <= tolerance
        assert abs(averages["weighted_f1"] - weighted[2]) <= tolerance

        flags = [t == labels[0] for t in truths]
        scores = [rng.randrange(2**20) / 2**20 for _ in range(n)]
        if any(flags) and not all(flags):
            assert abs(auc(flags, scores) - _oracle_auc(flags, scores)) <= tolerance
            # strictly monotone transform, exact in binary: same AUC bit for bit
            transformed = [(s + 1.0) / 2.0 for s in scores]
            assert auc(flags, transformed) == auc(flags, scores)

        actual = [rng.uniform(-50, 50) for _ in range(n)]
        predicted = [rng.uniform(-50, 50) for _ in range(n)]
        mae_oracle = sum(abs(a - p) for a, p in zip(actual, predicted)) / n
        rmse_oracle = math.sqrt(sum((a - p) ** 2 for a, p in zip(actual, predicted)) / n)
        assert abs(mean_absolute_error(actual, predicted) - mae_oracle) <= tolerance
        assert abs(root_mean_squared_error(actual, predicted) - rmse_oracle) <= tolerance


def test_qualities_closed_form_and_order_invariance():
    # balanced binary target: entropy exactly one bit
    balanced = Relation(
        "balanced",
        [AttributeSpec("x", NUMERIC), AttributeSpec("y", NOMINAL, labels=("n", "p"))],
        [[float(i), "np"[i % 2]] for i in range(30)],
    )
    assert compute_qualities(balanced, "y")["ClassEntropy"] == 1.0

    # a nominal feature that copies the target carries all of its information
    copycat = Relation(
        "copycat",
        [
            AttributeSpec("mirror", NOMINAL, labels=("n", "p")),
            AttributeSpec("y", NOMINAL, labels=("n", "p")),
        ],
        [["np"[i % 3 == 0], "np"[i % 3 == 0]] for i in range(24)],
    )
    copy_qualities = compute_qualities(copycat, "y")
    assert abs(copy_qualities["MeanMutualInformation"] - copy_qualities["ClassEntropy"]) <= 1e-12

    # symmetric sample: zero skewness
    symmetric = Relation(
        "symmetric",
        [AttributeSpec("v", NUMERIC), AttributeSpec("y", NOMINAL, labels=("n", "p"))],
        [[float(v), "np"[i % 2]] for i, v in enumerate([-3, -2, -1, 0, 0, 1, 2, 3] * 3)],
    )
    assert abs(compute_qualities(symmetric, "y")["MeanSkewnessOfNumeric"]) <= 1e-12

    # every one of the 24 characteristics ignores row order exactly
    relation = rich_dataset(n=60)
    baseline = compute_qualities(relation, "klass")
    assert len(baseline) == 24
    for seed in (1, 2, 3):
        shuffled_rows = list(relation.rows)
        random.Random(seed).shuffle(shuffled_rows)
        shuffled = Relation(relation.name, relation.attributes, shuffled_rows)
        assert compute_qualities(shuffled, "klass") == baseline, seed


def test_landmarker_reference_values_and_reproducibility():
    clouds = cloud_dataset(n_per_cloud=50, centers=((0.0, 0.0), (10.0, 10.0)), radius=1.0)
    target_idx = clouds.attribute_index("cloud")
    points = [(row[0], row[1], row[target_idx]) for row in clouds.rows]
    # oracle: every point's nearest other point shares its label, so a
    # correct 1NN must score a perfect 1.0 under any train/test split
    for i, (x, y, label) in enumerate(points):
        nearest = min(
            (j for j in range(len(points)) if j != i),
            key=lambda j: euclidean((x, y), points[j][:2]),
        )
        assert points[nearest][2] == label
    assert run_landmarker(clouds, "cloud", "1nn", seed=1) == 1.0

    # a perfectly predictive binary feature gives the stump a clean sweep
    perfect = Relation(
        "perfect",
        [
            AttributeSpec("flag", NOMINAL, labels=("off", "on")),
            AttributeSpec("noise", NUMERIC),
            AttributeSpec("y", NOMINAL, labels=("n", "p")),
        ],
        [
            ["on" if i % 2 else "off", float(i * 7 % 13), "p" if i % 2 else "n"]
            for i in range(40)
        ],
    )
    assert run_landmarker(perfect, "y", "stump", seed=1) == 1.0

    # the same seed reproduces every landmarker bit for bit
    relation = rich_dataset(n=60)
    for learner in LEARNERS_IN_PLAY:
        first = run_landmarker(relation, "klass", learner, seed=1)
        second = run_landmarker(relation, "klass", learner, seed=1)
        assert first == second, learner


# -- query fuzzing ---------------------------------------------------------------


QUERY_VIEWS = {
    "runs_view": (
        "run_id", "task_id", "flow_id", "flow_name", "flow_version",
        "uploader", "uploaded_at", "setting_origin",
    ),
    "evaluations_view": ("run_id", "task_id", "flow_id", "measure", "value", "std"),
    "datasets_view": (
        "dataset_id", "name", "version", "status", "uploader",
        "NumberOfInstances", "NumberOfFeatures", "NumberOfClasses",
    ),
    "flows_view": ("flow_id", "name", "version", "uploader"),
}

NUMERIC_COLUMNS = {
    "run_id", "task_id", "flow_id", "flow_version", "version", "value", "std",
    "dataset_id", "NumberOfInstances", "NumberOfFeatures", "NumberOfClasses",
}


def snapshot_views(registry: Registry) -> dict:
    """Materialize the four views directly from registry state."""
    users = {u["user_id"]: u["display_name"] for u in registry.all_users()}
    views: dict = {name: [] for name in QUERY_VIEWS}
    for run in sorted(registry.all_runs(), key=lambda r: r["run_id"]):
        flow = registry.get_flow(run["flow_id"])
        views["runs_view"].append(
            {
                "run_id": run["run_id"],
                "task_id": run["task_id"],
                "flow_id": run["flow_id"],
                "flow_name": flow["name"],
                "flow_version": flow["version"],
                "uploader": users.get(run["uploader"], ""),
                "uploaded_at": run["uploaded_at"],
                "setting_origin": run["setting_origin"],
            }
        )
        if run.get("evaluation") and not run.get("evaluation_error"):
            for measure in sorted(run["evaluation"]["measures"]):
                entry = run["evaluation"]["measures"][measure]
                views["evaluations_view"].append(
                    {
                        "run_id": run["run_id"],
                        "task_id": run["task_id"],
                        "flow_id": run["flow_id"],
                        "measure": measure,
                        "value": entry["mean"],
                        "std": entry["std"],
                    }
                )
    for dataset in sorted(registry.all_datasets(), key=lambda d: d["dataset_id"]):
        qualities = dataset.get("qualities") or {}
        views["datasets_view"].append(
            {
                "dataset_id": dataset["dataset_id"],
                "name": dataset["name"],
                "version": dataset["version"],
                "status": dataset["status"],
                "uploader": users.get(dataset["uploader"], ""),
                "NumberOfInstances": qualities.get("NumberOfInstances"),
                "NumberOfFeatures": qualities.get("NumberOfFeatures"),
                "NumberOfClasses": qualities.get("NumberOfClasses"),
            }
        )
    for flow in sorted(registry.all_flows(), key=lambda f: f["flow_id"]):
        views["flows_view"].append(
            {
                "flow_id": flow["flow_id"],
                "name": flow["name"],
                "version": flow["version"],
                "uploader": users.get(flow["uploader"], ""),
            }
        )
    return views


def oracle_filter_sort_limit(rows, conditions, order_by, limit, columns):
    def like(value, pattern):
        parts = pattern.split("%")
        if len(parts) == 1:
            return value == pattern
        if not value.startswith(parts[0]) or not value.endswith(parts[-1]):
            return False
        if len(parts[0]) + len(parts[-1]) > len(value):
            return False
        position = len(parts[0])
        for part in parts[1:-1]:
            if part:
                found = value.find(part, position)
                if found < 0 or found + len(part) > len(value) - len(parts[-1]):
                    return False
                position = found + len(part)
        return True

    def holds(cell, op, literal):
        if cell is None:
            return False
        if op == "LIKE":
            return isinstance(cell, str) and like(cell, literal)
        is_number = isinstance(cell, (int, float)) and not isinstance(cell, bool)
        if is_number != isinstance(literal, float):
            return False
        return {
            "=": cell == literal,
            "!=": cell != literal,
            "<": cell < literal,
            "<=": cell <= literal,
            ">": cell > literal,
            ">=": cell >= literal,
        }[op]

    rows = [r for r in rows if all(holds(r[c], op, lit) for c, op, lit in conditions)]
    if order_by is not None:
        column, ascending = order_by
        rows = sorted(
            rows,
            key=lambda r: (r[column] is not None, 0 if r[column] is None else r[column]),
            reverse=not ascending,
        )
    rows = rows[: min(limit, 10000) if limit is not None else 10000]
    return [[r[c] for c in columns] for r in rows]


def generate_select(rng, view, schema, string_pool):
    conditions = []
    sql_conditions = []
    for _ in range(rng.randint(0, 3)):
        column = rng.choice(schema)
        if column in NUMERIC_COLUMNS and rng.random() < 0.8:
            op = rng.choice(["=", "!=", "<", "<=", ">", ">="])
            literal = rng.choice(["0", "1", "2", "3", "0.4", "10", "60", "150", "-1"])
            conditions.append((column, op, float(literal)))
            sql_conditions.append(f"{column} {op} {literal}")
        else:
            op = rng.choice(["=", "!=", "LIKE"])
            raw = rng.choice(string_pool)
            conditions.append((column, op, raw))
            sql_conditions.append(f"{column} {op} '{raw.replace(chr(39), chr(39) * 2)}'")
    if rng.random() < 0.4:
        columns = tuple(rng.sample(schema, rng.randint(1, len(schema))))
        select = ", ".join(columns)
    else:
        columns = tuple(schema)
        select = "*"
    sql = f"SELECT {select} FROM {view}"
    if sql_conditions:
        sql += " WHERE " + " AND ".join(sql_conditions)
    order_by = None
    if rng.random() < 0.5:
        column = rng.choice(schema)
        ascending = rng.random() < 0.5
        order_by = (column, ascending)
        sql += f" ORDER BY {column} {'ASC' if ascending else 'DESC'}"
    limit = None
    if rng.random() < 0.5:
        limit = rng.choice([0, 1, 2, 5, 100, 20000])
        sql += f" LIMIT {limit}"
    return sql, conditions, columns, order_by, limit


MALFORMED_QUERIES = [
    "", "SELECT", "SELECT *", "SELECT * FROM", "SELECT ,",
    "SELECT * FROM runs_view WHERE", "SELECT * FROM runs_view WHERE run_id",
    "SELECT * FROM runs_view WHERE run_id =", "SELECT * FROM runs_view ORDER",
    "SELECT * FROM runs_view ORDER BY", "SELECT * FROM runs_view LIMIT",
    "SELECT * FROM runs_view LIMIT many", "SELECT * FROM runs_view trailing",
    "SELECT * runs_view", "SELECT run_id, FROM runs_view",
    "SELECT * FROM runs_view WHERE uploader = 'open",
    "SELECT * FROM runs_view WHERE run_id ~ 1",
    "SELECT * FROM runs_view WHERE run_id = = 1",
    "SELECT * FROM runs_view LIMIT -5", "SELECT * FROM runs_view LIMIT 1.5",
]

MUTATION_QUERIES = [
    "INSERT INTO runs_view VALUES (1)",
    "UPDATE runs_view SET uploader = 'me'",
    "DELETE FROM runs_view",
    "DROP TABLE runs_view",
    "ALTER TABLE runs_view ADD COLUMN x",
    "CREATE TABLE sneaky (id int)",
    "TRUNCATE runs_view",
    "PRAGMA table_info(runs_view)",
    "ATTACH DATABASE 'x' AS y",
    "REPLACE INTO runs_view VALUES (1)",
    "GRANT ALL ON runs_view",
    "REVOKE ALL ON runs_view",
    "VACUUM",
    "BEGIN",
    "COMMIT",
    "ROLLBACK",
    "MERGE INTO runs_view",
    "EXEC something",
    "CALL something()",
    "SELECT * FROM runs_view LIMIT 1; DROP TABLE runs_view",
]


def test_query_endpoint_fuzzing_against_oracle(scenario):
    server = scenario["server"]
    registry = server["registry"]
    views = snapshot_views(registry)
    digest_before = registry.state_digest()
    headers = {"X-API-Key": server["key"]}
    endpoint = f"{server['url']}/api/v1/query"

    string_pool = ["admin", "e2e-150", "ref.majority", "ref.1nn", "active",
                   "predictive_accuracy", "kappa", "default", "%e%", "ref.%", "%", ""]
    rng = random.Random(90210)
    total = 0
    for _ in range(160):
        view = rng.choice(sorted(QUERY_VIEWS))
        sql, conditions, columns, order_by, limit = generate_select(
            rng, view, QUERY_VIEWS[view], string_pool
        )
        response = httpx.post(endpoint, json={"sql": sql}, headers=headers)
        assert response.status_code == 200, (sql, response.text)
        expected = oracle_filter_sort_limit(
            views[view], conditions, order_by, limit, columns
        )
        assert response.json()["rows"] == expected, sql
        total += 1

    for sql in MALFORMED_QUERIES:
        response = httpx.post(endpoint, json={"sql": sql}, headers=headers)
        assert response.status_code == 400, (sql, response.status_code)
        detail = response.json()["detail"]
        assert detail["error"] == "parse", sql
        assert isinstance(detail["position"], int) and detail["position"] >= 0
        total += 1

    for sql in MUTATION_QUERIES:
        response = httpx.post(endpoint, json={"sql": sql}, headers=headers)
        assert response.status_code == 403, (sql, response.status_code)
        total += 1

    assert total == 200
    assert registry.state_digest() == digest_before


def test_concurrent_versioning_attribution_and_replay(server_factory):
    server = server_factory("versioning-store")
    registry = server["registry"]
    relation = rich_dataset(n=30)
    payload = write_arff(relation)
    users = [registry.create_user(f"worker-{i:02d}") for i in range(20)]

    barrier = threading.Barrier(20)
    outcomes: list[tuple[int, dict]] = []
    lock = threading.Lock()

    def upload(user):
        barrier.wait()
        response = httpx.post(
            f"{server['url']}/api/v1/data",
            files={"file": ("same.arff", payload)},
            data={"name": "contested", "licence": "CC0", "default_target": "klass"},
            headers={"X-API-Key": user["api_key"]},
            timeout=60.0,
        )
        with lock:
            outcomes.append((user["user_id"], response.json()))

    threads = [threading.Thread(target=upload, args=(user,)) for user in users]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join(timeout=120)
    assert len(outcomes) == 20

    versions = sorted(body["version"] for _, body in outcomes)
    assert versions == list(range(1, 21))
    dataset_ids = [body["dataset_id"] for _, body in outcomes]
    assert len(set(dataset_ids)) == 20

    import time

    deadline = time.time() + 60
    while time.time() < deadline:
        statuses = {
            d: httpx.get(f"{server['url']}/api/v1/data/{d}").json()["status"]
            for d in dataset_ids
        }
        if all(s != "in_preparation" for s in statuses.values()):
            break
        time.sleep(0.1)
    assert set(statuses.values()) == {"active"}

    for user_id, body in outcomes:
        record = httpx.get(f"{server['url']}/api/v1/data/{body['dataset_id']}").json()
        assert record["uploader"] == user_id  # attribution survives the race
        datetime.fromisoformat(record["uploaded_at"])

    flow = httpx.post(
        f"{server['url']}/api/v1/flow",
        json={"name": "replayed", "licence": "CC0", "code": "x"},
        headers={"X-API-Key": users[0]["api_key"]},
    ).json()
    record = httpx.get(f"{server['url']}/api/v1/flow/{flow['flow_id']}").json()
    assert record["uploader"] == users[0]["user_id"]
    datetime.fromisoformat(record["uploaded_at"])

    replayed = Registry(server["root"])
    assert replayed.state_digest() == registry.state_digest()


def test_flow_results_sweep_with_color_parameter(scenario):
    server = scenario["server"]
    task_id = scenario["task_id"]
    sweep_runs = {}
    for k in (3, 5):
        body = run_cli_json(
            server,
            "bench", "run", "--task", str(task_id), "--learner", "1nn",
            "--param", f"k={k}", "--upload",
            "--out", str(scenario["tmp"] / f"sweep-{k}.arff"),
        )
        sweep_runs[body["run_id"]] = k
    extra_default = run_cli_json(
        server,
        "bench", "run", "--task", str(task_id), "--learner", "1nn", "--upload",
        "--out", str(scenario["tmp"] / "sweep-default.arff"),
    )

    flows = httpx.get(
        f"{server['url']}/api/v1/flow", params={"filter": "ref.1nn"}
    ).json()["items"]
    flow_id = next(f["flow_id"] for f in flows if f["name"] == "ref.1nn")

    results = httpx.get(
        f"{server['url']}/api/v1/flow/{flow_id}/results",
        params={"color_parameter": "k"},
    ).json()
    assert results["color_parameter"] == "k"
    series = [s for s in results["series"] if s["task_id"] == task_id]
    assert len(series) == 1
    points = series[0]["points"]

    expected_runs = dict(sweep_runs)
    expected_runs[scenario["runs"]["1nn"]["run_id"]] = 1  # default substituted
    expected_runs[extra_default["run_id"]] = 1
    assert {p["run_id"] for p in points} == set(expected_runs)
    assert len(points) == len(expected_runs)  # exactly one point per run
    for point in points:
        assert point["color"] == expected_runs[point["run_id"]], point
        stored = httpx.get(f"{server['url']}/api/v1/run/{point['run_id']}").json()
        assert point["value"] == stored["evaluation"]["headline"]

    unknown = httpx.get(
        f"{server['url']}/api/v1/flow/{flow_id}/results",
        params={"color_parameter": "gamma"},
    )
    assert unknown.status_code == 400
