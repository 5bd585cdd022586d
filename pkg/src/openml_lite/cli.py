"""Command-line client (and server launcher).

    openml-lite dataset upload --file iris.arff --name iris --default-target class
    openml-lite dataset list --filter iris
    openml-lite dataset show 3
    openml-lite flow register --name ref.custom --code-file model.py
    openml-lite flow list
    openml-lite task create --dataset 3 --target class
    openml-lite task show 1 [--xml]
    openml-lite task download 1 --out bundle/
    openml-lite run submit --task 1 --flow 2 --predictions preds.arff
    openml-lite bench run --task 1 --learner 1nn --param k=3 --upload
    openml-lite serve --root ./openml-data --port 8080

The server URL and API key come from --url/--key or the environment
(OPENML_LITE_URL, OPENML_LITE_KEY).  Exit codes: 0 success, 1 network,
auth, or server trouble, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import httpx

from .arff import parse_arff
from .bench import LearnerError, execute_task, predictions_arff
from .learners import LEARNERS, make_learner
from .splits import SplitTable

DEFAULT_URL = "http://127.0.0.1:8080"

EXIT_OK = 0
EXIT_TROUBLE = 1
EXIT_USAGE = 2

REFERENCE_FLOWS = {
    "majority": {
        "description": "Predicts the most frequent training label; confidences are label frequencies.",
        "parameters": [],
    },
    "stump": {
        "description": "One-level decision tree; best single split by information gain.",
        "parameters": [],
    },
    "1nn": {
        "description": "k-nearest-neighbour with min-max scaling and Hamming distance on nominals.",
        "parameters": [
            {
                "name": "k",
                "data_type": "integer",
                "default": 1,
                "recommended_range": [1, 25],
            }
        ],
    },
    "naive_bayes": {
        "description": "Naive Bayes: Laplace-smoothed nominals, Gaussian numerics.",
        "parameters": [],
    },
}


class CliError(Exception):
    def __init__(self, message: str, exit_code: int = EXIT_USAGE):
        super().__init__(message)
        self.exit_code = exit_code


class Client:
    """Thin REST wrapper that turns HTTP failures into CliErrors."""

    def __init__(self, url: str, key: str | None):
        self.base = url.rstrip("/")
        self.key = key

    def request(self, method: str, path: str, **kwargs) -> httpx.Response:
        headers = kwargs.pop("headers", {})
        if self.key:
            headers["X-API-Key"] = self.key
        try:
            response = httpx.request(
                method, self.base + path, headers=headers, timeout=60.0, **kwargs
            )
        except httpx.HTTPError as exc:
            raise CliError(f"cannot reach {self.base}: {exc}", EXIT_TROUBLE) from exc
        if response.status_code >= 400:
            detail = _extract_detail(response)
            code = EXIT_TROUBLE if response.status_code in (401, 500, 502, 503) else EXIT_USAGE
            raise CliError(f"server said {response.status_code}: {detail}", code)
        return response

    def get_json(self, path: str, **kwargs) -> dict:
        return self.request("GET", path, **kwargs).json()


def _extract_detail(response: httpx.Response) -> str:
    try:
        detail = response.json().get("detail")
    except ValueError:
        return response.text[:500]
    if isinstance(detail, (dict, list)):
        return json.dumps(detail)
    return str(detail)


def _emit(args, payload: dict, human: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(human)


def _parse_param(text: str):
    if "=" not in text:
        raise CliError(f"--param wants name=value, got {text!r}")
    name, raw = text.split("=", 1)
    try:
        value = int(raw)
    except ValueError:
        try:
            value = float(raw)
        except ValueError:
            value = raw
    return name, value


# -- command handlers -------------------------------------------------------------


def cmd_dataset_upload(client: Client, args) -> int:
    data = {"name": args.name, "licence": args.licence, "description": args.description}
    if args.default_target:
        data["default_target"] = args.default_target
    if args.row_id:
        data["row_id_attribute"] = args.row_id
    files = {}
    if args.file:
        files["file"] = (Path(args.file).name, Path(args.file).read_bytes())
    elif args.source_url:
        data["url"] = args.source_url
    else:
        raise CliError("dataset upload wants --file or --source-url")
    response = client.request("POST", "/api/v1/data", data=data, files=files or None)
    body = response.json()
    if args.wait:
        body = _wait_active(client, body["dataset_id"])
    _emit(
        args,
        body,
        f"dataset {body['dataset_id']} version {body['version']} ({body['status']})",
    )
    return EXIT_OK


def _wait_active(client: Client, dataset_id: int) -> dict:
    import time

    for _ in range(600):
        body = client.get_json(f"/api/v1/data/{dataset_id}")
        if body["status"] != "in_preparation":
            return body
        time.sleep(0.05)
    raise CliError(f"dataset {dataset_id} still in_preparation", EXIT_TROUBLE)


def cmd_dataset_list(client: Client, args) -> int:
    params = {"filter": args.filter, "offset": args.offset, "limit": args.limit}
    if args.status:
        params["status"] = args.status
    body = client.get_json("/api/v1/data", params=params)
    lines = [
        f"{d['dataset_id']:>6}  {d['name']} v{d['version']}  {d['status']}"
        for d in body["items"]
    ]
    _emit(args, body, "\n".join(lines) if lines else "(no datasets)")
    return EXIT_OK


def cmd_dataset_show(client: Client, args) -> int:
    body = client.get_json(f"/api/v1/data/{args.id}")
    qualities = client.get_json(f"/api/v1/data/{args.id}/qualities")
    body["qualities"] = qualities["qualities"]
    lines = [
        f"dataset {body['dataset_id']}: {body['name']} v{body['version']}",
        f"status:  {body['status']}",
        f"uploader: {body.get('uploader_name', '')}",
    ]
    if body.get("error_reason"):
        lines.append(f"error:   {body['error_reason']}")
    for name in sorted(body["qualities"]):
        lines.append(f"  {name} = {body['qualities'][name]}")
    _emit(args, body, "\n".join(lines))
    return EXIT_OK


def cmd_flow_register(client: Client, args) -> int:
    payload = {
        "name": args.name,
        "licence": args.licence,
        "description": args.description,
    }
    if args.code_file:
        payload["code"] = Path(args.code_file).read_text()
    elif args.source_url:
        payload["url"] = args.source_url
    else:
        raise CliError("flow register wants --code-file or --source-url")
    if args.parameters:
        payload["parameters"] = json.loads(args.parameters)
    body = client.request("POST", "/api/v1/flow", json=payload).json()
    _emit(args, body, f"flow {body['flow_id']}: {body['name']} v{body['version']}")
    return EXIT_OK


def cmd_flow_list(client: Client, args) -> int:
    body = client.get_json(
        "/api/v1/flow",
        params={"filter": args.filter, "offset": args.offset, "limit": args.limit},
    )
    lines = [
        f"{f['flow_id']:>6}  {f['name']} v{f['version']}" for f in body["items"]
    ]
    _emit(args, body, "\n".join(lines) if lines else "(no flows)")
    return EXIT_OK


def cmd_task_create(client: Client, args) -> int:
    body: dict = {
        "task_type": args.type,
        "dataset_id": args.dataset,
        "target_feature": args.target,
    }
    estimation: dict = {}
    if args.holdout is not None:
        estimation = {"type": "holdout", "holdout_fraction": args.holdout}
    elif args.folds is not None:
        estimation = {"type": "crossvalidation", "folds": args.folds}
    if estimation:
        estimation["repeats"] = args.repeats
        estimation["seed"] = args.seed
        estimation["stratified"] = (
            args.type == "supervised_classification" and not args.no_stratify
        )
        body["estimation_procedure"] = estimation
    if args.measure:
        body["evaluation_measure"] = args.measure
    result = client.request("POST", "/api/v1/task", json=body).json()
    _emit(args, result, f"task {result['task_id']}")
    return EXIT_OK


def cmd_task_show(client: Client, args) -> int:
    fmt = "xml" if args.xml else "json"
    response = client.request("GET", f"/api/v1/task/{args.id}", params={"format": fmt})
    text = response.text
    if args.json and not args.xml:
        print(json.dumps(json.loads(text), indent=2))
    else:
        print(text.rstrip("\n"))
    return EXIT_OK


def cmd_task_download(client: Client, args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    description = client.get_json(f"/api/v1/task/{args.id}")
    (out / "task.json").write_text(json.dumps(description, indent=2) + "\n")
    dataset = client.request("GET", description["dataset_url"]).content
    (out / "dataset.arff").write_bytes(dataset)
    splits = client.request("GET", description["splits_url"]).content
    (out / "splits.arff").write_bytes(splits)
    payload = {"task_id": args.id, "files": ["task.json", "dataset.arff", "splits.arff"]}
    _emit(args, payload, f"task {args.id} bundle written to {out}")
    return EXIT_OK


def cmd_run_submit(client: Client, args) -> int:
    description = {
        "task_id": args.task,
        "flow_id": args.flow,
        "setting_origin": args.origin,
        "parameter_settings": [list(_parse_param(p)) for p in args.param],
    }
    predictions = Path(args.predictions).read_bytes()
    body = client.request(
        "POST",
        "/api/v1/run",
        data={"description": json.dumps(description)},
        files={"predictions": (Path(args.predictions).name, predictions)},
    ).json()
    _emit(
        args,
        body,
        f"run {body['run_id']}: {body['headline_measure']} = {body['headline']}",
    )
    return EXIT_OK


def _ensure_reference_flow(client: Client, learner_name: str) -> int:
    """Find the ref.<learner> flow, registering it on first use."""
    name = f"ref.{learner_name}"
    listing = client.get_json("/api/v1/flow", params={"filter": name, "limit": 1000})
    matches = [f for f in listing["items"] if f["name"] == name]
    if matches:
        return max(matches, key=lambda f: f["version"])["flow_id"]
    spec = REFERENCE_FLOWS[learner_name]
    body = client.request(
        "POST",
        "/api/v1/flow",
        json={
            "name": name,
            "licence": "CC0",
            "description": spec["description"],
            "code": spec["description"],
            "parameters": spec["parameters"],
        },
    ).json()
    return body["flow_id"]


def cmd_bench_run(client: Client, args) -> int:
    if args.learner not in LEARNERS:
        raise CliError(f"unknown learner '{args.learner}' (choose from {sorted(LEARNERS)})")
    params = dict(_parse_param(p) for p in args.param)
    try:
        learner = make_learner(args.learner, params)
    except Exception as exc:
        raise CliError(str(exc)) from exc

    description = client.get_json(f"/api/v1/task/{args.task}")
    if description["task_type"] != "supervised_classification":
        raise CliError("bench run only handles supervised_classification tasks")
    relation = parse_arff(client.request("GET", description["dataset_url"]).content)
    table = SplitTable.from_relation(
        parse_arff(client.request("GET", description["splits_url"]).content)
    )
    target = description["target_feature"]
    labels = relation.attributes[relation.attribute_index(target)].labels

    try:
        records = execute_task(relation, target, table, learner)
    except LearnerError as exc:
        raise CliError(str(exc), EXIT_TROUBLE) from exc
    payload = predictions_arff(records, labels)

    out_path = Path(args.out) if args.out else Path(f"predictions-task{args.task}-{args.learner}.arff")
    out_path.write_bytes(payload)

    result = {
        "task_id": args.task,
        "learner": args.learner,
        "predictions_file": str(out_path),
        "n_predictions": len(records),
    }
    human = f"wrote {len(records)} predictions to {out_path}"
    if args.upload:
        flow_id = _ensure_reference_flow(client, args.learner)
        description_payload = {
            "task_id": args.task,
            "flow_id": flow_id,
            "setting_origin": "default" if not params else "sweep",
            "parameter_settings": [[k, v] for k, v in sorted(params.items())],
        }
        body = client.request(
            "POST",
            "/api/v1/run",
            data={"description": json.dumps(description_payload)},
            files={"predictions": (out_path.name, payload)},
        ).json()
        result.update(body)
        result["flow_id"] = flow_id
        human += (
            f"\nrun {body['run_id']}: {body['headline_measure']} = {body['headline']}"
        )
    _emit(args, result, human)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app, ensure_admin
    from .store import Registry

    registry = Registry(args.root)
    admin_key = ensure_admin(registry)
    if admin_key:
        print(f"Bootstrap admin API key (shown once): {admin_key}", flush=True)
    uvicorn.run(create_app(registry), host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


# -- argument wiring ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="openml-lite")
    parser.add_argument("--url", default=os.environ.get("OPENML_LITE_URL", DEFAULT_URL))
    parser.add_argument("--key", default=os.environ.get("OPENML_LITE_KEY"))
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    groups = parser.add_subparsers(dest="group", required=True)

    dataset = groups.add_parser("dataset").add_subparsers(dest="command", required=True)
    upload = dataset.add_parser("upload")
    upload.add_argument("--file")
    upload.add_argument("--source-url")
    upload.add_argument("--name", required=True)
    upload.add_argument("--description", default="")
    upload.add_argument("--licence", default="CC0")
    upload.add_argument("--default-target")
    upload.add_argument("--row-id")
    upload.add_argument("--wait", action="store_true", help="poll until activation settles")
    upload.set_defaults(handler=cmd_dataset_upload)
    listing = dataset.add_parser("list")
    listing.add_argument("--filter", default="")
    listing.add_argument("--status")
    listing.add_argument("--offset", type=int, default=0)
    listing.add_argument("--limit", type=int, default=100)
    listing.set_defaults(handler=cmd_dataset_list)
    show = dataset.add_parser("show")
    show.add_argument("id", type=int)
    show.set_defaults(handler=cmd_dataset_show)

    flow = groups.add_parser("flow").add_subparsers(dest="command", required=True)
    register = flow.add_parser("register")
    register.add_argument("--name", required=True)
    register.add_argument("--licence", default="CC0")
    register.add_argument("--description", default="")
    register.add_argument("--code-file")
    register.add_argument("--source-url")
    register.add_argument("--parameters", help="JSON list of parameter declarations")
    register.set_defaults(handler=cmd_flow_register)
    flow_list = flow.add_parser("list")
    flow_list.add_argument("--filter", default="")
    flow_list.add_argument("--offset", type=int, default=0)
    flow_list.add_argument("--limit", type=int, default=100)
    flow_list.set_defaults(handler=cmd_flow_list)

    task = groups.add_parser("task").add_subparsers(dest="command", required=True)
    create = task.add_parser("create")
    create.add_argument("--dataset", type=int, required=True)
    create.add_argument("--target", required=True)
    create.add_argument(
        "--type",
        default="supervised_classification",
        choices=["supervised_classification", "supervised_regression"],
    )
    create.add_argument("--folds", type=int)
    create.add_argument("--holdout", type=float)
    create.add_argument("--repeats", type=int, default=1)
    create.add_argument("--seed", type=int, default=0)
    create.add_argument("--no-stratify", action="store_true")
    create.add_argument("--measure")
    create.set_defaults(handler=cmd_task_create)
    task_show = task.add_parser("show")
    task_show.add_argument("id", type=int)
    task_show.add_argument("--xml", action="store_true")
    task_show.set_defaults(handler=cmd_task_show)
    download = task.add_parser("download")
    download.add_argument("id", type=int)
    download.add_argument("--out", required=True)
    download.set_defaults(handler=cmd_task_download)

    run = groups.add_parser("run").add_subparsers(dest="command", required=True)
    submit = run.add_parser("submit")
    submit.add_argument("--task", type=int, required=True)
    submit.add_argument("--flow", type=int, required=True)
    submit.add_argument("--predictions", required=True)
    submit.add_argument("--origin", default="default")
    submit.add_argument("--param", action="append", default=[])
    submit.set_defaults(handler=cmd_run_submit)

    bench = groups.add_parser("bench").add_subparsers(dest="command", required=True)
    bench_run = bench.add_parser("run")
    bench_run.add_argument("--task", type=int, required=True)
    bench_run.add_argument("--learner", required=True)
    bench_run.add_argument("--param", action="append", default=[])
    bench_run.add_argument("--upload", action="store_true")
    bench_run.add_argument("--out")
    bench_run.set_defaults(handler=cmd_bench_run)

    serve = groups.add_parser("serve")
    serve.add_argument("--root", default=os.environ.get("OPENML_LITE_ROOT", "./openml-data"))
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8080)
    serve.set_defaults(handler=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.group == "serve":
            return cmd_serve(args)
        client = Client(args.url, args.key)
        return args.handler(client, args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
