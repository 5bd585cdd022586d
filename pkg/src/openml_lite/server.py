"""REST facade over the registry.

All routes live under /api/v1.  Reads are public; every mutation requires
an X-API-Key header that resolves to a known user, so each stored entity
is attributable.  Error mapping:

    401  missing or unknown API key
    404  missing entity
    422  semantic rejections (bad upload, bad task request, prediction
         coverage/label/consistency failures; detail names the kind)
    413  dataset or predictions file over the byte cap
    400  malformed query SQL, unknown view/column, unknown color parameter
    403  query text that is not a plain SELECT

Run submission is a pipeline: parse, store, evaluate, persist.  When
evaluation fails the run is kept with an error report and excluded from
all aggregations, and the response is a 422 naming the failure.
"""

from __future__ import annotations

import json

from fastapi import BackgroundTasks, Depends, FastAPI, File, Form, Header, UploadFile
from fastapi.responses import JSONResponse, Response

from . import query as query_mod
from .arff import ArffError, parse_arff
from .errors import (
    AuthError,
    NotFoundError,
    TooFewInstancesError,
    ValidationError,
)
from .evaluate import (
    ConsistencyError,
    CoverageError,
    LabelError,
    evaluate_run,
    relation_to_records,
)
from .metrics import MEASURES
from .splits import EstimationProcedure
from .store import Registry
from .tasks import (
    SUPERVISED_CLASSIFICATION,
    TASK_TYPES,
    create_task,
    get_task_splits,
    load_split_table,
    render_task_description,
)

DATASET_MAX_BYTES = 256 * 2**20
PREDICTIONS_MAX_BYTES = 64 * 2**20
DEFAULT_PAGE_SIZE = 100


class UnknownParameterError(Exception):
    """color_parameter does not name a declared flow parameter (HTTP 400)."""


class PayloadTooLarge(Exception):
    def __init__(self, what: str, limit: int):
        super().__init__(f"{what} exceeds the {limit} byte cap")


def ensure_admin(registry: Registry) -> str | None:
    """First start only: mint the bootstrap admin key. Returns None later."""
    with registry.lock:
        if registry.all_users():
            return None
        return registry.create_user("admin")["api_key"]


# -- aggregations ---------------------------------------------------------------------


def _successful_runs(registry: Registry, task_id: int | None = None, flow_id: int | None = None) -> list[dict]:
    """Runs that hold a stored evaluation; failed runs never aggregate."""
    out = []
    for run in registry.all_runs():
        if task_id is not None and run["task_id"] != task_id:
            continue
        if flow_id is not None and run["flow_id"] != flow_id:
            continue
        if not run.get("evaluation") or run.get("evaluation_error"):
            continue
        out.append(run)
    return out


def _measure_mean(run: dict, measure: str) -> float | None:
    entry = run["evaluation"]["measures"].get(measure)
    return None if entry is None else entry["mean"]


def _point_rank(point: dict, higher_is_better: bool):
    value = -point["value"] if higher_is_better else point["value"]
    return (value, point["uploaded_at"], point["run_id"])


def aggregate_task_results(registry: Registry, task_id: int, measure: str | None = None) -> dict:
    """Leaderboard for one task: one series per flow version, one point per
    successful run, series ordered best point first (ties: earlier upload)."""
    task = registry.get_task(task_id)
    measure = measure or task["evaluation_measure"]
    if measure not in MEASURES:
        raise ValidationError(f"unknown measure '{measure}'")
    higher = MEASURES[measure].higher_is_better
    users = {u["user_id"]: u["display_name"] for u in registry.all_users()}

    points_by_flow: dict[int, list[dict]] = {}
    for run in _successful_runs(registry, task_id=task_id):
        value = _measure_mean(run, measure)
        if value is None:
            continue
        points_by_flow.setdefault(run["flow_id"], []).append(
            {
                "run_id": run["run_id"],
                "value": value,
                "uploader": users.get(run["uploader"], ""),
                "uploaded_at": run["uploaded_at"],
            }
        )

    series = []
    for flow_id, points in points_by_flow.items():
        points.sort(key=lambda p: (p["uploaded_at"], p["run_id"]))
        best = min(points, key=lambda p: _point_rank(p, higher))
        flow = registry.get_flow(flow_id)
        series.append(
            {
                "flow_id": flow_id,
                "flow_name": flow["name"],
                "flow_version": flow["version"],
                "best": best["value"],
                "points": points,
                "_rank": _point_rank(best, higher),
            }
        )
    series.sort(key=lambda s: s["_rank"])
    for entry in series:
        del entry["_rank"]
    return {
        "task_id": task_id,
        "measure": measure,
        "higher_is_better": higher,
        "series": series,
    }


def aggregate_flow_results(
    registry: Registry,
    flow_id: int,
    measure: str | None = None,
    color_parameter: str | None = None,
) -> dict:
    """One series per task the flow ran on; each point carries the run's
    value of color_parameter (the flow's declared default when unset)."""
    flow = registry.get_flow(flow_id)
    defaults = {p["name"]: p.get("default") for p in flow["parameters"]}
    if color_parameter is not None and color_parameter not in defaults:
        raise UnknownParameterError(
            f"flow '{flow['name']}' declares no parameter '{color_parameter}'"
        )
    if measure is not None and measure not in MEASURES:
        raise ValidationError(f"unknown measure '{measure}'")
    users = {u["user_id"]: u["display_name"] for u in registry.all_users()}

    points_by_task: dict[int, list[dict]] = {}
    measure_by_task: dict[int, str] = {}
    for run in _successful_runs(registry, flow_id=flow_id):
        task_id = run["task_id"]
        if task_id not in measure_by_task:
            measure_by_task[task_id] = (
                measure or registry.get_task(task_id)["evaluation_measure"]
            )
        value = _measure_mean(run, measure_by_task[task_id])
        if value is None:
            continue
        color = None
        if color_parameter is not None:
            color = defaults[color_parameter]
            for name, setting in run["parameter_settings"]:
                if name == color_parameter:
                    color = setting
        points_by_task.setdefault(task_id, []).append(
            {
                "run_id": run["run_id"],
                "value": value,
                "color": color,
                "uploader": users.get(run["uploader"], ""),
                "uploaded_at": run["uploaded_at"],
            }
        )

    series = []
    for task_id in sorted(points_by_task):
        points = points_by_task[task_id]
        points.sort(key=lambda p: (p["uploaded_at"], p["run_id"]))
        series.append(
            {"task_id": task_id, "measure": measure_by_task[task_id], "points": points}
        )
    return {
        "flow_id": flow_id,
        "flow_name": flow["name"],
        "flow_version": flow["version"],
        "color_parameter": color_parameter,
        "series": series,
    }


# -- the app --------------------------------------------------------------------------


def create_app(
    registry: Registry,
    dataset_cap: int = DATASET_MAX_BYTES,
    predictions_cap: int = PREDICTIONS_MAX_BYTES,
) -> FastAPI:
    app = FastAPI(title="openml-lite", docs_url=None, redoc_url=None, openapi_url=None)

    def require_key(x_api_key: str | None = Header(None)) -> str:
        registry.resolve_key(x_api_key)
        return x_api_key

    def _json_error(status: int, detail) -> JSONResponse:
        return JSONResponse(status_code=status, content={"detail": detail})

    @app.exception_handler(AuthError)
    async def _auth(_, exc):
        return _json_error(401, str(exc))

    @app.exception_handler(NotFoundError)
    async def _missing(_, exc):
        return _json_error(404, str(exc))

    @app.exception_handler(ValidationError)
    async def _invalid(_, exc):
        return _json_error(422, str(exc))

    @app.exception_handler(TooFewInstancesError)
    async def _too_few(_, exc):
        return _json_error(422, str(exc))

    @app.exception_handler(PayloadTooLarge)
    async def _too_large(_, exc):
        return _json_error(413, str(exc))

    @app.exception_handler(UnknownParameterError)
    async def _bad_parameter(_, exc):
        return _json_error(400, str(exc))

    @app.exception_handler(query_mod.ParseError)
    async def _bad_sql(_, exc):
        return _json_error(
            400,
            {
                "error": "parse",
                "message": str(exc),
                "position": exc.position,
                "expected": list(exc.expected),
            },
        )

    @app.exception_handler(query_mod.UnknownViewError)
    async def _bad_view(_, exc):
        return _json_error(400, {"error": "unknown_view", "message": str(exc)})

    @app.exception_handler(query_mod.UnknownColumnError)
    async def _bad_column(_, exc):
        return _json_error(400, {"error": "unknown_column", "message": str(exc)})

    @app.exception_handler(query_mod.MutationError)
    async def _forbidden(_, exc):
        return _json_error(403, str(exc))

    def _page(items: list, offset: int, limit: int) -> dict:
        return {
            "total": len(items),
            "offset": offset,
            "limit": limit,
            "items": items[offset : offset + limit],
        }

    def _with_uploader_name(record: dict) -> dict:
        try:
            record["uploader_name"] = registry.get_user(record["uploader"])["display_name"]
        except NotFoundError:
            record["uploader_name"] = ""
        return record

    # -- datasets -----------------------------------------------------------------

    @app.post("/api/v1/data")
    async def upload_data(
        background: BackgroundTasks,
        key: str = Depends(require_key),
        file: UploadFile | None = File(None),
        url: str | None = Form(None),
        name: str = Form(...),
        description: str = Form(""),
        licence: str = Form(...),
        default_target: str | None = Form(None),
        row_id_attribute: str | None = Form(None),
    ):
        payload = await file.read() if file is not None else None
        if payload is not None and len(payload) > dataset_cap:
            raise PayloadTooLarge("dataset", dataset_cap)
        meta = {
            "name": name,
            "description": description,
            "licence": licence,
            "default_target": default_target,
            "row_id_attribute": row_id_attribute,
        }
        dataset_id = registry.upload_dataset(key, meta, payload=payload, url=url)
        background.add_task(registry.activate_dataset, dataset_id)
        record = registry.get_dataset(dataset_id)
        return {
            "dataset_id": dataset_id,
            "version": record["version"],
            "status": record["status"],
        }

    @app.get("/api/v1/data")
    def list_data(
        filter: str = "",
        status: str | None = None,
        offset: int = 0,
        limit: int = DEFAULT_PAGE_SIZE,
    ):
        items = [_with_uploader_name(d) for d in registry.list_datasets(filter, status)]
        return _page(items, offset, limit)

    @app.get("/api/v1/data/{dataset_id}")
    def get_data(dataset_id: int):
        return _with_uploader_name(registry.get_dataset(dataset_id))

    @app.get("/api/v1/data/{dataset_id}/qualities")
    def get_data_qualities(dataset_id: int):
        record = registry.get_dataset(dataset_id)
        return {
            "dataset_id": dataset_id,
            "qualities": record.get("qualities") or {},
            "quality_meta": record.get("quality_meta") or {},
        }

    @app.get("/api/v1/data/{dataset_id}/file")
    def get_data_file(dataset_id: int):
        record = registry.get_dataset(dataset_id)
        blob = record["source"].get("blob")
        if blob is None:
            raise NotFoundError(
                f"dataset {dataset_id} has no stored file (status {record['status']})"
            )
        return Response(
            content=registry.get_blob(blob), media_type="text/plain; charset=utf-8"
        )

    # -- flows --------------------------------------------------------------------

    @app.post("/api/v1/flow")
    def upload_flow(body: dict, key: str = Depends(require_key)):
        code = body.get("code")
        payload = code.encode() if isinstance(code, str) else None
        flow_id = registry.upload_flow(key, body, payload=payload, url=body.get("url"))
        record = registry.get_flow(flow_id)
        return {"flow_id": flow_id, "name": record["name"], "version": record["version"]}

    @app.get("/api/v1/flow")
    def list_flows(filter: str = "", offset: int = 0, limit: int = DEFAULT_PAGE_SIZE):
        items = [_with_uploader_name(f) for f in registry.list_flows(filter)]
        return _page(items, offset, limit)

    @app.get("/api/v1/flow/{flow_id}")
    def get_flow(flow_id: int):
        return _with_uploader_name(registry.get_flow(flow_id))

    @app.get("/api/v1/flow/{flow_id}/results")
    def flow_results(
        flow_id: int, measure: str | None = None, color_parameter: str | None = None
    ):
        return aggregate_flow_results(registry, flow_id, measure, color_parameter)

    # -- tasks --------------------------------------------------------------------

    @app.post("/api/v1/task")
    def post_task(body: dict, key: str = Depends(require_key)):
        estimation = None
        if body.get("estimation_procedure") is not None:
            estimation = EstimationProcedure.from_wire(body["estimation_procedure"])
        task_id = create_task(
            registry,
            key,
            body.get("task_type", SUPERVISED_CLASSIFICATION),
            int(body["dataset_id"]),
            body.get("target_feature") or body.get("target") or "",
            estimation=estimation,
            optimization_measure=body.get("evaluation_measure"),
        )
        return {"task_id": task_id}

    @app.get("/api/v1/task")
    def list_tasks(
        filter: str = "",
        dataset_id: int | None = None,
        offset: int = 0,
        limit: int = DEFAULT_PAGE_SIZE,
    ):
        needle = filter.lower()
        items = []
        for task in sorted(registry.all_tasks(), key=lambda t: t["task_id"]):
            if dataset_id is not None and task["dataset_id"] != dataset_id:
                continue
            dataset = registry.get_dataset(task["dataset_id"])
            haystack = (
                f"{task['task_type']} {task['target_feature']} {dataset['name']}".lower()
            )
            if needle and needle not in haystack:
                continue
            items.append(
                {
                    "task_id": task["task_id"],
                    "task_type": task["task_type"],
                    "dataset_id": task["dataset_id"],
                    "dataset_name": dataset["name"],
                    "target_feature": task["target_feature"],
                    "evaluation_measure": task["evaluation_measure"],
                }
            )
        return _page(items, offset, limit)

    @app.get("/api/v1/tasktypes")
    def tasktypes():
        return {"task_types": list(TASK_TYPES)}

    @app.get("/api/v1/task/{task_id}")
    def get_task(task_id: int, format: str = "json"):
        content_type, body = render_task_description(registry, task_id, format)
        return Response(content=body, media_type=content_type)

    @app.get("/api/v1/task/{task_id}/splits")
    def get_splits(task_id: int):
        return Response(
            content=get_task_splits(registry, task_id),
            media_type="text/plain; charset=utf-8",
        )

    @app.get("/api/v1/task/{task_id}/results")
    def task_results(task_id: int, measure: str | None = None):
        return aggregate_task_results(registry, task_id, measure)

    # -- runs ---------------------------------------------------------------------

    @app.post("/api/v1/run")
    async def post_run(
        key: str = Depends(require_key),
        description: str = Form(...),
        predictions: UploadFile = File(...),
    ):
        try:
            info = json.loads(description)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"description is not valid JSON: {exc}") from None
        if not isinstance(info, dict):
            raise ValidationError("description must be a JSON object")
        body = await predictions.read()
        if len(body) > predictions_cap:
            raise PayloadTooLarge("predictions file", predictions_cap)
        return submit_run_pipeline(registry, key, info, body)

    @app.get("/api/v1/run/{run_id}")
    def get_run(run_id: int):
        record = _with_uploader_name(registry.get_run(run_id))
        record["predictions_url"] = f"/api/v1/run/{run_id}/predictions"
        del record["predictions"]
        return record

    @app.get("/api/v1/run/{run_id}/predictions")
    def get_run_predictions(run_id: int):
        record = registry.get_run(run_id)
        return Response(
            content=registry.get_blob(record["predictions"]),
            media_type="text/plain; charset=utf-8",
        )

    # -- query --------------------------------------------------------------------

    @app.post("/api/v1/query")
    def post_query(body: dict, key: str = Depends(require_key)):
        sql = body.get("sql")
        if not isinstance(sql, str):
            raise ValidationError("body must be {\"sql\": \"SELECT ...\"}")
        return query_mod.execute_query(registry, sql)

    return app


EVAL_ERROR_KINDS = {
    CoverageError: "coverage",
    LabelError: "label",
    ConsistencyError: "consistency",
}


def submit_run_pipeline(registry: Registry, key: str, info: dict, predictions: bytes):
    """Parse, store, evaluate, persist.  The run survives an evaluation
    failure (stored with the error report) but the response is a 422."""
    for field in ("task_id", "flow_id"):
        if field not in info:
            raise ValidationError(f"run description needs '{field}'")
    task = registry.get_task(int(info["task_id"]))
    run_id = registry.store_run(
        key,
        {
            "task_id": info["task_id"],
            "flow_id": info["flow_id"],
            "setting_origin": info.get("setting_origin", "default"),
            "parameter_settings": info.get("parameter_settings") or [],
        },
        predictions=predictions,
    )

    dataset = registry.get_dataset(task["dataset_id"])
    relation = parse_arff(registry.get_blob(dataset["source"]["blob"]))
    target = task["target_feature"]
    task_type = task["task_type"]
    table = load_split_table(registry, task["task_id"])
    class_labels = None
    if task_type == SUPERVISED_CLASSIFICATION:
        class_labels = relation.attributes[relation.attribute_index(target)].labels

    try:
        records = relation_to_records(parse_arff(predictions), class_labels)
        result = evaluate_run(
            relation, target, task_type, table, task["evaluation_measure"], records
        )
    except (ArffError, CoverageError, LabelError, ConsistencyError) as exc:
        kind = EVAL_ERROR_KINDS.get(type(exc), "parse")
        registry.attach_evaluation(run_id, None, error=f"{kind}: {exc}")
        return JSONResponse(
            status_code=422,
            content={
                "detail": {"run_id": run_id, "error": kind, "message": str(exc)}
            },
        )

    registry.attach_evaluation(run_id, result.to_json_dict())
    return {
        "run_id": run_id,
        "headline_measure": result.headline_measure,
        "headline": result.headline,
        "std": result.measures[result.headline_measure].std,
    }
