"""Persistent, versioned registry of users, datasets, flows, tasks, and runs.

Storage layout under the registry root:

    blobs/<sha256>      content-addressed payloads (dataset files, predictions)
    journal/<n>.jsonl   append-only metadata journal, one JSON record per line
    snapshots/<n>.json  compacted state written when segment n is opened

Every journal record has the fields {op, entity, id, payload, actor, ts}.
State is rebuilt by loading the newest snapshot and replaying the journal
segments from that point; a record's payload is the full entity state after
the operation, which makes replay order-independent of operation semantics.

All mutations are funneled through one process-wide lock, so version
numbers for a given name are assigned atomically (1, 2, 3, ... with no gaps
even under concurrent uploads).  Deletion is a soft flag; entities that are
still referenced cannot be deleted.
"""

from __future__ import annotations

import copy
import hashlib
import json
import os
import re
import secrets
import threading
from datetime import datetime, timezone
from pathlib import Path
from urllib.parse import urlparse

import httpx

from .arff import parse_arff, validate_for_task
from .errors import (
    AuthError,
    DeleteConflictError,
    NotFoundError,
    ValidationError,
)
from .qualities import DISCRETIZATION_BINS, STORED_LANDMARKER_SEED, compute_qualities

DEFAULT_LICENCES = ("CC0", "CC-BY", "CC-BY-SA", "CC-BY-NC", "custom")

DATASET_STATUSES = ("in_preparation", "active", "error")
SETTING_ORIGINS = ("default", "sweep", "internally_optimized")
PARAMETER_TYPES = ("integer", "real", "text", "boolean")

SEGMENT_RECORD_LIMIT = 1000

_ENTITIES = ("user", "dataset", "flow", "task", "run")


def utcnow() -> str:
    return datetime.now(timezone.utc).isoformat()


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def validate_parameter_specs(parameters: list[dict]) -> list[dict]:
    """Normalize and check a flow's parameter declarations."""
    seen = set()
    out = []
    for spec in parameters:
        name = spec.get("name")
        if not name or not isinstance(name, str):
            raise ValidationError("parameter needs a nonempty name")
        if name in seen:
            raise ValidationError(f"duplicate parameter name '{name}'")
        seen.add(name)
        data_type = spec.get("data_type")
        if data_type not in PARAMETER_TYPES:
            raise ValidationError(
                f"parameter '{name}' has unknown data_type '{data_type}'"
            )
        default = spec.get("default")
        if default is not None and not _conforms(default, data_type):
            raise ValidationError(
                f"default {default!r} does not conform to {data_type} for parameter '{name}'"
            )
        rng = spec.get("recommended_range")
        if rng is not None:
            if not isinstance(rng, list) or not rng:
                raise ValidationError(f"recommended_range of '{name}' must be a list")
            if (
                len(rng) == 2
                and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in rng)
            ):
                if rng[0] > rng[1]:
                    raise ValidationError(f"range bounds of '{name}' must be ordered")
            elif not all(isinstance(v, str) for v in rng):
                raise ValidationError(
                    f"recommended_range of '{name}' must be [low, high] or a label list"
                )
        out.append(
            {
                "name": name,
                "data_type": data_type,
                "default": default,
                "recommended_range": rng,
                "description": spec.get("description"),
            }
        )
    return out


def _conforms(value, data_type: str) -> bool:
    if data_type == "integer":
        return isinstance(value, int) and not isinstance(value, bool)
    if data_type == "real":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if data_type == "boolean":
        return isinstance(value, bool)
    return isinstance(value, str)


def _valid_url(url: str) -> bool:
    parts = urlparse(url)
    return parts.scheme in ("http", "https") and bool(parts.netloc)


class Registry:
    """Single-directory store; safe for use from multiple threads."""

    def __init__(self, root: str | Path, licences: tuple[str, ...] = DEFAULT_LICENCES,
                 segment_limit: int = SEGMENT_RECORD_LIMIT):
        self.root = Path(root)
        self.blob_dir = self.root / "blobs"
        self.journal_dir = self.root / "journal"
        self.snapshot_dir = self.root / "snapshots"
        for d in (self.blob_dir, self.journal_dir, self.snapshot_dir):
            d.mkdir(parents=True, exist_ok=True)
        self.licences = tuple(licences)
        self.segment_limit = segment_limit
        self.lock = threading.RLock()
        self._state: dict[str, dict[int, dict]] = {e: {} for e in _ENTITIES}
        self._segment = 0
        self._segment_records = 0
        self._load()

    # -- persistence machinery ------------------------------------------------

    def _segment_path(self, n: int) -> Path:
        return self.journal_dir / f"{n}.jsonl"

    def _load(self) -> None:
        segments = sorted(
            int(p.stem) for p in self.journal_dir.glob("*.jsonl") if p.stem.isdigit()
        )
        snapshots = sorted(
            int(p.stem) for p in self.snapshot_dir.glob("*.json") if p.stem.isdigit()
        )
        start = 0
        if snapshots:
            start = snapshots[-1]
            loaded = json.loads((self.snapshot_dir / f"{start}.json").read_text())
            self._state = {
                entity: {int(k): v for k, v in table.items()}
                for entity, table in loaded.items()
            }
            for entity in _ENTITIES:
                self._state.setdefault(entity, {})
        self._segment = start
        self._segment_records = 0
        for n in segments:
            if n < start:
                continue
            count = 0
            with open(self._segment_path(n), encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    self._apply(json.loads(line))
                    count += 1
            self._segment = n
            self._segment_records = count

    def _apply(self, record: dict) -> None:
        entity = record["entity"]
        ident = int(record["id"])
        if record["op"] == "put":
            self._state[entity][ident] = record["payload"]
        elif record["op"] == "soft_delete":
            if ident in self._state[entity]:
                self._state[entity][ident]["deleted"] = True

    def _append(self, op: str, entity: str, ident: int, payload, actor) -> None:
        record = {
            "op": op,
            "entity": entity,
            "id": ident,
            "payload": payload,
            "actor": actor,
            "ts": utcnow(),
        }
        if self._segment_records >= self.segment_limit:
            self._roll_segment()
        with open(self._segment_path(self._segment), "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, separators=(",", ":"), sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        self._segment_records += 1
        self._apply(record)

    def _roll_segment(self) -> None:
        next_segment = self._segment + 1
        snapshot = self.snapshot_dir / f"{next_segment}.json"
        snapshot.write_text(json.dumps(self._state, sort_keys=True))
        self._segment = next_segment
        self._segment_records = 0

    def _next_id(self, entity: str) -> int:
        table = self._state[entity]
        return 1 + max(table.keys(), default=0)

    # -- blobs -----------------------------------------------------------------

    def put_blob(self, data: bytes) -> str:
        digest = sha256_hex(data)
        path = self.blob_dir / digest
        if not path.exists():
            tmp = path.with_suffix(".tmp")
            tmp.write_bytes(data)
            tmp.replace(path)
        return digest

    def get_blob(self, digest: str) -> bytes:
        path = self.blob_dir / digest
        if not re.fullmatch(r"[0-9a-f]{64}", digest) or not path.exists():
            raise NotFoundError(f"no blob {digest}")
        return path.read_bytes()

    # -- users -----------------------------------------------------------------

    def create_user(self, display_name: str) -> dict:
        with self.lock:
            user_id = self._next_id("user")
            user = {
                "user_id": user_id,
                "display_name": display_name,
                "api_key": secrets.token_hex(32),
                "created_at": utcnow(),
            }
            self._append("put", "user", user_id, user, actor=user_id)
            return dict(user)

    def resolve_key(self, api_key: str | None) -> dict:
        if api_key:
            for user in self._state["user"].values():
                if user.get("api_key") == api_key and not user.get("deleted"):
                    return dict(user)
        raise AuthError("unknown or missing API key")

    def get_user(self, user_id: int) -> dict:
        user = self._state["user"].get(user_id)
        if user is None or user.get("deleted"):
            raise NotFoundError(f"no user {user_id}")
        return dict(user)

    def all_users(self) -> list[dict]:
        return [dict(u) for u in self._state["user"].values() if not u.get("deleted")]

    # -- datasets ----------------------------------------------------------------

    def upload_dataset(self, actor_key: str, meta: dict, payload: bytes | None = None,
                       url: str | None = None) -> int:
        user = self.resolve_key(actor_key)
        name = (meta.get("name") or "").strip()
        licence = meta.get("licence")
        if not name:
            raise ValidationError("dataset needs a name")
        if licence not in self.licences:
            raise ValidationError(
                f"licence must be one of {list(self.licences)}, got {licence!r}"
            )
        if payload is None and url is None:
            raise ValidationError("dataset needs file content or a source URL")
        if payload is not None and not payload:
            raise ValidationError("dataset payload is empty")
        if url is not None and not _valid_url(url):
            raise ValidationError(f"malformed source URL {url!r}")

        with self.lock:
            version = 1 + max(
                (d["version"] for d in self._state["dataset"].values() if d["name"] == name),
                default=0,
            )
            dataset_id = self._next_id("dataset")
            record = {
                "dataset_id": dataset_id,
                "name": name,
                "version": version,
                "version_label": meta.get("version_label"),
                "description": meta.get("description"),
                "source": {"url": url} if url else {"blob": self.put_blob(payload)},
                "licence": licence,
                "citation": meta.get("citation"),
                "paper_url": meta.get("paper_url"),
                "default_target": meta.get("default_target"),
                "row_id_attribute": meta.get("row_id_attribute"),
                "uploader": user["user_id"],
                "uploaded_at": utcnow(),
                "status": "in_preparation",
                "qualities": None,
            }
            self._append("put", "dataset", dataset_id, record, actor=user["user_id"])
            return dataset_id

    def activate_dataset(self, dataset_id: int) -> str:
        """Parse, characterize, and mark a freshly uploaded dataset.

        Never raises for content problems: any failure lands in
        status="error" with a stored reason.
        """
        record = self.get_dataset(dataset_id)
        if record["status"] != "in_preparation":
            raise ValidationError(
                f"dataset {dataset_id} is {record['status']}, not in_preparation"
            )
        updates: dict = {}
        reason = None
        try:
            if "url" in record["source"]:
                data = self._fetch(record["source"]["url"])
                updates["source"] = {
                    "blob": self.put_blob(data),
                    "url": record["source"]["url"],
                    "fetched_at": utcnow(),
                }
            else:
                data = self.get_blob(record["source"]["blob"])
            relation = parse_arff(data)
            target = record.get("default_target")
            if target:
                try:
                    idx = relation.attribute_index(target)
                except KeyError:
                    raise ValidationError(f"no attribute named '{target}'") from None
                kind = relation.attributes[idx].kind
                task_type = (
                    "supervised_classification" if kind == "nominal" else "supervised_regression"
                )
                findings = validate_for_task(relation, target, task_type)
                if findings:
                    raise ValidationError("; ".join(findings))
            row_id_attr = record.get("row_id_attribute")
            if row_id_attr:
                try:
                    values = relation.column(row_id_attr)
                except KeyError:
                    raise ValidationError(
                        f"row_id_attribute '{row_id_attr}' not in schema"
                    ) from None
                if len(set(values)) != len(values):
                    raise ValidationError(
                        f"row_id_attribute '{row_id_attr}' has duplicate values"
                    )
            target_for_qualities = target if target else None
            qualities = compute_qualities(relation, target_for_qualities)
            updates["qualities"] = qualities
            updates["quality_meta"] = {
                "discretization_bins": DISCRETIZATION_BINS,
                "landmarker_seed": STORED_LANDMARKER_SEED,
            }
            updates["n_rows"] = len(relation.rows)
            updates["status"] = "active"
        except Exception as exc:  # encode all failures in status, never raise
            reason = str(exc)
            updates["status"] = "error"
            updates["error_reason"] = reason

        with self.lock:
            current = self.get_dataset(dataset_id)
            current.update(updates)
            self._append("put", "dataset", dataset_id, current, actor=current["uploader"])
        return updates["status"]

    def _fetch(self, url: str) -> bytes:
        try:
            response = httpx.get(url, timeout=30.0, follow_redirects=True)
            response.raise_for_status()
            return response.content
        except Exception as exc:
            raise ValidationError(f"could not fetch {url}: {exc}") from None

    def get_dataset(self, dataset_id: int) -> dict:
        return self._get("dataset", dataset_id)

    def all_datasets(self) -> list[dict]:
        return [copy.deepcopy(d) for d in self._state["dataset"].values() if not d.get("deleted")]

    def list_datasets(self, keyword: str = "", status: str | None = None) -> list[dict]:
        """Summaries matching a case-insensitive substring of name or
        description, ordered by name then newest version first."""
        needle = keyword.lower()
        out = []
        for record in self._state["dataset"].values():
            if record.get("deleted"):
                continue
            if status and record["status"] != status:
                continue
            haystack = (record["name"] + " " + (record.get("description") or "")).lower()
            if needle and needle not in haystack:
                continue
            out.append(dict(record))
        out.sort(key=lambda d: (d["name"], -d["version"]))
        return out

    # -- flows -------------------------------------------------------------------

    def upload_flow(self, actor_key: str, meta: dict, payload: bytes | None = None,
                    url: str | None = None) -> int:
        user = self.resolve_key(actor_key)
        name = (meta.get("name") or "").strip()
        if not name:
            raise ValidationError("flow needs a name")
        licence = meta.get("licence")
        if licence not in self.licences:
            raise ValidationError(
                f"licence must be one of {list(self.licences)}, got {licence!r}"
            )
        if payload is None and url is None:
            raise ValidationError("flow needs code content or a source URL")
        if url is not None and not _valid_url(url):
            raise ValidationError(f"malformed source URL {url!r}")
        parameters = validate_parameter_specs(meta.get("parameters") or [])
        annotations = {
            "handles_missing": False,
            "handles_nominal": False,
            "handles_numeric": False,
        }
        for key, value in (meta.get("annotations") or {}).items():
            if not isinstance(value, bool):
                raise ValidationError(f"annotation '{key}' must be boolean")
            annotations[key] = value

        with self.lock:
            version = 1 + max(
                (f["version"] for f in self._state["flow"].values() if f["name"] == name),
                default=0,
            )
            flow_id = self._next_id("flow")
            record = {
                "flow_id": flow_id,
                "name": name,
                "version": version,
                "version_label": meta.get("version_label"),
                "source": {"url": url} if url else {"blob": self.put_blob(payload)},
                "description": meta.get("description") or "",
                "licence": licence,
                "uploader": user["user_id"],
                "uploaded_at": utcnow(),
                "parameters": parameters,
                "annotations": annotations,
            }
            self._append("put", "flow", flow_id, record, actor=user["user_id"])
            return flow_id

    def get_flow(self, flow_id: int) -> dict:
        return self._get("flow", flow_id)

    def all_flows(self) -> list[dict]:
        return [copy.deepcopy(f) for f in self._state["flow"].values() if not f.get("deleted")]

    def list_flows(self, keyword: str = "") -> list[dict]:
        needle = keyword.lower()
        out = []
        for record in self._state["flow"].values():
            if record.get("deleted"):
                continue
            haystack = (record["name"] + " " + (record.get("description") or "")).lower()
            if needle and needle not in haystack:
                continue
            out.append(dict(record))
        out.sort(key=lambda f: (f["name"], -f["version"]))
        return out

    def find_flow(self, name: str, version: int | None = None) -> dict | None:
        candidates = [
            f
            for f in self._state["flow"].values()
            if f["name"] == name and not f.get("deleted")
        ]
        if version is not None:
            candidates = [f for f in candidates if f["version"] == version]
        if not candidates:
            return None
        return dict(max(candidates, key=lambda f: f["version"]))

    # -- tasks (persistence only; creation logic lives in the task layer) --------

    def put_task(self, payload: dict, actor: int) -> int:
        with self.lock:
            task_id = self._next_id("task")
            payload = dict(payload, task_id=task_id)
            self._append("put", "task", task_id, payload, actor=actor)
            return task_id

    def get_task(self, task_id: int) -> dict:
        return self._get("task", task_id)

    def all_tasks(self) -> list[dict]:
        return [copy.deepcopy(t) for t in self._state["task"].values() if not t.get("deleted")]

    # -- runs ---------------------------------------------------------------------

    def store_run(self, actor_key: str, fields: dict, predictions: bytes) -> int:
        user = self.resolve_key(actor_key)
        task = self.get_task(int(fields["task_id"]))
        flow = self.get_flow(int(fields["flow_id"]))
        origin = fields.get("setting_origin", "default")
        if origin not in SETTING_ORIGINS:
            raise ValidationError(
                f"setting_origin must be one of {list(SETTING_ORIGINS)}, got {origin!r}"
            )
        declared = {p["name"] for p in flow["parameters"]}
        settings = []
        for item in fields.get("parameter_settings") or []:
            name, value = item[0], item[1]
            if name not in declared:
                raise ValidationError(
                    f"parameter '{name}' is not declared by flow '{flow['name']}'"
                )
            settings.append([name, value])
        if not predictions:
            raise ValidationError("predictions file is empty")

        with self.lock:
            run_id = self._next_id("run")
            record = {
                "run_id": run_id,
                "task_id": task["task_id"],
                "flow_id": flow["flow_id"],
                "uploader": user["user_id"],
                "uploaded_at": utcnow(),
                "parameter_settings": settings,
                "setting_origin": origin,
                "predictions": self.put_blob(predictions),
                "user_evaluations": fields.get("user_evaluations"),
                "hardware_note": fields.get("hardware_note"),
                "evaluation": None,
            }
            self._append("put", "run", run_id, record, actor=user["user_id"])
            return run_id

    def attach_evaluation(self, run_id: int, evaluation: dict | None, error: str | None = None) -> None:
        with self.lock:
            record = self.get_run(run_id)
            record["evaluation"] = evaluation
            if error is not None:
                record["evaluation_error"] = error
            self._append("put", "run", run_id, record, actor=record["uploader"])

    def get_run(self, run_id: int) -> dict:
        return self._get("run", run_id)

    def all_runs(self) -> list[dict]:
        return [copy.deepcopy(r) for r in self._state["run"].values() if not r.get("deleted")]

    # -- deletion ------------------------------------------------------------------

    def soft_delete(self, entity: str, ident: int, actor_key: str) -> None:
        user = self.resolve_key(actor_key)
        with self.lock:
            self._get(entity, ident)  # existence check
            if entity == "dataset":
                holders = [
                    t["task_id"] for t in self.all_tasks() if t["dataset_id"] == ident
                ]
                if holders:
                    raise DeleteConflictError(
                        f"dataset {ident} is referenced by tasks {holders}"
                    )
            elif entity == "task":
                holders = [r["run_id"] for r in self.all_runs() if r["task_id"] == ident]
                if holders:
                    raise DeleteConflictError(f"task {ident} is referenced by runs {holders}")
            elif entity == "flow":
                holders = [r["run_id"] for r in self.all_runs() if r["flow_id"] == ident]
                if holders:
                    raise DeleteConflictError(f"flow {ident} is referenced by runs {holders}")
            self._append("soft_delete", entity, ident, payload=None, actor=user["user_id"])

    # -- shared helpers ---------------------------------------------------------------

    def _get(self, entity: str, ident: int) -> dict:
        record = self._state[entity].get(int(ident))
        if record is None or record.get("deleted"):
            raise NotFoundError(f"no {entity} {ident}")
        return copy.deepcopy(record)

    def state_digest(self) -> str:
        """Stable digest of the full store state, for replay verification."""
        canonical = json.dumps(self._state, sort_keys=True, separators=(",", ":"))
        return sha256_hex(canonical.encode())
