"""The Connection class and the typed errors it raises.

Everything here talks to the server through the documented /api/v1
routes.  Local work (parsing the dataset, executing folds, serializing
predictions) reuses the openml_lite library directly, which is what
makes SDK prediction files byte-identical to the command line client's.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import httpx

from openml_lite.arff import Relation, parse_arff
from openml_lite.bench import execute_task, predictions_arff
from openml_lite.evaluate import PredictionRecord
from openml_lite.learners import make_learner
from openml_lite.splits import SplitTable


class TransportError(ConnectionError):
    """The server could not be reached at all."""


class ServerError(Exception):
    """The server answered with an error status."""

    def __init__(self, status: int, detail):
        super().__init__(f"server returned {status}: {detail}")
        self.status = status
        self.detail = detail


class AuthError(ServerError):
    """Missing or invalid API key."""


class NotFoundError(ServerError):
    """The requested entity does not exist."""


@dataclass(frozen=True)
class TaskBundle:
    """Everything needed to run one task locally, fetched in one call."""

    task_id: int
    task_type: str
    dataset_id: int
    target: str
    estimation_procedure: dict
    evaluation_measure: str
    dataset: Relation
    splits: SplitTable
    class_labels: tuple[str, ...] | None


@dataclass(frozen=True)
class RunArtifact:
    """In-memory predictions for one task, ready to submit."""

    task_id: int
    records: list[PredictionRecord]
    content: bytes


@dataclass(frozen=True)
class SubmittedRun:
    run_id: int
    headline_measure: str
    headline: float
    std: float | None


def _raise_for_status(response: httpx.Response) -> None:
    if response.status_code < 400:
        return
    try:
        detail = response.json().get("detail", response.text)
    except ValueError:
        detail = response.text
    if response.status_code == 401:
        raise AuthError(401, detail)
    if response.status_code == 404:
        raise NotFoundError(404, detail)
    raise ServerError(response.status_code, detail)


class Connection:
    """A configured server endpoint plus (optionally) an API key.

    Reads work without a key; submit_run requires one.  One Connection
    may be shared across threads for reads; do not mutate a TaskBundle.
    """

    def __init__(self, url: str, api_key: str | None = None, timeout: float = 60.0):
        self.url = url.rstrip("/")
        self.api_key = api_key
        self.timeout = timeout

    def _request(self, method: str, path: str, **kwargs) -> httpx.Response:
        headers = {"X-API-Key": self.api_key} if self.api_key else {}
        try:
            response = httpx.request(
                method, self.url + path, headers=headers, timeout=self.timeout, **kwargs
            )
        except httpx.TransportError as exc:
            raise TransportError(f"cannot reach {self.url}: {exc}") from exc
        _raise_for_status(response)
        return response

    def get_task(self, task_id: int) -> TaskBundle:
        """Fetch task description, dataset, and splits; parse them all."""
        description = self._request("GET", f"/api/v1/task/{task_id}").json()
        dataset = parse_arff(self._request("GET", description["dataset_url"]).content)
        splits = SplitTable.from_relation(
            parse_arff(self._request("GET", description["splits_url"]).content)
        )
        target = description["target_feature"]
        labels = dataset.attributes[dataset.attribute_index(target)].labels
        return TaskBundle(
            task_id=description["task_id"],
            task_type=description["task_type"],
            dataset_id=description["dataset_id"],
            target=target,
            estimation_procedure=description["estimation_procedure"],
            evaluation_measure=description["evaluation_measure"],
            dataset=dataset,
            splits=splits,
            class_labels=labels,
        )

    def run_task(self, bundle: TaskBundle, learner, params: dict | None = None) -> RunArtifact:
        """Train and predict every (repeat, fold) of the bundle locally.

        ``learner`` is a built-in name ("majority", "stump", "1nn",
        "naive_bayes") or any object whose fit(rows, attributes, target)
        returns a model with predict(row) -> (label, confidences).
        Failures inside a fold surface as LearnerError with the (repeat,
        fold) that broke.
        """
        if isinstance(learner, str):
            learner = make_learner(learner, params)
        elif params:
            raise TypeError("params only apply to built-in learner names")
        records = execute_task(bundle.dataset, bundle.target, bundle.splits, learner)
        content = predictions_arff(records, bundle.class_labels)
        return RunArtifact(task_id=bundle.task_id, records=records, content=content)

    def submit_run(
        self,
        artifact: RunArtifact,
        flow_id: int,
        parameter_settings: dict | None = None,
        setting_origin: str = "default",
    ) -> SubmittedRun:
        """Upload an artifact's predictions; the server evaluates them."""
        description = {
            "task_id": artifact.task_id,
            "flow_id": flow_id,
            "setting_origin": setting_origin,
            "parameter_settings": [
                [name, value] for name, value in sorted((parameter_settings or {}).items())
            ],
        }
        body = self._request(
            "POST",
            "/api/v1/run",
            data={"description": json.dumps(description)},
            files={"predictions": ("predictions.arff", artifact.content)},
        ).json()
        return SubmittedRun(
            run_id=body["run_id"],
            headline_measure=body["headline_measure"],
            headline=body["headline"],
            std=body.get("std"),
        )
