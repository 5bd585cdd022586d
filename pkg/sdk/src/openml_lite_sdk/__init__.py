"""Programmatic client for an openml-lite server.

The workflow mirrors the three-step loop researchers actually run:

    conn = Connection("http://localhost:8080", api_key="...")
    bundle = conn.get_task(3)
    artifact = conn.run_task(bundle, "naive_bayes")
    submitted = conn.submit_run(artifact, flow_id=2)

``run_task`` accepts a built-in learner name or any object with the
fit/predict contract, so plugging in your own algorithm is one class.
"""

from .client import (
    AuthError,
    Connection,
    NotFoundError,
    RunArtifact,
    ServerError,
    SubmittedRun,
    TaskBundle,
    TransportError,
)
from openml_lite.bench import LearnerError

__all__ = [
    "AuthError",
    "Connection",
    "LearnerError",
    "NotFoundError",
    "RunArtifact",
    "ServerError",
    "SubmittedRun",
    "TaskBundle",
    "TransportError",
]
