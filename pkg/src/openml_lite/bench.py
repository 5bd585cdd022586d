"""Run a reference learner over a task's split table, fold by fold.

This is the client-side half of the protocol: fit on every TRAIN
partition, predict every TEST row, and assemble one predictions file
covering all repeats and folds.  The output is deterministic for a given
dataset, split table, and learner configuration.
"""

from __future__ import annotations

from .arff import Relation, write_arff
from .evaluate import PredictionRecord, records_to_relation
from .splits import SplitTable


class LearnerError(Exception):
    """A learner failed inside one fold; carries (repeat, fold) context."""

    def __init__(self, repeat: int, fold: int, cause: Exception):
        super().__init__(f"learner failed on repeat {repeat} fold {fold}: {cause}")
        self.repeat = repeat
        self.fold = fold
        self.cause = cause


def execute_task(
    relation: Relation, target: str, table: SplitTable, learner
) -> list[PredictionRecord]:
    records: list[PredictionRecord] = []
    for repeat in range(table.n_repeats):
        for fold in range(table.n_folds):
            train_rows = [relation.rows[i] for i in table.train_ids(repeat, fold)]
            try:
                model = learner.fit(train_rows, relation.attributes, target)
                for row_id in table.test_ids(repeat, fold):
                    label, confidences = model.predict(relation.rows[row_id])
                    records.append(
                        PredictionRecord(repeat, fold, row_id, label, confidences)
                    )
            except Exception as exc:
                raise LearnerError(repeat, fold, exc) from exc
    return records


def predictions_arff(
    records: list[PredictionRecord], class_labels: tuple[str, ...] | None
) -> bytes:
    return write_arff(records_to_relation(records, class_labels))
