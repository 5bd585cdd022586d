"""Deterministic train/test split generation.

Every split is derived from a fixed 64-bit linear congruential generator so
that any two services (or any client re-deriving folds locally) produce
byte-identical split tables for the same seed:

    state0 = seed XOR 0x9E3779B97F4A7C15
    step:    state <- state * 6364136223846793005 + 1442695040888963407  (mod 2^64)
    output = top 32 bits of the new state

Row indices are shuffled with a Fisher-Yates pass (i from n-1 down to 1,
j = output mod (i+1)).  For stratified splits the shuffled indices are then
stably grouped by class label (label order = first appearance in the
dataset) and concatenated; position j of that concatenation lands in TEST
fold j mod k.  Unstratified splits assign shuffled position j to fold
j mod k directly.  Repeat r reruns everything with seed + r.

Rows whose target value is missing are excluded from the table entirely.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .arff import NOMINAL, AttributeSpec, Relation
from .errors import TooFewInstancesError, ValidationError

_MASK64 = (1 << 64) - 1

CROSSVALIDATION = "crossvalidation"
HOLDOUT = "holdout"

TRAIN = "TRAIN"
TEST = "TEST"


class SplitPrng:
    """The pinned 64-bit LCG; all split randomness flows through this."""

    def __init__(self, seed: int):
        self.state = (seed ^ 0x9E3779B97F4A7C15) & _MASK64

    def next_u32(self) -> int:
        self.state = (self.state * 6364136223846793005 + 1442695040888963407) & _MASK64
        return self.state >> 32

    def next_below(self, bound: int) -> int:
        return self.next_u32() % bound


def fisher_yates(items: list, prng: SplitPrng) -> None:
    """In-place shuffle consuming one PRNG output per step."""
    for i in range(len(items) - 1, 0, -1):
        j = prng.next_below(i + 1)
        items[i], items[j] = items[j], items[i]


@dataclass(frozen=True)
class EstimationProcedure:
    """How a task resamples its dataset: k-fold cross-validation or holdout."""

    kind: str
    repeats: int = 1
    folds: int | None = None
    holdout_fraction: float | None = None
    stratified: bool = True
    seed: int = 0

    def validate(self) -> None:
        if self.kind not in (CROSSVALIDATION, HOLDOUT):
            raise ValidationError(f"unknown estimation procedure kind '{self.kind}'")
        if self.repeats < 1:
            raise ValidationError("repeats must be >= 1")
        if not 0 <= self.seed <= _MASK64:
            raise ValidationError("seed must fit in 64 unsigned bits")
        if self.kind == CROSSVALIDATION:
            if self.folds is None or self.folds < 2:
                raise ValidationError("crossvalidation needs folds >= 2")
        else:
            if self.holdout_fraction is None or not 0 < self.holdout_fraction < 1:
                raise ValidationError("holdout needs holdout_fraction in (0,1)")

    def to_wire(self) -> dict:
        """Field map used in task descriptions (key 'type', not 'kind')."""
        out: dict = {"type": self.kind, "repeats": self.repeats}
        if self.kind == CROSSVALIDATION:
            out["folds"] = self.folds
        else:
            out["holdout_fraction"] = self.holdout_fraction
        out["stratified"] = self.stratified
        out["seed"] = self.seed
        return out

    @classmethod
    def from_wire(cls, data: dict) -> "EstimationProcedure":
        try:
            return cls(
                kind=data["type"],
                repeats=int(data.get("repeats", 1)),
                folds=int(data["folds"]) if data.get("folds") is not None else None,
                holdout_fraction=(
                    float(data["holdout_fraction"])
                    if data.get("holdout_fraction") is not None
                    else None
                ),
                stratified=bool(data.get("stratified", True)),
                seed=int(data.get("seed", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad estimation procedure: {exc}") from None


DEFAULT_ESTIMATION = EstimationProcedure(
    kind=CROSSVALIDATION, repeats=1, folds=10, stratified=True, seed=0
)


@dataclass
class SplitTable:
    """Materialized TRAIN/TEST membership rows: (type, rowid, repeat, fold)."""

    rows: list[tuple[str, int, int, int]] = field(default_factory=list)

    @property
    def n_repeats(self) -> int:
        return 1 + max((r[2] for r in self.rows), default=-1)

    @property
    def n_folds(self) -> int:
        return 1 + max((r[3] for r in self.rows), default=-1)

    def test_ids(self, repeat: int, fold: int) -> list[int]:
        return [r[1] for r in self.rows if r[0] == TEST and r[2] == repeat and r[3] == fold]

    def train_ids(self, repeat: int, fold: int) -> list[int]:
        return [r[1] for r in self.rows if r[0] == TRAIN and r[2] == repeat and r[3] == fold]

    def to_relation(self) -> Relation:
        """Canonical ARFF form: per (repeat, fold) TRAIN rows then TEST rows,
        each block in ascending rowid order."""
        attrs = [
            AttributeSpec("type", NOMINAL, labels=(TRAIN, TEST)),
            AttributeSpec("rowid", "numeric"),
            AttributeSpec("repeat", "numeric"),
            AttributeSpec("fold", "numeric"),
        ]
        ordered = sorted(self.rows, key=lambda r: (r[2], r[3], r[0] != TRAIN, r[1]))
        rows = [[t, float(rowid), float(rep), float(fold)] for t, rowid, rep, fold in ordered]
        return Relation("splits", attrs, rows)

    @classmethod
    def from_relation(cls, rel: Relation) -> "SplitTable":
        try:
            it = rel.attribute_index("type")
            ir = rel.attribute_index("rowid")
            ip = rel.attribute_index("repeat")
            ifo = rel.attribute_index("fold")
        except KeyError as exc:
            raise ValidationError(f"split table is missing attribute {exc}") from None
        rows = []
        for row in rel.rows:
            rows.append((str(row[it]), int(row[ir]), int(row[ip]), int(row[ifo])))
        return cls(rows)


def excluded_rowids(relation: Relation, target: str) -> list[int]:
    """0-based indices of rows whose target cell is missing (ascending)."""
    col = relation.column(target)
    return [i for i, v in enumerate(col) if v is None]


def _shuffled_order(
    eligible: list[int], labels: list | None, label_order: list, seed: int
) -> list[int]:
    order = list(eligible)
    fisher_yates(order, SplitPrng(seed))
    if labels is None:
        return order
    groups: dict = {lab: [] for lab in label_order}
    for idx in order:
        groups[labels[idx]].append(idx)
    return [idx for lab in label_order for idx in groups[lab]]


def generate_splits(relation: Relation, target: str, estimation: EstimationProcedure) -> SplitTable:
    """Build the deterministic SplitTable for a dataset and procedure.

    Holdout uses a single fold 0 per repeat; its TEST set takes
    m = clamp(floor(n * holdout_fraction), 1, n-1) evenly spread positions
    floor(i*n/m) of the (optionally stratified) concatenated order, which
    keeps class proportions close without extra randomness.
    """
    estimation.validate()
    target_idx = relation.attribute_index(target)
    target_attr = relation.attributes[target_idx]
    col = [row[target_idx] for row in relation.rows]

    eligible = [i for i, v in enumerate(col) if v is not None]
    n = len(eligible)
    if n == 0:
        raise TooFewInstancesError("no rows with an observed target value")

    labels = None
    label_order: list = []
    if estimation.stratified:
        if target_attr.kind != NOMINAL:
            raise ValidationError("stratified splits need a nominal target")
        labels = col
        seen = set()
        for i in eligible:
            if col[i] not in seen:
                seen.add(col[i])
                label_order.append(col[i])

    table = SplitTable()
    if estimation.kind == CROSSVALIDATION:
        k = estimation.folds
        if k > n:
            raise TooFewInstancesError(f"{k} folds but only {n} usable rows")
        for rep in range(estimation.repeats):
            order = _shuffled_order(eligible, labels, label_order, estimation.seed + rep)
            test_sets: list[set[int]] = [set() for _ in range(k)]
            for j, idx in enumerate(order):
                test_sets[j % k].add(idx)
            for fold in range(k):
                for idx in eligible:
                    kind = TEST if idx in test_sets[fold] else TRAIN
                    table.rows.append((kind, idx, rep, fold))
    else:
        if n < 2:
            raise TooFewInstancesError("holdout needs at least 2 usable rows")
        m = min(max(int(n * estimation.holdout_fraction), 1), n - 1)
        for rep in range(estimation.repeats):
            order = _shuffled_order(eligible, labels, label_order, estimation.seed + rep)
            test = {order[i * n // m] for i in range(m)}
            for idx in eligible:
                kind = TEST if idx in test else TRAIN
                table.rows.append((kind, idx, rep, 0))
    return table
