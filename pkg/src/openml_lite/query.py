"""Read-only SELECT queries over four fixed relational views.

The grammar is deliberately tiny:

    SELECT column-list | *
    FROM runs_view | datasets_view | flows_view | evaluations_view
    [WHERE col op literal [AND col op literal]*]      op: = != < <= > >= LIKE
    [ORDER BY col [ASC|DESC]]
    [LIMIT n]

Anything that is not a SELECT, or that mentions a mutating keyword anywhere
outside a string literal, is rejected before parsing (MutationError, the
HTTP layer maps it to 403).  Malformed SELECTs raise ParseError with the
character position and the token set that would have been accepted there.

Evaluation semantics, pinned so results are reproducible:
  * a NULL cell never satisfies any WHERE predicate;
  * comparing a number to a string literal is simply false;
  * LIKE is case-sensitive and '%' is the only wildcard;
  * ORDER BY is a stable sort over the view's natural order (ascending
    primary id); NULLs sort first ascending, last descending;
  * LIMIT is clamped to 10000, which is also the default.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .store import Registry

MAX_LIMIT = 10000

VIEWS = {
    "runs_view": (
        "run_id",
        "task_id",
        "flow_id",
        "flow_name",
        "flow_version",
        "uploader",
        "uploaded_at",
        "setting_origin",
    ),
    "evaluations_view": ("run_id", "task_id", "flow_id", "measure", "value", "std"),
    "datasets_view": (
        "dataset_id",
        "name",
        "version",
        "status",
        "uploader",
        "NumberOfInstances",
        "NumberOfFeatures",
        "NumberOfClasses",
    ),
    "flows_view": ("flow_id", "name", "version", "uploader"),
}

OPERATORS = ("=", "!=", "<", "<=", ">", ">=", "LIKE")

_MUTATING = frozenset(
    """insert update delete drop alter create attach detach pragma replace
    truncate vacuum begin commit rollback grant revoke merge exec execute
    call set into""".split()
)


class QueryError(Exception):
    """Base for everything the query endpoint turns into an error response."""


class MutationError(QueryError):
    """Statement is not a plain SELECT; refused outright."""


class ParseError(QueryError):
    def __init__(self, message: str, position: int, expected: tuple[str, ...]):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.expected = tuple(expected)


class UnknownViewError(QueryError):
    def __init__(self, name: str):
        super().__init__(f"unknown view '{name}' (views: {', '.join(sorted(VIEWS))})")
        self.name = name


class UnknownColumnError(QueryError):
    def __init__(self, column: str, view: str):
        super().__init__(f"view '{view}' has no column '{column}'")
        self.column = column
        self.view = view


@dataclass(frozen=True)
class Token:
    kind: str  # ident | number | string | op | star | comma
    value: str
    position: int


_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<string>'(?:[^']|'')*')
      | (?P<number>-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<op><=|>=|!=|<|>|=)
      | (?P<star>\*)
      | (?P<comma>,)
    """,
    re.VERBOSE,
)

_WORD_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_STRING_RE = re.compile(r"'(?:[^']|'')*'")


def _reject_mutations(sql: str) -> None:
    """403-class screening on the raw text, string literals blanked out."""
    blanked = _STRING_RE.sub(lambda m: " " * len(m.group()), sql)
    words = [w.lower() for w in _WORD_RE.findall(blanked)]
    for word in words:
        if word in _MUTATING:
            raise MutationError(f"'{word}' is not allowed; only SELECT queries run here")
    if words and words[0] != "select":
        raise MutationError("only SELECT queries run here")


def tokenize(sql: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(sql):
        match = _TOKEN_RE.match(sql, pos)
        if match is None:
            raise ParseError(f"unexpected character {sql[pos]!r}", pos, ())
        kind = match.lastgroup
        if kind != "ws":
            value = match.group()
            if kind == "string":
                value = value[1:-1].replace("''", "'")
            tokens.append(Token(kind, value, pos))
        pos = match.end()
    return tokens


@dataclass(frozen=True)
class QuerySpec:
    view: str
    columns: tuple[str, ...] | None  # None means *
    where: tuple[tuple[str, str, object], ...] = ()
    order_by: tuple[str, bool] | None = None  # (column, ascending)
    limit: int | None = None


class _Parser:
    def __init__(self, sql: str):
        self.sql = sql
        self.tokens = tokenize(sql)
        self.index = 0

    def _peek(self) -> Token | None:
        if self.index < len(self.tokens):
            return self.tokens[self.index]
        return None

    def _position(self) -> int:
        token = self._peek()
        return token.position if token else len(self.sql)

    def _fail(self, expected: tuple[str, ...]):
        token = self._peek()
        got = f"'{token.value}'" if token else "end of input"
        raise ParseError(f"unexpected {got}", self._position(), expected)

    def _take_keyword(self, word: str) -> None:
        token = self._peek()
        if token is None or token.kind != "ident" or token.value.upper() != word:
            self._fail((word,))
        self.index += 1

    def _try_keyword(self, word: str) -> bool:
        token = self._peek()
        if token is not None and token.kind == "ident" and token.value.upper() == word:
            self.index += 1
            return True
        return False

    def _take_ident(self, expected: tuple[str, ...]) -> str:
        token = self._peek()
        if token is None or token.kind != "ident":
            self._fail(expected)
        if token.value.upper() in ("SELECT", "FROM", "WHERE", "AND", "ORDER", "BY", "ASC", "DESC", "LIMIT", "LIKE"):
            self._fail(expected)
        self.index += 1
        return token.value

    def parse(self) -> QuerySpec:
        self._take_keyword("SELECT")
        columns: tuple[str, ...] | None
        if self._peek() is not None and self._peek().kind == "star":
            self.index += 1
            columns = None
        else:
            names = [self._take_ident(("column name", "*"))]
            while self._peek() is not None and self._peek().kind == "comma":
                self.index += 1
                names.append(self._take_ident(("column name",)))
            columns = tuple(names)
        self._take_keyword("FROM")
        view = self._take_ident(("view name",))

        where: list[tuple[str, str, object]] = []
        if self._try_keyword("WHERE"):
            where.append(self._condition())
            while self._try_keyword("AND"):
                where.append(self._condition())

        order_by = None
        if self._try_keyword("ORDER"):
            self._take_keyword("BY")
            column = self._take_ident(("column name",))
            ascending = True
            if self._try_keyword("DESC"):
                ascending = False
            else:
                self._try_keyword("ASC")
            order_by = (column, ascending)

        limit = None
        if self._try_keyword("LIMIT"):
            token = self._peek()
            if token is None or token.kind != "number" or not re.fullmatch(r"\d+", token.value):
                self._fail(("non-negative integer",))
            limit = int(token.value)
            self.index += 1

        if self._peek() is not None:
            self._fail(("end of query",))
        return QuerySpec(view=view, columns=columns, where=tuple(where), order_by=order_by, limit=limit)

    def _condition(self) -> tuple[str, str, object]:
        column = self._take_ident(("column name",))
        token = self._peek()
        if token is not None and token.kind == "op":
            op = token.value
            self.index += 1
        elif token is not None and token.kind == "ident" and token.value.upper() == "LIKE":
            op = "LIKE"
            self.index += 1
        else:
            self._fail(OPERATORS)
        token = self._peek()
        if token is None or token.kind not in ("number", "string"):
            self._fail(("number", "string literal"))
        literal: object = token.value if token.kind == "string" else float(token.value)
        if token.kind == "string" and op not in ("=", "!=", "LIKE", "<", "<=", ">", ">="):
            self._fail(OPERATORS)
        self.index += 1
        return (column, op, literal)


def parse_query(sql: str) -> QuerySpec:
    _reject_mutations(sql)
    spec = _Parser(sql).parse()
    if spec.view not in VIEWS:
        raise UnknownViewError(spec.view)
    schema = VIEWS[spec.view]
    for column in spec.columns or ():
        if column not in schema:
            raise UnknownColumnError(column, spec.view)
    for column, _, _ in spec.where:
        if column not in schema:
            raise UnknownColumnError(column, spec.view)
    if spec.order_by and spec.order_by[0] not in schema:
        raise UnknownColumnError(spec.order_by[0], spec.view)
    return spec


# -- view construction ---------------------------------------------------------------


def _display_names(registry: Registry) -> dict[int, str]:
    return {u["user_id"]: u["display_name"] for u in registry.all_users()}


def build_view(registry: Registry, view: str) -> list[dict]:
    """Materialize one view in its natural (primary id ascending) order."""
    users = _display_names(registry)
    rows: list[dict] = []
    if view == "runs_view":
        for run in sorted(registry.all_runs(), key=lambda r: r["run_id"]):
            flow = registry.get_flow(run["flow_id"])
            rows.append(
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
    elif view == "evaluations_view":
        for run in sorted(registry.all_runs(), key=lambda r: r["run_id"]):
            evaluation = run.get("evaluation")
            if not evaluation:
                continue
            for name in sorted(evaluation["measures"]):
                measure = evaluation["measures"][name]
                rows.append(
                    {
                        "run_id": run["run_id"],
                        "task_id": run["task_id"],
                        "flow_id": run["flow_id"],
                        "measure": name,
                        "value": measure["mean"],
                        "std": measure["std"],
                    }
                )
    elif view == "datasets_view":
        for dataset in sorted(registry.all_datasets(), key=lambda d: d["dataset_id"]):
            qualities = dataset.get("qualities") or {}
            rows.append(
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
    elif view == "flows_view":
        for flow in sorted(registry.all_flows(), key=lambda f: f["flow_id"]):
            rows.append(
                {
                    "flow_id": flow["flow_id"],
                    "name": flow["name"],
                    "version": flow["version"],
                    "uploader": users.get(flow["uploader"], ""),
                }
            )
    else:
        raise UnknownViewError(view)
    return rows


def _like_match(value: str, pattern: str) -> bool:
    regex = ".*".join(re.escape(part) for part in pattern.split("%"))
    return re.fullmatch(regex, value, re.DOTALL) is not None


def _predicate(cell: object, op: str, literal: object) -> bool:
    if cell is None:
        return False
    if op == "LIKE":
        return isinstance(cell, str) and isinstance(literal, str) and _like_match(cell, literal)
    cell_is_number = isinstance(cell, (int, float)) and not isinstance(cell, bool)
    literal_is_number = isinstance(literal, float)
    if cell_is_number != literal_is_number:
        return False
    if op == "=":
        return cell == literal
    if op == "!=":
        return cell != literal
    if op == "<":
        return cell < literal
    if op == "<=":
        return cell <= literal
    if op == ">":
        return cell > literal
    return cell >= literal


def run_query(registry: Registry, spec: QuerySpec) -> dict:
    rows = build_view(registry, spec.view)
    for column, op, literal in spec.where:
        rows = [row for row in rows if _predicate(row[column], op, literal)]
    if spec.order_by is not None:
        column, ascending = spec.order_by
        # columns are homogeneous, so (present, value) is a safe key; the
        # placeholder for NULL never gets compared against a real value
        rows.sort(
            key=lambda row: (row[column] is not None, 0 if row[column] is None else row[column]),
            reverse=not ascending,
        )
    limit = min(spec.limit, MAX_LIMIT) if spec.limit is not None else MAX_LIMIT
    rows = rows[:limit]
    columns = spec.columns or VIEWS[spec.view]
    return {
        "columns": list(columns),
        "rows": [[row[c] for c in columns] for row in rows],
    }


def execute_query(registry: Registry, sql: str) -> dict:
    return run_query(registry, parse_query(sql))
