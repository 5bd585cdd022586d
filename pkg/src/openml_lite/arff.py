"""Reader and writer for the ARFF tabular format.

ARFF files carry the datasets themselves as well as the split tables and
prediction files exchanged with the server, so this module defines the
canonical serialization every other component relies on: lowercase
keywords, one data row per line, ``?`` for missing cells, and single-quote
quoting for values that need it.  ``parse_arff(write_arff(r))`` returns a
structurally equal relation.

Supported attribute kinds: numeric (also ``real``/``integer``), nominal
(``{a,b,c}``), string, and date (stored as opaque text).  Sparse data rows
(``{index value, ...}``) are rejected.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field

DEFAULT_MAX_BYTES = 256 * 1024 * 1024

NUMERIC = "numeric"
NOMINAL = "nominal"
STRING = "string"
DATE = "date"

Cell = None | float | str

_NUMERIC_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")

# Characters that force a value to be quoted in canonical output.
_NEEDS_QUOTE = set(" \t\n\r,'\"\\%{}")


class ArffError(Exception):
    """Base class for all ARFF reading/writing failures."""


class ArffSyntaxError(ArffError):
    """Malformed header or data line; carries the physical line number."""

    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class SchemaError(ArffError):
    """Structurally valid file violating schema rules (duplicate names,
    undeclared nominal labels, wrong cell counts)."""

    def __init__(self, reason: str, line: int | None = None):
        msg = f"line {line}: {reason}" if line is not None else reason
        super().__init__(msg)
        self.line = line
        self.reason = reason


class EmptyDataError(ArffError):
    """The @data section contains no rows."""


class FileTooLargeError(ArffError):
    """Input exceeds the configured size cap."""


@dataclass(frozen=True)
class AttributeSpec:
    """Declaration of one column: a name plus its kind.

    ``labels`` is set for nominal attributes (declaration order preserved),
    ``date_format`` for date attributes.
    """

    name: str
    kind: str
    labels: tuple[str, ...] | None = None
    date_format: str | None = None

    def __post_init__(self):
        if not self.name:
            raise SchemaError("attribute name must be nonempty")
        if self.kind == NOMINAL:
            if not self.labels:
                raise SchemaError(f"nominal attribute '{self.name}' needs labels")
            if len(set(self.labels)) != len(self.labels):
                raise SchemaError(f"duplicate labels in nominal attribute '{self.name}'")
        elif self.labels is not None:
            raise SchemaError(f"labels only valid for nominal attributes ('{self.name}')")


@dataclass
class Relation:
    """A parsed tabular dataset: name, ordered attributes, and rows.

    Each row has exactly one cell per attribute; a cell is ``None``
    (missing), a finite ``float`` (numeric), or a ``str`` (nominal,
    string, date).
    """

    name: str
    attributes: list[AttributeSpec]
    rows: list[list[Cell]] = field(default_factory=list)

    def attribute_index(self, name: str) -> int:
        for i, attr in enumerate(self.attributes):
            if attr.name == name:
                return i
        raise KeyError(name)

    def column(self, name: str) -> list[Cell]:
        idx = self.attribute_index(name)
        return [row[idx] for row in self.rows]

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def validate(self) -> None:
        """Check all relation invariants, raising SchemaError on violation."""
        seen = set()
        for attr in self.attributes:
            low = attr.name.lower()
            if low in seen:
                raise SchemaError(f"duplicate attribute name '{attr.name}'")
            seen.add(low)
        for i, row in enumerate(self.rows):
            if len(row) != len(self.attributes):
                raise SchemaError(
                    f"row {i} has {len(row)} cells, expected {len(self.attributes)}"
                )
            for attr, cell in zip(self.attributes, row):
                if cell is None:
                    continue
                if attr.kind == NUMERIC:
                    if not isinstance(cell, float) or cell != cell or cell in (float("inf"), float("-inf")):
                        raise SchemaError(f"non-finite or non-numeric cell in '{attr.name}'")
                elif attr.kind == NOMINAL:
                    if cell not in attr.labels:
                        raise SchemaError(f"label '{cell}' not declared for '{attr.name}'")
                elif not isinstance(cell, str):
                    raise SchemaError(f"cell for '{attr.name}' must be text")


def _decode_source(source) -> str:
    if isinstance(source, str):
        return source
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    elif hasattr(source, "read"):
        data = source.read()
        if isinstance(data, str):
            return data
    else:
        raise TypeError(f"cannot parse ARFF from {type(source).__name__}")
    try:
        return data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise ArffSyntaxError(0, f"input is not valid UTF-8: {exc}") from None


def _split_fields(text: str, lineno: int) -> list[tuple[str, bool]]:
    """Split a comma-separated line into (value, was_quoted) fields.

    Values may be wrapped in single or double quotes; inside quotes a
    backslash escapes the next character (\\n, \\t, \\r decode to control
    characters).
    """
    fields: list[tuple[str, bool]] = []
    buf: list[str] = []
    quoted = False
    i = 0
    n = len(text)
    while True:
        # skip leading whitespace of the field
        while i < n and text[i] in " \t":
            i += 1
        buf.clear()
        quoted = False
        if i < n and text[i] in "'\"":
            quote = text[i]
            quoted = True
            i += 1
            while True:
                if i >= n:
                    raise ArffSyntaxError(lineno, "unterminated quoted value")
                ch = text[i]
                if ch == "\\":
                    if i + 1 >= n:
                        raise ArffSyntaxError(lineno, "dangling escape at end of line")
                    nxt = text[i + 1]
                    buf.append({"n": "\n", "t": "\t", "r": "\r"}.get(nxt, nxt))
                    i += 2
                elif ch == quote:
                    i += 1
                    break
                else:
                    buf.append(ch)
                    i += 1
            # only whitespace may follow a closing quote
            while i < n and text[i] in " \t":
                i += 1
            if i < n and text[i] != ",":
                raise ArffSyntaxError(lineno, "unexpected text after closing quote")
        else:
            while i < n and text[i] != ",":
                buf.append(text[i])
                i += 1
        value = "".join(buf) if quoted else "".join(buf).strip()
        fields.append((value, quoted))
        if i >= n:
            return fields
        i += 1  # consume the comma


def _parse_numeric(token: str, lineno: int, attr_name: str) -> float:
    if not _NUMERIC_RE.match(token):
        raise ArffSyntaxError(lineno, f"invalid numeric value '{token}' for attribute '{attr_name}'")
    value = float(token)
    if value != value or value in (float("inf"), float("-inf")):
        raise ArffSyntaxError(lineno, f"non-finite numeric value for attribute '{attr_name}'")
    return value


def _parse_attribute_decl(rest: str, lineno: int) -> AttributeSpec:
    rest = rest.strip()
    if not rest:
        raise ArffSyntaxError(lineno, "@attribute needs a name and a type")
    # attribute name, optionally quoted
    if rest[0] in "'\"":
        quote = rest[0]
        j = 1
        buf = []
        while j < len(rest):
            if rest[j] == "\\" and j + 1 < len(rest):
                nxt = rest[j + 1]
                buf.append({"n": "\n", "t": "\t", "r": "\r"}.get(nxt, nxt))
                j += 2
            elif rest[j] == quote:
                j += 1
                break
            else:
                buf.append(rest[j])
                j += 1
        else:
            raise ArffSyntaxError(lineno, "unterminated quoted attribute name")
        name = "".join(buf)
        type_part = rest[j:].strip()
    else:
        parts = rest.split(None, 1)
        if len(parts) < 2:
            raise ArffSyntaxError(lineno, "@attribute is missing its type")
        name, type_part = parts[0], parts[1].strip()
    if not name:
        raise ArffSyntaxError(lineno, "attribute name is empty")
    if not type_part:
        raise ArffSyntaxError(lineno, "@attribute is missing its type")

    if type_part.startswith("{"):
        if not type_part.endswith("}"):
            raise ArffSyntaxError(lineno, "unterminated nominal label list")
        inner = type_part[1:-1]
        labels = [v for v, _ in _split_fields(inner, lineno)]
        if labels == [""]:
            raise ArffSyntaxError(lineno, "nominal attribute needs at least one label")
        if len(set(labels)) != len(labels):
            raise SchemaError(f"duplicate labels in nominal attribute '{name}'", lineno)
        return AttributeSpec(name, NOMINAL, labels=tuple(labels))

    lowered = type_part.lower()
    if lowered in ("numeric", "real", "integer"):
        return AttributeSpec(name, NUMERIC)
    if lowered == "string":
        return AttributeSpec(name, STRING)
    if lowered == "date" or lowered.startswith("date "):
        fmt = type_part[4:].strip() or None
        if fmt and fmt[0] in "'\"" and len(fmt) >= 2 and fmt[-1] == fmt[0]:
            fmt = fmt[1:-1]
        return AttributeSpec(name, DATE, date_format=fmt)
    raise ArffSyntaxError(lineno, f"unknown attribute type '{type_part}'")


def parse_arff(source, max_bytes: int = DEFAULT_MAX_BYTES) -> Relation:
    """Parse ARFF text into a Relation.

    Accepts bytes, text, or a file-like object.  Keywords are matched
    case-insensitively, ``%`` lines are comments, unquoted ``?`` is the
    missing marker, and nominal cells must match a declared label exactly
    (case-sensitive).

    Raises ArffSyntaxError (with the offending line number), SchemaError,
    EmptyDataError, or FileTooLargeError.
    """
    if isinstance(source, (bytes, bytearray)) and len(source) > max_bytes:
        raise FileTooLargeError(f"input exceeds {max_bytes} bytes")
    text = _decode_source(source)
    if len(text.encode("utf-8", errors="ignore")) > max_bytes:
        raise FileTooLargeError(f"input exceeds {max_bytes} bytes")

    relation_name: str | None = None
    attributes: list[AttributeSpec] = []
    seen_names: set[str] = set()
    rows: list[list[Cell]] = []
    in_data = False

    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue

        if not in_data:
            lowered = line.lower()
            if lowered.startswith("@relation"):
                if relation_name is not None:
                    raise ArffSyntaxError(lineno, "duplicate @relation")
                rest = line[len("@relation"):].strip()
                if not rest:
                    raise ArffSyntaxError(lineno, "@relation needs a name")
                fields = _split_fields(rest, lineno)
                relation_name = fields[0][0]
                continue
            if lowered.startswith("@attribute"):
                if relation_name is None:
                    raise ArffSyntaxError(lineno, "@attribute before @relation")
                attr = _parse_attribute_decl(line[len("@attribute"):], lineno)
                if attr.name.lower() in seen_names:
                    raise SchemaError(f"duplicate attribute name '{attr.name}'", lineno)
                seen_names.add(attr.name.lower())
                attributes.append(attr)
                continue
            if lowered.rstrip() == "@data" or lowered.startswith("@data "):
                if relation_name is None:
                    raise ArffSyntaxError(lineno, "@data before @relation")
                if not attributes:
                    raise ArffSyntaxError(lineno, "@data before any @attribute")
                in_data = True
                continue
            if line.startswith("@"):
                raise ArffSyntaxError(lineno, f"unknown directive '{line.split()[0]}'")
            raise ArffSyntaxError(lineno, "expected @relation, @attribute, or @data")

        # data section
        if line.startswith("{"):
            raise ArffSyntaxError(lineno, "sparse ARFF rows are not supported")
        fields = _split_fields(line, lineno)
        if len(fields) != len(attributes):
            raise SchemaError(
                f"row has {len(fields)} cells, expected {len(attributes)}", lineno
            )
        row: list[Cell] = []
        for (token, quoted), attr in zip(fields, attributes):
            if not quoted and token == "?":
                row.append(None)
            elif attr.kind == NUMERIC:
                row.append(_parse_numeric(token, lineno, attr.name))
            elif attr.kind == NOMINAL:
                if token not in attr.labels:
                    raise SchemaError(
                        f"value '{token}' not among declared labels of '{attr.name}'", lineno
                    )
                row.append(token)
            elif attr.kind == DATE:
                if attr.date_format is not None and len(token) != len(attr.date_format):
                    raise SchemaError(
                        f"date value '{token}' does not match pattern length of '{attr.name}'",
                        lineno,
                    )
                row.append(token)
            else:
                row.append(token)
        rows.append(row)

    if relation_name is None:
        raise ArffSyntaxError(0, "missing @relation")
    if not in_data:
        raise ArffSyntaxError(0, "missing @data section")
    if not rows:
        raise EmptyDataError("@data section has zero rows")
    return Relation(relation_name, attributes, rows)


def format_numeric(value: float) -> str:
    """Canonical text form of a numeric cell (integers without a dot)."""
    if float(value).is_integer() and abs(value) < 2**53:
        return str(int(value))
    return repr(float(value))


def _quote(value: str) -> str:
    if value and value != "?" and not (_NEEDS_QUOTE & set(value)):
        return value
    escaped = (
        value.replace("\\", "\\\\")
        .replace("'", "\\'")
        .replace("\n", "\\n")
        .replace("\t", "\\t")
        .replace("\r", "\\r")
    )
    return f"'{escaped}'"


def _format_cell(cell: Cell, attr: AttributeSpec) -> str:
    if cell is None:
        return "?"
    if attr.kind == NUMERIC:
        return format_numeric(cell)
    return _quote(str(cell))


def write_arff(relation: Relation) -> bytes:
    """Serialize a Relation to canonical ARFF bytes.

    The output is byte-stable: lowercase keywords, attributes and rows in
    order, no cosmetic whitespace.
    """
    out = io.StringIO()
    out.write(f"@relation {_quote(relation.name)}\n")
    for attr in relation.attributes:
        if attr.kind == NOMINAL:
            labels = ",".join(_quote(label) for label in attr.labels)
            out.write(f"@attribute {_quote(attr.name)} {{{labels}}}\n")
        elif attr.kind == DATE and attr.date_format:
            out.write(f"@attribute {_quote(attr.name)} date {_quote(attr.date_format)}\n")
        else:
            out.write(f"@attribute {_quote(attr.name)} {attr.kind}\n")
    out.write("@data\n")
    for row in relation.rows:
        out.write(",".join(_format_cell(c, a) for c, a in zip(row, relation.attributes)))
        out.write("\n")
    return out.getvalue().encode("utf-8")


SUPERVISED_CLASSIFICATION = "supervised_classification"
SUPERVISED_REGRESSION = "supervised_regression"


def validate_for_task(relation: Relation, target: str, task_type: str) -> list[str]:
    """Check that ``target`` suits ``task_type``; returns human-readable findings.

    An empty list means the target exists and has the right kind (nominal
    for classification, numeric for regression).  Never raises and never
    mutates the relation.
    """
    findings: list[str] = []
    try:
        idx = relation.attribute_index(target)
    except KeyError:
        return [f"no attribute named '{target}'"]
    kind = relation.attributes[idx].kind
    if task_type == SUPERVISED_CLASSIFICATION and kind != NOMINAL:
        findings.append(
            f"target '{target}' must be nominal for classification (found {kind})"
        )
    elif task_type == SUPERVISED_REGRESSION and kind != NUMERIC:
        findings.append(
            f"target '{target}' must be numeric for regression (found {kind})"
        )
    elif task_type not in (SUPERVISED_CLASSIFICATION, SUPERVISED_REGRESSION):
        findings.append(f"unknown task type '{task_type}'")
    return findings
