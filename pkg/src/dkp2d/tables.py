"""Fixed CSV/JSON table schemas for everything the CLI emits."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Any, Iterable, Sequence


class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class Schema:
    name: str
    columns: tuple[tuple[str, str], ...]   # (name, type) with type in float/int/str/bool
    sort_by: tuple[str, ...] = ()

    @property
    def names(self) -> list[str]:
        return [c for c, _ in self.columns]


SCHEMAS = {
    s.name: s
    for s in (
        Schema("algebra", (("rep", "int"), ("triples_checked", "int"), ("max_deviation", "float"),
                           ("n_failing", "int"), ("span_rank", "int"), ("identity_in_span", "bool")),
               ("rep",)),
        Schema("levels", (("mass", "float"), ("omega", "float"), ("omega_tilde", "float"),
                          ("l", "int"), ("nr", "int"), ("E", "float"), ("branch", "str"),
                          ("admissible", "bool"), ("residual", "float"),
                          ("alpha2_positive", "bool"), ("kappa2_positive", "bool"),
                          ("not_pm_m", "bool"), ("window_ok", "bool")),
               ("E",)),
        Schema("spectrum", (("axis_value", "float"), ("l", "int"), ("nr", "int"), ("E", "float"),
                            ("branch", "str"), ("admissible", "bool"), ("residual", "float")),
               ("axis_value", "l", "nr", "E")),
        Schema("curves", (("axis_value", "float"), ("l", "int"), ("eps_plus", "float"),
                          ("eps_minus", "float")),
               ("axis_value", "l")),
        Schema("state", (("r", "float"), ("phi", "float"),
                         ("re_phi1", "float"), ("im_phi1", "float"),
                         ("re_phi2", "float"), ("im_phi2", "float"),
                         ("re_phi3", "float"), ("im_phi3", "float"), ("J0", "float")),
               ("r", "phi")),
        Schema("check", (("quantity", "str"), ("value", "float"), ("threshold", "float"),
                         ("passed", "bool"))),
        Schema("bands", (("k1", "float"), ("k2", "float"), ("E1", "float"), ("E2", "float"),
                         ("E3", "float")),
               ("k1", "k2")),
        Schema("polarization", (("ptilde2_over_m2", "float"), ("pi_even", "float"),
                                ("pi_odd", "float")),
               ("ptilde2_over_m2",)),
    )
}


def format_value(value: Any, kind: str) -> str:
    if kind == "float":
        v = float(value)
        if math.isnan(v):
            return "nan"
        return "%.12g" % (v + 0.0)  # + 0.0 folds -0.0
    if kind == "int":
        return str(int(value))
    if kind == "bool":
        return "true" if value else "false"
    return str(value)


def parse_value(text: str, kind: str) -> Any:
    if kind == "float":
        return float(text)
    if kind == "int":
        if text.strip() != str(int(text)):
            raise ValueError(f"not an integer: {text!r}")
        return int(text)
    if kind == "bool":
        if text not in ("true", "false"):
            raise ValueError(f"not a boolean: {text!r}")
        return text == "true"
    return text


def to_csv(schema: Schema, rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(schema.names)
    for row in rows:
        if len(row) != len(schema.columns):
            raise SchemaError(f"{schema.name}: row has {len(row)} fields, expected {len(schema.columns)}")
        writer.writerow(format_value(v, k) for v, (_, k) in zip(row, schema.columns))
    return buf.getvalue()


def to_json(schema: Schema, rows: Iterable[Sequence[Any]], metadata: dict) -> str:
    objs = []
    for row in rows:
        obj = {}
        for v, (name, kind) in zip(row, schema.columns):
            # Round-trip through the CSV formatting so both outputs agree.
            obj[name] = parse_value(format_value(v, kind), kind)
        objs.append(obj)
    doc = {"metadata": dict(metadata, schema=schema.name), "rows": objs}
    return json.dumps(doc, indent=2, allow_nan=True) + "\n"


def _sort_key(schema: Schema, record: dict) -> tuple:
    return tuple(record[c] for c in schema.sort_by)


def read_csv(text: str, schema: Schema | str) -> list[dict]:
    """Parse and validate a CSV emitted for `schema`; raises SchemaError."""
    schema = SCHEMAS[schema] if isinstance(schema, str) else schema
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("empty CSV") from None
    if header != schema.names:
        raise SchemaError(f"{schema.name}: header {header} != {schema.names}")
    records = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != len(schema.columns):
            raise SchemaError(f"line {lineno}: {len(row)} fields, expected {len(schema.columns)}")
        try:
            records.append({name: parse_value(v, kind) for v, (name, kind) in zip(row, schema.columns)})
        except ValueError as exc:
            raise SchemaError(f"line {lineno}: {exc}") from None
    if schema.sort_by:
        keys = [_sort_key(schema, r) for r in records]
        if any(b < a for a, b in zip(keys, keys[1:])):
            raise SchemaError(f"{schema.name}: rows not sorted by {schema.sort_by}")
    return records


def validate_json(text: str, schema: Schema | str) -> list[dict]:
    schema = SCHEMAS[schema] if isinstance(schema, str) else schema
    doc = json.loads(text)
    if set(doc) != {"metadata", "rows"}:
        raise SchemaError("JSON document needs exactly 'metadata' and 'rows'")
    if doc["metadata"].get("schema") != schema.name:
        raise SchemaError("schema name mismatch")
    for rec in doc["rows"]:
        if list(rec) != schema.names:
            raise SchemaError(f"row keys {list(rec)} != {schema.names}")
    if schema.sort_by:
        keys = [_sort_key(schema, r) for r in doc["rows"]]
        if any(b < a for a, b in zip(keys, keys[1:])):
            raise SchemaError(f"{schema.name}: rows not sorted by {schema.sort_by}")
    return doc["rows"]
