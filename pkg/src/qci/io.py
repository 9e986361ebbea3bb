"""File formats: run-record CSV input, JSON/CSV reports, study tables and configs.

Floats are written with 17 significant digits so every value round-trips
exactly.  CSV files are UTF-8 with a header row, CRLF line endings and
minimal RFC 4180 quoting.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from .errors import ConfigError, InputFileError
from .sample import Sample, make_sample
from .study import BiasResult, StudyConfig, StudyResult

__all__ = [
    "format_float",
    "dumps_json",
    "read_run_records",
    "load_study_config",
    "report_rows",
    "coverage_rows",
    "length_rows",
    "bias_rows",
    "csv_text",
    "write_text",
    "REPORT_COLUMNS",
    "COVERAGE_COLUMNS",
    "LENGTH_COLUMNS",
    "BIAS_COLUMNS",
]


def format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    text = "%.17g" % x
    # keep a decimal point or exponent so the value reads back as a float
    if not any(c in text for c in ".en"):
        text += ".0"
    return text


def _json_fragments(obj, indent: int, level: int):
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        yield json.dumps(obj)
    elif isinstance(obj, int):
        yield str(int(obj))
    elif isinstance(obj, float):
        yield format_float(obj) if math.isfinite(obj) else "null"
    elif isinstance(obj, str):
        yield json.dumps(obj, ensure_ascii=False)
    elif isinstance(obj, dict):
        if not obj:
            yield "{}"
            return
        yield "{"
        for i, (key, value) in enumerate(obj.items()):
            yield ("," if i else "") + pad + json.dumps(str(key), ensure_ascii=False) + ": "
            yield from _json_fragments(value, indent, level + 1)
        yield end + "}"
    elif isinstance(obj, (list, tuple)):
        if not obj:
            yield "[]"
            return
        yield "["
        for i, value in enumerate(obj):
            yield ("," if i else "") + pad
            yield from _json_fragments(value, indent, level + 1)
        yield end + "]"
    elif hasattr(obj, "item"):  # numpy scalar
        yield from _json_fragments(obj.item(), indent, level)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj, indent: int = 2) -> str:
    """JSON text with 17-significant-digit floats and non-finite values as ``null``."""
    return "".join(_json_fragments(obj, indent, 0)) + "\n"


# ------------------------------------------------------------------ input

def read_run_records(path: str | Path, column: str) -> Sample:
    """Load one numeric column of a CSV file with a header row.

    Other columns are ignored.  Error messages give the 1-based file line
    and the column name.
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise InputFileError(f"{path}: cannot read file ({exc.strerror})") from None
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise InputFileError(f"{path}: not valid UTF-8 (byte offset {exc.start})") from None
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise InputFileError(f"{path}: file is empty, expected a header row") from None
    except csv.Error as exc:
        raise InputFileError(f"{path}: line 1: {exc}") from None
    names = [h.strip() for h in header]
    if column not in names:
        raise InputFileError(f"{path}: no column {column!r}; available columns: {', '.join(names)}")
    col = names.index(column)
    values = []
    try:
        for row in reader:
            line = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if col >= len(row):
                raise InputFileError(f"{path}: line {line}, column {column!r}: missing value")
            cell = row[col].strip()
            try:
                value = float(cell)
            except ValueError:
                raise InputFileError(
                    f"{path}: line {line}, column {column!r}: cannot parse {cell!r} as a number"
                ) from None
            if not math.isfinite(value):
                raise InputFileError(f"{path}: line {line}, column {column!r}: non-finite value {cell!r}")
            values.append(value)
    except csv.Error as exc:
        raise InputFileError(f"{path}: line {reader.line_num}: {exc}") from None
    if not values:
        raise InputFileError(f"{path}: no data rows")
    return make_sample(values)


def load_study_config(path: str | Path) -> StudyConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read file ({exc.strerror})") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return StudyConfig.from_dict(data)


# ----------------------------------------------------------------- tables

REPORT_COLUMNS = (
    "quantile_level", "confidence_level", "kind", "name", "value", "lower", "upper",
    "achieved_coverage", "clipped", "note", "error",
)
COVERAGE_COLUMNS = (
    "scenario", "method", "quantile_level", "confidence_level", "n",
    "empirical_confidence_level", "valid_runs", "true_value", "clipped_fraction",
    "skipped_reason", "min_n",
)
LENGTH_COLUMNS = (
    "scenario", "method", "quantile_level", "confidence_level", "n",
    "avg_length_normalized", "avg_length", "min_lower", "max_upper", "valid_runs",
    "skipped_reason", "min_n",
)
BIAS_COLUMNS = (
    "scenario", "estimator", "quantile_level", "n", "relative_modulus_bias",
    "relative_rmse", "mean_estimate", "true_value", "runs", "skipped_reason",
)


def report_rows(report: dict) -> list[dict]:
    """Flatten an analysis report; randomization audit records are dropped."""
    rows = []
    for req in report["requests"]:
        base = {"quantile_level": req["quantile_level"], "confidence_level": req["confidence_level"]}
        for pe in req["point_estimates"]:
            rows.append({**base, "kind": "point", "name": pe["estimator"], "value": pe["value"],
                         "error": pe.get("error", {}).get("message")})
        for ci in req["intervals"]:
            rows.append({
                **base,
                "kind": "interval",
                "name": ci["method"],
                "lower": ci.get("lower"),
                "upper": ci.get("upper"),
                "achieved_coverage": ci.get("achieved_coverage"),
                "clipped": ci.get("clipped"),
                "note": ci.get("note"),
                "error": ci.get("error", {}).get("message"),
            })
    return rows


def coverage_rows(results: list[StudyResult]) -> list[dict]:
    return [r.to_dict() for r in results]


length_rows = coverage_rows


def bias_rows(results: list[BiasResult]) -> list[dict]:
    return [r.to_dict() for r in results]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def csv_text(columns, rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def write_text(path: str | Path, text: str) -> None:
    # newline="" keeps CRLF line endings intact on every platform
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
