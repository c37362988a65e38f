"""File ingestion and report serialization.

Datasets are two-column CSV (comma or tab, optional header). Reports round
trip losslessly: JSON keeps native types, CSV writes floats with 17
significant digits and a decimal marker so numeric values re-parse exactly.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

from .errors import ParseError, SizeError
from .ranks import Sample, _check_no_ties
from .simulation import StudyReport

import numpy as np


def _parse_float(token: str) -> float:
    return float(token.strip())


def load_sample(path: Union[str, Path], allow_ties: bool = False) -> Sample:
    """Read a two-column numeric file into a Sample.

    The delimiter (comma or tab) is taken from the first nonblank line; that
    line is treated as a header when none of its fields parse as numbers.
    Rows keep file order. Unless `allow_ties` is set, tied values in either
    column are rejected here so the error points at the file, not at a later
    statistic call.
    """
    text = Path(path).read_text()
    xs: list[float] = []
    ys: list[float] = []
    delimiter = None
    saw_data_or_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if delimiter is None:
            delimiter = "\t" if "\t" in line else ","
        fields = [f.strip() for f in line.split(delimiter)]
        if not saw_data_or_header:
            saw_data_or_header = True
            parses = []
            for f in fields:
                try:
                    _parse_float(f)
                    parses.append(True)
                except ValueError:
                    parses.append(False)
            if not any(parses):
                continue  # header row
        if len(fields) != 2:
            raise ParseError(lineno, len(fields) if len(fields) < 2 else 3,
                             f"expected 2 columns, found {len(fields)}")
        row = []
        for col, f in enumerate(fields, start=1):
            if f == "":
                raise ParseError(lineno, col, "missing value")
            try:
                row.append(_parse_float(f))
            except ValueError:
                raise ParseError(lineno, col, f"not a number: {f!r}") from None
        xs.append(row[0])
        ys.append(row[1])
    if len(xs) < 2:
        raise SizeError(f"need at least 2 data rows, found {len(xs)}")
    sample = Sample(np.asarray(xs), np.asarray(ys))
    if not allow_ties:
        for name, arr in (("x", sample.x), ("y", sample.y)):
            _check_no_ties(arr, np.argsort(arr, kind="stable"), name)
    return sample


# ---------------------------------------------------------------------------
# report serialization


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        s = format(value, ".17g")
        if not any(ch in s for ch in ".eE") and s not in ("inf", "-inf", "nan"):
            s += ".0"
        return s
    return str(value)


def _parse_cell(token: str):
    if token == "":
        return None
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        return token


def report_to_json(report: StudyReport) -> str:
    payload = {
        "schema_version": report.schema_version,
        "kind": report.kind,
        "meta": report.meta,
        "rows": report.rows,
    }
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def report_from_json(text: str) -> StudyReport:
    payload = json.loads(text)
    return StudyReport(
        kind=payload["kind"],
        meta=payload["meta"],
        rows=payload["rows"],
        schema_version=payload["schema_version"],
    )


def report_to_csv(report: StudyReport) -> str:
    lines = [f"# schema_version={report.schema_version}", f"# kind={report.kind}"]
    for key, value in report.meta.items():
        lines.append(f"# meta.{key}={_format_cell(value)}")
    if report.rows:
        columns = list(report.rows[0].keys())
        lines.append(",".join(columns))
        for row in report.rows:
            lines.append(",".join(_format_cell(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


def report_from_csv(text: str) -> StudyReport:
    meta: dict = {}
    kind = ""
    schema_version = 1
    columns: list[str] = []
    rows: list[dict] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            key, _, value = body.partition("=")
            key = key.strip()
            if key == "schema_version":
                schema_version = int(value)
            elif key == "kind":
                kind = value
            elif key.startswith("meta."):
                meta[key[5:]] = _parse_cell(value)
            continue
        cells = line.split(",")
        if not columns:
            columns = cells
            continue
        if len(cells) != len(columns):
            raise ParseError(lineno, len(cells), "row width does not match header")
        rows.append({c: _parse_cell(v) for c, v in zip(columns, cells)})
    return StudyReport(kind=kind, meta=meta, rows=rows, schema_version=schema_version)


def write_report(report: StudyReport, path: Union[str, Path], fmt: str = None) -> None:
    """Serialize to `path`; format from `fmt` or the file extension (.csv/.json)."""
    path = Path(path)
    if fmt is None:
        fmt = "csv" if path.suffix.lower() == ".csv" else "json"
    text = report_to_csv(report) if fmt == "csv" else report_to_json(report)
    path.write_text(text)


# ---------------------------------------------------------------------------
# key=value config files


def parse_config_file(path: Union[str, Path]) -> dict:
    """Read a key=value file mirroring CLI flags; '#' starts a comment."""
    out: dict = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParseError(lineno, 1, f"expected key=value, got {line!r}")
        out[key.strip().replace("-", "_")] = value.strip()
    return out
