"""Report serialization: JSON with stable key order and CSV (RFC 4180),
both printing floats with 17 significant digits so every constant
round-trips, and both embedding provenance (config hash, seed, version)."""

from __future__ import annotations

import csv
import hashlib
import io
import json

import numpy as np

from . import __version__
from .errors import IoError


def format_float(x: float) -> str:
    return format(x, ".17g")


def _to_json(value, indent: int) -> str:
    pad = " " * indent
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [
            f'{pad}  {json.dumps(str(k))}: {_to_json(v, indent + 2)}'
            for k, v in sorted(value.items())
        ]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [f"{pad}  {_to_json(v, indent + 2)}" for v in value]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps_report(report: dict) -> str:
    return _to_json(report, 0) + "\n"


def provenance(config_text: str, seed: int) -> dict:
    return {
        "config_sha256": hashlib.sha256(config_text.encode("utf-8")).hexdigest(),
        "seed": seed,
        "version": __version__,
    }


def _cell(value) -> str:
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def report_rows(report: dict) -> tuple[list[str], list[list]]:
    """Tabular view of a report: the 'rows' entry if present, else one row of
    the scalar fields."""
    rows = report.get("rows")
    if rows:
        header = list(rows[0].keys())
        return header, [[r[k] for k in header] for r in rows]
    scalars = {
        k: v for k, v in report.items() if isinstance(v, (int, float, str, bool))
    }
    return list(scalars.keys()), [list(scalars.values())]


def dumps_csv(report: dict) -> str:
    header, rows = report_rows(report)
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    prov = report.get("provenance", {})
    if prov:
        writer.writerow([])
        writer.writerow(["config_sha256", prov["config_sha256"]])
        writer.writerow(["seed", prov["seed"]])
        writer.writerow(["version", prov["version"]])
    return buf.getvalue()


def emit(report: dict, fmt: str, path: str | None) -> str:
    """Serialize and optionally write the report; returns the text either way."""
    if fmt == "json":
        text = dumps_report(report)
    elif fmt == "csv":
        text = dumps_csv(report)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise IoError(f"cannot write {path}: {exc}") from exc
    return text
