"""Deterministic JSON and CSV serialization with an embedded run configuration."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np

from .surd import QuadraticSurd

SCHEMA = 1
CONFIG_PREFIX = "# config: "


def to_jsonable(obj: Any) -> Any:
    """Convert results to plain JSON types; exact numbers become strings."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj) if f.repr}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return to_jsonable(float(obj))
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, Fraction):
        return fraction_str(obj)
    if isinstance(obj, QuadraticSurd):
        return {"exact": str(obj), "float": float(obj)}
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def fraction_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def dump_json(result: Any, config: dict, version: str) -> str:
    doc = {"schema": SCHEMA, "version": version, "config": config, "result": to_jsonable(result)}
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def dump_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], config: dict, version: str) -> str:
    buf = io.StringIO()
    meta = {"schema": SCHEMA, "version": version, "config": config}
    buf.write(CONFIG_PREFIX + json.dumps(meta, sort_keys=True, ensure_ascii=False) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _csv_cell(v: Any) -> Any:
    if isinstance(v, Fraction):
        return fraction_str(v)
    if isinstance(v, (np.floating, float)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


def read_config(text: str) -> dict:
    """Extract the embedded configuration from a JSON or CSV artifact."""
    if text.startswith(CONFIG_PREFIX):
        return json.loads(text.splitlines()[0][len(CONFIG_PREFIX) :])["config"]
    return json.loads(text)["config"]
