"""JSON, JSON-lines and table output.

Floats are written with ``repr`` precision so files round-trip exactly, and
keys are sorted so identical runs give identical bytes.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .eigsolve import Spectrum
from .geom import Box, ConvexPolygon, polygon_new
from .verify import CheckReport, _jsonable


def header(config: dict | None = None) -> dict:
    return {"artifact": "convexspec", "version": __version__, "config": config or {}}


def dumps(obj, config: dict | None = None) -> str:
    payload = dict(header(config))
    payload["data"] = to_jsonable(obj)
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"


def to_jsonable(obj):
    if hasattr(obj, "to_dict"):
        return _jsonable(obj.to_dict())
    return _jsonable(obj)


def write_json(path, obj, config: dict | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj, config))
    return path


def read_json(path) -> dict:
    d = json.loads(Path(path).read_text())
    # files written here wrap the payload; plain files are accepted as-is
    return d["data"] if isinstance(d, dict) and "data" in d and "version" in d else d


def polygon_from(d) -> ConvexPolygon:
    if isinstance(d, dict):
        d = d["vertices"]
    return polygon_new(d)


def domain_from(d) -> ConvexPolygon | Box:
    if isinstance(d, dict) and "box" in d:
        return Box(tuple(d["box"]))
    return polygon_from(d)


def read_domain(path) -> ConvexPolygon | Box:
    return domain_from(read_json(path))


def spectrum_from(d: dict) -> Spectrum:
    res = d.get("residuals")
    return Spectrum(np.array(d["eigenvalues"]), d["bc_mode"], d["index_base"],
                    None if res is None else np.array(res), d.get("domain", {}), d.get("h"))


def write_jsonl(path, reports: Iterable[CheckReport | dict], config: dict | None = None) -> Path:
    """One JSON object per line; the first line is the header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as fh:
        fh.write(json.dumps(header(config), sort_keys=True) + "\n")
        for r in reports:
            fh.write(json.dumps(to_jsonable(r), sort_keys=True) + "\n")
    return path


def read_jsonl(path) -> list[dict]:
    lines = Path(path).read_text().splitlines()
    rows = [json.loads(line) for line in lines if line.strip()]
    return [r for r in rows if "check" in r]


def write_table(path, columns: Sequence[str], rows: Iterable[Sequence], config: dict | None = None) -> Path:
    """CSV at ``path`` plus a whitespace-delimited twin with a ``.dat`` suffix."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = [list(r) for r in rows]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_cell(v) for v in r])
    with path.with_suffix(".dat").open("w") as fh:
        fh.write("# " + json.dumps(header(config), sort_keys=True) + "\n")
        fh.write("# " + " ".join(columns) + "\n")
        for r in rows:
            fh.write(" ".join(_cell(v) for v in r) + "\n")
    return path


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def report_rows(reports: Sequence[CheckReport], instance_ids: Sequence | None = None):
    """(check, instance, lhs, rhs, margin, pass) rows for summary tables."""
    ids = instance_ids if instance_ids is not None else range(len(reports))
    for i, r in zip(ids, reports):
        yield [r.check, i, _scalar(r.lhs), _scalar(r.rhs), r.margin, r.passed]


def _scalar(v):
    if isinstance(v, (list, tuple, np.ndarray)):
        return float(np.min(v)) if len(v) else float("nan")
    return v
