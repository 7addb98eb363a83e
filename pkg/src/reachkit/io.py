"""CSV point clouds and JSON documents, written atomically with reproducible number formatting."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any

import numpy as np

from .cloud import PointCloud, StratumLabel
from .errors import ReachkitError

LABEL_COLUMNS = ("k", "full_span")


def fmt(x: float) -> str:
    """Shortest decimal that round-trips; infinities as ``inf``/``-inf``."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0.0:
        return "0.0"  # folds -0.0 so output does not depend on the sign of zero
    return repr(x)


def atomic_write(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cloud_to_csv(cloud: PointCloud) -> str:
    d = cloud.ambient_dim
    header = [f"x{i + 1}" for i in range(d)]
    if cloud.labels is not None:
        header += list(LABEL_COLUMNS)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for i, row in enumerate(cloud.points):
        cells = [fmt(v) for v in row]
        if cloud.labels is not None:
            lab = cloud.labels[i]
            cells += [str(lab.k), "true" if lab.full_span else "false"]
        w.writerow(cells)
    return buf.getvalue()


def write_cloud(cloud: PointCloud, path: str | os.PathLike) -> None:
    atomic_write(path, cloud_to_csv(cloud))


def parse_cloud(text: str, source: str = "<csv>") -> PointCloud:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ReachkitError(f"{source}: empty file, expected a header x1,...,xd")
    header = [h.strip() for h in rows[0]]
    labelled = tuple(header[-2:]) == LABEL_COLUMNS
    coords = header[:-2] if labelled else header
    expected = [f"x{i + 1}" for i in range(len(coords))]
    if not coords or coords != expected:
        raise ReachkitError(f"{source}: line 1: header must be {','.join(expected or ['x1'])}, got {','.join(header)}")
    d = len(coords)
    pts = np.empty((len(rows) - 1, d))
    labels = []
    for n, row in enumerate(rows[1:]):
        line = n + 2
        if len(row) != len(header):
            raise ReachkitError(f"{source}: line {line}: expected {len(header)} fields, got {len(row)}")
        for j in range(d):
            try:
                pts[n, j] = float(row[j])
            except ValueError:
                raise ReachkitError(f"{source}: line {line}: field {header[j]} is not a number: {row[j]!r}") from None
            if not math.isfinite(pts[n, j]):
                raise ReachkitError(f"{source}: line {line}: field {header[j]} is not finite")
        if labelled:
            try:
                k = int(row[d])
            except ValueError:
                raise ReachkitError(f"{source}: line {line}: field k is not an integer: {row[d]!r}") from None
            span = row[d + 1].strip().lower()
            if span not in ("true", "false"):
                raise ReachkitError(f"{source}: line {line}: field full_span must be true or false")
            try:
                labels.append(StratumLabel(k, span == "true"))
            except ReachkitError as exc:
                raise ReachkitError(f"{source}: line {line}: {exc}") from None
    return PointCloud(pts, tuple(labels) if labelled else None)


def cloud_to_dict(cloud: PointCloud) -> dict:
    out: dict[str, Any] = {"dim": cloud.ambient_dim, "points": cloud.points.tolist()}
    if cloud.labels is not None:
        out["labels"] = [{"k": lab.k, "full_span": lab.full_span} for lab in cloud.labels]
    return out


def cloud_from_dict(data: Any, source: str = "<json>") -> PointCloud:
    try:
        d = int(data["dim"])
        pts = np.array(data["points"], dtype=float).reshape(-1, d)
        labels = data.get("labels")
        if labels is not None:
            labels = tuple(StratumLabel(int(lab["k"]), bool(lab["full_span"])) for lab in labels)
    except (KeyError, TypeError, ValueError) as exc:
        raise ReachkitError(f"{source}: malformed cloud: {exc}") from None
    return PointCloud(pts, labels)


def read_cloud(path: str | os.PathLike) -> PointCloud:
    """Read a CSV cloud, or the JSON form when the name ends in ``.json``."""
    if str(path).endswith(".json"):
        return cloud_from_dict(read_json(path), str(path))
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ReachkitError(f"cannot read {path}: {exc.strerror}") from None
    return parse_cloud(text, str(path))


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x):
            return fmt(x)
        if math.isnan(x):
            return "nan"
        return 0.0 if x == 0.0 else x
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n"


def write_json(obj: Any, path: str | os.PathLike) -> None:
    atomic_write(path, dumps(obj))


def read_json(path: str | os.PathLike) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ReachkitError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ReachkitError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None

