"""Text file formats: instance files, training-data CSV and benchmark record CSV."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .core import Instance, ValidationError

FORMAT_VERSION = 1
INSTANCE_MAGIC = "# tardysched instance"
JOB_HEADER = "id,w,p,d,dd"
HEADER_KEYS = ("format_version", "family", "seed", "n")


def _fixed(x: float) -> str:
    return f"{x:.6f}"


def dump_instance(instance: Instance) -> str:
    meta = instance.meta
    lines = [
        INSTANCE_MAGIC,
        f"format_version={FORMAT_VERSION}",
        f"family={meta.get('family', '')}",
        f"seed={meta.get('seed', '')}",
        f"n={instance.n}",
    ]
    for key in sorted(k for k in meta if k not in HEADER_KEYS):
        lines.append(f"{key}={meta[key]}")
    lines.append(JOB_HEADER)
    cols = (instance.weights, instance.durations, instance.due_dates, instance.deadlines)
    for j, row in enumerate(zip(*cols)):
        lines.append(",".join([str(j), *map(_fixed, row)]))
    return "\n".join(lines) + "\n"


def _meta_value(text: str):
    try:
        return int(text)
    except ValueError:
        return text


def parse_instance(text: str) -> Instance:
    """Inverse of ``dump_instance``; any malformed line or broken invariant raises ValidationError."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or lines[0] != INSTANCE_MAGIC:
        raise ValidationError("not an instance file (missing header line)")
    meta: dict = {}
    pos = 1
    while pos < len(lines) and lines[pos] != JOB_HEADER:
        key, sep, value = lines[pos].partition("=")
        if not sep:
            raise ValidationError(f"line {pos + 1}: expected key=value, got {lines[pos]!r}")
        meta[key.strip()] = _meta_value(value.strip())
        pos += 1
    if pos == len(lines):
        raise ValidationError(f"missing job header {JOB_HEADER!r}")
    for key in HEADER_KEYS:
        if key not in meta:
            raise ValidationError(f"header lacks {key}")
    if meta["format_version"] != FORMAT_VERSION:
        raise ValidationError(f"unsupported format version {meta['format_version']}")
    n = meta.pop("n")
    meta.pop("format_version")
    rows = []
    for k, line in enumerate(lines[pos + 1:]):
        parts = line.split(",")
        if len(parts) != 5:
            raise ValidationError(f"job line {k}: expected 5 fields, got {line!r}")
        try:
            jid = int(parts[0])
            vals = [float(x) for x in parts[1:]]
        except ValueError as exc:
            raise ValidationError(f"job line {k}: {exc}") from None
        if jid != k:
            raise ValidationError(f"job line {k} carries id {jid}")
        rows.append(vals)
    if not isinstance(n, int) or len(rows) != n:
        raise ValidationError(f"header says n={n} but file has {len(rows)} jobs")
    arr = np.array(rows, dtype=np.float64).reshape(n, 4)
    return Instance(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3], meta=meta)


def save_instance(instance: Instance, path) -> None:
    Path(path).write_text(dump_instance(instance))


def load_instance(path) -> Instance:
    return parse_instance(Path(path).read_text())


def instance_filename(instance: Instance) -> str:
    m = instance.meta
    return f"f{m.get('family', 'x')}_n{instance.n}_s{m.get('seed', 'x')}.txt"


# --------------------------------------------------------------------------
# training data


def save_training_data(path, names, X: np.ndarray, y: np.ndarray) -> None:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y).astype(np.int64)
    if X.shape != (len(y), len(names)):
        raise ValidationError(f"{X.shape} rows do not match {len(names)} names and {len(y)} labels")
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow([*names, "label"])
        for row, label in zip(X.tolist(), y.tolist()):
            out.writerow([*map(repr, row), label])


def load_training_data(path) -> tuple[list[str], np.ndarray, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][-1:] != ["label"]:
        raise ValidationError("training file needs a header ending in 'label'")
    names = rows[0][:-1]
    body = rows[1:]
    if any(len(r) != len(names) + 1 for r in body):
        raise ValidationError("ragged training file")
    try:
        X = np.array([[float(v) for v in r[:-1]] for r in body], dtype=np.float64).reshape(len(body), len(names))
        y = np.array([int(r[-1]) for r in body], dtype=np.int64)
    except ValueError as exc:
        raise ValidationError(f"bad value in training file: {exc}") from None
    if not np.isin(y, (0, 1)).all():
        raise ValidationError("labels must be 0 or 1")
    return names, X, y


# --------------------------------------------------------------------------
# benchmark records


@dataclass(frozen=True)
class BenchRecord:
    """One method on one instance. ``status`` is the proof status of ``f_star``;
    gap and optimal are only meaningful when it is "optimal"."""

    family: int
    n: int
    seed: int
    method: str
    status: str
    objective: float
    f_star: float
    gap: float
    optimal: bool
    runtime: float

    def __eq__(self, other):
        if not isinstance(other, BenchRecord):
            return NotImplemented
        for f in fields(self):
            a, b = getattr(self, f.name), getattr(other, f.name)
            if isinstance(a, float) and isinstance(b, float) and math.isnan(a) and math.isnan(b):
                continue
            if a != b:
                return False
        return True

    __hash__ = None  # type: ignore[assignment]


RECORD_FIELDS = tuple(f.name for f in fields(BenchRecord))
_CASTS = {"family": int, "n": int, "seed": int, "method": str, "status": str,
          "objective": float, "f_star": float, "gap": float,
          "optimal": lambda s: {"True": True, "False": False}[s], "runtime": float}


def save_records(path, records) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(RECORD_FIELDS)
        for r in records:
            out.writerow([repr(float(v)) if isinstance(v, float) else str(v)
                          for v in (getattr(r, k) for k in RECORD_FIELDS)])


def load_records(path) -> list[BenchRecord]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != RECORD_FIELDS:
            raise ValidationError(f"record file header must be {','.join(RECORD_FIELDS)}")
        try:
            return [BenchRecord(**{k: _CASTS[k](row[k]) for k in RECORD_FIELDS}) for row in reader]
        except (KeyError, ValueError) as exc:
            raise ValidationError(f"bad record line: {exc}") from None
