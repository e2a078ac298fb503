"""CSV input/output and the bundled benchmark data.

Data CSV: one sample per row, numeric feature columns. With a header row, a
column named ``id`` or ``name`` supplies sample ids and a final column named
``label`` supplies ground-truth classes.

Constraint CSV: header ``p,q,s``, 0-based sample indices, ``s`` in [-1, 1] without 0.
"""

from __future__ import annotations

import csv
import os
from importlib import resources
from pathlib import Path

import numpy as np

from .core import ConstraintSet, Dataset, FdcError

ID_COLUMNS = ("id", "name")
SOYBEAN_FILE = "soybean-small.data"


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def read_data_csv(path) -> tuple[Dataset, np.ndarray | None]:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"data file not found: {path}")
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise FdcError(f"{path} is empty", "data")
    header = None
    if not all(_is_number(c) for c in rows[0]):
        header, rows = [h.strip() for h in rows[0]], rows[1:]
    ids, labels = None, None
    cols = list(range(len(rows[0])))
    if header is not None:
        if header[-1].lower() == "label":
            labels = np.array([r[-1].strip() for r in rows])
            cols = cols[:-1]
        if header[0].lower() in ID_COLUMNS:
            ids = tuple(r[0].strip() for r in rows)
            cols = cols[1:]
    try:
        X = np.array([[float(r[c]) for c in cols] for r in rows])
    except (ValueError, IndexError) as exc:
        raise FdcError(f"{path}: non-numeric or missing feature value ({exc})", "data") from exc
    if labels is not None and all(_is_number(v) for v in labels):
        labels = np.array([float(v) for v in labels])
        if np.all(labels == np.round(labels)):
            labels = labels.astype(int)
    return Dataset(X, ids or ()), labels


def read_constraints_csv(path) -> ConstraintSet:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"constraint file not found: {path}")
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["p", "q", "s"]:
            raise FdcError(f"{path}: expected header p,q,s", "constraints")
        return ConstraintSet.from_triples((int(r["p"]), int(r["q"]), float(r["s"])) for r in reader)


def write_constraints_csv(path, cons: ConstraintSet) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["p", "q", "s"])
        for c in cons:
            w.writerow([c.p, c.q, repr(c.s)])


def write_memberships_csv(path, u) -> None:
    u = np.asarray(u)
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"u{j}" for j in range(u.shape[1])])
        for row in u:
            w.writerow([repr(float(v)) for v in row])


def read_matrix_csv(path) -> np.ndarray:
    """Numeric matrix, header optional. A single column is returned 1-D (labels)."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"file not found: {path}")
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if rows and not all(_is_number(c) for c in rows[0]):
        rows = rows[1:]
    if rows and len(rows[0]) == 1:
        col = [r[0].strip() for r in rows]
        return np.array([float(v) for v in col]) if all(_is_number(v) for v in col) else np.array(col)
    return np.array([[float(v) for v in r] for r in rows])


def encode_labels(labels) -> np.ndarray:
    _, codes = np.unique(np.asarray(labels), return_inverse=True)
    return codes


def load_zoo() -> tuple[Dataset, np.ndarray]:
    """UCI Zoo: 101 animals, 16 attributes, 7 classes."""
    with resources.as_file(resources.files("fdc") / "data" / "zoo.csv") as p:
        data, labels = read_data_csv(p)
    return data, encode_labels(labels)


def _soybean_candidates():
    env = os.environ.get("FDC_DATA_DIR")
    if env:
        yield Path(env) / SOYBEAN_FILE
    yield Path(str(resources.files("fdc") / "data" / SOYBEAN_FILE))
    yield Path.cwd() / "data" / SOYBEAN_FILE


def load_soybean() -> tuple[Dataset, np.ndarray]:
    """UCI Soybean (small): 47 samples, 35 attributes, classes D1..D4.

    Reads the original comma-separated ``soybean-small.data`` (class in the last
    field) from ``$FDC_DATA_DIR``, the package data directory or ``./data``.
    """
    for path in _soybean_candidates():
        if path.is_file():
            rows = [r for r in csv.reader(path.open()) if r]
            X = np.array([[float(v) for v in r[:-1]] for r in rows])
            return Dataset(X), encode_labels([r[-1].strip() for r in rows])
    raise FileNotFoundError(
        f"{SOYBEAN_FILE} not found; download it from the UCI repository "
        "(soybean/soybean-small.data) and set FDC_DATA_DIR to its directory"
    )
