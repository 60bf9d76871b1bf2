"""Feature tables, the labeled dataset and its CSV form."""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..errors import DataError, DuplicateKey
from ..history.state import PROCESS_COLUMNS
from ..static import STATIC_COLUMNS

KEY_COLUMNS = ["path", "qualified_name", "start_line", "end_line"]
FEATURE_COLUMNS = STATIC_COLUMNS + PROCESS_COLUMNS
DATASET_KEY_COLUMNS = ["project", "path", "name", "start_line", "end_line"]

RowKey = tuple[str, str, int, int]


@dataclass(frozen=True, order=True)
class SampleKey:
    project: str
    path: str
    name: str
    start_line: int
    end_line: int


def _number(text: str, where: str) -> float:
    try:
        return float(text)
    except (TypeError, ValueError):
        raise DataError(f"{where}: not a number: {text!r}") from None


def _int(text: str, where: str) -> int:
    value = _number(text, where)
    if not value.is_integer():
        raise DataError(f"{where}: not an integer: {text!r}")
    return int(value)


def _reader(text: str, required: Sequence[str], name: str) -> csv.DictReader:
    reader = csv.DictReader(io.StringIO(text))
    missing = [c for c in required if c not in (reader.fieldnames or [])]
    if missing:
        raise DataError(f"{name}: missing columns {missing}")
    return reader


def read_feature_table(text: str, columns: Sequence[str], name: str = "table") -> dict[RowKey, list[float]]:
    """Parse a keyed metrics CSV; every listed column must be present."""
    table: dict[RowKey, list[float]] = {}
    for n, row in enumerate(_reader(text, KEY_COLUMNS + list(columns), name), 2):
        where = f"{name}:{n}"
        key = (row["path"], row["qualified_name"], _int(row["start_line"], where), _int(row["end_line"], where))
        if key in table:
            raise DuplicateKey(f"{where}: duplicate key {key}")
        table[key] = [_number(row[c], f"{where}:{c}") for c in columns]
    return table


def read_label_table(text: str, name: str = "labels") -> tuple[dict[RowKey, int], dict[RowKey, str]]:
    labels: dict[RowKey, int] = {}
    projects: dict[RowKey, str] = {}
    for n, row in enumerate(_reader(text, ["project"] + KEY_COLUMNS + ["label"], name), 2):
        where = f"{name}:{n}"
        key = (row["path"], row["qualified_name"], _int(row["start_line"], where), _int(row["end_line"], where))
        if key in labels:
            raise DuplicateKey(f"{where}: duplicate key {key}")
        y = _int(row["label"], where)
        if y not in (0, 1):
            raise DataError(f"{where}: label must be 0 or 1")
        labels[key] = y
        projects[key] = row["project"]
    return labels, projects


@dataclass
class Dataset:
    keys: list[SampleKey]
    X: np.ndarray
    y: np.ndarray
    columns: list[str] = field(default_factory=lambda: list(FEATURE_COLUMNS))

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float).reshape(len(self.keys), len(self.columns))
        self.y = np.asarray(self.y, dtype=int).reshape(len(self.keys))
        if self.y.size and not np.isin(self.y, (0, 1)).all():
            raise DataError("labels must be 0 or 1")

    def __len__(self) -> int:
        return len(self.keys)

    @property
    def positives(self) -> int:
        return int(self.y.sum())

    @property
    def negatives(self) -> int:
        return len(self) - self.positives

    def subset(self, index: Iterable[int]) -> "Dataset":
        idx = np.asarray(list(index), dtype=int)
        return Dataset([self.keys[i] for i in idx], self.X[idx], self.y[idx], list(self.columns))

    def select(self, columns: Sequence[str]) -> "Dataset":
        """Keep only the named feature columns, in the given order."""
        missing = [c for c in columns if c not in self.columns]
        if missing:
            raise DataError(f"unknown feature columns {missing}")
        pos = [self.columns.index(c) for c in columns]
        return Dataset(list(self.keys), self.X[:, pos], self.y.copy(), list(columns))

    def check_unique(self) -> None:
        dup = [k for k, c in Counter(self.keys).items() if c > 1]
        if dup:
            raise DuplicateKey(f"duplicate sample key {dup[0]}")


@dataclass
class JoinReport:
    joined: int = 0
    static_only: list[RowKey] = field(default_factory=list)
    process_only: list[RowKey] = field(default_factory=list)
    unlabeled: list[RowKey] = field(default_factory=list)

    def lines(self) -> list[str]:
        out = [f"joined {self.joined}"]
        for name in ("static_only", "process_only", "unlabeled"):
            for key in getattr(self, name):
                out.append(f"{name}\t{key[0]}\t{key[1]}\t{key[2]}\t{key[3]}")
        return out


def join(
    static: dict[RowKey, list[float]],
    process: dict[RowKey, list[float]],
    labels: dict[RowKey, int],
    projects: dict[RowKey, str] | str,
    report: JoinReport | None = None,
) -> Dataset:
    """Inner join of the three tables; dropped rows are listed in ``report``."""
    report = report if report is not None else JoinReport()
    keys, rows, ys = [], [], []
    for key in sorted(static):
        if key not in process:
            report.static_only.append(key)
            continue
        if key not in labels:
            report.unlabeled.append(key)
            continue
        project = projects if isinstance(projects, str) else projects[key]
        keys.append(SampleKey(project, *key))
        rows.append(static[key] + process[key])
        ys.append(labels[key])
    report.process_only.extend(k for k in sorted(process) if k not in static)
    report.joined += len(keys)
    X = np.array(rows, dtype=float).reshape(len(keys), len(FEATURE_COLUMNS))
    ds = Dataset(keys, X, np.array(ys, dtype=int))
    ds.check_unique()
    return ds


def concat(parts: Sequence[Dataset]) -> Dataset:
    if not parts:
        return Dataset([], np.zeros((0, len(FEATURE_COLUMNS))), np.zeros(0, dtype=int))
    columns = parts[0].columns
    if any(p.columns != columns for p in parts):
        raise DataError("cannot concatenate datasets with different columns")
    ds = Dataset(
        [k for p in parts for k in p.keys],
        np.vstack([p.X for p in parts]),
        np.concatenate([p.y for p in parts]),
        list(columns),
    )
    ds.check_unique()
    return ds


def format_number(value: float) -> str:
    if math.isfinite(value) and float(value).is_integer():
        return str(int(value))
    return repr(round(float(value), 10))


def dataset_csv(ds: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(DATASET_KEY_COLUMNS + list(ds.columns) + ["label"])
    for key, row, y in zip(ds.keys, ds.X, ds.y):
        writer.writerow(
            [key.project, key.path, key.name, key.start_line, key.end_line]
            + [format_number(v) for v in row]
            + [int(y)]
        )
    return buf.getvalue()


def read_dataset(text: str, name: str = "dataset", columns: Sequence[str] | None = None) -> Dataset:
    """Load a dataset CSV written by ``dataset_csv``."""
    reader = _reader(text, DATASET_KEY_COLUMNS + ["label"], name)
    header = reader.fieldnames or []
    feats = list(columns) if columns is not None else [
        c for c in header if c not in DATASET_KEY_COLUMNS and c != "label"
    ]
    missing = [c for c in feats if c not in header]
    if missing:
        raise DataError(f"{name}: missing feature columns {missing}")
    keys, rows, ys = [], [], []
    for n, row in enumerate(reader, 2):
        where = f"{name}:{n}"
        keys.append(
            SampleKey(row["project"], row["path"], row["name"],
                      _int(row["start_line"], where), _int(row["end_line"], where))
        )
        rows.append([_number(row[c], f"{where}:{c}") for c in feats])
        ys.append(_int(row["label"], where))
    ds = Dataset(keys, np.array(rows, dtype=float).reshape(len(keys), len(feats)), np.array(ys), feats)
    ds.check_unique()
    return ds


POSITIVE_LABELS = ("1", "true", "yes", "pos", "positive", "vulnerable", "vuln")
NEGATIVE_LABELS = ("0", "false", "no", "neg", "negative", "not vulnerable", "clean")


def read_external_dataset(text: str, mapping: dict | None = None, name: str = "external") -> Dataset:
    """Load a third-party dataset CSV through a column mapping.

    ``mapping`` keys: ``columns`` (our feature name -> their header),
    ``features`` (list of our feature names to load, default: every known
    feature present in the file), ``label`` (their label header) and
    ``key`` (our key column -> their header). Absent key columns are filled
    with the row number; absent requested features are an error.
    """
    mapping = dict(mapping or {})
    rename = dict(mapping.get("columns") or {})
    reader = csv.DictReader(io.StringIO(text))
    header = reader.fieldnames or []
    label_col = mapping.get("label")
    if label_col is None:
        for guess in ("label", "Label", "vulnerable", "Vulnerable", "neg/pos", "class"):
            if guess in header:
                label_col = guess
                break
    if label_col not in header:
        raise DataError(f"{name}: no label column found")
    wanted = mapping.get("features")
    if wanted is None:
        wanted = [c for c in FEATURE_COLUMNS if rename.get(c, c) in header]
    missing = [c for c in wanted if rename.get(c, c) not in header]
    if missing:
        raise DataError(f"{name}: missing feature columns {missing}")
    key_map = dict(mapping.get("key") or {})
    keys, rows, ys = [], [], []
    for n, row in enumerate(reader, 2):
        where = f"{name}:{n}"

        def key_field(col: str, default):
            src = key_map.get(col, col)
            return row[src] if src in row and row[src] != "" else default

        keys.append(
            SampleKey(
                str(key_field("project", "")),
                str(key_field("path", "")),
                str(key_field("name", f"row{n}")),
                _int(key_field("start_line", n), where),
                _int(key_field("end_line", n), where),
            )
        )
        rows.append([_number(row[rename.get(c, c)], f"{where}:{c}") for c in wanted])
        raw = str(row[label_col]).strip().lower()
        if raw in POSITIVE_LABELS:
            ys.append(1)
        elif raw in NEGATIVE_LABELS:
            ys.append(0)
        else:
            raise DataError(f"{where}: unrecognized label {row[label_col]!r}")
    if len(set(keys)) != len(keys):
        # third-party files may lack a usable key; fall back to row numbers
        keys = [SampleKey(k.project, k.path, f"{k.name}#{i}", k.start_line, k.end_line) for i, k in enumerate(keys)]
    return Dataset(keys, np.array(rows, dtype=float).reshape(len(keys), len(wanted)), np.array(ys), list(wanted))
