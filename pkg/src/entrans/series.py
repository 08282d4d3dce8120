"""Columnar per-step observables and their CSV schemas."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

TIMESERIES_COLUMNS = (
    "t", "lambda0", "lambda1", "schmidt_gap", "s_vn", "s_min", "renyi2",
    "echo_sq", "parity0", "parity1", "m_a", "loschmidt_rate",
)
COMPARISON_COLUMNS = ("t", "s_vn_exact", "s_vn_eff", "gap_exact", "gap_eff", "fidelity")


class SchemaError(ValueError):
    pass


def fmt(x: float) -> str:
    """17 significant digits, so the text round-trips the binary value."""
    return format(float(x), ".16e")


def write_csv(path, columns, rows) -> None:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    Path(path).write_text(buf.getvalue())


def read_csv(path, columns) -> dict:
    """Read a numeric CSV whose header must equal ``columns`` exactly."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if tuple(header) != tuple(columns):
            missing = [c for c in columns if c not in header]
            extra = [c for c in header if c not in columns]
            raise SchemaError(
                f"{path}: header {header} does not match expected {list(columns)}"
                + (f"; missing {missing}" if missing else "")
                + (f"; unexpected {extra}" if extra else "")
                + ("; columns reordered" if not missing and not extra else "")
            )
        data = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(columns):
                raise SchemaError(f"{path}: row {lineno} has {len(row)} fields, expected {len(columns)}")
            try:
                data.append([float(v) for v in row])
            except ValueError as exc:
                raise SchemaError(f"{path}: row {lineno}: {exc}") from None
    arr = np.array(data, dtype=float).reshape(-1, len(columns))
    return {c: arr[:, i] for i, c in enumerate(columns)}


@dataclass
class TimeSeries:
    """One row per recorded time; columns follow ``TIMESERIES_COLUMNS``."""

    t: np.ndarray
    lambda0: np.ndarray
    lambda1: np.ndarray
    schmidt_gap: np.ndarray
    s_vn: np.ndarray
    s_min: np.ndarray
    renyi2: np.ndarray
    echo_sq: np.ndarray
    parity0: np.ndarray
    parity1: np.ndarray
    m_a: np.ndarray
    loschmidt_rate: np.ndarray

    def __len__(self):
        return len(self.t)

    @classmethod
    def from_records(cls, ent_records, whole_records=None) -> "TimeSeries":
        n = len(ent_records)
        cols = {c: np.empty(n) for c in TIMESERIES_COLUMNS}
        for i, r in enumerate(ent_records):
            cols["t"][i] = r.t
            cols["lambda0"][i] = r.lambda0
            cols["lambda1"][i] = r.lambda1
            cols["schmidt_gap"][i] = r.schmidt_gap
            cols["s_vn"][i] = r.s_vn
            cols["s_min"][i] = r.s_min
            cols["renyi2"][i] = r.renyi.get(2, np.nan)
            cols["echo_sq"][i] = r.echo_sq
            cols["parity0"][i] = r.parity0
            cols["parity1"][i] = r.parity1
            cols["m_a"][i] = r.m_a
        if whole_records is None:
            cols["loschmidt_rate"][:] = np.nan
        else:
            if len(whole_records) != n:
                raise ValueError("entanglement and whole-system records are not aligned")
            cols["loschmidt_rate"][:] = [w.loschmidt_rate for w in whole_records]
        return cls(**cols)

    @classmethod
    def from_columns(cls, **cols) -> "TimeSeries":
        n = len(cols["t"])
        full = {c: np.asarray(cols.get(c, np.full(n, np.nan)), dtype=float) for c in TIMESERIES_COLUMNS}
        return cls(**full)

    def rows(self):
        return zip(*(getattr(self, c) for c in TIMESERIES_COLUMNS))

    def to_csv(self, path) -> None:
        write_csv(path, TIMESERIES_COLUMNS, self.rows())

    @classmethod
    def from_csv(cls, path) -> "TimeSeries":
        return cls(**read_csv(path, TIMESERIES_COLUMNS))

    def slice(self, start, stop) -> "TimeSeries":
        return TimeSeries(**{c: getattr(self, c)[start:stop] for c in TIMESERIES_COLUMNS})
