"""Uniformly sampled paths and their CSV / JSON serializations."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Any

import numpy as np

from fracvar.errors import DomainError, FracvarError, LengthError

CSV_HEADER = ("t", "value")


class PathFormatError(FracvarError, ValueError):
    """A path file could not be parsed."""


def fmt17(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True, eq=False)
class Path:
    """Values ``values[j]`` observed at times ``j * delta``.

    ``meta`` carries provenance such as ``h`` and ``seed`` for sampled fBm, or
    ``drift_kind``, ``sigma`` and ``x0`` for simulated SDE paths.
    """

    delta: float
    values: np.ndarray
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise LengthError(f"a path needs at least 2 values, got shape {vals.shape}")
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise DomainError(f"path mesh must be positive, got {self.delta!r}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "delta", float(self.delta))

    def __len__(self) -> int:
        return self.values.size

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.values.size) * self.delta

    def with_delta(self, delta: float) -> "Path":
        """Same values relabelled on a different mesh."""
        return Path(delta, self.values, dict(self.meta))

    def scaled(self, factor: float) -> "Path":
        return Path(self.delta, factor * self.values, dict(self.meta))

    # -- serialization -------------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(CSV_HEADER) + "\n")
        for t, v in zip(self.times, self.values):
            buf.write(f"{fmt17(t)},{fmt17(v)}\n")
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "h": self.meta.get("h"),
            "delta": self.delta,
            "seed": self.meta.get("seed"),
            "values": [float(v) for v in self.values],
        }
        extra = {k: v for k, v in self.meta.items() if k not in ("h", "seed")}
        if extra:
            doc["metadata"] = extra
        return json.dumps(doc, indent=1)

    @classmethod
    def from_csv(cls, text: str) -> "Path":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or tuple(c.strip() for c in rows[0]) != CSV_HEADER:
            raise PathFormatError("row 1: expected header 't,value'")
        ts, vs = [], []
        for lineno, row in enumerate(rows[1:], start=2):
            if not row:
                continue
            if len(row) != 2:
                raise PathFormatError(f"row {lineno}: expected 2 fields, got {len(row)}")
            try:
                t, v = float(row[0]), float(row[1])
            except ValueError:
                raise PathFormatError(f"row {lineno}: non-numeric field in {row!r}") from None
            if not (math.isfinite(t) and math.isfinite(v)):
                raise PathFormatError(f"row {lineno}: non-finite field in {row!r}")
            ts.append(t)
            vs.append(v)
        if len(vs) < 2:
            raise PathFormatError("path file holds fewer than 2 rows")
        t = np.asarray(ts)
        delta = (t[-1] - t[0]) / (t.size - 1)
        if not delta > 0:
            raise PathFormatError("time column must be strictly increasing")
        dev = np.abs(np.diff(t) - delta)
        if np.any(dev > 1e-9 * max(delta, abs(t[-1]))):
            bad = int(np.argmax(dev)) + 3
            raise PathFormatError(f"row {bad}: time grid is not uniform")
        return cls(float(delta), np.asarray(vs))

    @classmethod
    def from_json(cls, text: str) -> "Path":
        try:
            doc = json.loads(text)
            delta = float(doc["delta"])
            values = np.asarray(doc["values"], dtype=float)
        except (ValueError, KeyError, TypeError) as exc:
            raise PathFormatError(f"malformed path JSON: {exc}") from None
        meta = dict(doc.get("metadata") or {})
        for key in ("h", "seed"):
            if doc.get(key) is not None:
                meta[key] = doc[key]
        return cls(delta, values, meta)

    def write(self, dest: str | FsPath, fmt: str | None = None) -> None:
        dest = FsPath(dest)
        fmt = fmt or ("json" if dest.suffix == ".json" else "csv")
        dest.write_text(self.to_json() if fmt == "json" else self.to_csv())

    @classmethod
    def read(cls, src: str | FsPath) -> "Path":
        src = FsPath(src)
        text = src.read_text()
        if src.suffix == ".json" or text.lstrip().startswith("{"):
            return cls.from_json(text)
        return cls.from_csv(text)


def cumulate(increments) -> np.ndarray:
    """Prefix sum with a leading zero: ``(1, 1, 1) -> (0, 1, 2, 3)``."""
    inc = np.asarray(increments, dtype=float)
    if inc.size == 0:
        raise LengthError("cannot cumulate an empty increment sequence")
    if inc.ndim == 1:
        return np.concatenate([[0.0], np.cumsum(inc)])
    zeros = np.zeros(inc.shape[:-1] + (1,))
    return np.concatenate([zeros, np.cumsum(inc, axis=-1)], axis=-1)
