"""Sweep records, regression fits and CSV / JSON manifest output."""

from __future__ import annotations

import csv
import io
import json
import math
import platform
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .. import __version__

__all__ = [
    "SweepRecord",
    "FitResult",
    "fit_line",
    "fit_loglog",
    "fit_semilog2",
    "format_real",
    "records_to_csv",
    "write_csv",
    "write_manifest",
]


@dataclass(frozen=True)
class SweepRecord:
    """One row of an experiment: parameters, measured values and provenance."""

    experiment: str
    params: dict
    measured: dict
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("params", "measured"):
            if not getattr(self, name):
                raise ValueError(f"SweepRecord.{name} must not be empty")
        prov = {"tool_version": __version__}
        prov.update(self.provenance)
        object.__setattr__(self, "provenance", prov)

    def columns(self):
        return (
            ["experiment"]
            + list(self.params)
            + list(self.measured)
            + [f"prov_{k}" for k in self.provenance]
        )

    def row(self):
        vals = [self.experiment]
        vals += [format_real(v) for v in self.params.values()]
        vals += [format_real(v) for v in self.measured.values()]
        vals += [format_real(v) for v in self.provenance.values()]
        return vals


class FitResult(NamedTuple):
    """Least-squares line ``y = slope x + intercept`` on transformed data."""

    slope: float
    intercept: float
    residual: float
    n: int

    def as_dict(self, prefix=""):
        return {f"{prefix}{k}": float(v) if k != "n" else int(v) for k, v in self._asdict().items()}


def fit_line(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two points to fit a line")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("fit inputs must be finite")
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    res = y - (slope * x + intercept)
    return FitResult(float(slope), float(intercept), float(np.sqrt(np.mean(res**2))), int(x.size))


def fit_loglog(param, measure):
    """Slope of ``log(measure)`` against ``log(param)``."""
    return fit_line(np.log(param), np.log(measure))


def fit_semilog2(j, measure):
    """Slope of ``log2(measure)`` against ``j``."""
    return fit_line(j, np.log2(measure))


def format_real(v):
    """Reals with 17 significant digits; everything else via ``str``."""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v) or math.isinf(v):
            return str(v)
        return f"{v:.17g}"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (tuple, list)):
        return " ".join(format_real(x) for x in v)
    return str(v)


def records_to_csv(records):
    if not records:
        raise ValueError("no records to write")
    cols = records[0].columns()
    for r in records:
        if r.columns() != cols:
            raise ValueError("records of one sweep must share the schema")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def write_csv(records, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(records_to_csv(records), encoding="utf-8")
    return path


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, Path):
        return str(v)
    return v


def write_manifest(path, experiment, args, seed=None, resolution=None, oversample=None, extra=None):
    """JSON manifest stored beside the CSV of a run."""
    manifest = {
        "experiment": experiment,
        "args": _jsonable(args),
        "seed": seed,
        "resolution": _jsonable(resolution),
        "oversample": oversample,
        "tool_version": __version__,
        "versions": {"python": platform.python_version(), "numpy": np.__version__},
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    if extra:
        manifest["results"] = _jsonable(extra)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=False) + "\n", encoding="utf-8")
    return path
