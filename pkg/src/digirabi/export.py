"""Deterministic file output: CSV grids with JSON sidecars, density matrices.

Floats are written with ``repr`` so that reading a file back returns the
exact same values. JSON is written with sorted keys and no timestamps, so
identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__

__all__ = [
    "config_hash",
    "write_grid_csv",
    "read_grid_csv",
    "write_json",
    "write_sidecar",
    "write_density_json",
    "read_density_json",
    "write_wigner_dataset_csv",
    "read_wigner_dataset_csv",
    "jsonable",
]


def jsonable(obj: Any) -> Any:
    """Convert numpy scalars/arrays and non-finite floats to JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        if math.isnan(f):
            return "nan"
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _dumps(obj: Any) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def config_hash(cfg: dict) -> str:
    """SHA-256 of the canonical JSON form of a resolved configuration."""
    return hashlib.sha256(json.dumps(jsonable(cfg), sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def _fmt(x: float) -> str:
    return repr(float(x))


def write_grid_csv(path: str | Path, row_axis: Sequence[float], col_axis: Sequence[float],
                   grid: np.ndarray, row_label: str = "t_us") -> Path:
    """Grid with header ``row_label,<column values>`` and one row per row-axis value."""
    path = Path(path)
    grid = np.asarray(grid, dtype=float).reshape(len(row_axis), len(col_axis))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([row_label] + [_fmt(c) for c in col_axis])
        for r, row in zip(row_axis, grid):
            w.writerow([_fmt(r)] + [_fmt(v) for v in row])
    return path


def read_grid_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray, np.ndarray, str]:
    """Inverse of :func:`write_grid_csv`: ``(rows, cols, grid, row_label)``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    head = rows[0]
    cols = np.array([float(c) for c in head[1:]])
    body = [r for r in rows[1:] if r]
    r_ax = np.array([float(r[0]) for r in body])
    grid = np.array([[float(v) for v in r[1:]] for r in body]).reshape(len(body), len(cols))
    return r_ax, cols, grid, head[0]


def write_json(path: str | Path, obj: Any) -> Path:
    path = Path(path)
    path.write_text(_dumps(obj))
    return path


def write_sidecar(path: str | Path, *, units: dict, provenance: dict, cfg_hash: str,
                  extra: dict | None = None) -> Path:
    meta = {
        "units": units,
        "provenance": provenance,
        "config_hash": cfg_hash,
        "code_version": __version__,
    }
    if extra:
        meta.update(extra)
    return write_json(path, meta)


def write_density_json(path: str | Path, rho: np.ndarray, meta: dict | None = None) -> Path:
    """Density matrix as row-major ``[re, im]`` pairs."""
    rho = np.asarray(rho, dtype=complex)
    rec = {
        "dim": int(rho.shape[0]),
        "layout": "row-major [re, im] pairs",
        "data": [[float(z.real), float(z.imag)] for z in rho.ravel()],
    }
    if meta:
        rec["meta"] = meta
    return write_json(path, rec)


def read_density_json(path: str | Path) -> np.ndarray:
    rec = json.loads(Path(path).read_text())
    d = int(rec["dim"])
    a = np.array(rec["data"], dtype=float)
    return (a[:, 0] + 1j * a[:, 1]).reshape(d, d)


def write_wigner_dataset_csv(path: str | Path, alphas, values, shots=None) -> Path:
    path = Path(path)
    alphas = np.asarray(alphas, dtype=complex).ravel()
    values = np.asarray(values, dtype=float).ravel()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["re_alpha", "im_alpha", "value"] + (["shots"] if shots is not None else []))
        for i, (a, v) in enumerate(zip(alphas, values)):
            row = [_fmt(a.real), _fmt(a.imag), _fmt(v)]
            if shots is not None:
                row.append(str(int(np.broadcast_to(shots, values.shape)[i])))
            w.writerow(row)
    return path


def read_wigner_dataset_csv(path: str | Path):
    """``(alphas, values, shots | None)`` from a ``re_alpha,im_alpha,value[,shots]`` CSV."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise ValueError(f"{path}: empty dataset")
    head = [h.strip() for h in rows[0]]
    if head[:3] != ["re_alpha", "im_alpha", "value"]:
        raise ValueError(f"{path}: header must start with re_alpha,im_alpha,value")
    body = rows[1:]
    if not body:
        raise ValueError(f"{path}: no data rows")
    alphas = np.array([float(r[0]) + 1j * float(r[1]) for r in body])
    values = np.array([float(r[2]) for r in body])
    shots = np.array([int(r[3]) for r in body]) if len(head) > 3 and head[3] == "shots" else None
    return alphas, values, shots
