"""Matrix Market exchange, convergence-history CSV files and run manifests."""

from __future__ import annotations

import csv
import datetime as _dt
import json
import math
import sys
from pathlib import Path
from typing import Iterable

import numpy as np
import scipy.io
import scipy.sparse

from .krylov import ConvergenceHistory, IterateRecord

__all__ = [
    "HISTORY_COLUMNS",
    "write_matrix",
    "read_matrix",
    "write_vector",
    "read_vector",
    "write_history_csv",
    "read_history_csv",
    "write_manifest",
    "manifest_path",
]

HISTORY_COLUMNS = (
    "iter",
    "rel_res",
    "at_rel_res",
    "h_subdiag",
    "sigma_max_h",
    "sigma_min_h",
    "rank_used",
    "tol_used",
)

# 17 significant digits round-trip every double exactly
_FLOAT_FMT = "{:.16e}"


def write_matrix(path, a: np.ndarray, comment: str = "") -> Path:
    """Write a dense matrix in Matrix Market coordinate (real, general) format."""
    path = Path(path)
    scipy.io.mmwrite(path, scipy.sparse.coo_matrix(a), comment=comment, field="real", precision=17, symmetry="general")
    return _mtx_name(path)


def read_matrix(path) -> np.ndarray:
    m = scipy.io.mmread(_mtx_name(Path(path)))
    a = m.toarray() if scipy.sparse.issparse(m) else np.asarray(m)
    return np.asfortranarray(a, dtype=np.float64)


def write_vector(path, v: np.ndarray, comment: str = "") -> Path:
    """Write a vector in Matrix Market array format as an n x 1 matrix."""
    path = Path(path)
    scipy.io.mmwrite(path, np.asarray(v, dtype=np.float64).reshape(-1, 1), comment=comment, field="real", precision=17)
    return _mtx_name(path)


def read_vector(path) -> np.ndarray:
    m = scipy.io.mmread(_mtx_name(Path(path)))
    m = m.toarray() if scipy.sparse.issparse(m) else np.asarray(m)
    return np.asarray(m, dtype=np.float64).reshape(-1)


def _mtx_name(path: Path) -> Path:
    # mmwrite appends .mtx when the suffix is missing
    return path if path.suffix == ".mtx" else path.with_name(path.name + ".mtx")


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    return "nan" if math.isnan(v) else _FLOAT_FMT.format(v)


def write_history_csv(path, history: ConvergenceHistory | Iterable[IterateRecord]) -> Path:
    """One row per iteration; floats in scientific notation with 17 significant digits."""
    path = Path(path)
    records = history.records if isinstance(history, ConvergenceHistory) else list(history)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(HISTORY_COLUMNS)
        for r in records:
            w.writerow([_fmt(getattr(r, c)) for c in HISTORY_COLUMNS])
    return path


def read_history_csv(path) -> list[IterateRecord]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for row in rows:
        if tuple(row) != HISTORY_COLUMNS:
            raise ValueError(f"unexpected columns {tuple(row)}")
        out.append(
            IterateRecord(
                iter=int(row["iter"]),
                rel_res=float(row["rel_res"]),
                at_rel_res=float(row["at_rel_res"]),
                h_subdiag=float(row["h_subdiag"]),
                sigma_max_h=float(row["sigma_max_h"]),
                sigma_min_h=float(row["sigma_min_h"]),
                rank_used=int(row["rank_used"]),
                tol_used=float(row["tol_used"]),
            )
        )
    return out


def manifest_path(output: Path) -> Path:
    output = Path(output)
    return output.with_name(output.name + ".manifest.json")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Path):
        return str(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else str(obj)
    if hasattr(obj, "value") and hasattr(obj, "name"):
        return obj.value
    if obj is None or isinstance(obj, (str, int, bool)):
        return obj
    return str(obj)


def write_manifest(output: Path, *, config: dict, generator: dict | None = None, seed=None, outputs=(), argv=None) -> Path:
    """Record everything needed to regenerate `output` next to it."""
    data = {
        "command_line": list(sys.argv if argv is None else argv),
        "config": config,
        "generator": generator or {},
        "seed": seed,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "outputs": [str(p) for p in ([output] + list(outputs))],
    }
    path = manifest_path(output)
    path.write_text(json.dumps(_jsonable(data), indent=2) + "\n")
    return path
