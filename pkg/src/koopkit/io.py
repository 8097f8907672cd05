"""CSV and JSON serialization used by every artifact writer.

CSV files are comma separated, ``.`` decimal, ``\\n`` line endings, UTF-8.
Floats are written with 17 significant digits so that every finite double
survives a write/read round trip bit for bit.
"""
from __future__ import annotations

import csv
import hashlib
import json
import math
import numbers
import os
from pathlib import Path

import numpy as np

from .errors import CSVFormatError


def format_number(value):
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if isinstance(value, numbers.Real):
        v = float(value)
        if not math.isfinite(v):
            raise CSVFormatError(f"refusing to write non-finite value {v!r}")
        return format(v, ".17g")
    return str(value)


def write_csv(path, header, rows):
    """Write a rectangular table. ``rows`` may be a 2-d array or nested lists."""
    path = Path(path)
    header = list(header) if header is not None else None
    width = len(header) if header else None
    lines = []
    for i, row in enumerate(rows):
        row = list(np.ravel(row)) if isinstance(row, np.ndarray) else list(row)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise CSVFormatError(f"row {i} has {len(row)} fields, expected {width}")
        lines.append([format_number(v) for v in row])
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if header is not None:
            writer.writerow(header)
        writer.writerows(lines)


def _parse_row(fields, lineno):
    out = []
    for f in fields:
        try:
            out.append(float(f))
        except ValueError:
            raise CSVFormatError(f"line {lineno}: malformed numeral {f!r}") from None
    return out


def read_csv(path, header=True):
    """Read a numeric CSV table written by :func:`write_csv`.

    Returns ``(header, rows)`` where ``rows`` is a float array of shape
    ``(n_rows, n_cols)``. Ragged rows raise :class:`CSVFormatError` naming
    the offending line.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        names = next(reader, None) if header else None
        width = len(names) if names else None
        rows = []
        for lineno, fields in enumerate(reader, start=2 if header else 1):
            if not fields:
                continue
            if width is None:
                width = len(fields)
            if len(fields) != width:
                raise CSVFormatError(
                    f"line {lineno}: {len(fields)} fields, expected {width}"
                )
            rows.append(_parse_row(fields, lineno))
    arr = np.array(rows, dtype=float).reshape(len(rows), width or 0)
    return names, arr


def write_complex_csv(path, values, names=("re", "im"), index_name=None):
    values = np.asarray(values, dtype=complex)
    if index_name is None:
        write_csv(path, names, np.column_stack([values.real, values.imag]))
    else:
        write_csv(
            path,
            (index_name, *names),
            [(k, v.real, v.imag) for k, v in enumerate(values)],
        )


def read_complex_csv(path):
    names, rows = read_csv(path)
    return rows[:, -2] + 1j * rows[:, -1]


def write_complex_matrix(path, m):
    """Complex matrix as CSV: columns ``re_0, im_0, re_1, im_1, ...``."""
    m = np.asarray(m, dtype=complex)
    cols = np.empty((m.shape[0], 2 * m.shape[1]))
    cols[:, 0::2] = m.real
    cols[:, 1::2] = m.imag
    header = [f"{p}_{j}" for j in range(m.shape[1]) for p in ("re", "im")]
    write_csv(path, header, cols)


def read_complex_matrix(path):
    _, rows = read_csv(path)
    return rows[:, 0::2] + 1j * rows[:, 1::2]


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Path):
        return str(obj)
    return obj


def sha256sum(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def build_manifest(out_dir, experiment, seeds, metrics, timings, extra=None):
    """Assemble a manifest dict for every file below ``out_dir``.

    Checksums are computed at call time, so the manifest must be written
    after all artifacts. ``manifest.json`` itself is never listed.
    """
    from . import __version__

    out_dir = Path(out_dir)
    files = []
    for p in sorted(out_dir.rglob("*")):
        if p.is_file() and p.name != "manifest.json":
            rel = p.relative_to(out_dir).as_posix()
            files.append({"path": rel, "sha256": sha256sum(p), "bytes": p.stat().st_size})
    manifest = {
        "experiment": experiment,
        "version": __version__,
        "files": files,
        "seeds": seeds,
        "metrics": metrics,
        "timings": timings,
    }
    if extra:
        manifest.update(extra)
    return manifest


def verify_manifest(out_dir, manifest):
    """Return the list of files whose checksum no longer matches (empty if ok)."""
    bad = []
    for entry in manifest["files"]:
        p = Path(out_dir) / entry["path"]
        if not p.exists() or sha256sum(p) != entry["sha256"]:
            bad.append(entry["path"])
    return bad


def thread_cap():
    """Thread budget from ``KOOPKIT_THREADS`` (``None`` when unset)."""
    raw = os.environ.get("KOOPKIT_THREADS")
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        return None
    return max(n, 1)
