"""Analyses built on fitted Koopman models: basin decomposition from
eigenvalue-one eigenfunctions and spectra on partial sampling windows."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dictionary import build_dictionary
from .edmd import fit
from .errors import AnalysisError, KoopkitError
from .io import write_complex_csv, write_csv
from .numerics import kmeans
from .systems import UniformBox, sample_pairs

log = logging.getLogger(__name__)

DEFAULT_EIG_TOL = 0.02
DEFAULT_RESTARTS = 5


@dataclass
class Decomposition:
    indices: np.ndarray
    embedded: np.ndarray
    labels: np.ndarray
    n_clusters: int
    centers: np.ndarray = None

    def save(self, path, points):
        points = np.atleast_2d(points)
        header = [f"x{i + 1}" for i in range(points.shape[1])] + ["label"]
        rows = [list(p) + [int(lab)] for p, lab in zip(points, self.labels)]
        write_csv(path, header, rows)


def near_one(eigenvalues, eig_tol=DEFAULT_EIG_TOL):
    """Indices of eigenvalues with ``|lambda - 1| < eig_tol``."""
    return np.flatnonzero(np.abs(np.asarray(eigenvalues) - 1.0) < eig_tol)


def ergodic_decomposition(model, points, eig_tol=DEFAULT_EIG_TOL, n_clusters=None,
                          seed=0, n_init=DEFAULT_RESTARTS):
    """Cluster points by the values of the eigenfunctions at eigenvalue ~1.

    Each point is mapped to ``[Re phi_j(p), Im phi_j(p)]`` over the selected
    eigenfunctions, and the embedded points are clustered with k-means.
    ``n_clusters`` defaults to the number of selected eigenfunctions.
    """
    idx = near_one(model.eigenvalues, eig_tol)
    if idx.size == 0:
        raise AnalysisError(f"no eigenvalue within {eig_tol} of 1")
    phi = model.eigenfunctions(points)[:, idx]
    emb = np.hstack([phi.real, phi.imag])
    k = len(idx) if n_clusters is None else int(n_clusters)
    if k == 1:
        labels = np.zeros(len(emb), dtype=int)
        centers = emb.mean(axis=0, keepdims=True)
    else:
        centers, labels = kmeans(emb, k, seed, n_init=n_init)
    return Decomposition(idx, emb, labels, k, centers)


def match_labels(labels, reference):
    """Best agreement fraction between two labelings over label permutations."""
    from scipy.optimize import linear_sum_assignment

    labels = np.asarray(labels)
    reference = np.asarray(reference)
    a = np.unique(labels)
    b = np.unique(reference)
    overlap = np.array([[np.sum((labels == i) & (reference == j)) for j in b] for i in a])
    rows, cols = linear_sum_assignment(-overlap)
    return overlap[rows, cols].sum() / len(labels)


def basin_oracle(system, points, minima, n_steps):
    """Index of the nearest minimum after ``n_steps`` of the true dynamics."""
    x = np.array(points, dtype=float)
    for _ in range(n_steps):
        x = system.step_many(x)
    d = np.linalg.norm(x[:, None, :] - np.asarray(minima)[None], axis=-1)
    return np.argmin(d, axis=1), np.min(d, axis=1)


# ------------------------------------------------------------ window scans


@dataclass
class WindowRecord:
    name: str
    low: tuple
    high: tuple
    eigenvalues: np.ndarray = None
    max_re: float = float("nan")
    error: str = None


@dataclass
class WindowScanResult:
    records: list = field(default_factory=list)

    def max_re(self):
        return {r.name: r.max_re for r in self.records}

    def save(self, directory):
        directory = Path(directory)
        rows = []
        for i, r in enumerate(self.records):
            rows.append([i, *r.low, *r.high, r.max_re if r.error is None else "nan"])
            if r.eigenvalues is not None:
                write_complex_csv(directory / f"window_{r.name}_eigenvalues.csv", r.eigenvalues)
        d = len(self.records[0].low) if self.records else 0
        header = (["window_index"] + [f"low_{i + 1}" for i in range(d)]
                  + [f"high_{i + 1}" for i in range(d)] + ["max_re_lambda"])
        write_csv(directory / "window_scan.csv", header, rows)


def window_spectrum_scan(system, windows, dict_cfg, n_samples, seed=0, rel_tol=None,
                         fit_mode="standard"):
    """Fit EDMD separately on data sampled uniformly in each window.

    Parameters
    ----------
    windows : dict or list
        ``{name: (low, high)}`` or a list of ``(low, high)`` rectangles.
    dict_cfg : dict
        Keyword arguments for :func:`~koopkit.dictionary.build_dictionary`
        (``n_rbf`` required).

    Successors that leave the window are kept. A window whose fit fails is
    recorded with its error and the scan continues.
    """
    if not windows:
        raise AnalysisError("no windows to scan")
    items = windows.items() if isinstance(windows, dict) else enumerate(windows)
    result = WindowScanResult()
    for name, (low, high) in items:
        rec = WindowRecord(str(name), tuple(map(float, low)), tuple(map(float, high)))
        try:
            pairs = sample_pairs(system, UniformBox(rec.low, rec.high), n_samples, seed=seed)
            d = build_dictionary(pairs.x, seed=seed, **dict_cfg)
            kw = {} if rel_tol is None else {"rel_tol": rel_tol}
            model = fit(pairs, d, fit_mode=fit_mode, **kw)
            rec.eigenvalues = model.eigenvalues
            rec.max_re = float(model.eigenvalues.real.max())
        except (KoopkitError, ValueError) as exc:
            log.warning("window %s failed: %s", name, exc)
            rec.error = str(exc)
        result.records.append(rec)
    return result
