"""Dense linear algebra and clustering primitives.

Everything here is a pure function of its inputs. Matrices are plain
``numpy.ndarray`` objects; finiteness is checked on entry.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import InvalidInputError, NumericalError

DEFAULT_RCOND = 1e-10


def _as_finite(m, name="matrix", dtype=float):
    a = np.asarray(m, dtype=dtype)
    if a.size == 0:
        raise InvalidInputError(f"{name} is empty")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return a


def pseudo_inverse(m, rel_tol=DEFAULT_RCOND):
    """Moore-Penrose pseudo-inverse via a thin SVD.

    Singular values below ``rel_tol * s_max`` are treated as zero.
    """
    if not 0.0 < rel_tol < 1.0:
        raise InvalidInputError("rel_tol must lie in (0, 1)")
    a = np.asarray(m)
    a = _as_finite(a, dtype=complex if np.iscomplexobj(a) else float)
    if a.ndim != 2:
        raise InvalidInputError("pseudo_inverse expects a 2-d matrix")
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros(a.T.shape, dtype=a.dtype)
    keep = s > rel_tol * s[0]
    inv_s = np.zeros_like(s)
    inv_s[keep] = 1.0 / s[keep]
    return (vh.conj().T * inv_s) @ u.conj().T


def sort_spectrum(eigenvalues):
    """Return the permutation ordering eigenvalues by descending modulus.

    Ties in modulus (to 1e-12 relative) are broken by descending real part,
    then by descending imaginary part.
    """
    lam = np.asarray(eigenvalues, dtype=complex)
    scale = max(float(np.max(np.abs(lam))), 1e-300) if lam.size else 1.0
    # Quantize so that conjugate pairs and rounding noise do not reorder ties.
    mod = np.round(np.abs(lam) / scale, 12)
    re = np.round(lam.real / scale, 12)
    return np.lexsort((-lam.imag, -re, -mod))


def normalize_eigenvectors(v, rel_zero=1e-12):
    """Unit 2-norm columns whose first nonzero entry has nonnegative real part."""
    v = np.array(v, dtype=complex)
    norms = np.linalg.norm(v, axis=0)
    norms[norms == 0.0] = 1.0
    v /= norms
    for j in range(v.shape[1]):
        col = v[:, j]
        mags = np.abs(col)
        nz = np.flatnonzero(mags > rel_zero * mags.max()) if mags.max() > 0 else []
        if len(nz) and col[nz[0]].real < 0:
            v[:, j] = -col
    return v


def eigendecompose(k):
    """Eigenvalues and right eigenvectors of a real square matrix.

    Returns
    -------
    eigenvalues : (n,) complex array, descending modulus
    vectors : (n, n) complex array, column ``j`` pairs with ``eigenvalues[j]``
    """
    a = _as_finite(k, name="k")
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"eigendecompose needs a square matrix, got {a.shape}")
    lam, vec = scipy.linalg.eig(a, check_finite=False)
    order = sort_spectrum(lam)
    return lam[order], normalize_eigenvectors(vec[:, order])


@dataclass
class KMeansResult:
    centers: np.ndarray
    labels: np.ndarray
    inertia: float
    n_iter: int
    history: list = field(default_factory=list)


def _sq_dists(points, centers):
    d = (
        np.sum(points**2, axis=1)[:, None]
        - 2.0 * points @ centers.T
        + np.sum(centers**2, axis=1)[None, :]
    )
    return np.maximum(d, 0.0)


def _plusplus_init(points, k, rng):
    n = len(points)
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    closest = _sq_dists(points, centers[:1])[:, 0]
    for i in range(1, k):
        total = closest.sum()
        if total <= 0.0:
            # All remaining mass sits on chosen centers; pick any unchosen point.
            idx = rng.integers(n)
        else:
            idx = rng.choice(n, p=closest / total)
        centers[i] = points[idx]
        closest = np.minimum(closest, _sq_dists(points, centers[i : i + 1])[:, 0])
    return centers


def lloyd(points, k, seed, max_iter=300, tol=1e-9):
    """Single seeded k-means++ / Lloyd run with the full objective history."""
    x = _as_finite(points, name="points")
    if x.ndim == 1:
        x = x[:, None]
    if k < 1:
        raise InvalidInputError("k must be at least 1")
    n_distinct = len(np.unique(x, axis=0))
    if k > n_distinct:
        raise InvalidInputError(f"k={k} exceeds the {n_distinct} distinct points")

    rng = np.random.default_rng(seed)
    centers = _plusplus_init(x, k, rng)
    history = []
    labels = np.zeros(len(x), dtype=int)
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        d = _sq_dists(x, centers)
        labels = np.argmin(d, axis=1)
        obj = float(d[np.arange(len(x)), labels].sum())
        history.append(obj)
        counts = np.bincount(labels, minlength=k)
        sums = np.zeros_like(centers)
        np.add.at(sums, labels, x)
        new = centers.copy()
        filled = counts > 0
        new[filled] = sums[filled] / counts[filled, None]
        if not filled.all():
            # Re-seed empty clusters at the points worst served by their center.
            far = np.argsort(d[np.arange(len(x)), labels])[::-1]
            for j, idx in zip(np.flatnonzero(~filled), far):
                new[j] = x[idx]
        centers = new
        if len(history) > 1 and history[-2] - obj <= tol * max(history[-2], 1e-300):
            break

    d = _sq_dists(x, centers)
    labels = np.argmin(d, axis=1)
    inertia = float(d[np.arange(len(x)), labels].sum())
    return KMeansResult(centers, labels, inertia, n_iter, history)


def kmeans(points, k, seed, max_iter=300, tol=1e-9, n_init=1):
    """Seeded k-means; returns ``(centers, labels)``.

    With ``n_init > 1`` the run with the lowest objective wins; restart seeds
    are derived deterministically from ``seed``.
    """
    best = None
    seeds = [seed] if n_init == 1 else np.random.SeedSequence(seed).generate_state(n_init)
    for s in seeds:
        res = lloyd(points, k, int(s), max_iter=max_iter, tol=tol)
        if best is None or res.inertia < best.inertia:
            best = res
    return best.centers, best.labels


def hermitian_pd_solve(m, rhs):
    """Solve ``m @ x = rhs`` for Hermitian positive-definite ``m`` by Cholesky."""
    a = _as_finite(m, name="m", dtype=complex)
    b = _as_finite(rhs, name="rhs", dtype=complex)
    try:
        factor = scipy.linalg.cho_factor(a, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Cholesky factorization failed: {exc}") from exc
    return scipy.linalg.cho_solve(factor, b, check_finite=False)
