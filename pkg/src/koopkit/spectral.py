"""Moment-based density of the spectral measure of a unitary Koopman operator.

Given an observable sampled along one trajectory, the autocorrelations
``m_k = <K^k g, g>`` are the Fourier coefficients of the spectral measure
of ``g`` on the unit circle. A regularized Christoffel-Darboux kernel built
from the Toeplitz moment matrix turns them into a density estimate.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from .errors import InvalidInputError, NumericalError
from .io import write_csv
from .numerics import hermitian_pd_solve

DEFAULT_GRID = 2048
MAX_ORDER = 500


@dataclass
class MomentSequence:
    moments: np.ndarray
    observable: str = "g"

    @property
    def N(self):
        return len(self.moments) - 1

    def save(self, path):
        m = self.moments
        write_csv(path, ["k", "re", "im"], [(k, v.real, v.imag) for k, v in enumerate(m)])


@dataclass
class SpectralDensity:
    thetas: np.ndarray
    rho: np.ndarray

    def save(self, path):
        write_csv(path, ["theta", "rho"], np.column_stack([self.thetas, self.rho]))


def default_order(m):
    """``min(500, M // 20)`` moments for a series of length ``m``."""
    return max(1, min(MAX_ORDER, m // 20))


def default_grid(n=DEFAULT_GRID):
    return 2 * np.pi * np.arange(n) / n


def estimate_moments(series, N, observable="g"):
    """Ergodic-average moments ``m_k = 1/(M-k) sum_i y_{i+k} conj(y_i)``.

    Uses an FFT correlation, which is exact up to rounding.
    """
    y = np.asarray(series, dtype=complex).ravel()
    M = y.size
    if N < 0 or N >= M:
        raise InvalidInputError(f"need 0 <= N < M, got N={N}, M={M}")
    if not np.all(np.isfinite(y)):
        raise InvalidInputError("series has non-finite entries")
    size = 1 << int(np.ceil(np.log2(2 * M)))
    f = np.fft.fft(y, size)
    # ifft(|F|^2 conj-ordered) gives sum_i y_{i+k} conj(y_i) at lag k.
    corr = np.fft.ifft(f * np.conj(f))[: N + 1]
    m = corr / (M - np.arange(N + 1))
    m[0] = m[0].real
    return MomentSequence(m, observable)


def moment_matrix(m):
    """Hermitian Toeplitz ``M[i, j] = m_{i-j}`` (``m_{-k} = conj(m_k)``)."""
    moments = np.asarray(m.moments if isinstance(m, MomentSequence) else m, dtype=complex)
    return scipy.linalg.toeplitz(moments, moments.conj())


def spectral_density(m, thetas=None):
    """``(N+1) / K_N(e^{i theta}, e^{i theta}) - 1`` with ``M + I`` regularization."""
    moments = m.moments if isinstance(m, MomentSequence) else np.asarray(m, dtype=complex)
    N = len(moments) - 1
    if N < 1:
        raise InvalidInputError("need at least two moments")
    thetas = default_grid() if thetas is None else np.asarray(thetas, dtype=float)
    mt = moment_matrix(moments) + np.eye(N + 1)
    psi = np.exp(1j * np.outer(np.arange(N + 1), thetas))  # (N+1, n_grid)
    sol = hermitian_pd_solve(mt, psi)
    kern = np.einsum("ij,ij->j", psi.conj(), sol).real
    if np.any(kern <= 0):
        raise NumericalError("kernel is not positive; moment matrix is ill-conditioned")
    return SpectralDensity(thetas, (N + 1) / kern - 1.0)


def write_outputs(directory, moments, density):
    directory = Path(directory)
    moments.save(directory / "moments.csv")
    density.save(directory / "density.csv")
