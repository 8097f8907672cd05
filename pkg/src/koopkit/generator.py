"""Infinitesimal generator of a fitted Koopman model and the vector field it implies."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .io import write_complex_csv, write_csv
from .numerics import DEFAULT_RCOND, pseudo_inverse


@dataclass
class GeneratorModel:
    """``L = V diag(ln(lambda)/dt) V^+`` with filtered log-eigenvalues."""

    log_eigenvalues: np.ndarray
    V: np.ndarray
    V_inv: np.ndarray
    modes: np.ndarray
    dictionary: object
    step_size: float
    n_filtered: int = 0

    @property
    def matrix(self):
        return (self.V * self.log_eigenvalues) @ self.V_inv

    def save(self, directory):
        write_complex_csv(Path(directory) / "generator_eigs.csv", self.log_eigenvalues)


def log_eigenvalues(eigenvalues, dt, min_modulus=1e-12):
    """Principal-branch ``ln(lambda)/dt`` with strongly damped entries set to 0.

    Entries with ``Re ln(lambda) < -2/dt`` or ``|lambda| < min_modulus`` are
    zeroed. Negative reals map to ``+i pi``.
    """
    if dt <= 0:
        raise InvalidInputError("step size must be positive")
    lam = np.asarray(eigenvalues, dtype=complex)
    # Force negative reals onto the upper side of the branch cut.
    lam = np.where((lam.imag == 0) & (lam.real < 0), lam.real + 0j, lam)
    tiny = np.abs(lam) < min_modulus
    with np.errstate(divide="ignore"):
        ln = np.log(np.where(tiny, 1.0, lam))
    ln = np.where((lam.imag == 0) & (lam.real < 0), np.log(np.abs(lam)) + 1j * np.pi, ln)
    drop = tiny | (ln.real < -2.0 / dt)
    out = ln / dt
    out[drop] = 0.0
    return out, drop


def generator_matrix(model, rel_tol=DEFAULT_RCOND):
    """Generator approximation from a fitted :class:`~koopkit.edmd.KoopmanModel`."""
    logs, drop = log_eigenvalues(model.eigenvalues, model.step_size)
    return GeneratorModel(
        log_eigenvalues=logs,
        V=model.V,
        V_inv=pseudo_inverse(model.V, rel_tol),
        modes=model.modes,
        dictionary=model.dictionary,
        step_size=model.step_size,
        n_filtered=int(drop.sum()),
    )


def reconstruct_vector_field(g, x):
    """Approximate vector field at one state or at each row of a batch."""
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    phi = g.dictionary.evaluate(pts) @ g.V
    field = ((phi * g.log_eigenvalues) @ g.modes).real
    return field[0] if np.ndim(x) == 1 else field


def write_field_csv(path, points, field, names=None):
    """Field samples as CSV with columns ``<coords>..., v_<coords>...``."""
    points = np.atleast_2d(points)
    d = points.shape[1]
    names = names or [f"x{i + 1}" for i in range(d)]
    header = list(names) + [f"v_{n}" for n in names]
    write_csv(path, header, np.hstack([points, field]))
