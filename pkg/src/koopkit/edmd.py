"""Extended dynamic mode decomposition: fit, eigenfunctions, prediction."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dictionary import load_dictionary
from .errors import FitError, InvalidInputError
from .io import (
    read_complex_csv,
    read_complex_matrix,
    read_csv,
    read_json,
    write_complex_csv,
    write_complex_matrix,
    write_csv,
    write_json,
)
from .numerics import DEFAULT_RCOND, eigendecompose, pseudo_inverse

log = logging.getLogger(__name__)

FIT_MODES = ("standard", "paper")


@dataclass
class KoopmanModel:
    """Finite-dimensional Koopman approximation on a dictionary.

    ``K`` acts on dictionary coefficient vectors, so ``D(x) @ V[:, j]`` is
    the ``j``-th approximate eigenfunction. ``modes`` (``N_D x d``) expand
    the coordinate functions in those eigenfunctions.
    """

    K: np.ndarray
    eigenvalues: np.ndarray
    V: np.ndarray
    modes: np.ndarray
    dictionary: object
    step_size: float
    fit_mode: str = "standard"
    residuals: dict = field(default_factory=dict)

    @property
    def size(self):
        return self.K.shape[0]

    def eigenfunctions(self, points):
        """Eigenfunction values, one row per point (``N x N_D``)."""
        return self.dictionary.evaluate(points) @ self.V

    def save(self, directory):
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        write_complex_csv(directory / "eigenvalues.csv", self.eigenvalues)
        write_complex_matrix(directory / "modes.csv", self.modes)
        write_complex_matrix(directory / "eigvecs.csv", self.V)
        write_csv(directory / "koopman.csv", [f"k_{j}" for j in range(self.size)], self.K)
        self.dictionary.save(directory)
        write_json(
            directory / "meta.json",
            {
                "fit_mode": self.fit_mode,
                "step_size": self.step_size,
                "n_dictionary": self.size,
                "residuals": self.residuals,
            },
        )

    @classmethod
    def load(cls, directory):
        directory = Path(directory)
        meta = read_json(directory / "meta.json")
        _, K = read_csv(directory / "koopman.csv")
        return cls(
            K=K,
            eigenvalues=read_complex_csv(directory / "eigenvalues.csv"),
            V=read_complex_matrix(directory / "eigvecs.csv"),
            modes=read_complex_matrix(directory / "modes.csv"),
            dictionary=load_dictionary(directory),
            step_size=meta["step_size"],
            fit_mode=meta["fit_mode"],
            residuals=meta.get("residuals", {}),
        )


def koopman_matrix(G, A, fit_mode="standard", rel_tol=DEFAULT_RCOND):
    """Koopman matrix from dictionary snapshots ``G = D(X)``, ``A = D(Y)``.

    ``standard`` is the least-squares solution of ``G K = A``;
    ``paper`` is ``(G^T G)^+ (A^T A) / N_D^2``.
    """
    gram = G.T @ G
    pinv = pseudo_inverse(gram, rel_tol)
    if fit_mode == "standard":
        return pinv @ (G.T @ A)
    if fit_mode == "paper":
        n_d = G.shape[1]
        return pinv @ (A.T @ A) / n_d**2
    raise InvalidInputError(f"fit_mode must be one of {FIT_MODES}, got {fit_mode!r}")


def fit(pairs, dictionary, fit_mode="standard", rel_tol=DEFAULT_RCOND, holdout=0.0):
    """Fit a :class:`KoopmanModel` to snapshot pairs.

    With ``holdout > 0`` the last fraction of pairs (in their stored order)
    is excluded from fitting and used only for the held-out residual.
    """
    if dictionary.size == 0:
        raise FitError("dictionary has no observables")
    if pairs.dim != dictionary.dim:
        raise FitError(f"pairs have dim {pairs.dim}, dictionary expects {dictionary.dim}")
    train, test = pairs.split(holdout) if holdout > 0 else (pairs, None)

    G = dictionary.evaluate(train.x)
    A = dictionary.evaluate(train.y)
    if not np.any(G):
        raise FitError("dictionary evaluates to zero on the data")
    K = koopman_matrix(G, A, fit_mode, rel_tol)
    lam, V = eigendecompose(K)

    phi = G @ V
    modes, *_ = np.linalg.lstsq(phi, train.x.astype(complex), rcond=None)

    model = KoopmanModel(K, lam, V, modes, dictionary, float(pairs.step_size), fit_mode)
    k_norm = max(np.linalg.norm(K), 1e-300)
    res = {
        "eig_residual": float(np.linalg.norm(K @ V - V * lam) / k_norm),
        "reconstruction": float(np.mean(np.linalg.norm((phi @ modes).real - train.x, axis=1))),
        "train_one_step": float(_one_step_error(model, train)),
        "n_train": len(train),
    }
    if test is not None:
        res["heldout_one_step"] = float(_one_step_error(model, test))
        res["n_heldout"] = len(test)
    model.residuals = res
    if fit_mode == "paper":
        log.warning("fit_mode=paper: K = (G^T G)^+ (A^T A) / N_D^2 is not a least-squares fit")
    return model


def _one_step_error(model, pairs):
    traj = predict_many(model, pairs.x, 1)
    return np.mean(np.linalg.norm(traj[:, 1] - pairs.y, axis=1))


def eigenfunction_eval(model, x):
    """Row of eigenfunction values ``D(x)^T V`` at a single state."""
    return model.eigenfunctions(np.reshape(x, (1, -1)))[0]


def predict_many(model, x0s, n, return_imag=False):
    """Surrogate trajectories for several starts: array ``(n_starts, n+1, d)``.

    ``x_m = Re(phi(x0) diag(lambda^m) C)``; the first entry is the model's
    reconstruction of ``x0``, not ``x0`` itself.
    """
    if n < 0:
        raise InvalidInputError("n must be nonnegative")
    phi = model.eigenfunctions(x0s)  # (s, N_D)
    powers = model.eigenvalues[None, :] ** np.arange(n + 1)[:, None]  # (n+1, N_D)
    traj = np.einsum("sk,mk,kd->smd", phi, powers, model.modes)
    if return_imag:
        return traj.real, np.linalg.norm(traj.imag, axis=-1)
    return traj.real


def predict(model, x0, n, return_imag=False):
    """Surrogate trajectory ``[x_0, ..., x_n]`` from one start, shape ``(n+1, d)``."""
    out = predict_many(model, np.reshape(x0, (1, -1)), n, return_imag)
    if return_imag:
        return out[0][0], out[1][0]
    return out[0]
