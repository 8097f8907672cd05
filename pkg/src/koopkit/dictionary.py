"""Observable dictionaries: thin-plate RBFs, coordinates, constant, monomials."""
from __future__ import annotations

import itertools
from pathlib import Path

import numpy as np
from scipy.spatial.distance import cdist

from .errors import InvalidInputError
from .io import read_csv, read_json, write_csv, write_json
from .numerics import kmeans

DEFAULT_DELTA = 1e-3


def thin_plate_eval(center, delta, y):
    """``r^2 ln(r + delta)`` with ``r = |center - y|``."""
    if delta <= 0:
        raise InvalidInputError("delta must be positive")
    r = float(np.linalg.norm(np.asarray(center, float) - np.asarray(y, float)))
    return r * r * np.log(r + delta)


def thin_plate(r, delta):
    return r * r * np.log(r + delta)


class Dictionary:
    """Thin-plate RBFs at fixed centers, optionally followed by the coordinate
    functions and the constant function (in that order)."""

    kind = "rbf"

    def __init__(self, centers, delta=DEFAULT_DELTA, include_coords=True,
                 include_const=True, dim=None, seed=None):
        centers = np.asarray(centers, dtype=float)
        if centers.size == 0:
            if dim is None:
                raise InvalidInputError("dim is required for a dictionary without centers")
            centers = np.empty((0, int(dim)))
        centers = np.atleast_2d(centers)
        if delta <= 0:
            raise InvalidInputError("delta must be positive")
        self.centers = centers
        self.dim = centers.shape[1]
        self.delta = float(delta)
        self.include_coords = bool(include_coords)
        self.include_const = bool(include_const)
        self.seed = seed

    @property
    def n_rbf(self):
        return len(self.centers)

    @property
    def size(self):
        return self.n_rbf + (self.dim if self.include_coords else 0) + int(self.include_const)

    def __len__(self):
        return self.size

    @property
    def coordinate_columns(self):
        if not self.include_coords:
            return None
        return np.arange(self.n_rbf, self.n_rbf + self.dim)

    @property
    def constant_column(self):
        return self.size - 1 if self.include_const else None

    @property
    def names(self):
        out = [f"rbf_{j}" for j in range(self.n_rbf)]
        if self.include_coords:
            out += [f"x_{i + 1}" for i in range(self.dim)]
        if self.include_const:
            out.append("1")
        return out

    def evaluate(self, points):
        """Matrix with entry ``(i, j) = observable_j(points[i])``."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.dim:
            raise InvalidInputError(f"points have dim {pts.shape[1]}, dictionary expects {self.dim}")
        blocks = []
        if self.n_rbf:
            blocks.append(thin_plate(cdist(pts, self.centers), self.delta))
        if self.include_coords:
            blocks.append(pts)
        if self.include_const:
            blocks.append(np.ones((len(pts), 1)))
        if not blocks:
            return np.empty((len(pts), 0))
        return np.hstack(blocks)

    def observable(self, j):
        """Scalar callable for observable ``j``."""
        if not 0 <= j < self.size:
            raise IndexError(j)
        return lambda x: float(self.evaluate(np.reshape(x, (1, -1)))[0, j])

    def config(self):
        return {
            "type": self.kind,
            "n_rbf": self.n_rbf,
            "delta": self.delta,
            "seed": self.seed,
            "include_coords": self.include_coords,
            "include_const": self.include_const,
            "dim": self.dim,
        }

    def save(self, directory):
        directory = Path(directory)
        write_json(directory / "dictionary.json", self.config())
        write_csv(directory / "centers.csv", [f"c_{i + 1}" for i in range(self.dim)], self.centers)


class MonomialDictionary:
    """All monomials of total degree ``<= degree``, ordered by degree then
    lexicographically: ``1, x_1, ..., x_d, x_1^2, x_1 x_2, ...``."""

    kind = "monomial"

    def __init__(self, dim, degree):
        if degree < 0 or dim < 1:
            raise InvalidInputError("monomial dictionary needs dim >= 1 and degree >= 0")
        self.dim = int(dim)
        self.degree = int(degree)
        exps = []
        for p in range(self.degree + 1):
            for combo in itertools.combinations_with_replacement(range(self.dim), p):
                e = np.zeros(self.dim, dtype=int)
                for i in combo:
                    e[i] += 1
                exps.append(e)
        self.exponents = np.array(exps, dtype=int)
        self.seed = None

    @property
    def size(self):
        return len(self.exponents)

    def __len__(self):
        return self.size

    @property
    def coordinate_columns(self):
        if self.degree < 1:
            return None
        return np.arange(1, 1 + self.dim)

    @property
    def constant_column(self):
        return 0

    @property
    def names(self):
        out = []
        for e in self.exponents:
            terms = [f"x_{i + 1}^{k}" if k > 1 else f"x_{i + 1}" for i, k in enumerate(e) if k]
            out.append("*".join(terms) or "1")
        return out

    def evaluate(self, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.dim:
            raise InvalidInputError(f"points have dim {pts.shape[1]}, dictionary expects {self.dim}")
        return np.prod(pts[:, None, :] ** self.exponents[None, :, :], axis=2)

    def observable(self, j):
        e = self.exponents[j]
        return lambda x: float(np.prod(np.asarray(x, float) ** e))

    def config(self):
        return {"type": self.kind, "dim": self.dim, "degree": self.degree}

    def save(self, directory):
        write_json(Path(directory) / "dictionary.json", self.config())


def build_dictionary(data, n_rbf, delta=DEFAULT_DELTA, seed=0,
                     include_coords=True, include_const=True, n_init=1):
    """RBF dictionary whose centers are the k-means centers of ``data``."""
    data = np.atleast_2d(np.asarray(data, dtype=float))
    if n_rbf > 0:
        centers, _ = kmeans(data, n_rbf, seed, n_init=n_init)
    else:
        centers = np.empty((0, data.shape[1]))
    return Dictionary(centers, delta, include_coords, include_const, dim=data.shape[1], seed=seed)


def evaluate_matrix(d, points):
    return d.evaluate(points)


def load_dictionary(directory):
    directory = Path(directory)
    cfg = read_json(directory / "dictionary.json")
    if cfg["type"] == "monomial":
        return MonomialDictionary(cfg["dim"], cfg["degree"])
    _, centers = read_csv(directory / "centers.csv")
    return Dictionary(
        centers,
        cfg["delta"],
        cfg["include_coords"],
        cfg["include_const"],
        dim=cfg["dim"],
        seed=cfg.get("seed"),
    )
