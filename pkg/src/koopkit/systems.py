"""Numerical algorithms written as discrete dynamical systems.

Each system maps a state vector to its successor with ``step``; ``step_many``
does the same for a stack of states (rows). Potentials expose value and
analytic gradient, and accept either a single point or an ``(n, d)`` batch.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, SingularityError

# ---------------------------------------------------------------- potentials


class Potential:
    """Smooth objective ``f: R^dim -> R`` with an analytic gradient."""

    name = "potential"
    dim = None

    def value(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError

    def hessian(self, x, eps=1e-5):
        """Hessian at a single point; central differences of the gradient
        unless a subclass provides a closed form."""
        x = np.asarray(x, dtype=float)
        d = x.size
        h = np.empty((d, d))
        for j in range(d):
            e = np.zeros(d)
            e[j] = eps
            h[:, j] = (self.gradient(x + e) - self.gradient(x - e)) / (2 * eps)
        return 0.5 * (h + h.T)

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise InvalidInputError(f"{self.name} expects dim {self.dim}, got {x.shape[-1]}")
        return x

    def config(self):
        return {"name": self.name, "dim": self.dim}


@dataclass
class Quadratic(Potential):
    """``f(x) = 0.5 * sum(curvature_i * x_i**2)``."""

    curvature: tuple = (1.0,)
    name: str = "quadratic"

    def __post_init__(self):
        self.curvature = tuple(float(c) for c in self.curvature)
        self.dim = len(self.curvature)
        self._c = np.array(self.curvature)

    def value(self, x):
        x = self._check(x)
        return 0.5 * np.sum(self._c * x**2, axis=-1)

    def gradient(self, x):
        return self._c * self._check(x)

    def hessian(self, x, eps=None):
        return np.diag(self._c)

    def config(self):
        return {"name": self.name, "curvature": list(self.curvature)}


class Himmelblau(Potential):
    """``(x1^2 + x2 - 11)^2 + (x1 + x2^2 - 7)^2``; four minima, one maximum."""

    name = "himmelblau"
    dim = 2
    minima = np.array(
        [
            [3.0, 2.0],
            [-2.805118086952745, 3.131312518250573],
            [-3.779310253377747, -3.283185991286170],
            [3.584428340330492, -1.848126526964404],
        ]
    )

    def value(self, x):
        x = self._check(x)
        x1, x2 = x[..., 0], x[..., 1]
        return (x1**2 + x2 - 11) ** 2 + (x1 + x2**2 - 7) ** 2

    def gradient(self, x):
        x = self._check(x)
        x1, x2 = x[..., 0], x[..., 1]
        p = x1**2 + x2 - 11
        q = x1 + x2**2 - 7
        return np.stack([4 * x1 * p + 2 * q, 2 * p + 4 * x2 * q], axis=-1)

    def hessian(self, x, eps=None):
        x1, x2 = np.asarray(x, dtype=float)
        h11 = 12 * x1**2 + 4 * x2 - 42
        h22 = 12 * x2**2 + 4 * x1 - 26
        h12 = 4 * (x1 + x2)
        return np.array([[h11, h12], [h12, h22]])


class DoubleWellQuartic(Potential):
    """``x1^4 - x1^2 + x1/4 + x2^2``: two minima separated by a saddle."""

    name = "quartic"
    dim = 2

    def value(self, x):
        x = self._check(x)
        x1, x2 = x[..., 0], x[..., 1]
        return x1**4 - x1**2 + x1 / 4 + x2**2

    def gradient(self, x):
        x = self._check(x)
        x1, x2 = x[..., 0], x[..., 1]
        return np.stack([4 * x1**3 - 2 * x1 + 0.25, 2 * x2], axis=-1)

    def hessian(self, x, eps=None):
        x1 = float(np.asarray(x, dtype=float)[0])
        return np.array([[12 * x1**2 - 2, 0.0], [0.0, 2.0]])

    @staticmethod
    def critical_x1():
        """Sorted x1 coordinates of the critical points: (left min, saddle, right min)."""
        return np.sort(np.roots([4.0, 0.0, -2.0, 0.25]).real)


MB_A = np.array([-200.0, -100.0, -170.0, 15.0])
MB_a = np.array([-1.0, -1.0, -6.5, 0.7])
MB_b = np.array([0.0, 0.0, 11.0, 0.6])
MB_c = np.array([-10.0, -10.0, -6.5, 0.7])
MB_X0 = np.array([1.0, 0.0, -0.5, -1.0])
MB_Y0 = np.array([0.0, 0.5, 1.5, 1.0])


def mueller_brown(p):
    """Two-dimensional Mueller-Brown potential at ``p[..., :2]``."""
    p = np.asarray(p, dtype=float)
    dx = p[..., 0, None] - MB_X0
    dy = p[..., 1, None] - MB_Y0
    return np.sum(MB_A * np.exp(MB_a * dx**2 + MB_b * dx * dy + MB_c * dy**2), axis=-1)


def mueller_brown_gradient(p):
    p = np.asarray(p, dtype=float)
    dx = p[..., 0, None] - MB_X0
    dy = p[..., 1, None] - MB_Y0
    e = MB_A * np.exp(MB_a * dx**2 + MB_b * dx * dy + MB_c * dy**2)
    gx = np.sum(e * (2 * MB_a * dx + MB_b * dy), axis=-1)
    gy = np.sum(e * (MB_b * dx + 2 * MB_c * dy), axis=-1)
    return np.stack([gx, gy], axis=-1)


def random_orthogonal(dim, seed):
    """Seeded Haar-distributed orthogonal matrix (QR of a Gaussian matrix)."""
    g = np.random.default_rng(seed).standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    return q * np.sign(np.diag(r))


class EmbeddedMuellerBrown(Potential):
    """Mueller-Brown landscape on a random 2-plane of ``R^dim``.

    With ``z = U x`` the cost is ``V(z_0, z_1) + w * sum_{i>=2} z_i^2``: the
    landscape lives on the first two rotated coordinates and every other
    rotated direction is a quadratic well of weight ``w``.
    """

    name = "mueller-brown"

    def __init__(self, dim=100, seed=0, transverse_weight=1.0):
        if dim < 2:
            raise InvalidInputError("embedding dimension must be at least 2")
        self.dim = int(dim)
        self.seed = int(seed)
        self.transverse_weight = float(transverse_weight)
        self.U = random_orthogonal(self.dim, self.seed)

    def value(self, x):
        z = self._check(x) @ self.U.T
        return mueller_brown(z[..., :2]) + self.transverse_weight * np.sum(z[..., 2:] ** 2, axis=-1)

    def gradient(self, x):
        z = self._check(x) @ self.U.T
        gz = np.empty_like(z)
        gz[..., :2] = mueller_brown_gradient(z[..., :2])
        gz[..., 2:] = 2 * self.transverse_weight * z[..., 2:]
        return gz @ self.U

    def config(self):
        return {
            "name": self.name,
            "dim": self.dim,
            "seed": self.seed,
            "transverse_weight": self.transverse_weight,
        }


POTENTIALS = {
    "quadratic": Quadratic,
    "himmelblau": Himmelblau,
    "quartic": DoubleWellQuartic,
    "mueller-brown": EmbeddedMuellerBrown,
}


def make_potential(cfg):
    cfg = dict(cfg)
    name = cfg.pop("name")
    try:
        cls = POTENTIALS[name]
    except KeyError:
        raise InvalidInputError(f"unknown potential {name!r}") from None
    if cls is not EmbeddedMuellerBrown:
        cfg.pop("dim", None)
    return cls(**cfg)


def potential_gradient(p, x):
    return p.gradient(x)


# ------------------------------------------------------------------- systems


class DiscreteSystem:
    """A deterministic map ``x_{n+1} = step(x_n)`` on ``R^state_dim``."""

    name = "system"
    state_dim = None
    step_size = float("nan")

    def step(self, x):
        raise NotImplementedError

    def step_many(self, xs):
        xs = np.asarray(xs, dtype=float)
        return np.array([self.step(x) for x in xs]).reshape(xs.shape)

    def iterate(self, x, n):
        """Trajectory ``[x_0, ..., x_n]`` as an ``(n+1, d)`` array."""
        out = [np.asarray(x, dtype=float)]
        for _ in range(n):
            out.append(self.step(out[-1]))
        return np.array(out)

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.state_dim:
            raise InvalidInputError(
                f"{self.name} expects state dim {self.state_dim}, got {x.shape[-1]}"
            )
        return x

    def config(self):
        return {"name": self.name, "step_size": self.step_size}


class GradientDescent(DiscreteSystem):
    name = "gradient-descent"

    def __init__(self, potential, step_size):
        self.potential = potential
        self.step_size = float(step_size)
        self.state_dim = potential.dim

    def step(self, x):
        x = self._check(x)
        return x - self.step_size * self.potential.gradient(x)

    def step_many(self, xs):
        return self.step(xs)

    def config(self):
        return {"name": self.name, "step_size": self.step_size, "potential": self.potential.config()}


class NewtonOptimization(DiscreteSystem):
    """``x - H(x)^{-1} grad f(x)``."""

    name = "newton-optimization"
    step_size = 1.0

    def __init__(self, potential):
        self.potential = potential
        self.state_dim = potential.dim

    def step(self, x):
        x = self._check(x)
        h = self.potential.hessian(x)
        try:
            if np.linalg.cond(h) > 1e14:
                raise np.linalg.LinAlgError("ill-conditioned Hessian")
            return x - np.linalg.solve(h, self.potential.gradient(x))
        except np.linalg.LinAlgError:
            raise SingularityError("singular Hessian", state=x) from None

    def config(self):
        return {"name": self.name, "potential": self.potential.config()}


class NewtonRootFinding(DiscreteSystem):
    """Newton-Raphson root finder for a complex polynomial.

    The complex state ``z`` is stored as the real pair ``(Re z, Im z)``.
    ``coeffs`` are highest degree first, as in :func:`numpy.polyval`.
    """

    name = "newton-root"
    step_size = 1.0
    state_dim = 2

    def __init__(self, coeffs):
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.dcoeffs = np.polyder(self.coeffs)

    def map_complex(self, z):
        d = np.polyval(self.dcoeffs, z)
        if d == 0:
            raise SingularityError("zero derivative", state=np.array([z.real, z.imag]))
        return z - np.polyval(self.coeffs, z) / d

    def step(self, x):
        x = self._check(x)
        z = self.map_complex(complex(x[0], x[1]))
        return np.array([z.real, z.imag])

    def config(self):
        return {
            "name": self.name,
            "coeffs": [[c.real, c.imag] for c in self.coeffs],
        }


class Nesterov(DiscreteSystem):
    """Nesterov's accelerated gradient on the augmented state ``(x, v, t)``.

    The two-line scheme ``x_{n+1} = y_n - s grad f(y_n)``,
    ``y_{n+1} = x_{n+1} + n/(n+3) (x_{n+1} - x_n)`` is carried as
    ``z_n = (x_n, (x_n - x_{n-1})/h, n h)``: velocity and counter are folded
    into the state so the map is autonomous. ``grad_step`` ``s`` defaults to
    ``h**2``, which makes one step advance the continuous-time limit by ``h``.
    """

    name = "nesterov"

    def __init__(self, potential, step_size, grad_step=None):
        self.potential = potential
        self.step_size = float(step_size)
        self.grad_step = self.step_size**2 if grad_step is None else float(grad_step)
        self.dim = potential.dim
        self.state_dim = 2 * potential.dim + 1

    def momentum(self, t):
        """Factor multiplying ``x_n - x_{n-1}`` in ``y_n`` (zero at n = 0)."""
        n = np.asarray(t, dtype=float) / self.step_size
        return np.where(n < 0.5, 0.0, (n - 1.0) / (n + 2.0))

    def split(self, z):
        z = self._check(z)
        d = self.dim
        return z[..., :d], z[..., d : 2 * d], z[..., 2 * d]

    def step(self, z):
        h = self.step_size
        x, v, t = self.split(z)
        x_prev = x - h * v
        y = x + self.momentum(t)[..., None] * (x - x_prev)
        x_new = y - self.grad_step * self.potential.gradient(y)
        v_new = (x_new - x) / h
        t_new = np.asarray(t + h)
        return np.concatenate([x_new, v_new, t_new[..., None]], axis=-1)

    def step_many(self, zs):
        return self.step(zs)

    def to_state(self, x, x_prev, n):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        x_prev = np.atleast_1d(np.asarray(x_prev, dtype=float))
        return np.concatenate([x, (x - x_prev) / self.step_size, [n * self.step_size]])

    def config(self):
        return {
            "name": self.name,
            "step_size": self.step_size,
            "grad_step": self.grad_step,
            "potential": self.potential.config(),
        }


class ForwardEuler(DiscreteSystem):
    """Forward Euler on ``dx/dt = -a x``: ``x -> (1 - a dt) x``."""

    name = "euler"
    state_dim = 1

    def __init__(self, a, step_size):
        self.a = float(a)
        self.step_size = float(step_size)

    def step(self, x):
        return (1.0 - self.a * self.step_size) * self._check(x)

    def step_many(self, xs):
        return self.step(xs)

    def config(self):
        return {"name": self.name, "a": self.a, "step_size": self.step_size}


class LinearMap(DiscreteSystem):
    """``x -> M x`` with optional fixed point ``x_star``."""

    name = "linear"

    def __init__(self, matrix, x_star=None, step_size=1.0):
        self.matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        self.state_dim = self.matrix.shape[0]
        self.x_star = np.zeros(self.state_dim) if x_star is None else np.asarray(x_star, float)
        self.step_size = float(step_size)

    def step(self, x):
        x = self._check(x)
        return (x - self.x_star) @ self.matrix.T + self.x_star

    def step_many(self, xs):
        return self.step(xs)

    def config(self):
        return {
            "name": self.name,
            "matrix": self.matrix.tolist(),
            "x_star": self.x_star.tolist(),
            "step_size": self.step_size,
        }


def step(system, x):
    return system.step(x)


# ------------------------------------------------------------------ sampling


@dataclass
class UniformBox:
    low: tuple
    high: tuple
    kind: str = field(default="uniform", init=False)

    def draw(self, rng, n):
        low = np.asarray(self.low, dtype=float)
        high = np.asarray(self.high, dtype=float)
        return rng.uniform(low, high, size=(n, low.size))

    def config(self):
        return {"kind": self.kind, "low": list(self.low), "high": list(self.high)}


@dataclass
class Gaussian:
    mean: tuple
    std: float = 1.0
    # Optional orthogonal matrix; draws become ``mean + std * g @ rotation``.
    # Same distribution, but rotated problems then see exactly rotated data.
    rotation: object = None
    kind: str = field(default="gaussian", init=False)

    def draw(self, rng, n):
        mean = np.asarray(self.mean, dtype=float)
        g = rng.standard_normal((n, mean.size))
        if self.rotation is not None:
            g = g @ np.asarray(self.rotation, dtype=float)
        return mean + self.std * g

    def config(self):
        return {"kind": self.kind, "mean": list(self.mean), "std": self.std}


def make_sampler(cfg):
    cfg = dict(cfg)
    kind = cfg.pop("kind")
    if kind == "uniform":
        return UniformBox(tuple(cfg["low"]), tuple(cfg["high"]))
    if kind == "gaussian":
        mean = cfg["mean"]
        if isinstance(mean, (int, float)):
            mean = (float(mean),) * int(cfg["dim"])
        return Gaussian(tuple(mean), float(cfg.get("std", 1.0)))
    raise InvalidInputError(f"unknown sampler kind {kind!r}")


@dataclass
class SnapshotPairSet:
    """Matched samples ``(x_i, y_i = step(x_i))``."""

    x: np.ndarray
    y: np.ndarray
    step_size: float
    system: str = "system"
    n_dropped: int = 0

    def __post_init__(self):
        self.x = np.atleast_2d(np.asarray(self.x, dtype=float))
        self.y = np.atleast_2d(np.asarray(self.y, dtype=float))
        if self.x.shape != self.y.shape or len(self.x) < 1:
            raise InvalidInputError(
                f"pair arrays must share a nonempty shape, got {self.x.shape} / {self.y.shape}"
            )

    @property
    def dim(self):
        return self.x.shape[1]

    def __len__(self):
        return len(self.x)

    def split(self, holdout=0.1):
        """(train, held-out) with the last ``holdout`` fraction held out, order kept."""
        n_test = int(round(holdout * len(self)))
        if n_test == 0 or n_test >= len(self):
            return self, None
        cut = len(self) - n_test
        train = SnapshotPairSet(self.x[:cut], self.y[:cut], self.step_size, self.system)
        test = SnapshotPairSet(self.x[cut:], self.y[cut:], self.step_size, self.system)
        return train, test

    def to_csv(self, path):
        from .io import format_number

        lines = ["dim,step_size,system", f"{self.dim},{format_number(self.step_size)},{self.system}"]
        for xi, yi in zip(self.x, self.y):
            lines.append(",".join(format_number(v) for v in np.concatenate([xi, yi])))
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path):
        from .errors import CSVFormatError

        with open(path, encoding="utf-8") as fh:
            head = fh.readline().strip()
            if head != "dim,step_size,system":
                raise CSVFormatError(f"line 1: unexpected header {head!r}")
            meta = fh.readline().strip().split(",", 2)
            if len(meta) != 3:
                raise CSVFormatError("line 2: expected dim,step_size,system")
            dim, step_size, system = int(meta[0]), float(meta[1]), meta[2]
            rows = []
            for lineno, line in enumerate(fh, start=3):
                line = line.strip()
                if not line:
                    continue
                fields = line.split(",")
                if len(fields) != 2 * dim:
                    raise CSVFormatError(f"line {lineno}: {len(fields)} fields, expected {2 * dim}")
                try:
                    rows.append([float(f) for f in fields])
                except ValueError:
                    raise CSVFormatError(f"line {lineno}: malformed numeral") from None
        arr = np.array(rows, dtype=float)
        return cls(arr[:, :dim], arr[:, dim:], step_size, system)


def _safe_steps(system, xs, n_steps):
    """Apply ``n_steps`` iterations to every row; rows that hit a singularity
    or leave the finite range are flagged in the returned mask."""
    ok = np.ones(len(xs), dtype=bool)
    out = np.array(xs, dtype=float)
    for _ in range(n_steps):
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                nxt = system.step_many(out)
        except SingularityError:
            nxt = np.empty_like(out)
            for i, x in enumerate(out):
                if not ok[i]:
                    nxt[i] = x
                    continue
                try:
                    nxt[i] = system.step(x)
                except SingularityError:
                    ok[i] = False
                    nxt[i] = x
        bad = ~np.all(np.isfinite(nxt), axis=1)
        ok &= ~bad
        nxt[bad] = out[bad]
        out = nxt
    return out, ok


def sample_pairs(system, sampler, n, burn_in=0, seed=0):
    """Draw ``n`` seeded initial states, burn them in, record one step.

    States whose iteration hits a singularity or overflows are dropped and
    counted in ``n_dropped``.
    """
    if n < 1:
        raise InvalidInputError("n must be at least 1")
    rng = np.random.default_rng(seed)
    x0 = sampler.draw(rng, n)
    if x0.shape[1] != system.state_dim:
        raise InvalidInputError(
            f"sampler dim {x0.shape[1]} does not match state dim {system.state_dim}"
        )
    x, ok1 = _safe_steps(system, x0, burn_in)
    y, ok2 = _safe_steps(system, x, 1)
    ok = ok1 & ok2
    if not ok.any():
        raise SingularityError("every sampled trajectory hit a singularity")
    return SnapshotPairSet(x[ok], y[ok], system.step_size, system.name, int((~ok).sum()))
