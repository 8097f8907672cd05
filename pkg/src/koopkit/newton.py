"""Newton-Raphson root finding on polynomials: closed-form Koopman
eigenfunctions for quadratics, the chaotic real-line dynamics, and basin
fractals for general polynomials."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DivergenceError, InvalidInputError, SingularityError
from .io import write_csv


def newton_map(c, z):
    """``N_c(z) = (z^2 - c) / (2 z)``, Newton's method for ``z^2 + c``."""
    z = complex(z)
    if z == 0:
        raise SingularityError("Newton map is singular at z = 0", state=z)
    return (z * z - c) / (2 * z)


def newton_map_array(c, z):
    """Vectorized :func:`newton_map`; zeros map to ``nan``."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (z * z - c) / (2 * z)
    return np.where(z == 0, np.nan + 0j, out)


def analytic_eigenfunction(c, k, z):
    """``psi_k(z) = (ln|(z + i sqrt c) / (z - i sqrt c)|) ** k``.

    An eigenfunction with eigenvalue ``2**k``: ``psi_k(N_c(z)) = 2**k psi_k(z)``,
    inherited from the Moebius conjugacy of ``N_c`` to ``w -> w**2``. Only a
    modulus is taken, so the branch of ``sqrt c`` does not matter.
    """
    r = 1j * np.sqrt(complex(c))
    z = np.asarray(z, dtype=complex)
    num, den = np.abs(z + r), np.abs(z - r)
    if np.any(num == 0) or np.any(den == 0):
        raise DivergenceError("eigenfunction diverges at the roots")
    with np.errstate(divide="ignore"):
        # k < 0 is infinite on the real line, where the logarithm vanishes.
        out = np.log(num / den) ** float(k)
    return float(out) if out.ndim == 0 else out


def eigenvalue(k):
    return 2.0**k


@dataclass
class QuadraticConjugacy:
    """``f(z) = a z^2 + b z + d`` brought to the normal form ``g_c(z) = z^2 + c``.

    With ``h(z) = a z + b/2`` and ``c = a d + b/2 - b^2/4`` one has
    ``h(f(z)) = g_c(h(z))`` for every ``z``.
    """

    a: complex
    b: complex
    d: complex

    def __post_init__(self):
        if self.a == 0:
            raise InvalidInputError("leading coefficient must be nonzero")

    @property
    def c(self):
        return self.a * self.d + self.b / 2 - self.b**2 / 4

    def f(self, z):
        return self.a * z * z + self.b * z + self.d

    def h(self, z):
        return self.a * z + self.b / 2

    def g(self, z):
        return z * z + self.c

    def h0(self, z):
        r = 1j * np.sqrt(complex(self.c))
        return (z + r) / (z - r)

    def residual(self, z):
        """``|h(f(z)) - g_c(h(z))|`` at the given points."""
        z = np.asarray(z, dtype=complex)
        return np.abs(self.h(self.f(z)) - self.g(self.h(z)))


def closed_form_real_iterate(z0, n):
    """``z(n) = -cot(c1 2^n)``, ``c1 = arctan(-1/z0)``, for ``c = 1``.

    The argument is reduced modulo ``pi`` by doubling the reduced angle at
    every step, which keeps it bounded for large ``n``.
    """
    if z0 == 0:
        raise SingularityError("z0 = 0 is a pole of the Newton map", state=z0)
    if n < 0:
        raise InvalidInputError("n must be nonnegative")
    theta = np.mod(np.arctan(-1.0 / z0), np.pi)
    for _ in range(int(n)):
        theta = np.mod(2.0 * theta, np.pi)
    if theta == 0.0:
        raise SingularityError("cotangent singular", state=theta)
    return -1.0 / np.tan(theta)


def closed_form_trajectory(z0, n):
    """Real trajectory ``[z(0), ..., z(n-1)]`` via the doubling-angle closed form."""
    if z0 == 0:
        raise SingularityError("z0 = 0 is a pole of the Newton map", state=z0)
    theta = np.empty(n)
    t = np.mod(np.arctan(-1.0 / z0), np.pi)
    for i in range(n):
        theta[i] = t
        t = np.mod(2.0 * t, np.pi)
    with np.errstate(divide="ignore"):
        return -1.0 / np.tan(theta)


def real_trajectory(z0, n, c=1.0):
    """Direct iteration of ``N_c`` on the real line, ``n`` states from ``z0``."""
    out = np.empty(n)
    z = float(z0)
    for i in range(n):
        out[i] = z
        if z == 0.0:
            raise SingularityError("trajectory hit the pole", state=z)
        z = (z * z - c) / (2 * z)
    return out


def cauchy_density(x):
    """Invariant density ``1 / (pi (1 + x^2))`` of the real-line Newton map."""
    return 1.0 / (np.pi * (1.0 + np.asarray(x) ** 2))


# ----------------------------------------------------------------- fractals


@dataclass
class FractalGrid:
    region: tuple
    resolution: int
    iterations: np.ndarray
    root_index: np.ndarray  # -1 when not converged
    roots: np.ndarray

    def points(self):
        xs, ys = pixel_centers(self.region, self.resolution)
        X, Y = np.meshgrid(xs, ys)
        return X, Y

    def basin_fractions(self):
        """Fraction of pixels attracted to each root."""
        total = self.root_index.size
        return np.array([(self.root_index == k).sum() / total for k in range(len(self.roots))])

    def to_csv(self, path):
        X, Y = self.points()
        rows = np.column_stack([X.ravel(), Y.ravel(), self.iterations.ravel(), self.root_index.ravel()])
        write_csv(path, ["x", "y", "iterations", "root_index"], rows.tolist())

    def to_pgm(self, path, max_iter=None):
        """Iteration counts as a binary 8-bit graymap (top row = largest imaginary part)."""
        top = max_iter or max(int(self.iterations.max()), 1)
        img = np.clip(255 - self.iterations * 255 // top, 0, 255).astype(np.uint8)[::-1]
        _write_pnm(path, b"P5", img)

    def to_ppm(self, path, max_iter=None):
        """Basins colored per root, shaded by iteration count."""
        palette = np.array([[230, 57, 70], [69, 123, 157], [42, 157, 143], [244, 162, 97],
                            [131, 56, 236], [255, 190, 11]], dtype=float)
        top = max_iter or max(int(self.iterations.max()), 1)
        shade = 1.0 - 0.7 * np.clip(self.iterations / top, 0, 1)
        img = np.zeros(self.iterations.shape + (3,))
        ok = self.root_index >= 0
        img[ok] = palette[self.root_index[ok] % len(palette)] * shade[ok][:, None]
        _write_pnm(path, b"P6", img.astype(np.uint8)[::-1])


def _write_pnm(path, magic, img):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    h, w = img.shape[:2]
    with open(path, "wb") as fh:
        fh.write(magic + b"\n%d %d\n255\n" % (w, h))
        fh.write(np.ascontiguousarray(img).tobytes())


def pixel_centers(region, resolution):
    x0, x1, y0, y1 = region
    n = int(resolution)
    xs = x0 + (np.arange(n) + 0.5) * (x1 - x0) / n
    ys = y0 + (np.arange(n) + 0.5) * (y1 - y0) / n
    return xs, ys


def fractal_iteration_grid(coeffs, region=(-2.0, 2.0, -2.0, 2.0), resolution=400,
                           tol=0.01, max_iter=100, points=None):
    """Newton iteration counts and limiting roots on a pixel grid.

    Parameters
    ----------
    coeffs : sequence of complex
        Polynomial coefficients, highest degree first (``numpy.polyval`` order).
    region : (xmin, xmax, ymin, ymax)
    resolution : int
        Pixels per side; pixel centers are sampled.
    tol, max_iter
        A pixel stops when ``|z_{n+1} - z_n| < tol`` or after ``max_iter`` steps.
    points : complex array, optional
        Evaluate these starts instead of the grid (region/resolution ignored
        except for bookkeeping).
    """
    if resolution < 1:
        raise InvalidInputError("resolution must be at least 1")
    p = np.asarray(coeffs, dtype=complex)
    dp = np.polyder(p)
    roots = np.roots(p)
    if points is None:
        xs, ys = pixel_centers(region, resolution)
        z = xs[None, :] + 1j * ys[:, None]
    else:
        z = np.asarray(points, dtype=complex)
    z = z.copy()
    iters = np.zeros(z.shape, dtype=int)
    active = np.ones(z.shape, dtype=bool)
    failed = np.zeros(z.shape, dtype=bool)
    # A start sitting on a root needs no step.
    active &= np.polyval(p, z) != 0
    for n in range(max_iter):
        if not active.any():
            break
        za = z[active]
        d = np.polyval(dp, za)
        with np.errstate(divide="ignore", invalid="ignore"):
            znew = za - np.polyval(p, za) / d
        bad = (d == 0) | ~np.isfinite(znew)
        step = np.abs(znew - za)
        idx = np.flatnonzero(active.ravel())
        zf, itf, af, ff = z.ravel(), iters.ravel(), active.ravel(), failed.ravel()
        zf[idx[~bad]] = znew[~bad]
        itf[idx] = n + 1
        ff[idx[bad]] = True
        af[idx[bad | (step < tol)]] = False
    dist = np.abs(z[..., None] - roots)
    root_index = np.argmin(dist, axis=-1)
    converged = ~active & ~failed & (np.min(dist, axis=-1) < max(tol, 1e-8) * 10)
    root_index = np.where(converged, root_index, -1)
    return FractalGrid(tuple(region), int(resolution), iters, root_index, roots)


CUBIC_W = 0.589 + 0.605j


def cubic_coefficients(w=CUBIC_W):
    """Coefficients of ``(z + w)(z - w)(z - 1)``."""
    return np.poly([-w, w, 1.0])
