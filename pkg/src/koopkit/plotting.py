"""Figures rendered from the CSV artifacts of a run.

Only the files already on disk are read, so a figure can be regenerated
from any output directory. PNGs are written without timestamps or version
metadata so identical inputs give identical files.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .io import read_csv  # noqa: E402

PNG_META = {"Software": None}


def _save(fig, path):
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=100, metadata=PNG_META)
    plt.close(fig)


def _table(path):
    names, rows = read_csv(path)
    return {n: rows[:, i] for i, n in enumerate(names)}


def _unit_circle(ax):
    t = np.linspace(0, 2 * np.pi, 400)
    ax.plot(np.cos(t), np.sin(t), color="0.6", lw=0.8)
    ax.set_aspect("equal")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")


def plot_eigenvalues(path, out, title=""):
    t = _table(path)
    fig, ax = plt.subplots(figsize=(4, 4))
    _unit_circle(ax)
    ax.plot(t["re"], t["im"], ".", ms=3)
    ax.set_title(title)
    _save(fig, out)


def euler(d, figs):
    t = _table(d / "spectrum.csv")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(t["a_dt"], t["max_abs_lambda"], "o-")
    ax.axhline(1.0, color="0.5", ls="--")
    ax.set_xlabel("a dt")
    ax.set_ylabel("max |lambda|")
    _save(fig, figs / "spectrum.png")


def himmelblau(d, figs):
    plot_eigenvalues(d / "eigenvalues.csv", figs / "eigenvalues.png")
    dec = _table(d / "decomposition.csv")
    fig, ax = plt.subplots(figsize=(4.5, 4))
    ax.scatter(dec["x1"], dec["x2"], c=dec["label"], s=2, cmap="tab10")
    tr = _table(d / "trajectories.csv")
    for s in np.unique(tr["start"]):
        m = tr["start"] == s
        ax.plot(tr["x1"][m], tr["x2"][m], "k-", lw=1)
    ax.set_xlim(-4, 4)
    ax.set_ylim(-4, 4)
    ax.set_aspect("equal")
    _save(fig, figs / "decomposition.png")


def nesterov(d, figs):
    f = _table(d / "vector_field.csv")
    r = _table(d / "reference_field.csv")
    fig, axes = plt.subplots(1, 2, figsize=(8, 3.8), sharex=True, sharey=True)
    for ax, t, title in zip(axes, (f, r), ("fitted", "reference")):
        ax.quiver(t["x"], t["v"], t["v_x"], t["v_v"], t["t"], scale=40, width=0.003)
        ax.set_title(title)
        ax.set_xlabel("x")
    axes[0].set_ylabel("v")
    _save(fig, figs / "vector_field.png")


def mueller_brown(d, figs):
    plot_eigenvalues(d / "eigenvalues.csv", figs / "eigenvalues.png")
    names, rows = read_csv(d / "predictions.csv")
    dim = (len(names) - 2) // 2
    fig, axes = plt.subplots(1, 3, figsize=(10, 3))
    for ax, j in zip(axes, (0, 1, min(19, dim - 1))):
        for s in np.unique(rows[:, 0]):
            m = rows[:, 0] == s
            ax.plot(rows[m, 1], rows[m, 2 + j], "b.", ms=3)
            ax.plot(rows[m, 1], rows[m, 2 + dim + j], "--", color="tab:orange", lw=1)
        ax.set_title(f"x{j + 1}")
        ax.set_xlabel("step")
    _save(fig, figs / "predictions.png")


def newton_eigen(d, figs):
    t = _table(d / "eigenfunction.csv")
    fig, ax = plt.subplots(figsize=(4.5, 4))
    sc = ax.scatter(t["x"], t["y"], c=np.clip(t["psi_1"], -3, 3), s=1, cmap="RdBu")
    o = _table(d / "orbit.csv")
    ax.plot(o["x"], o["y"], "ko-", ms=3)
    fig.colorbar(sc, ax=ax)
    ax.set_aspect("equal")
    _save(fig, figs / "eigenfunction.png")


def newton_spectrum(d, figs):
    t = _table(d / "density.csv")
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
    axes[0].semilogy(t["theta"], np.maximum(t["rho"], 1e-6))
    axes[0].set_xlabel("theta")
    axes[0].set_ylabel("rho")
    h = _table(d / "invariant_density.csv")
    axes[1].bar(h["x"], h["empirical"], width=h["x"][1] - h["x"][0], alpha=0.6)
    axes[1].plot(h["x"], h["cauchy"], "r-")
    axes[1].set_xlabel("x")
    _save(fig, figs / "spectral_density.png")


def newton_fractal(d, figs):
    names, rows = read_csv(d / "fractal.csv")
    n = int(round(np.sqrt(len(rows))))
    it = rows[:, 2].reshape(n, n)
    fig, ax = plt.subplots(figsize=(5, 5))
    ext = (rows[:, 0].min(), rows[:, 0].max(), rows[:, 1].min(), rows[:, 1].max())
    im = ax.imshow(it, origin="lower", extent=ext, cmap="magma")
    fig.colorbar(im, ax=ax)
    _save(fig, figs / "fractal.png")


def window_scan(d, figs):
    t = _table(d / "window_scan.csv")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.bar(t["window_index"], t["max_re_lambda"] - 1.0)
    ax.axhline(0.0, color="0.4")
    ax.set_xticks(t["window_index"])
    ax.set_ylabel("max Re lambda - 1")
    _save(fig, figs / "window_scan.png")
    dec = _table(d / "decomposition.csv")
    fig, ax = plt.subplots(figsize=(4.5, 3))
    ax.scatter(dec["x1"], dec["x2"], c=dec["label"], s=2, cmap="coolwarm")
    _save(fig, figs / "decomposition.png")


RENDERERS = {
    "euler-spectrum": euler,
    "himmelblau": himmelblau,
    "nesterov-generator": nesterov,
    "muellerbrown-100d": mueller_brown,
    "newton-eigen": newton_eigen,
    "newton-spectrum": newton_spectrum,
    "newton-fractal": newton_fractal,
    "window-scan": window_scan,
}


def render(experiment, out_dir):
    d = Path(out_dir)
    RENDERERS[experiment](d, d / "figures")
