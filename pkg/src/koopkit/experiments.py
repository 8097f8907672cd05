"""End-to-end experiment pipelines behind the command line.

Each pipeline takes its parameter dict, a master seed, the EDMD fit mode
and an output directory. It writes its CSV artifacts and returns an
:class:`Outcome` with metrics, the seeds it used and named pass/fail checks.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis, newton, spectral
from .dictionary import MonomialDictionary, build_dictionary
from .edmd import fit, predict_many
from .errors import ConfigError
from .generator import generator_matrix, reconstruct_vector_field, write_field_csv
from .io import write_complex_csv, write_csv
from .systems import (
    DoubleWellQuartic,
    EmbeddedMuellerBrown,
    ForwardEuler,
    Gaussian,
    GradientDescent,
    Himmelblau,
    LinearMap,
    Nesterov,
    Quadratic,
    UniformBox,
    sample_pairs,
)

log = logging.getLogger(__name__)


@dataclass
class Outcome:
    metrics: dict = field(default_factory=dict)
    seeds: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    figures: list = field(default_factory=list)


DEFAULTS = {
    "euler-spectrum": {
        "a": 1.0,
        "a_dt": [0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 2.1, 2.5],
        "n_samples": 200,
        "degree": 3,
        "low": -1.0,
        "high": 1.0,
        "rel_tol": 1e-10,
    },
    "himmelblau": {
        "step_size": 0.001,
        "n_samples": 3000,
        "low": [-4.0, -4.0],
        "high": [4.0, 4.0],
        "n_rbf": 500,
        "delta": 1e-3,
        "rel_tol": 1e-14,
        "eig_tol": 0.02,
        "n_clusters": 4,
        "n_eval": 5000,
        "oracle_steps": 20000,
        "starts": [[1.0, 1.0], [-1.5, 1.5], [-1.5, -2.0], [1.5, -1.5]],
        "horizon": 2000,
        "minimum_tol": 0.2,
        "agreement": 0.95,
    },
    "nesterov-generator": {
        "step_size": 0.01,
        "curvature": 1.0,
        "low": [-1.0, -1.0, 0.1],
        "high": [1.0, 1.0, 1.0],
        "n_samples": 2000,
        "n_rbf": 125,
        "delta": 1e-3,
        "rel_tol": 1e-10,
        "interior": 0.8,
        "n_eval": 2000,
        "max_rel_error": 0.15,
        "tdot_tol": 0.1,
        "tdot_fraction": 0.9,
    },
    "muellerbrown-100d": {
        "dim": 100,
        "rotation_seed": 0,
        "transverse_weight": 1.0,
        "step_size": 2e-4,
        "n_samples": 2500,
        "burn_in": 5,
        "n_rbf": 625,
        "delta": 1e-3,
        "rel_tol": 1e-10,
        "n_test": 10,
        "horizon": 20,
        "max_error_fraction": 0.05,
    },
    "newton-eigen": {
        "c": [1.0, 0.0],
        "n_points": 100,
        "ks": [-2, -1, 1, 2],
        "grid_resolution": 201,
        "grid_half_width": 2.0,
        "rel_tol": 1e-9,
    },
    "newton-spectrum": {
        "z0": 0.5,
        "length": 100000,
        "order": 500,
        "grid": 2048,
        "atom_gap": 0.3,
        "atom_factor": 10.0,
        "flatness": 3.0,
        "chaos_z0": 0.5,
        "chaos_steps": 20,
        "chaos_tol": 1e-6,
        "hist_z0": 0.3,
        "hist_length": 1000000,
        "hist_bins": 50,
        "hist_range": 5.0,
        "hist_tol": 0.1,
    },
    "newton-fractal": {
        "w": [0.589, 0.605],
        "region": [-2.0, 2.0, -2.0, 2.0],
        "resolution": 800,
        "tol": 0.01,
        "max_iter": 100,
        "refine": True,
        "fraction_tol": 0.01,
        "quadratic_resolution": 200,
    },
    "window-scan": {
        "step_size": 0.01,
        "windows": {
            "A": [[-1.3, -0.5], [0.3, 0.5]],
            "B": [[-1.0, -0.5], [1.0, 0.5]],
            "C": [[-0.5, -0.5], [1.1, 0.5]],
            "D": [[0.3, -0.5], [1.3, 0.5]],
        },
        "n_samples": 2000,
        "n_rbf": 100,
        "delta": 1e-3,
        "margin": 0.02,
        "decompose_window": "B",
        "decompose_eig_tol": 0.01,
        "min_split_agreement": 0.9,
    },
}

EXPERIMENTS = tuple(DEFAULTS)


def validate_params(experiment, params):
    """Merge ``params`` into the defaults, rejecting unknown keys and bad types."""
    if experiment not in DEFAULTS:
        raise ConfigError(f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}")
    base = DEFAULTS[experiment]
    unknown = sorted(set(params) - set(base))
    if unknown:
        raise ConfigError(f"unknown parameter(s) for {experiment}: {', '.join(unknown)}")
    merged = {}
    for key, default in base.items():
        value = params.get(key, default)
        merged[key] = _coerce(experiment, key, value, default)
    _check_preconditions(experiment, merged)
    return merged


def _coerce(experiment, key, value, default):
    where = f"{experiment}.{key}"
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{where} must be a boolean")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where} must be an integer")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where} must be a number")
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{where} must be a string")
        return value
    if isinstance(default, list):
        if not isinstance(value, list):
            raise ConfigError(f"{where} must be a list")
        return value
    if isinstance(default, dict):
        if not isinstance(value, dict) or not value:
            raise ConfigError(f"{where} must be a nonempty object")
        return value
    return value


def _check_preconditions(experiment, p):
    n = p.get("n_samples")
    k = p.get("n_rbf")
    if n is not None and n < 1:
        raise ConfigError("n_samples must be positive")
    if k is not None and n is not None and k > n:
        raise ConfigError(f"n_rbf ({k}) exceeds the sample count ({n})")
    if "step_size" in p and p["step_size"] <= 0:
        raise ConfigError("step_size must be positive")
    if experiment == "newton-spectrum" and p["order"] >= p["length"]:
        raise ConfigError("order must be smaller than the trajectory length")
    if experiment == "window-scan" and p["decompose_window"] not in p["windows"]:
        raise ConfigError("decompose_window must name one of the windows")


# ------------------------------------------------------------- pipelines


def run_euler_spectrum(p, seed, fit_mode, out):
    rng_seed = seed
    d = MonomialDictionary(1, p["degree"])
    rows, lam_rows = [], []
    for adt in p["a_dt"]:
        dt = adt / p["a"]
        system = ForwardEuler(p["a"], dt)
        pairs = sample_pairs(system, UniformBox((p["low"],), (p["high"],)), p["n_samples"], seed=rng_seed)
        model = fit(pairs, d, fit_mode=fit_mode, rel_tol=p["rel_tol"])
        rows.append([adt, float(np.max(np.abs(model.eigenvalues)))])
        lam_rows += [[adt, v.real, v.imag] for v in model.eigenvalues]
    write_csv(out / "spectrum.csv", ["a_dt", "max_abs_lambda"], rows)
    write_csv(out / "eigenvalues.csv", ["a_dt", "re", "im"], lam_rows)
    stable = [m for a, m in rows if a <= 2.0 + 1e-12]
    unstable = [m for a, m in rows if a > 2.0 + 1e-12]
    checks = {
        "contraction_for_a_dt_le_2": bool(all(m <= 1 + 1e-6 for m in stable)),
        "expansion_for_a_dt_gt_2": bool(all(m > 1 for m in unstable)),
    }
    metrics = {"max_abs_lambda": {str(a): m for a, m in rows}}
    return Outcome(metrics, {"sampling": rng_seed}, checks)


def linear_map_eigenvalues(factor=0.5, degree=2, n_samples=200, seed=0, fit_mode="standard"):
    """EDMD spectrum of ``x -> factor x`` on monomials (used by tests and docs)."""
    system = LinearMap([[factor]])
    pairs = sample_pairs(system, UniformBox((-1.0,), (1.0,)), n_samples, seed=seed)
    return fit(pairs, MonomialDictionary(1, degree), fit_mode=fit_mode).eigenvalues


def run_himmelblau(p, seed, fit_mode, out):
    pot = Himmelblau()
    system = GradientDescent(pot, p["step_size"])
    seeds = {"sampling": seed, "dictionary": seed, "kmeans": seed, "evaluation": seed + 1}
    pairs = sample_pairs(system, UniformBox(tuple(p["low"]), tuple(p["high"])), p["n_samples"],
                         seed=seeds["sampling"])
    d = build_dictionary(pairs.x, p["n_rbf"], p["delta"], seed=seeds["dictionary"])
    model = fit(pairs, d, fit_mode=fit_mode, rel_tol=p["rel_tol"])
    model.save(out)

    near = analysis.near_one(model.eigenvalues, p["eig_tol"])
    rng = np.random.default_rng(seeds["evaluation"])
    pts = rng.uniform(p["low"], p["high"], (p["n_eval"], 2))
    dec = analysis.ergodic_decomposition(model, pts, p["eig_tol"], p["n_clusters"], seeds["kmeans"])
    dec.save(out / "decomposition.csv", pts)
    truth, _ = analysis.basin_oracle(system, pts, pot.minima, p["oracle_steps"])
    agreement = float(analysis.match_labels(dec.labels, truth))

    starts = np.asarray(p["starts"], dtype=float)
    traj = predict_many(model, starts, p["horizon"])
    true_end, _ = analysis.basin_oracle(system, starts, pot.minima, p["oracle_steps"])
    end_err = np.linalg.norm(traj[:, -1] - pot.minima[true_end], axis=1)
    rows = [[i, n, *traj[i, n]] for i in range(len(starts)) for n in range(traj.shape[1])]
    write_csv(out / "trajectories.csv", ["start", "step", "x1", "x2"], rows)

    metrics = {
        "n_near_one": int(len(near)),
        "near_one": [[v.real, v.imag] for v in model.eigenvalues[near]],
        "max_abs_lambda": float(np.max(np.abs(model.eigenvalues))),
        "agreement": agreement,
        "endpoint_error": end_err.tolist(),
        "residuals": model.residuals,
    }
    checks = {
        "four_eigenvalues_near_one": len(near) == 4,
        "decomposition_agreement": agreement >= p["agreement"],
        "trajectories_reach_minima": bool(np.all(end_err <= p["minimum_tol"])),
    }
    return Outcome(metrics, seeds, checks)


def nesterov_reference_field(z, gradient):
    """``(v, -3/t v - grad f(x), 1)`` for the state ``(x, v, t)``."""
    z = np.atleast_2d(z)
    d = (z.shape[1] - 1) // 2
    x, v, t = z[:, :d], z[:, d:2 * d], z[:, 2 * d:]
    return np.hstack([v, -3.0 / t * v - gradient(x), np.ones_like(t)])


def interior_box(low, high, factor):
    low, high = np.asarray(low, float), np.asarray(high, float)
    c = 0.5 * (low + high)
    return c + factor * (low - c), c + factor * (high - c)


def run_nesterov(p, seed, fit_mode, out):
    pot = Quadratic((p["curvature"],))
    system = Nesterov(pot, p["step_size"])
    seeds = {"sampling": seed, "dictionary": seed, "evaluation": seed + 100}
    pairs = sample_pairs(system, UniformBox(tuple(p["low"]), tuple(p["high"])), p["n_samples"],
                         seed=seeds["sampling"])
    d = build_dictionary(pairs.x, p["n_rbf"], p["delta"], seed=seeds["dictionary"])
    model = fit(pairs, d, fit_mode=fit_mode, rel_tol=p["rel_tol"])
    g = generator_matrix(model)
    g.save(out)
    write_complex_csv(out / "eigenvalues.csv", model.eigenvalues)

    lo, hi = interior_box(p["low"], p["high"], p["interior"])
    z = np.random.default_rng(seeds["evaluation"]).uniform(lo, hi, (p["n_eval"], len(lo)))
    field_ = reconstruct_vector_field(g, z)
    ref = nesterov_reference_field(z, pot.gradient)
    names = ["x", "v", "t"]
    write_field_csv(out / "vector_field.csv", z, field_, names)
    write_field_csv(out / "reference_field.csv", z, ref, names)
    rel = float(np.linalg.norm(field_ - ref) / np.linalg.norm(ref))
    tdot = float(np.mean(np.abs(field_[:, -1] - 1.0) < p["tdot_tol"]))
    metrics = {"relative_l2_error": rel, "tdot_fraction": tdot, "n_filtered": g.n_filtered,
               "residuals": model.residuals}
    checks = {
        "field_relative_error": rel < p["max_rel_error"],
        "tdot_close_to_one": tdot >= p["tdot_fraction"],
    }
    return Outcome(metrics, seeds, checks)


def run_mueller_brown(p, seed, fit_mode, out):
    pot = EmbeddedMuellerBrown(p["dim"], p["rotation_seed"], p["transverse_weight"])
    system = GradientDescent(pot, p["step_size"])
    sampler = Gaussian((0.0,) * p["dim"], 1.0, rotation=pot.U)
    seeds = {"sampling": seed, "dictionary": seed, "heldout": seed + 1,
             "rotation": p["rotation_seed"]}
    pairs = sample_pairs(system, sampler, p["n_samples"], p["burn_in"], seed=seeds["sampling"])
    d = build_dictionary(pairs.x, p["n_rbf"], p["delta"], seed=seeds["dictionary"])
    model = fit(pairs, d, fit_mode=fit_mode, rel_tol=p["rel_tol"])
    write_complex_csv(out / "eigenvalues.csv", model.eigenvalues)
    write_csv(out / "centers.csv", [f"c_{i + 1}" for i in range(p["dim"])], d.centers)

    test = sample_pairs(system, sampler, p["n_test"], p["burn_in"], seed=seeds["heldout"])
    starts = test.x
    pred = predict_many(model, starts, p["horizon"])
    true = np.stack([system.iterate(s, p["horizon"]) for s in starts])
    span = pairs.x.max(axis=0) - pairs.x.min(axis=0)
    err = np.abs(pred - true).mean(axis=(0, 1)) / span
    hold = np.abs(true - true[:, :1]).mean(axis=(0, 1)) / span
    rows = []
    for i in range(len(starts)):
        for n in range(p["horizon"] + 1):
            rows.append([i, n, *pred[i, n], *true[i, n]])
    header = (["start", "step"] + [f"pred_x{j + 1}" for j in range(p["dim"])]
              + [f"true_x{j + 1}" for j in range(p["dim"])])
    write_csv(out / "predictions.csv", header, rows)
    write_csv(out / "coordinate_error.csv", ["coordinate", "error_fraction", "hold_fraction"],
              [[j + 1, err[j], hold[j]] for j in range(p["dim"])])
    metrics = {
        "max_error_fraction": float(err.max()),
        "mean_error_fraction": float(err.mean()),
        "hold_error_fraction": float(hold.max()),
        "n_dropped": pairs.n_dropped,
        "n_pairs": len(pairs),
        "residuals": model.residuals,
    }
    checks = {"per_coordinate_error": bool(err.max() < p["max_error_fraction"])}
    return Outcome(metrics, seeds, checks)


def run_newton_eigen(p, seed, fit_mode, out):
    c = complex(*p["c"])
    rng = np.random.default_rng(seed)
    z = rng.uniform(-2, 2, p["n_points"]) + 1j * rng.uniform(-2, 2, p["n_points"])
    worst = 0.0
    for k in p["ks"]:
        lhs = newton.analytic_eigenfunction(c, k, newton.newton_map_array(c, z))
        rhs = newton.eigenvalue(k) * newton.analytic_eigenfunction(c, k, z)
        worst = max(worst, float(np.max(np.abs(lhs - rhs) / np.abs(rhs))))
    real = rng.uniform(-5, 5, p["n_points"])
    on_line = float(np.max(np.abs(newton.analytic_eigenfunction(c, 1, real))))
    psi_half = newton.analytic_eigenfunction(c, 1, 0.5j)

    h = p["grid_half_width"]
    xs = np.linspace(-h, h, p["grid_resolution"])
    X, Y = np.meshgrid(xs, xs)
    Z = X + 1j * Y
    with np.errstate(divide="ignore"):
        r = 1j * np.sqrt(c)
        psi = np.log(np.abs(Z + r) / np.abs(Z - r))
    ok = np.isfinite(psi)
    write_csv(out / "eigenfunction.csv", ["x", "y", "psi_1"],
              np.column_stack([X[ok], Y[ok], psi[ok]]))
    # Orbit from 0.5i, converging to the root +i.
    orbit = [0.5j]
    for _ in range(5):
        orbit.append(newton.newton_map(c, orbit[-1]))
    orbit = np.array(orbit)
    write_csv(out / "orbit.csv", ["n", "x", "y", "psi_1"],
              [[n, w.real, w.imag, newton.analytic_eigenfunction(c, 1, w)] for n, w in enumerate(orbit)])
    metrics = {"psi_1_half_i": psi_half, "max_eigen_rel_error": worst, "max_real_line": on_line}
    checks = {
        "psi_1_at_half_i": abs(psi_half - np.log(3.0)) < 1e-9,
        "eigenfunction_equation": worst < p["rel_tol"],
        "zero_on_real_line": on_line < 1e-12,
    }
    return Outcome(metrics, {"points": seed}, checks)


def run_newton_spectrum(p, seed, fit_mode, out):
    traj = newton.real_trajectory(p["z0"], p["length"])
    g = 1.0 + np.exp(2j * np.pi * traj)
    mom = spectral.estimate_moments(g, p["order"], observable="1+exp(2 pi i z)")
    dens = spectral.spectral_density(mom, spectral.default_grid(p["grid"]))
    spectral.write_outputs(out, mom, dens)
    th = dens.thetas
    off = (th >= p["atom_gap"]) & (th <= 2 * np.pi - p["atom_gap"])
    rho_off = dens.rho[off]
    atom_ratio = float(dens.rho[0] / np.median(rho_off))
    flat = float(rho_off.max() / rho_off.min())

    n = p["chaos_steps"]
    direct = newton.real_trajectory(p["chaos_z0"], n + 1)
    closed = np.array([newton.closed_form_real_iterate(p["chaos_z0"], k) for k in range(n + 1)])
    chaos_err = float(np.max(np.abs(closed - direct) / np.maximum(np.abs(direct), 1e-300)))
    write_csv(out / "closed_form.csv", ["n", "direct", "closed_form"],
              np.column_stack([np.arange(n + 1), direct, closed]))

    long = newton.real_trajectory(p["hist_z0"], p["hist_length"])
    r = p["hist_range"]
    counts, edges = np.histogram(long, bins=p["hist_bins"], range=(-r, r))
    width = edges[1] - edges[0]
    emp = counts / (len(long) * width)
    mid = 0.5 * (edges[:-1] + edges[1:])
    ref = newton.cauchy_density(mid)
    hist_dev = float(np.max(np.abs(emp / ref - 1.0)))
    write_csv(out / "invariant_density.csv", ["x", "empirical", "cauchy"],
              np.column_stack([mid, emp, ref]))
    metrics = {
        "m0": mom.moments[0].real,
        "atom_ratio": atom_ratio,
        "flatness": flat,
        "closed_form_rel_error": chaos_err,
        "histogram_max_rel_dev": hist_dev,
    }
    checks = {
        "atom_at_one": atom_ratio > p["atom_factor"],
        "continuous_part_flat": flat < p["flatness"],
        "closed_form_matches": chaos_err < p["chaos_tol"],
        "cauchy_histogram": hist_dev < p["hist_tol"],
    }
    return Outcome(metrics, {}, checks)


def run_newton_fractal(p, seed, fit_mode, out):
    w = complex(*p["w"])
    coeffs = newton.cubic_coefficients(w)
    grid = newton.fractal_iteration_grid(coeffs, tuple(p["region"]), p["resolution"], p["tol"], p["max_iter"])
    grid.to_csv(out / "fractal.csv")
    grid.to_pgm(out / "fractal.pgm", p["max_iter"])
    grid.to_ppm(out / "fractal.ppm", p["max_iter"])
    frac = grid.basin_fractions()
    metrics = {"roots": [[r.real, r.imag] for r in grid.roots], "basin_fractions": frac.tolist(),
               "non_converged": float(np.mean(grid.root_index < 0))}
    checks = {"three_basins": bool(np.all(frac > 0))}
    if p["refine"]:
        fine = newton.fractal_iteration_grid(coeffs, tuple(p["region"]), 2 * p["resolution"],
                                             p["tol"], p["max_iter"])
        ffrac = fine.basin_fractions()
        metrics["refined_basin_fractions"] = ffrac.tolist()
        checks["fractions_stable_under_refinement"] = bool(np.max(np.abs(ffrac - frac)) <= p["fraction_tol"])

    quad = newton.fractal_iteration_grid([1, 0, 1], tuple(p["region"]), p["quadratic_resolution"],
                                         p["tol"], p["max_iter"])
    upper = int(np.argmin(np.abs(quad.roots - 1j)))
    lower = int(np.argmin(np.abs(quad.roots + 1j)))
    _, Y = quad.points()
    expected = np.where(Y > 0, upper, lower)
    xs = np.linspace(-2, 2, 41)
    on_axis = newton.fractal_iteration_grid([1, 0, 1], points=xs + 0j, tol=p["tol"], max_iter=p["max_iter"])
    checks["quadratic_boundary_is_real_axis"] = bool(
        np.all(quad.root_index == expected) and np.all(on_axis.root_index < 0)
    )
    return Outcome(metrics, {}, checks)


def run_window_scan(p, seed, fit_mode, out):
    pot = DoubleWellQuartic()
    system = GradientDescent(pot, p["step_size"])
    windows = {k: tuple(v) for k, v in p["windows"].items()}
    res = analysis.window_spectrum_scan(
        system, windows, {"n_rbf": p["n_rbf"], "delta": p["delta"]}, p["n_samples"], seed=seed,
        fit_mode=fit_mode,
    )
    res.save(out)
    max_re = res.max_re()
    crit = pot.critical_x1()
    x_left, x_saddle, x_right = np.sort(crit)
    checks = {}
    for rec in res.records:
        lo, hi = rec.low[0], rec.high[0]
        has_left, has_right = lo <= x_left <= hi, lo <= x_right <= hi
        has_saddle = lo <= x_saddle <= hi
        excess = rec.max_re - 1.0
        if has_left and has_right:
            checks[f"window_{rec.name}_inside_disk"] = bool(excess <= p["margin"])
        elif has_saddle:
            checks[f"window_{rec.name}_outside_disk"] = bool(excess > 0)
        else:
            checks[f"window_{rec.name}_inside_disk"] = bool(excess <= p["margin"])

    # Two-cluster decomposition on the window holding both attractors.
    low, high = windows[p["decompose_window"]]
    pairs = sample_pairs(system, UniformBox(tuple(low), tuple(high)), p["n_samples"], seed=seed)
    d = build_dictionary(pairs.x, p["n_rbf"], p["delta"], seed=seed)
    model = fit(pairs, d, fit_mode=fit_mode)
    dec = analysis.ergodic_decomposition(model, pairs.x, p["decompose_eig_tol"], n_clusters=2, seed=seed)
    dec.save(out / "decomposition.csv", pairs.x)
    # Both attractors in the window: the split should follow the saddle's x1.
    split = float(analysis.match_labels(dec.labels, (pairs.x[:, 0] > x_saddle).astype(int)))
    checks["decomposition_split_at_saddle"] = split >= p["min_split_agreement"]
    metrics = {"max_re_lambda": max_re, "critical_x1": crit.tolist(), "split_agreement": split,
               "n_decompose_eigs": int(len(dec.indices))}
    return Outcome(metrics, {"sampling": seed, "dictionary": seed, "kmeans": seed}, checks)


PIPELINES = {
    "euler-spectrum": run_euler_spectrum,
    "himmelblau": run_himmelblau,
    "nesterov-generator": run_nesterov,
    "muellerbrown-100d": run_mueller_brown,
    "newton-eigen": run_newton_eigen,
    "newton-spectrum": run_newton_spectrum,
    "newton-fractal": run_newton_fractal,
    "window-scan": run_window_scan,
}


def run(experiment, params, seed, fit_mode, out):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    return PIPELINES[experiment](params, seed, fit_mode, out)
