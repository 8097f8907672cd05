"""Command line experiment runner.

Usage::

    koopkit run CONFIG.json [--out DIR] [--seed N] [--fit-mode standard|paper]
    koopkit EXPERIMENT [--set KEY=VALUE ...] [--out DIR] [--seed N] [--fit-mode MODE]

Every run writes its CSV artifacts, the resolved ``config.json``, optional
figures and a ``manifest.json`` with checksums, seeds, metrics and timings.
The exit status is 0 when all embedded checks pass, 1 when a check fails,
2 for configuration errors and 3 when the pipeline itself fails.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from .errors import ConfigError, KoopkitError

SCHEMA_VERSION = 1
TOP_LEVEL_KEYS = {"schema_version", "experiment", "seed", "fit_mode", "params"}
FIT_MODES = ("standard", "paper")

EXIT_OK, EXIT_CHECKS, EXIT_CONFIG, EXIT_PIPELINE = 0, 1, 2, 3

log = logging.getLogger("koopkit")


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return raw


def resolve_config(raw, seed=None, fit_mode=None):
    """Validate a raw config dict and return it with every default filled in."""
    from .experiments import validate_params

    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(raw) - TOP_LEVEL_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    if "experiment" not in raw:
        raise ConfigError("config is missing 'experiment'")
    cfg_seed = raw.get("seed", 0) if seed is None else seed
    if isinstance(cfg_seed, bool) or not isinstance(cfg_seed, int) or cfg_seed < 0:
        raise ConfigError("seed must be a nonnegative integer")
    mode = fit_mode or raw.get("fit_mode", "standard")
    if mode not in FIT_MODES:
        raise ConfigError(f"fit_mode must be one of {FIT_MODES}")
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("params must be an object")
    return {
        "schema_version": SCHEMA_VERSION,
        "experiment": raw["experiment"],
        "seed": cfg_seed,
        "fit_mode": mode,
        "params": validate_params(raw["experiment"], params),
    }


def parse_override(text):
    """``key=value`` with ``value`` parsed as JSON when possible."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not of the form KEY=VALUE")
    key, value = text.split("=", 1)
    try:
        return key.strip(), json.loads(value)
    except json.JSONDecodeError:
        return key.strip(), value


def run_experiment(cfg, out_dir, plots=True):
    """Execute a resolved config; returns ``(manifest, outcome)``."""
    from . import experiments
    from .io import build_manifest, thread_cap, write_json

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_json(out_dir / "config.json", cfg)
    cap = thread_cap()
    t0 = time.perf_counter()
    if cap is not None:
        from threadpoolctl import threadpool_limits

        with threadpool_limits(limits=cap):
            outcome = experiments.run(cfg["experiment"], cfg["params"], cfg["seed"], cfg["fit_mode"], out_dir)
    else:
        outcome = experiments.run(cfg["experiment"], cfg["params"], cfg["seed"], cfg["fit_mode"], out_dir)
    t1 = time.perf_counter()
    timings = {"pipeline_s": t1 - t0}
    if plots:
        from . import plotting

        plotting.render(cfg["experiment"], out_dir)
        timings["plots_s"] = time.perf_counter() - t1
    timings["total_s"] = time.perf_counter() - t0
    seeds = dict(outcome.seeds)
    seeds["master"] = cfg["seed"]
    manifest = build_manifest(
        out_dir,
        cfg["experiment"],
        seeds,
        outcome.metrics,
        timings,
        extra={
            "fit_mode": cfg["fit_mode"],
            "checks": outcome.checks,
            "passed": all(outcome.checks.values()),
            "schema_version": cfg["schema_version"],
            "threads": cap,
        },
    )
    write_json(out_dir / "manifest.json", manifest)
    return manifest, outcome


def build_parser():
    from .experiments import EXPERIMENTS

    parser = argparse.ArgumentParser(prog="koopkit", description="Koopman operator experiments on algorithms.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", type=Path, help="output directory (default runs/<experiment>)")
        p.add_argument("--seed", type=int, help="master seed, overrides the config")
        p.add_argument("--fit-mode", choices=FIT_MODES, help="EDMD normal equations variant")
        p.add_argument("--no-plots", action="store_true", help="skip rendering figures")

    run_p = sub.add_parser("run", help="run an experiment from a JSON config")
    run_p.add_argument("config", type=Path)
    common(run_p)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a parameter (VALUE parsed as JSON)")
        p.add_argument("--print-config", action="store_true", help="print the resolved config and exit")
        common(p)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            raw = load_config(args.config)
        else:
            raw = {"experiment": args.command, "params": dict(parse_override(s) for s in args.set)}
        cfg = resolve_config(raw, seed=args.seed, fit_mode=args.fit_mode)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if getattr(args, "print_config", False):
        print(json.dumps(cfg, indent=2, sort_keys=True))
        return EXIT_OK

    out = args.out or Path("runs") / cfg["experiment"]
    try:
        manifest, outcome = run_experiment(cfg, out, plots=not args.no_plots)
    except (KoopkitError, ValueError, FloatingPointError, MemoryError) as exc:
        print(f"{cfg['experiment']} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PIPELINE

    for name, ok in outcome.checks.items():
        print(f"{'PASS' if ok else 'FAIL'} {cfg['experiment']}: {name}")
    print(f"wrote {len(manifest['files'])} files to {out} in {manifest['timings']['total_s']:.1f} s")
    return EXIT_OK if manifest["passed"] else EXIT_CHECKS


if __name__ == "__main__":
    sys.exit(main())
