import json
import subprocess
import sys

import pytest

from koopkit import __version__
from koopkit.cli import EXIT_CHECKS, EXIT_CONFIG, EXIT_OK, main, parse_override, resolve_config
from koopkit.errors import ConfigError
from koopkit.experiments import DEFAULTS, EXPERIMENTS
from koopkit.io import sha256sum, verify_manifest

FAST = "euler-spectrum"


def write_config(path, **kw):
    cfg = {"schema_version": 1, "experiment": FAST, "seed": 0, "params": {}}
    cfg.update(kw)
    path.write_text(json.dumps(cfg))
    return path


def tree(d):
    return {p.relative_to(d).as_posix(): sha256sum(p) for p in sorted(d.rglob("*"))
            if p.is_file() and p.name != "manifest.json"}


class TestConfig:
    def test_defaults_filled(self):
        cfg = resolve_config({"experiment": FAST})
        assert cfg["params"] == DEFAULTS[FAST]
        assert cfg["seed"] == 0 and cfg["fit_mode"] == "standard"

    def test_unknown_top_level(self):
        with pytest.raises(ConfigError, match="unknown"):
            resolve_config({"experiment": FAST, "sed": 1})

    def test_unknown_param(self):
        with pytest.raises(ConfigError):
            resolve_config({"experiment": FAST, "params": {"n_sample": 5}})

    def test_unknown_experiment(self):
        with pytest.raises(ConfigError):
            resolve_config({"experiment": "nope"})

    def test_schema_version(self):
        with pytest.raises(ConfigError):
            resolve_config({"experiment": FAST, "schema_version": 2})

    @pytest.mark.parametrize("seed", [-1, 1.5, "3", True])
    def test_bad_seed(self, seed):
        with pytest.raises(ConfigError):
            resolve_config({"experiment": FAST, "seed": seed})

    def test_bad_fit_mode(self):
        with pytest.raises(ConfigError):
            resolve_config({"experiment": FAST, "fit_mode": "fast"})

    def test_cli_overrides_win(self):
        cfg = resolve_config({"experiment": FAST, "seed": 3, "fit_mode": "standard"}, seed=9, fit_mode="paper")
        assert cfg["seed"] == 9 and cfg["fit_mode"] == "paper"

    def test_every_experiment_resolves(self):
        for name in EXPERIMENTS:
            assert resolve_config({"experiment": name})["experiment"] == name

    def test_parse_override(self):
        assert parse_override("n_samples=50") == ("n_samples", 50)
        assert parse_override("low=[-1, 0]") == ("low", [-1, 0])
        assert parse_override("name=B") == ("name", "B")
        with pytest.raises(ConfigError):
            parse_override("oops")


class TestMain:
    def test_unknown_key_exit_code(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "c.json", params={"bogus": 1})
        assert main(["run", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
        assert "bogus" in capsys.readouterr().err
        assert not (tmp_path / "o").exists()

    def test_invalid_json(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text("{not json")
        assert main(["run", str(p)]) == EXIT_CONFIG

    def test_missing_file(self, tmp_path):
        assert main(["run", str(tmp_path / "none.json")]) == EXIT_CONFIG

    def test_n_rbf_exceeds_samples(self, tmp_path):
        rc = main(["himmelblau", "--set", "n_rbf=600", "--set", "n_samples=500", "--out", str(tmp_path)])
        assert rc == EXIT_CONFIG

    def test_print_config(self, capsys):
        assert main([FAST, "--set", "n_samples=50", "--print-config"]) == EXIT_OK
        cfg = json.loads(capsys.readouterr().out)
        assert cfg["params"]["n_samples"] == 50

    def test_run_and_manifest(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "c.json", seed=4)
        out = tmp_path / "o"
        assert main(["run", str(cfg), "--out", str(out), "--fit-mode", "paper"]) in (EXIT_OK, EXIT_CHECKS)
        text = capsys.readouterr().out
        assert text.count(f"{FAST}:") >= 1
        m = json.loads((out / "manifest.json").read_text())
        for key in ("experiment", "version", "files", "seeds", "metrics", "timings", "fit_mode", "checks", "passed"):
            assert key in m
        assert m["version"] == __version__ and m["fit_mode"] == "paper"
        assert m["seeds"]["master"] == 4
        assert verify_manifest(out, m) == []
        paths = {f["path"] for f in m["files"]}
        assert {"config.json", "spectrum.csv"} <= paths
        assert any(p.startswith("figures/") for p in paths)
        saved = json.loads((out / "config.json").read_text())
        assert saved["seed"] == 4 and saved["fit_mode"] == "paper"

    def test_rerun_from_saved_config(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main([FAST, "--set", "n_samples=80", "--out", str(a)]) == EXIT_OK
        assert main(["run", str(a / "config.json"), "--out", str(b)]) == EXIT_OK
        assert tree(a) == tree(b)

    def test_bit_identical(self, tmp_path):
        cfg = write_config(tmp_path / "c.json")
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["run", str(cfg), "--out", str(a)]) == EXIT_OK
        assert main(["run", str(cfg), "--out", str(b)]) == EXIT_OK
        ta, tb = tree(a), tree(b)
        assert ta == tb and len(ta) >= 4

    def test_seed_changes_output(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        main([FAST, "--no-plots", "--out", str(a)])
        main([FAST, "--no-plots", "--seed", "1", "--out", str(b)])
        assert sha256sum(a / "eigenvalues.csv") != sha256sum(b / "eigenvalues.csv")

    def test_thread_cap_recorded(self, tmp_path, monkeypatch):
        monkeypatch.setenv("KOOPKIT_THREADS", "1")
        assert main([FAST, "--no-plots", "--out", str(tmp_path)]) == EXIT_OK
        assert json.loads((tmp_path / "manifest.json").read_text())["threads"] == 1

    def test_thread_cap_same_artifacts(self, tmp_path, monkeypatch):
        main([FAST, "--no-plots", "--out", str(tmp_path / "a")])
        monkeypatch.setenv("KOOPKIT_THREADS", "1")
        main([FAST, "--no-plots", "--out", str(tmp_path / "b")])
        assert tree(tmp_path / "a") == tree(tmp_path / "b")


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "koopkit.cli", "newton-eigen", "--no-plots", "--out", str(tmp_path)],
                       capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert "PASS newton-eigen" in r.stdout
