import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from gowersap import harness
from gowersap.arithfn import sieve_mobius
from gowersap.cli import main
from gowersap.errors import ConfigError, HypothesisError
from gowersap.harness import (ExperimentConfig, RunManifest, csv_text, decay_table, dump_fspec,
                              envelope, fmt, parse_config_text, parse_fspec, q_rule,
                              resolve_function, run)
from gowersap.progressions import random_fspec


def cli(*args, out=None):
    argv = list(args) + (["--out-dir", str(out)] if out is not None else [])
    return main(argv)


# -- configuration -----------------------------------------------------------------

def test_parse_config_text():
    cfg = parse_config_text("""
        # comment
        pipeline = bv-scan
        function = liouville
        X = 1e4
        Q = 30
        k_grid = 2,3
        window = 3, 10.5
        full-range = yes
        epsilon = 0.25
        phase = 1/3, 0.5
    """)
    assert (cfg.pipeline, cfg.function, cfg.X, cfg.Q) == ("bv-scan", "liouville", 10000, 30)
    assert cfg.k_grid == (2, 3) and cfg.window == (3.0, 10.5)
    assert cfg.full_range is True and cfg.epsilon == 0.25 and cfg.phase == ("1/3", "0.5")


@pytest.mark.parametrize("text", ["X 100", "colour = red", "X = ten", "full_range = maybe"])
def test_parse_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


@pytest.mark.parametrize("kwargs,match", [
    (dict(pipeline="bv-scan", X=10**4, Q=40), "10Q\\^2 <= X"),
    (dict(pipeline="type2", Q=5, L=200), "10Q\\^2 <= L"),
    (dict(pipeline="ramare-check", window=(10, 5)), "2 <= Y < Z"),
    (dict(pipeline="ramare-check", X=10**4, Q=10, eta=0.5), "2 <= Y < Z"),
    (dict(pipeline="gowers", q=6, a=4), "gcd\\(a, q\\) = 1"),
    (dict(pipeline="lcm-stats", Q=10, R=5), "Q <= R <= 4Q\\^2"),
])
def test_hypothesis_gating(kwargs, match):
    with pytest.raises(HypothesisError, match=match):
        ExperimentConfig(**kwargs).validate()


def test_fspec_round_trip():
    spec = random_fspec(np.random.default_rng(4), 12, 5000, n_moduli=5, degree=2)
    again = parse_fspec(dump_fspec(spec))
    assert again == spec and again.T == spec.T
    with pytest.raises(ConfigError):
        parse_fspec("Q = 5\nX = 100\n6 2 0 50\n")
    with pytest.raises(ConfigError):
        parse_fspec("5 1 0 50 0.3\n")


def test_resolve_function(tmp_path):
    mu = resolve_function("mobius", 1000)
    assert mu.values[30] == -1
    sq = resolve_function("squarefree", 100)
    assert sq.values[12] == 0 and sq.values[15] == 1
    r1, r2 = resolve_function("random:7", 500), resolve_function("random:7", 500)
    assert np.array_equal(r1.values, r2.values)
    path = tmp_path / "lam.txt"
    path.write_text("completely_multiplicative\n* 1 -1\n")
    lam = resolve_function(f"custom:{path}", 1000)
    assert np.allclose(lam.values[1:], resolve_function("liouville", 1000).values[1:])
    with pytest.raises(ConfigError):
        resolve_function("custom:/nonexistent", 10)
    with pytest.raises(ConfigError):
        resolve_function("zeta", 10)


def test_cache_round_trip(tmp_path):
    a = resolve_function("mobius", 5000, tmp_path)
    assert any(tmp_path.iterdir())
    b = resolve_function("mobius", 5000, tmp_path)
    assert np.array_equal(a.values, b.values)


# -- formatting and manifests ---------------------------------------------------------------

def test_fmt():
    assert fmt(True) == "1" and fmt(3) == "3" and fmt(0.0) == "0" and fmt(None) == ""
    assert fmt(1 / 3) == "0.333333333333333"
    assert csv_text(["a", "b"], [[1, 0.5]]) == "a,b\n1,0.5\n"


def test_manifest_round_trip(tmp_path):
    cfg = ExperimentConfig(pipeline="sieve", function="unit", X=1000, out_dir=str(tmp_path))
    m = run(cfg)
    text = (tmp_path / "manifest.txt").read_text()
    back = RunManifest.from_text(text)
    assert back.digests == m.digests and back.seed == 0 and back.ok
    assert back.config["X"] == "1000"


# -- pipelines ------------------------------------------------------------------------------------

def test_minimal_config_deterministic(tmp_path):
    d1 = cli("sieve", "--function", "unit", "--X", "1000", out=tmp_path / "a")
    d2 = cli("sieve", "--function", "unit", "--X", "1000", out=tmp_path / "b")
    assert d1 == d2 == 0
    assert (tmp_path / "a" / "sieve.csv").read_bytes() == (tmp_path / "b" / "sieve.csv").read_bytes()


@pytest.mark.parametrize("args,files", [
    (["gowers", "--function", "mobius", "--X", "2000", "--q", "3", "--k", "2,3"], ["gowers.csv"]),
    (["gowers", "--X", "4000", "--Q", "20", "--k", "1,2"], ["gowers.csv"]),
    (["bv-scan", "--X", "10000", "--Q", "30", "--phase-degree", "1"], ["bv_scan.csv", "bv_summary.csv"]),
    (["ramare-check", "--X", "3000", "--window", "3,40", "--Q", "5"],
     ["ramare_identity.csv", "ramare_partition.csv", "ramare_slices.csv", "ramare_sieve.csv"]),
    (["type2", "--K", "6", "--L", "250", "--Q", "5"], ["type2.csv", "type2_witness.csv"]),
    (["equidist", "--phase", "1/5", "--N", "2000", "--delta", "0.1"], ["equidist.csv"]),
    (["lcm-stats", "--Q", "40", "--R", "800"], ["lcm_tail.csv", "lcm_hist.csv", "lcm_summary.csv"]),
    (["decay", "--function", "unit", "--X-grid", "1000,4000", "--k", "1"], ["decay.csv"]),
])
def test_pipelines_deterministic_across_threads(tmp_path, args, files):
    assert cli(*args, "--threads", "1", out=tmp_path / "t1") == 0
    assert cli(*args, "--threads", "3", out=tmp_path / "t3") == 0
    for name in files:
        a = (tmp_path / "t1" / name).read_bytes()
        assert a == (tmp_path / "t3" / name).read_bytes()
        assert len(a.splitlines()) >= 2
    m1 = RunManifest.from_text((tmp_path / "t1" / "manifest.txt").read_text())
    m3 = RunManifest.from_text((tmp_path / "t3" / "manifest.txt").read_text())
    assert m1.digests == m3.digests


def test_seconds_column_only_with_timings(tmp_path):
    cli("gowers", "--X", "1000", "--q", "2", out=tmp_path / "a")
    cli("gowers", "--X", "1000", "--q", "2", "--timings", out=tmp_path / "b")
    plain = (tmp_path / "a" / "gowers.csv").read_text().splitlines()[1]
    timed = (tmp_path / "b" / "gowers.csv").read_text().splitlines()[1]
    assert plain.endswith(",") and not timed.endswith(",")


def test_fspec_file_in_type2(tmp_path):
    spec = random_fspec(np.random.default_rng(0), 5, 19 * 250, n_moduli=3)
    path = tmp_path / "f.txt"
    path.write_text(dump_fspec(spec))
    assert cli("type2", "--K", "10", "--L", "250", "--fspec", str(path), out=tmp_path / "o") == 0


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("function = unit\nX = 500\n")
    assert cli("sieve", "--config", str(cfg), "--X", "800", out=tmp_path / "o") == 0
    row = (tmp_path / "o" / "sieve.csv").read_text().splitlines()[1].split(",")
    assert row[:3] == ["unit", "800", "800"]


def test_exit_codes(tmp_path, monkeypatch):
    assert cli("bv-scan", "--X", "10000", "--Q", "40", out=tmp_path) == 2
    assert cli("gowers", "--function", "nope", "--X", "100", out=tmp_path) == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = red\n")
    assert cli("sieve", "--config", str(bad), out=tmp_path) == 2
    monkeypatch.setattr(harness, "ramare_identity_scan", lambda X, w: (X - 1, 1, 0))
    assert cli("ramare-check", "--X", "2000", "--window", "3,10", out=tmp_path / "f") == 1
    m = RunManifest.from_text((tmp_path / "f" / "manifest.txt").read_text())
    assert not m.ok


def test_console_script(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "gowersap.cli", "lcm-stats", "--Q", "10", "--R", "100",
                           "--out-dir", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "lcm_summary.csv" in proc.stdout


# -- decay table ------------------------------------------------------------------------------

def test_q_rule():
    assert [q_rule(X) for X in (10**4, 10**5, 10**6)] == [31, 100, 251]
    for X in (10**3, 10**4, 10**6, 10**7):
        assert 10 * q_rule(X) ** 2 <= X


def test_decay_unit_rows(unit):
    for row in decay_table(unit, 1, [10**3, 10**4]):
        assert row.mean == pytest.approx(1) and row.max == pytest.approx(1)
        assert row.exceptional_fraction == 1


def test_envelope_value():
    Q = q_rule(10**6)
    assert envelope(10**6, Q) == pytest.approx(math.log(math.log(10**6)) / math.log(10**6 / Q ** 2), rel=1e-15)
    assert envelope(10**6, 251) == pytest.approx(0.94979, abs=1e-5)


def test_decay_matches_direct(mu):
    (row,) = decay_table(mu, 1, [10**4])
    vals = []
    for q in range(row.Q, 2 * row.Q):
        best = 0.0
        for a in range(1, q):
            if math.gcd(a, q) == 1:
                n = np.arange(a, 10**4 + 1, q)
                best = max(best, abs(mu.values[n].mean()))
        vals.append(best)
    assert row.mean == pytest.approx(np.mean(vals), rel=1e-12)
    assert row.max == pytest.approx(max(vals), rel=1e-12)
