"""Experiment configuration, pipelines, CSV reports and run manifests.

Config files are line oriented ``key = value`` with ``#`` comments; lists
are comma separated.  Every pipeline writes its CSVs under ``out_dir``
together with ``manifest.txt`` (key=value, including a sha256 per CSV).
CSV numbers use 15 significant digits so reruns are byte identical.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .arithfn import build_table, table_from_multspec
from .bilinear import TypeIIConfig, contrapositive_case, lcm_stats, typeII_sum
from .errors import ConfigError, DomainError, HypothesisError
from .gowers import gowers_norm, progression_sequence
from .phases import PolyPhase, best_denominator, equidist_defect
from .progressions import (FSpec, ProgressionSpec, bv_discrepancy, check_bv_hypothesis,
                           exceptional_scan, random_fspec, reduced_residues, residue_sums)
from .ramare import (MultSpec, RamareWindow, cauchy_schwarz_gap, coprime_window_count,
                     mertens_prediction, ramare_identity_scan, sigma_partition)
from .seeds import task_rng

PIPELINES = ("gowers", "bv-scan", "ramare-check", "type2", "equidist", "lcm-stats", "decay",
             "sieve", "accept")


# -- configuration ------------------------------------------------------------

@dataclass
class ExperimentConfig:
    pipeline: str = "gowers"
    function: str = "mobius"
    X: int = 1000
    Q: int | None = None
    q: int | None = None
    a: int | None = None
    all_residues: bool = False
    X_grid: tuple = ()
    Q_exponent: float = 0.4
    k_grid: tuple = (2,)
    epsilon: float = 0.5
    window: tuple = ()
    eta: float | None = None
    degree: int = 0
    restarts: int = 2
    seed: int = 0
    strategy: str = "auto"
    full_range: bool = False
    K: int = 10
    L: int = 200
    delta: float = 0.1
    exponent: float = 3.0
    fspec: str | None = None
    n_moduli: int = 10
    R: int | None = None
    m0_grid: tuple = (1, 2, 3, 4, 6, 8)
    phase: tuple = ()
    N: int = 10000
    m_max: int | None = None
    ell_max: int = 1000
    out_dir: str = "out"
    cache_dir: str | None = None
    threads: int = 1
    timings: bool = False

    def validate(self) -> None:
        if self.pipeline not in PIPELINES:
            raise ConfigError(f"unknown pipeline {self.pipeline!r}")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.X < 1:
            raise ConfigError("X must be positive")
        if self.window:
            if len(self.window) != 2:
                raise ConfigError("window needs two numbers Y,Z")
            Y, Z = self.window
            if not 2 <= Y < Z:
                raise HypothesisError(f"2 <= Y < Z violated (Y={Y}, Z={Z}): window hypothesis")
        p = self.pipeline
        if p == "bv-scan":
            if self.Q is None:
                raise ConfigError("bv-scan needs Q")
            check_bv_hypothesis(self.Q, self.X)
        if p == "type2" and self.fspec is None:
            if 10 * self.Q_or(1) ** 2 > self.L:
                raise HypothesisError(f"10Q^2 <= L violated (Q={self.Q_or(1)}, L={self.L}): "
                                      "hypothesis for type-II sums")
        if p == "gowers":
            for k in self.k_grid:
                if not 1 <= k <= 6:
                    raise ConfigError(f"k={k} outside 1..6")
            if self.Q is not None:
                check_bv_hypothesis(self.Q, self.X)
            q = self.q or 1
            if self.a is not None and math.gcd(self.a, q) != 1:
                raise HypothesisError(f"gcd(a, q) = 1 violated (q={q}, a={self.a}): "
                                      "only reduced residues are considered")
        if p == "lcm-stats":
            Q = self.Q_or(10)
            R = self.R if self.R is not None else Q * Q // 2
            if not Q <= R <= 4 * Q * Q:
                raise HypothesisError(f"Q <= R <= 4Q^2 violated (Q={Q}, R={R})")
        if p == "equidist":
            if not self.phase:
                raise ConfigError("equidist needs phase=alpha_1,...,alpha_s")
            if not 0 < self.delta < 0.5:
                raise ConfigError("delta must lie in (0, 1/2)")
        if p == "ramare-check" and not self.window:
            if self.eta is None:
                raise ConfigError("ramare-check needs window=Y,Z or eta")
            Y, Z = 1 / self.eta, (self.X / self.Q_or(1) ** 2) ** (1 / 20)
            if not 2 <= Y < Z:
                raise HypothesisError(f"2 <= Y < Z violated for Y = 1/eta = {Y:.6g}, "
                                      f"Z = (X/Q^2)^(1/20) = {Z:.6g}: window hypothesis")
        if p == "decay":
            if list(self.X_grid) != sorted(set(self.X_grid)) or not self.X_grid:
                raise ConfigError("X_grid must be a non-empty increasing list")

    def Q_or(self, default: int) -> int:
        return default if self.Q is None else self.Q

    def snapshot(self) -> dict:
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}


def _field_types() -> dict:
    return {f.name: f.default for f in dataclasses.fields(ExperimentConfig)}


def _parse_value(key: str, text: str, default):
    text = text.strip()
    if key in ("fspec", "cache_dir", "out_dir", "pipeline", "function", "strategy"):
        return text if text.lower() not in ("", "none") else None
    if text.lower() == "none":
        return None
    if isinstance(default, bool):
        if text.lower() in ("1", "true", "yes", "on"):
            return True
        if text.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(text)
    if isinstance(default, tuple):
        items = [t.strip() for t in text.split(",") if t.strip()]
        if key == "phase":
            return tuple(items)
        return tuple(float(t) if key == "window" else int(float(t)) for t in items)
    if key in ("epsilon", "delta", "exponent", "eta", "Q_exponent"):
        return float(text)
    return int(float(text)) if "e" in text.lower() else int(text)


def parse_config_text(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    cfg = dataclasses.replace(base) if base is not None else ExperimentConfig()
    defaults = _field_types()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in defaults:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            setattr(cfg, key, _parse_value(key, val, defaults[key]))
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {val!r}") from exc
    return cfg


def load_config(path, base: ExperimentConfig | None = None) -> ExperimentConfig:
    return parse_config_text(Path(path).read_text(), base)


# -- FSpec files --------------------------------------------------------------------

def parse_fspec(text: str) -> FSpec:
    """``Q = ..`` and ``X = ..`` header lines, then ``q a lo hi alpha_1 .. alpha_s``."""
    Q = X = None
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if "=" in line:
                key, val = (s.strip() for s in line.split("=", 1))
                if key == "Q":
                    Q = int(val)
                elif key == "X":
                    X = int(val)
                else:
                    raise ValueError(key)
                continue
            parts = line.split()
            q, a, lo, hi = (int(t) for t in parts[:4])
            alphas = tuple(Fraction(t) for t in parts[4:]) or (Fraction(0),)
            entries.append((ProgressionSpec(q, a, lo, hi), PolyPhase(alphas)))
        except (ValueError, DomainError) as exc:
            raise ConfigError(f"fspec line {lineno}: {exc}") from exc
    if Q is None or X is None:
        raise ConfigError("fspec needs Q = .. and X = .. lines")
    return FSpec(tuple(entries), Q, X)


def dump_fspec(spec: FSpec) -> str:
    lines = [f"Q = {spec.Q}", f"X = {spec.X}"]
    for p, phi in spec.entries:
        lines.append(" ".join([str(p.q), str(p.a), str(p.lo), str(p.hi)] + [str(c) for c in phi.coeffs]))
    return "\n".join(lines) + "\n"


# -- tables ---------------------------------------------------------------------------

def resolve_function(name: str, X: int, cache_dir=None):
    """mobius | liouville | unit | squarefree | random:<seed> | custom:<file>."""
    if name in ("mobius", "liouville", "unit"):
        return build_table(name, X, cache_dir)
    if name == "squarefree":
        return table_from_multspec(MultSpec.squarefree(), X)
    if name.startswith("random:"):
        return table_from_multspec(MultSpec.random(int(name.split(":", 1)[1])), X)
    if name.startswith("custom:"):
        path = name.split(":", 1)[1]
        if not Path(path).exists():
            raise ConfigError(f"custom function file {path!r} not found")
        return table_from_multspec(MultSpec.from_file(path), X)
    raise ConfigError(f"unknown function {name!r}")


# -- CSV ----------------------------------------------------------------------------

def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if x == 0:
            return "0"
        return f"{x:.15g}"
    if x is None:
        return ""
    return str(x)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass
class RunManifest:
    config: dict
    version: str = __version__
    seed: int = 0
    stages: dict = field(default_factory=dict)  # stage -> seconds
    digests: dict = field(default_factory=dict)  # file -> sha256
    failures: list = field(default_factory=list)

    def to_text(self) -> str:
        lines = [f"version={self.version}", f"seed={self.seed}"]
        for k, v in self.config.items():
            if isinstance(v, tuple):
                v = ",".join(str(x) for x in v)
            lines.append(f"config.{k}={'' if v is None else v}")
        for k, v in self.stages.items():
            lines.append(f"seconds.{k}={v:.3f}")
        for k, v in sorted(self.digests.items()):
            lines.append(f"digest.{k}={v}")
        lines.append(f"failures={len(self.failures)}")
        for i, msg in enumerate(self.failures):
            lines.append(f"failure.{i}={msg}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunManifest":
        m = cls(config={})
        for line in text.splitlines():
            if "=" not in line:
                continue
            k, v = line.split("=", 1)
            if k == "version":
                m.version = v
            elif k == "seed":
                m.seed = int(v)
            elif k.startswith("config."):
                m.config[k[7:]] = v
            elif k.startswith("seconds."):
                m.stages[k[8:]] = float(v)
            elif k.startswith("digest."):
                m.digests[k[7:]] = v
            elif k.startswith("failure."):
                m.failures.append(v)
        return m

    @property
    def ok(self) -> bool:
        return not self.failures


class _Run:
    """Collects CSV outputs, timings and failures for one pipeline execution."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.out = Path(cfg.out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.manifest = RunManifest(cfg.snapshot(), seed=cfg.seed)

    def write(self, name: str, header, rows) -> Path:
        text = csv_text(header, rows)
        path = self.out / name
        path.write_text(text)
        self.manifest.digests[name] = sha256_text(text)
        return path

    def stage(self, name: str, seconds: float):
        self.manifest.stages[name] = seconds

    def fail(self, msg: str):
        self.manifest.failures.append(msg)

    def seconds(self, t0: float):
        """Wall time column value, present only when timings are requested."""
        return time.perf_counter() - t0 if self.cfg.timings else None

    def finish(self) -> RunManifest:
        (self.out / "manifest.txt").write_text(self.manifest.to_text())
        return self.manifest


def _pmap(fn, items, threads: int) -> list:
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


# -- decay table --------------------------------------------------------------------

def q_rule(X: int, exponent: float = 0.4) -> int:
    """Q = floor(X^exponent), lowered if needed so that 10Q^2 <= X."""
    Q = int(math.floor(X ** exponent + 1e-9))
    return max(1, min(Q, math.isqrt(X // 10)))


def envelope(X: int, Q: int) -> float:
    return math.log(math.log(X)) / math.log(X / Q ** 2)


@dataclass(frozen=True)
class DecayRow:
    X: int
    Q: int
    k: int
    mean: float
    max: float
    exceptional_fraction: float
    bv_mean: float
    envelope: float


def progression_value(table, q: int, X: int, k: int, strategy: str = "auto") -> tuple[int, float]:
    """(a*, max over reduced a of the normalized statistic) for one modulus.

    k = 1: |average of f over n <= X, n = a (mod q)|, i.e. the U^1 norm of
    f(q . + a); k >= 2: the interval-normalized U^k norm.
    """
    if k == 1:
        S = residue_sums(table, q, X)
        cnt = np.bincount(np.arange(1, X + 1) % q, minlength=q)
        best_a, best = 0, -1.0
        for a in reduced_residues(q):
            v = abs(S[a]) / cnt[a] if cnt[a] else 0.0
            if v > best:
                best_a, best = a, v
        return best_a, float(best)
    best_a, best = 0, -1.0
    for a in reduced_residues(q):
        v = gowers_norm(progression_sequence(table, q, a, X), k, strategy).norm
        if v > best:
            best_a, best = a, v
    return best_a, float(best)


def decay_table(table, k: int, X_grid, exponent: float = 0.4, epsilon: float = 0.5,
                threads: int = 1, strategy: str = "auto") -> list[DecayRow]:
    """Per X: Q from q_rule, the statistic over q in [Q, 2Q) (mean, max, share
    of q with value >= epsilon), the mean BV discrepancy over X/Q and the
    envelope log log X / log(X/Q^2)."""
    rows = []
    for X in X_grid:
        Q = q_rule(X, exponent)
        check_bv_hypothesis(Q, X)
        qs = list(range(Q, 2 * Q))
        vals = _pmap(lambda q: progression_value(table, q, X, k, strategy)[1], qs, threads)
        bvs = _pmap(lambda q: bv_discrepancy(table, q, X), qs, threads)
        mean = math.fsum(vals) / len(vals)
        exc = sum(v >= epsilon for v in vals) / len(vals)
        bv = math.fsum(bvs) / len(bvs) / (X / Q)
        rows.append(DecayRow(X, Q, k, mean, max(vals), exc, bv, envelope(X, Q)))
    return rows


DECAY_HEADER = ["X", "Q", "k", "mean", "max", "exceptional_fraction", "bv_mean", "envelope"]


def decay_rows(rows):
    return [[r.X, r.Q, r.k, r.mean, r.max, r.exceptional_fraction, r.bv_mean, r.envelope] for r in rows]


# -- pipelines -----------------------------------------------------------------------

def _window(cfg: ExperimentConfig, X: int) -> RamareWindow:
    if cfg.window:
        return RamareWindow(*cfg.window)
    return RamareWindow.for_pipeline(cfg.eta, X, cfg.Q_or(1))


def _fspec_for(cfg: ExperimentConfig, X: int, Q: int, task: str) -> FSpec:
    if cfg.fspec:
        return parse_fspec(Path(cfg.fspec).read_text())
    return random_fspec(task_rng(cfg.seed, task), Q, X, cfg.n_moduli, max(1, cfg.degree))


def _gowers_tasks(cfg: ExperimentConfig) -> list[tuple[int, int]]:
    """(q, a) pairs: a dyadic window [Q, 2Q) with every reduced a, or one q
    with the given a (every reduced a when a is omitted or all_residues)."""
    if cfg.Q:
        return [(q, a) for q in range(cfg.Q, 2 * cfg.Q) for a in reduced_residues(q)]
    q = cfg.q or 1
    if cfg.a is not None and not cfg.all_residues:
        return [(q, cfg.a % q)]
    return [(q, a) for a in reduced_residues(q)]


def _pipe_gowers(run: _Run):
    cfg = run.cfg
    table = resolve_function(cfg.function, cfg.X, cfg.cache_dir)
    tasks = [(q, a, k) for q, a in _gowers_tasks(cfg) for k in cfg.k_grid]

    def one(t):
        q, a, k = t
        t0 = time.perf_counter()
        res = gowers_norm(progression_sequence(table, q, a, cfg.X), k, cfg.strategy)
        return [q, a, k, res.Y, res.norm, res.strategy, run.seconds(t0)]

    t0 = time.perf_counter()
    rows = _pmap(one, tasks, cfg.threads)
    run.stage("gowers", time.perf_counter() - t0)
    run.write("gowers.csv", ["q", "a", "k", "Y", "norm", "strategy", "seconds"], rows)


def _pipe_bv(run: _Run):
    cfg = run.cfg
    table = resolve_function(cfg.function, cfg.X, cfg.cache_dir)
    t0 = time.perf_counter()
    rep = exceptional_scan(table, cfg.Q, cfg.X, cfg.degree or None, cfg.epsilon,
                           restarts=cfg.restarts, seed=cfg.seed, threads=cfg.threads,
                           full_range=cfg.full_range)
    run.stage("bv-scan", time.perf_counter() - t0)
    s = cfg.degree
    header = ["q", "a"] + [f"alpha_{i}" for i in range(1, s + 1)] + ["value", "threshold", "exceptional"]
    rows = [[r.q, r.a] + list(r.alphas) + [r.value, r.threshold, r.exceptional] for r in rep.rows]
    run.write("bv_scan.csv", header, rows)
    run.write("bv_summary.csv", ["Q", "X", "epsilon", "moduli", "exceptional_count",
                                 "exceptional_fraction", "mean_value", "max_value"],
              [[rep.Q, rep.X, rep.epsilon, len(rep.rows), rep.exceptional_count,
                rep.exceptional_fraction, rep.mean_value, rep.max_value]])


def _pipe_ramare(run: _Run):
    cfg = run.cfg
    X = cfg.X
    w = _window(cfg, X)
    t0 = time.perf_counter()
    passed, failed, na = ramare_identity_scan(X, w)
    if failed:
        run.fail(f"identity failed for {failed} integers in window ({w.Y}, {w.Z})")
    run.write("ramare_identity.csv", ["X", "Y", "Z", "passed", "failed", "not_applicable"],
              [[X, w.Y, w.Z, passed, failed, na]])
    table = resolve_function(cfg.function, X, cfg.cache_dir)
    Q = cfg.Q_or(max(2, math.isqrt(X // 10) // 2))
    spec = _fspec_for(cfg, X, Q, "ramare-fspec")
    sp = sigma_partition(table, spec, w, X)
    if not sp.exact:
        run.fail(f"partition residual {sp.residual:.3g} above {sp.tolerance:.3g}")
    prow = [X, w.Y, w.Z, float(spec.T), sp.total.real, sp.total.imag, sp.part_musq_zero.real,
            sp.part_musq_zero.imag, sp.part_coprime.real, sp.part_coprime.imag,
            sp.part_sigma.real, sp.part_sigma.imag, sp.residual, sp.tolerance,
            sp.sigma_prime.real, sp.sigma_prime.imag, sp.dropped_musq.real, sp.dropped_musq.imag,
            sp.dropped_coprime.real, sp.dropped_coprime.imag]
    run.write("ramare_partition.csv",
              ["X", "Y", "Z", "T", "total_re", "total_im", "musq_zero_re", "musq_zero_im",
               "coprime_re", "coprime_im", "sigma_re", "sigma_im", "residual", "tolerance",
               "sigma_prime_re", "sigma_prime_im", "dropped_musq_re", "dropped_musq_im",
               "dropped_coprime_re", "dropped_coprime_im"], [prow])
    srows = [[P, v.real, v.imag] for P, v in sp.slices]
    if sp.boundary is not None:
        srows.append([sp.boundary[0], sp.boundary[1].real, sp.boundary[1].imag])
    cs = [cauchy_schwarz_gap(table, spec, w, r[0], X) for r in srows]
    for r, c in zip(srows, cs):
        r += [c.lhs, c.rhs, c.ok]
        if not c.ok:
            run.fail(f"Cauchy-Schwarz gap negative at P={r[0]}")
    run.write("ramare_slices.csv", ["P", "value_re", "value_im", "cs_lhs", "cs_rhs", "cs_ok"], srows)
    pspec = ProgressionSpec(1, 0, 1, X)
    cnt = coprime_window_count(pspec, w)
    run.write("ramare_sieve.csv", ["X", "Y", "Z", "count", "mertens_prediction", "log_ratio_bound"],
              [[X, w.Y, w.Z, cnt, mertens_prediction(pspec, w),
                X * math.log(w.Y) / math.log(w.Z)]])
    run.stage("ramare-check", time.perf_counter() - t0)


def _pipe_type2(run: _Run):
    cfg = run.cfg
    t0 = time.perf_counter()
    X = (2 * cfg.K - 1) * cfg.L
    spec = _fspec_for(cfg, X, cfg.Q_or(1), "type2-fspec")
    tcfg = TypeIIConfig(cfg.K, cfg.L, spec.Q, cfg.delta, spec)
    res = typeII_sum(tcfg, threads=cfg.threads)
    run.write("type2.csv", ["K", "L", "Q", "delta", "value", "normalized", "exceeds"],
              [[cfg.K, cfg.L, spec.Q, cfg.delta, res.value, res.normalized, res.exceeds]])
    r_max = int(round(cfg.delta ** (-cfg.exponent)))
    rows = []
    for p, phi in spec.entries:
        N = max(1, cfg.K * cfg.L // p.q)
        d = best_denominator(phi, N, r_max)
        rows.append([p.q, p.a, N, r_max, d.r, d.residual, d.residual <= r_max])
    run.write("type2_witness.csv", ["q", "a", "N", "r_max", "r", "residual", "structured"], rows)
    run.stage("type2", time.perf_counter() - t0)


def _pipe_equidist(run: _Run):
    cfg = run.cfg
    t0 = time.perf_counter()
    phi = PolyPhase(tuple(Fraction(a) for a in cfg.phase))
    rep = equidist_defect(phi, cfg.N, cfg.delta, cfg.m_max)
    r_max = int(round(cfg.delta ** (-cfg.exponent)))
    d = best_denominator(phi, cfg.N, r_max)
    start, step, length, m = rep.witness
    run.write("equidist.csv", ["N", "delta", "defect", "equidistributed", "start", "step", "length",
                               "frequency", "r_max", "r", "residual"],
              [[cfg.N, cfg.delta, rep.defect, rep.equidistributed, start, step, length, m,
                r_max, d.r, d.residual]])
    run.stage("equidist", time.perf_counter() - t0)


def _pipe_lcm(run: _Run):
    cfg = run.cfg
    Q = cfg.Q_or(10)
    R = cfg.R if cfg.R is not None else Q * Q // 2
    t0 = time.perf_counter()
    st = lcm_stats(Q, R, threads=cfg.threads)
    if not st.pointwise_ok():
        run.fail("m_q(r) <= sigma_D(q) violated")
    scale = R * math.log(Q) if Q > 1 else float(R)
    run.write("lcm_tail.csv", ["Q", "R", "m0", "tail", "tail_m0_over_RlogQ"],
              [[Q, R, m0, st.tail(m0), st.tail(m0) * m0 / scale] for m0 in cfg.m0_grid])
    run.write("lcm_hist.csv", ["m", "pairs"], sorted(st.histogram().items()))
    run.write("lcm_summary.csv", ["Q", "R", "D", "pairs", "pointwise_ok", "second_moment"],
              [[Q, R, st.D, st.size, st.pointwise_ok(), int(np.dot(st.sigma, st.sigma))]])
    run.stage("lcm-stats", time.perf_counter() - t0)


def _pipe_decay(run: _Run):
    cfg = run.cfg
    table = resolve_function(cfg.function, max(cfg.X_grid), cfg.cache_dir)
    t0 = time.perf_counter()
    rows = []
    for k in cfg.k_grid:
        rows += decay_table(table, k, cfg.X_grid, cfg.Q_exponent, cfg.epsilon, cfg.threads,
                            cfg.strategy)
    run.write("decay.csv", DECAY_HEADER, decay_rows(rows))
    run.stage("decay", time.perf_counter() - t0)


def _pipe_sieve(run: _Run):
    cfg = run.cfg
    rows = []
    for kind in cfg.function.split(","):
        t0 = time.perf_counter()
        table = resolve_function(kind.strip(), cfg.X, cfg.cache_dir)
        v = table.values[1:]
        rows.append([kind.strip(), cfg.X, int(np.count_nonzero(v)),
                     complex(np.sum(v)).real, run.seconds(t0)])
    run.write("sieve.csv", ["function", "X", "nonzero", "sum", "seconds"], rows)


def _pipe_accept(run: _Run):
    from .acceptance import accept_pipeline
    accept_pipeline(run)


_PIPES = {"gowers": _pipe_gowers, "bv-scan": _pipe_bv, "ramare-check": _pipe_ramare,
          "type2": _pipe_type2, "equidist": _pipe_equidist, "lcm-stats": _pipe_lcm,
          "decay": _pipe_decay, "sieve": _pipe_sieve, "accept": _pipe_accept}


def run(cfg: ExperimentConfig) -> RunManifest:
    """Validate ``cfg``, execute its pipeline and write CSVs plus manifest.txt."""
    cfg.validate()
    r = _Run(cfg)
    _PIPES[cfg.pipeline](r)
    return r.finish()
