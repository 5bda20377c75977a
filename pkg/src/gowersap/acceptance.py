"""Acceptance criteria and the deterministic ``accept`` pipeline.

Each ``criterion_N`` returns a CriterionResult; ``passed`` includes the
runtime budget.  Nothing here relaxes a tolerance: a criterion that cannot
be met reports FAIL together with the measured numbers.
"""

from __future__ import annotations

import math
import tempfile
import time
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from .arithfn import (sieve_liouville, sieve_mobius, sieve_spf, table_from_multspec,
                      trial_factorize)
from .bilinear import (TypeIIConfig, congruence_merge, contrapositive_case, lcm_stats,
                       single_phase_fspec, typeII_sum, typeII_sum_decomposed)
from .gowers import cyclic_gowers_norm, gowers_norm
from .phases import PolyPhase, best_denominator, equidist_defect, phase_values
from .progressions import eval_F, random_fspec, tabulate_F
from .ramare import (MultSpec, RamareWindow, cauchy_schwarz_gap, decompose, g_partial_sums,
                     ramare_identity_scan, sigma_partition, verify_convolution)
from .seeds import task_rng

GOLDEN = (math.sqrt(5) - 1) / 2
IDENTITY_WINDOWS = ((3, 10), (10, 100), (100, 1000))
HEAD_GRID = (10**2, 10**3, 10**4, 10**5, 10**6)
TAIL_M0 = (1, 2, 3, 4, 6, 8)


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float
    budget: float

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return (f"criterion {self.number} [{tag}] {self.title}: {self.detail} "
                f"({self.seconds:.1f}s of {self.budget:.0f}s)")


class _Checks:
    def __init__(self):
        self.items = []

    def add(self, name: str, ok: bool, info: str = ""):
        self.items.append((name, bool(ok), info))

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.items)

    def summary(self) -> str:
        parts = []
        for name, ok, info in self.items:
            s = name if ok else f"{name} FAILED"
            parts.append(f"{s} [{info}]" if info else s)
        return "; ".join(parts)


def _finish(n, title, checks, t0, budget):
    sec = time.perf_counter() - t0
    ok = checks.ok and sec <= budget
    detail = checks.summary()
    if sec > budget:
        detail += "; runtime over budget"
    return CriterionResult(n, title, ok, detail, sec, budget)


# -- shared building blocks (also used by the accept pipeline) -----------------

def fspec_cases(seed: int, X: int = 10**4, count: int = 10):
    """Randomized (f table, FSpec, window) configurations at scale X."""
    mu, lam = sieve_mobius(X), sieve_liouville(X)
    windows = [RamareWindow(10, 100), RamareWindow(3, 30), RamareWindow(5, 200)]
    out = []
    for i in range(count):
        rng = task_rng(seed, "fspec-case", i)
        Q = int(rng.integers(5, 31))
        spec = random_fspec(rng, Q, X, n_moduli=int(rng.integers(1, 11)),
                            degree=int(rng.integers(1, 3)))
        if i % 3 == 2:
            table = table_from_multspec(MultSpec.random(int(rng.integers(1 << 30))), X)
        else:
            table = mu if i % 3 == 0 else lam
        out.append((table, spec, windows[i % len(windows)]))
    return out


def partition_rows(seed: int, X: int = 10**4, count: int = 10):
    rows = []
    for i, (table, spec, w) in enumerate(fspec_cases(seed, X, count)):
        sp = sigma_partition(table, spec, w, X)
        Ps = [P for P, _ in sp.slices] + ([sp.boundary[0]] if sp.boundary else [])
        cs = [cauchy_schwarz_gap(table, spec, w, P, X) for P in Ps]
        rows.append((i, w.Y, w.Z, sp.residual, sp.tolerance, sp.exact,
                     sum(c.ok for c in cs), len(cs), abs(sp.sigma_mform - sp.part_sigma)))
    return rows


def convolution_errors(seed: int, X: int = 10**4, n_random: int = 50):
    spf = sieve_spf(X)
    specs = [MultSpec.mobius(), MultSpec.squarefree()]
    specs += [MultSpec.random(int(task_rng(seed, "multspec", i).integers(1 << 30)))
              for i in range(n_random)]
    K = max(1, int(math.log2(X)) + 1)
    out = []
    for f in specs:
        fp, g = decompose(f, K)
        err = verify_convolution(table_from_multspec(f, X, spf), table_from_multspec(fp, X, spf),
                                 g, X, spf)
        out.append((f.name, err))
    return out


def head_ratios():
    _, g = decompose(MultSpec.mobius(), 64)
    out = []
    for N in HEAD_GRID:
        h = g_partial_sums(g, N, want_tail=False).head
        out.append((N, h, h / (math.sqrt(N) * math.log(N) ** 2)))
    return out


def random_congruences(seed: int, count: int = 10**4, qmax: int = 60):
    rng = task_rng(seed, "congruences")
    out = []
    for _ in range(count):
        q, qp = (int(x) for x in rng.integers(1, qmax + 1, 2))
        k, kp = (int(x) for x in rng.integers(1, 200, 2))
        a, ap = int(rng.integers(0, q)), int(rng.integers(0, qp))
        out.append((k, kp, q, qp, a, ap))
    return out


def congruence_check(inst) -> bool:
    """Substitution when a class is returned; exhaustive search when none is."""
    k, kp, q, qp, a, ap = inst
    c = congruence_merge(k, kp, q, qp, a, ap)
    lcm = q * qp // math.gcd(q, qp)
    ell = np.arange(lcm)
    sols = ell[((k * ell - a) % q == 0) & ((kp * ell - ap) % qp == 0)]
    if c is None:
        return len(sols) == 0
    if (k * c.residue - a) % q or (kp * c.residue - ap) % qp:
        return False
    return bool(np.array_equal(sols, np.arange(c.residue % c.modulus, lcm, c.modulus)))


def brute_typeII(spec, K: int, L: int) -> float:
    """Quadruple loop: k, k', l and the progressions of F evaluated pointwise."""
    cache = {}

    def F(n):
        if n not in cache:
            cache[n] = eval_F(spec, n)
        return cache[n]

    total = []
    for k in range(K, 2 * K):
        for kp in range(K, 2 * K):
            s = 0j
            for ell in range(0, L + 1):
                s += F(k * ell) * F(kp * ell).conjugate()
            total.append(abs(s))
    return math.fsum(total)


def contrapositive_pair():
    major = contrapositive_case(PolyPhase((Fraction(1, 4) + Fraction(1, 10**7),)), 40, 2000, 2, 1, 0.04)
    minor = contrapositive_case(PolyPhase((0, Fraction(GOLDEN))), 40, 2000, 2, 1, 0.04)
    return major, minor


# -- criteria -------------------------------------------------------------------

def criterion_1(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    c = _Checks()
    for Y, Z in IDENTITY_WINDOWS:
        passed, failed, na = ramare_identity_scan(10**5, RamareWindow(Y, Z))
        c.add(f"identity ({Y},{Z})", failed == 0, f"{passed} exact, {na} n/a")
    rows = partition_rows(seed)
    worst = max(r[3] / r[4] for r in rows)
    c.add("partition residual", all(r[5] for r in rows), f"max residual/tol {worst:.2e}")
    c.add("Cauchy-Schwarz", all(r[6] == r[7] for r in rows), f"{sum(r[7] for r in rows)} slices")
    return _finish(1, "exact identities", c, t0, 60)


def criterion_2(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    c = _Checks()
    errs = convolution_errors(seed)
    c.add("f = f' * g", max(e for _, e in errs) <= 1e-10, f"max error {max(e for _, e in errs):.2e}")
    _, g = decompose(MultSpec.mobius(), 3)
    ps = [p for p in range(2, 101) if all(p % d for d in range(2, math.isqrt(p) + 1))]
    ok = all(g.value(p, 1) == 0 and g.value(p, 2) == -1 and g.value(p, 3) == 0 for p in ps)
    c.add("g(p), g(p^2), g(p^3) for mu", ok, f"{len(ps)} primes")
    hr = head_ratios()
    ratios = [r for _, _, r in hr]
    spread = max(ratios) / min(ratios)
    c.add("head ratio band <= 3", spread <= 3,
          "ratios " + ", ".join(f"{r:.4g}" for r in ratios) + f", spread {spread:.2f}")
    return _finish(2, "convolution", c, t0, 60)


def criterion_3(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    c = _Checks()
    rng = task_rng(seed, "gowers-acceptance")
    worst = 0.0
    for i in range(100):
        k = 1 + i % 4
        Y = int(rng.integers(1, 51))
        f = np.exp(2j * np.pi * rng.random(Y + 1)) * rng.random(Y + 1)
        a = gowers_norm(f, k, "naive").norm if k > 1 else gowers_norm(f, 1, "naive").norm
        b = gowers_norm(f, k, "recursive_fft").norm
        worst = max(worst, abs(a - b))
    c.add("naive vs recursive", worst <= 1e-9, f"max diff {worst:.1e}")
    f = np.exp(2j * np.pi * rng.random(256)) * rng.random(256)
    d = abs(gowers_norm(f, 2, "naive").norm - gowers_norm(f, 2, "recursive_fft").norm)
    c.add("FFT U^2 at Y=255", d <= 1e-9, f"diff {d:.1e}")
    worst = 0.0
    for i in range(50):
        k = 2 + i % 3
        Y = int(rng.integers(5, 40))
        f = np.exp(2j * np.pi * rng.random(Y + 1)) * rng.random(Y + 1)
        P = PolyPhase(tuple(Fraction(float(x)) for x in rng.random(k - 1)), Fraction(float(rng.random())))
        g = f * phase_values(P, np.arange(Y + 1))
        worst = max(worst, abs(gowers_norm(f, k).norm - gowers_norm(g, k).norm))
    c.add("phase invariance", worst <= 1e-9, f"max diff {worst:.1e}")
    worst = 0.0
    for _ in range(20):
        Y = int(rng.integers(0, 100))
        f = np.exp(2j * np.pi * rng.random(Y + 1)) * rng.random(Y + 1)
        worst = max(worst, abs(gowers_norm(f, 1).norm - abs(f.mean())))
    c.add("U^1 = |mean|", worst <= 1e-12, f"max diff {worst:.1e}")
    worst = 0.0
    for k in (2, 3):
        Y = 30
        f = np.exp(2j * np.pi * rng.random(Y + 1))
        base = gowers_norm(f, k).norm
        for N in (2 * Y + 1, 2 * Y + 7, 3 * Y, 2 ** k * (Y + 1) + 5):
            worst = max(worst, abs(gowers_norm(f, k, embed_size=N).norm - base))
    c.add("embedding independence", worst <= 1e-12, f"max diff {worst:.1e}")
    return _finish(3, "Gowers norms", c, t0, 300)


def trial_division_tables(X: int):
    """mu and lambda by vectorized trial division over primes up to sqrt(X)."""
    small = [p for p in range(2, math.isqrt(X) + 1) if len(trial_factorize(p)) == 1
             and trial_factorize(p)[0] == (p, 1)]
    rem = np.arange(X + 1, dtype=np.int64)
    omega = np.zeros(X + 1, np.int64)
    big = np.zeros(X + 1, np.int64)
    square = np.zeros(X + 1, bool)
    for p in small:
        e = np.zeros(X + 1, np.int64)
        idx = np.arange(p, X + 1, p)
        while len(idx):
            e[idx] += 1
            rem[idx] //= p
            idx = idx[rem[idx] % p == 0]
        omega += e > 0
        big += e
        square |= e >= 2
    tail = rem > 1
    omega += tail
    big += tail
    mu = np.where(square, 0, np.where(omega % 2, -1, 1))
    lam = np.where(big % 2, -1, 1)
    return mu, lam


def criterion_4(seed: int = 0, big_X: int = 10**8) -> CriterionResult:
    t0 = time.perf_counter()
    c = _Checks()
    X = 10**6
    mu_o, lam_o = trial_division_tables(X)
    mu, lam = sieve_mobius(X), sieve_liouville(X)
    c.add("mu oracle", np.array_equal(mu.values[1:], mu_o[1:]), f"n <= {X}")
    c.add("lambda oracle", np.array_equal(lam.values[1:], lam_o[1:]), f"n <= {X}")
    for Xs in (10**3, 10**4, 10**5):
        direct = int(np.count_nonzero(mu.values[1:Xs + 1]))
        formula = sum(int(mu.values[d]) * (Xs // (d * d)) for d in range(1, math.isqrt(Xs) + 1))
        c.add(f"squarefree count {Xs}", direct == formula, f"{direct}")
    t1 = time.perf_counter()
    m = sieve_mobius(big_X)
    del m
    tm = time.perf_counter() - t1
    t1 = time.perf_counter()
    m = sieve_liouville(big_X)
    del m
    tl = time.perf_counter() - t1
    c.add("sieve 1e8 <= 60s", tm <= 60 and tl <= 60, f"mu {tm:.1f}s, lambda {tl:.1f}s")
    return _finish(4, "sieves", c, t0, 120)


DECREASE_MARGIN = 0.95


def _strictly_decreasing(xs) -> bool:
    """Each step drops by at least 5%."""
    return all(b <= DECREASE_MARGIN * a for a, b in zip(xs, xs[1:]))


def _non_increasing(xs) -> bool:
    return all(b <= a for a, b in zip(xs, xs[1:]))


def criterion_5(seed: int = 0, threads: int = 1) -> CriterionResult:
    from .harness import decay_table

    t0 = time.perf_counter()
    c = _Checks()
    mu = sieve_mobius(10**6)
    norms = [gowers_norm(mu.values[1:N + 1], 2).norm for N in (10**3, 10**4, 10**5)]
    c.add("U^2 of mu decreasing", _strictly_decreasing(norms), ", ".join(f"{v:.4f}" for v in norms))
    naive = gowers_norm(mu.values[1:1001], 2, "naive").norm
    c.add("naive oracle at 1e3", abs(naive - norms[0]) <= 1e-9, f"{naive:.6f}")
    for name, table in (("mu", mu), ("lambda", sieve_liouville(10**6))):
        rows = decay_table(table, 1, (10**4, 10**5, 10**6), 0.4, 0.5, threads)
        means = [r.mean for r in rows]
        fr = [r.exceptional_fraction for r in rows]
        c.add(f"{name} decay", _strictly_decreasing(means) and _non_increasing(fr),
              "means " + ", ".join(f"{v:.4f}" for v in means)
              + "; exceptional " + ", ".join(f"{v:.3f}" for v in fr))
    return _finish(5, "decay trends", c, t0, 1800)


def lcm_tail_fit(Qs=(300, 1000, 3000), fit_Q: int = 100, m0_grid=TAIL_M0):
    """Fit C on fit_Q with R = Q^{3/2}, then the ratio tail / (C R log Q / m0) elsewhere."""
    def ratios(Q):
        R = int(round(Q ** 1.5))
        st = lcm_stats(Q, R)
        return [st.tail(m0) * m0 / (R * math.log(Q)) for m0 in m0_grid]

    C = max(ratios(fit_Q))
    worst = {Q: max(ratios(Q)) / C for Q in Qs}
    return C, worst


def criterion_6(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    c = _Checks()
    worst = 0.0
    for i in range(20):
        rng = task_rng(seed, "typeII-brute", i)
        Q = int(rng.integers(1, 5))
        spec = random_fspec(rng, Q, 19 * 200, degree=int(rng.integers(1, 3)))
        cfg = TypeIIConfig(10, 200, Q, 0.1, spec)
        worst = max(worst, abs(typeII_sum(cfg).value - brute_typeII(spec, 10, 200)))
    c.add("direct vs quadruple loop", worst <= 1e-9, f"max diff {worst:.1e}")
    inst = random_congruences(seed)
    bad = sum(not congruence_check(x) for x in inst)
    c.add("congruence_merge substitution", bad == 0, f"{len(inst)} instances")
    worst = 0.0
    for i in range(10):
        rng = task_rng(seed, "typeII-routes", i)
        q = int(rng.integers(1, 5))
        a = int(rng.choice([x for x in range(q) if math.gcd(x, q) == 1]))
        lo = int(rng.integers(0, 500))
        phi = PolyPhase(tuple(Fraction(float(x)) for x in rng.random(int(rng.integers(1, 3)))))
        spec = single_phase_fspec(q, a, 19 * 200, phi)
        spec = replace(spec, entries=((replace(spec.entries[0][0], lo=lo), phi),))
        cfg = TypeIIConfig(10, 200, q, 0.1, spec, lambda k, kp: (k % 7, 200 - kp % 11))
        worst = max(worst, abs(typeII_sum(cfg).value - typeII_sum_decomposed(cfg).value))
    c.add("decomposition vs direct", worst <= 1e-9, f"max diff {worst:.1e}")
    ok = True
    for Q in (10, 100, 1000):
        for R in sorted({Q, int(round(Q ** 1.5)), Q * Q // 2, Q * Q, 4 * Q * Q - 1}):
            ok &= lcm_stats(Q, R).pointwise_ok()
    c.add("m_q(r) <= sigma_D(q)", ok, "Q in 10, 100, 1000")
    C, worst = lcm_tail_fit()
    c.add("tail bound (4x slack)", all(v <= 4 for v in worst.values()),
          f"C={C:.4f}; " + ", ".join(f"Q={Q}: {v:.2f}C" for Q, v in worst.items()))
    return _finish(6, "bilinear", c, t0, 300)


def criterion_7(seed: int = 0) -> CriterionResult:
    t0 = time.perf_counter()
    c = _Checks()
    rep = equidist_defect(PolyPhase((Fraction(GOLDEN),)), 10**4, 0.1)
    c.add("golden defect <= 0.1", rep.defect <= 0.1, f"{rep.defect:.4f}")
    rep = equidist_defect(PolyPhase((Fraction(1, 5),)), 10**4, 0.1)
    c.add("1/5 defect >= 0.99, step 5", rep.defect >= 0.99 and rep.witness[1] == 5,
          f"{rep.defect:.4f}, witness {rep.witness}")
    rng = task_rng(seed, "rationals")
    ok = True
    for _ in range(200):
        s = int(rng.integers(1, 4))
        dens = [int(d) for d in rng.integers(1, 13, s)]
        coeffs = tuple(Fraction(int(rng.integers(0, d)), d) for d in dens)
        r_true = math.lcm(*(x.denominator for x in coeffs))
        d = best_denominator(PolyPhase(coeffs), 1000, 2000)
        ok &= d.r == r_true and d.exact_residual == 0
    c.add("best_denominator on rationals", ok, "200 cases")
    major, minor = contrapositive_pair()
    c.add("major arc", major.exceeds and major.structured,
          f"normalized {major.normalized:.4f}, residual {major.residual:.3g} <= {major.r_max}")
    c.add("minor arc", (not minor.structured) and not minor.exceeds,
          f"normalized {minor.normalized:.4f}, residual {minor.residual:.4g} > {minor.r_max}")
    return _finish(7, "equidistribution", c, t0, 120)


def criterion_8(seed: int = 0) -> CriterionResult:
    from .harness import ExperimentConfig, run

    t0 = time.perf_counter()
    c = _Checks()
    digests = []
    with tempfile.TemporaryDirectory() as tmp:
        for i, threads in enumerate((1, 1, 8)):
            cfg = ExperimentConfig(pipeline="accept", seed=seed, threads=threads,
                                   out_dir=str(Path(tmp) / f"run{i}"))
            m = run(cfg)
            c.add(f"run {i} (threads={threads}) checks", m.ok, "; ".join(m.failures))
            digests.append(m.digests)
    c.add("rerun identical", digests[0] == digests[1], f"{len(digests[0])} CSVs")
    c.add("threads 1 vs 8 identical", digests[0] == digests[2], "")
    return _finish(8, "determinism", c, t0, 1800)


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8}


def run_criteria(numbers=None, seed: int = 0, echo=print) -> list[CriterionResult]:
    out = []
    for n in numbers or sorted(CRITERIA):
        res = CRITERIA[n](seed)
        echo(res.line())
        out.append(res)
    return out


# -- the accept pipeline ---------------------------------------------------------

def accept_pipeline(run) -> None:
    """A representative slice of every suite, written as CSVs (no timings)."""
    from .harness import DECAY_HEADER, decay_rows, decay_table
    from .progressions import exceptional_scan

    cfg = run.cfg
    seed, threads = cfg.seed, cfg.threads

    t0 = time.perf_counter()
    rows = []
    for Y, Z in IDENTITY_WINDOWS:
        p, f, na = ramare_identity_scan(10**5, RamareWindow(Y, Z))
        if f:
            run.fail(f"identity window ({Y},{Z})")
        rows.append([Y, Z, p, f, na])
    run.write("accept_identity.csv", ["Y", "Z", "passed", "failed", "not_applicable"], rows)
    prow = partition_rows(seed)
    for r in prow:
        if not r[5] or r[6] != r[7]:
            run.fail(f"partition case {r[0]}")
    run.write("accept_partition.csv", ["case", "Y", "Z", "residual", "tolerance", "exact",
                                       "cs_ok", "slices", "mform_gap"], prow)
    run.stage("ramare", time.perf_counter() - t0)

    t0 = time.perf_counter()
    errs = convolution_errors(seed, n_random=10)
    for name, e in errs:
        if e > 1e-10:
            run.fail(f"convolution {name}")
    run.write("accept_convolution.csv", ["function", "max_error"], errs)
    run.write("accept_head.csv", ["N", "head", "ratio"], head_ratios())
    run.stage("convolution", time.perf_counter() - t0)

    t0 = time.perf_counter()
    mu = sieve_mobius(10**5)
    lam = sieve_liouville(10**5)
    grows = []
    for name, t in (("mobius", mu), ("liouville", lam)):
        for k in (1, 2, 3):
            for N in (10**3, 10**4) if k == 3 else (10**3, 10**4, 10**5):
                r = gowers_norm(t.values[1:N + 1], k)
                grows.append([name, k, N, r.norm, r.strategy])
    run.write("accept_gowers.csv", ["function", "k", "N", "norm", "strategy"], grows)
    run.stage("gowers", time.perf_counter() - t0)

    t0 = time.perf_counter()
    rep = exceptional_scan(mu, 30, 10**4, None, 0.5, threads=threads)
    rep1 = exceptional_scan(mu, 10, 10**4, 1, 0.5, restarts=1, seed=seed, threads=threads)
    brows = [["discrepancy", r.q, r.a, "", r.value, r.threshold, r.exceptional] for r in rep.rows]
    brows += [["degree1", r.q, r.a, r.alphas[0], r.value, r.threshold, r.exceptional] for r in rep1.rows]
    run.write("accept_bv.csv", ["kind", "q", "a", "alpha_1", "value", "threshold", "exceptional"], brows)
    drows = decay_table(mu, 1, (10**4, 10**5), 0.4, 0.5, threads)
    drows += decay_table(lam, 1, (10**4, 10**5), 0.4, 0.5, threads)
    run.write("accept_decay.csv", DECAY_HEADER, decay_rows(drows))
    run.stage("progressions", time.perf_counter() - t0)

    t0 = time.perf_counter()
    trows = []
    for i in range(20):
        rng = task_rng(seed, "typeII-brute", i)
        Q = int(rng.integers(1, 5))
        spec = random_fspec(rng, Q, 19 * 200, degree=int(rng.integers(1, 3)))
        res = typeII_sum(TypeIIConfig(10, 200, Q, 0.1, spec), threads=threads)
        trows.append([i, Q, len(spec.entries), res.value, res.normalized, res.exceeds])
    run.write("accept_type2.csv", ["case", "Q", "moduli", "value", "normalized", "exceeds"], trows)
    major, minor = contrapositive_pair()
    crow = [[n, x.normalized, x.exceeds, x.r, x.residual, x.r_max, x.structured]
            for n, x in (("major", major), ("minor", minor))]
    if not (major.exceeds and major.structured and not minor.exceeds and not minor.structured):
        run.fail("contrapositive pair")
    run.write("accept_contrapositive.csv", ["case", "normalized", "exceeds", "r", "residual",
                                            "r_max", "structured"], crow)
    lrows = []
    for Q in (100, 300):
        R = int(round(Q ** 1.5))
        st = lcm_stats(Q, R, threads=threads)
        if not st.pointwise_ok():
            run.fail(f"lcm pointwise Q={Q}")
        lrows += [[Q, R, m0, st.tail(m0)] for m0 in TAIL_M0]
    run.write("accept_lcm.csv", ["Q", "R", "m0", "tail"], lrows)
    run.stage("bilinear", time.perf_counter() - t0)

    t0 = time.perf_counter()
    erows = []
    for name, phi in (("golden", PolyPhase((Fraction(GOLDEN),))), ("one_fifth", PolyPhase((Fraction(1, 5),)))):
        rep = equidist_defect(phi, 10**4, 0.1)
        erows.append([name, rep.defect, *rep.witness])
    run.write("accept_equidist.csv", ["phase", "defect", "start", "step", "length", "frequency"], erows)
    run.stage("equidist", time.perf_counter() - t0)
