"""Correlation sums of multiplicative functions with phases along progressions.

Also home of the multi-modulus function

    F(n) = sum over q with n in I_q, n = a_q (mod q) of e(phi_q((n - a_q)/q))

and the scans over a dyadic window of moduli [Q, 2Q).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import fft as sfft
from scipy.optimize import minimize_scalar

from .errors import CoverageError, DomainError, HypothesisError
from .phases import PolyPhase, phase_values
from .seeds import task_rng


@dataclass(frozen=True)
class ProgressionSpec:
    """n = a (mod q) restricted to the integer interval [lo, hi]."""

    q: int
    a: int
    lo: int
    hi: int

    def __post_init__(self):
        if self.q < 1:
            raise DomainError("modulus must be positive")
        if not 0 <= self.a < self.q:
            raise DomainError("need 0 <= a < q")
        if math.gcd(self.a, self.q) != 1:
            raise DomainError(f"residue {self.a} is not reduced mod {self.q}")
        if not 0 <= self.lo <= self.hi:
            raise DomainError("interval must satisfy 0 <= lo <= hi")

    @property
    def length(self) -> int:
        return self.hi - self.lo

    def members(self) -> np.ndarray:
        first = self.lo + (self.a - self.lo) % self.q
        return np.arange(first, self.hi + 1, self.q, dtype=np.int64)

    def count(self) -> int:
        first = self.lo + (self.a - self.lo) % self.q
        return 0 if first > self.hi else (self.hi - first) // self.q + 1


def full_progression(q: int, a: int, X: int) -> ProgressionSpec:
    return ProgressionSpec(q, a, 0, X)


def compensated_sum(z: np.ndarray) -> complex:
    z = np.asarray(z)
    if np.iscomplexobj(z):
        return complex(math.fsum(z.real.tolist()), math.fsum(z.imag.tolist()))
    return complex(math.fsum(z.tolist()), 0.0)


def correlation_sum(table, p: ProgressionSpec, phi: PolyPhase) -> complex:
    """sum over n in I_q, n = a (mod q) of f(n) e(phi((n - a)/q))."""
    if p.hi > table.upper_bound:
        raise CoverageError(f"interval end {p.hi} exceeds table bound {table.upper_bound}")
    n = p.members()
    if len(n) == 0:
        return 0j
    m = (n - p.a) // p.q
    return compensated_sum(table.values[n] * phase_values(phi, m))


# -- sup over residues and phases ---------------------------------------------

def farey_grid(max_den: int = 20) -> list[Fraction]:
    pts = {Fraction(c, d) for d in range(1, max_den + 1) for c in range(d)}
    return sorted(pts)


class _Objective:
    """alphas -> |sum_m c_m e(sum_i alpha_i m^i)| with a coordinate line search."""

    def __init__(self, c: np.ndarray, s: int):
        self.c = np.asarray(c, dtype=np.complex128)
        self.s = s
        self.m = np.arange(len(c), dtype=np.int64)
        self.mpow = [self.m.astype(np.float64) ** i for i in range(s + 1)]
        self.evals = 0

    def _phase(self, alphas, skip=None):
        ang = np.zeros(len(self.c))
        for i, a in enumerate(alphas, start=1):
            if i != skip and a:
                ang += np.mod(a * self.mpow[i], 1.0)
        return np.exp(2j * np.pi * ang)

    def value(self, alphas) -> float:
        self.evals += 1
        return float(abs(np.dot(self.c, self._phase(alphas))))

    def line(self, alphas, j: int, M: int) -> np.ndarray:
        """|objective| at alpha_j = t/M, t = 0..M-1, other coordinates fixed."""
        self.evals += 1
        w = self.c * self._phase(alphas, skip=j)
        r = np.ones(len(self.m), dtype=np.int64)
        for _ in range(j):
            r = (r * (self.m % M)) % M
        b = np.bincount(r, weights=w.real, minlength=M) + 1j * np.bincount(r, weights=w.imag, minlength=M)
        return np.abs(sfft.ifft(b) * M)


def _grid_size(length: int, j: int, cap: int = 1 << 18) -> int:
    want = 4 * max(1, length - 1) ** j + 1
    return min(cap, 1 << max(4, math.ceil(math.log2(want))))


def _ascend(obj: _Objective, start, max_sweeps: int = 8):
    alphas = list(start)
    val = obj.value(alphas)
    n = len(obj.c)
    for _ in range(max_sweeps):
        improved = False
        for j in range(1, obj.s + 1):
            M = _grid_size(n, j)
            prof = obj.line(alphas, j, M)
            t = int(np.argmax(prof))
            width = 1.0 / M

            def neg(x, j=j):
                trial = list(alphas)
                trial[j - 1] = x % 1.0
                return -obj.value(trial)

            res = minimize_scalar(neg, bounds=(t * width - width, t * width + width), method="bounded",
                                  options={"xatol": 1e-3 / max(1, n - 1) ** j})
            cand_x, cand_v = (float(res.x) % 1.0, -float(res.fun))
            grid_v = float(prof[t])
            if grid_v > cand_v:
                cand_x, cand_v = (t * width) % 1.0, grid_v
            if cand_v > val * (1 + 1e-12) + 1e-12:
                alphas[j - 1] = cand_x
                val = cand_v
                improved = True
        if not improved:
            break
    return alphas, val


@dataclass(frozen=True)
class SupResult:
    a: int
    phase: PolyPhase
    value: float
    exhausted: bool = False


def reduced_residues(q: int) -> list[int]:
    return [a for a in range(q) if math.gcd(a, q) == 1]


def sup_correlation(table, q: int, X: int, degree: int = 1, restarts: int = 2, seed: int = 0,
                    grid_den: int = 20, budget: int = 200_000) -> SupResult:
    """Lower bound for sup_a sup_alpha |sum_{n<=X, n=a (q)} f(n) e(P(n))|.

    For each reduced residue a: the Farey grid {c/d : d <= grid_den} on each
    coordinate, then multistart coordinate ascent (FFT line profile plus a
    bounded scalar refinement) from the best grid points and ``restarts``
    random points.  The reported value is an exact evaluation at the
    returned phase, so it never exceeds the true sup.
    """
    if q > X:
        raise DomainError("need q <= X")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    s = degree
    grid = farey_grid(grid_den)
    best = None
    evals_used = 0
    exhausted = False
    for a in reduced_residues(q):
        c = np.asarray(table.values[a:X + 1:q], dtype=np.complex128)
        obj = _Objective(c, s)
        starts = []
        for j in range(s):
            for g in grid:
                if g == 0 and j > 0:
                    continue
                v = [0.0] * s
                v[j] = float(g)
                starts.append((obj.value(v), v))
        starts.sort(key=lambda t: -t[0])
        cands = [(v, list(al)) for v, al in starts]
        rng = task_rng(seed, "sup", q, a)
        seeds_ = [al for _, al in starts[:restarts]] + [list(rng.random(s)) for _ in range(restarts)]
        for st in seeds_:
            if evals_used + obj.evals > budget:
                exhausted = True
                break
            al, v = _ascend(obj, st)
            cands.append((v, al))
        evals_used += obj.evals
        # stable order: value desc, grid/start order preserved by sort stability
        top_v, top_al = max(cands, key=lambda t: t[0])
        zero_v = cands[[i for i, (_, al) in enumerate(cands) if not any(al)][0]][0]
        phase = PolyPhase(tuple(Fraction(x) for x in top_al))
        exact = abs(correlation_sum(table, ProgressionSpec(q, a, 0, X), phase))
        if exact < zero_v:
            phase, exact = PolyPhase.zero(s), zero_v
        if best is None or exact > best.value * (1 + 1e-12) + 1e-12:
            best = SupResult(a, phase, float(exact))
        if exhausted:
            break
    return SupResult(best.a, best.phase, best.value, exhausted)


# -- Bombieri-Vinogradov style discrepancy ------------------------------------

def residue_sums(table, q: int, X: int) -> np.ndarray:
    """Array S with S[a] = sum_{1<=n<=X, n=a (q)} f(n)."""
    if X > table.upper_bound:
        raise CoverageError(f"X={X} exceeds table bound {table.upper_bound}")
    vals = table.values[1:X + 1]
    idx = np.arange(1, X + 1) % q
    if np.iscomplexobj(vals):
        return (np.bincount(idx, weights=vals.real, minlength=q)
                + 1j * np.bincount(idx, weights=vals.imag, minlength=q))
    return np.bincount(idx, weights=vals.astype(np.float64), minlength=q)


def bv_discrepancy_detail(table, q: int, X: int) -> tuple[int, float]:
    if q > X:
        raise DomainError("need q <= X")
    S = residue_sums(table, q, X)
    red = reduced_residues(q)
    mean = S[red].sum() / len(red)
    dev = np.abs(S[red] - mean)
    i = int(np.argmax(dev))
    return red[i], float(dev[i])


def bv_discrepancy(table, q: int, X: int) -> float:
    """max over reduced a of |sum_{n=a (q)} f - (1/phi(q)) sum_{(n,q)=1} f| over n <= X."""
    return bv_discrepancy_detail(table, q, X)[1]


# -- the multi-modulus function F ---------------------------------------------

@dataclass(frozen=True)
class FSpec:
    entries: tuple  # of (ProgressionSpec, PolyPhase)
    Q: int
    X: int
    T: Fraction = field(default=Fraction(0), compare=False)

    def __post_init__(self):
        ents = tuple(self.entries)
        seen = set()
        for p, phi in ents:
            if not self.Q <= p.q < 2 * self.Q:
                raise DomainError(f"modulus {p.q} outside [{self.Q}, {2 * self.Q})")
            if p.q in seen:
                raise DomainError(f"modulus {p.q} appears twice")
            seen.add(p.q)
            if p.hi > self.X:
                raise DomainError(f"interval [{p.lo}, {p.hi}] not inside [0, {self.X}]")
            if not isinstance(phi, PolyPhase):
                raise TypeError("phases must be PolyPhase instances")
        object.__setattr__(self, "entries", ents)
        object.__setattr__(self, "T", self.recompute_T())

    def recompute_T(self) -> Fraction:
        return sum((Fraction(p.length, p.q) + 1 for p, _ in self.entries), Fraction(0))

    @property
    def moduli(self) -> list[int]:
        return [p.q for p, _ in self.entries]


def eval_F(spec: FSpec, n: int) -> complex:
    total = 0j
    for p, phi in spec.entries:
        if p.lo <= n <= p.hi and n % p.q == p.a:
            total += complex(phase_values(phi, np.array([(n - p.a) // p.q]))[0])
    return total


def tabulate_F(spec: FSpec) -> np.ndarray:
    """F on [0, X] as a complex array, built progression by progression."""
    out = np.zeros(spec.X + 1, np.complex128)
    for p, phi in spec.entries:
        n = p.members()
        out[n] += phase_values(phi, (n - p.a) // p.q)
    return out


def multiples_mass(F: np.ndarray, D: int) -> float:
    """sum over 1 <= n <= X with D | n of |F(n)|."""
    return math.fsum(np.abs(F[D::D]).tolist())


def random_fspec(rng: np.random.Generator, Q: int, X: int, n_moduli: int | None = None,
                 degree: int = 1, min_len: int | None = None) -> FSpec:
    """Random FSpec: distinct moduli in [Q, 2Q), random reduced residues,
    random subintervals of [0, X] and random phases of the given degree."""
    pool = np.arange(Q, 2 * Q)
    k = len(pool) if n_moduli is None else min(n_moduli, len(pool))
    qs = sorted(int(q) for q in rng.choice(pool, size=k, replace=False))
    ents = []
    min_len = X // 4 if min_len is None else min_len
    for q in qs:
        red = reduced_residues(q)
        a = int(red[rng.integers(len(red))])
        lo = int(rng.integers(0, max(1, X - min_len + 1)))
        hi = int(rng.integers(min(X, lo + min_len), X + 1))
        phi = PolyPhase(tuple(Fraction(float(x)) for x in rng.random(degree)))
        ents.append((ProgressionSpec(q, a, lo, hi), phi))
    return FSpec(tuple(ents), Q, X)


# -- scans over moduli --------------------------------------------------------

@dataclass(frozen=True)
class BVRow:
    q: int
    a: int
    alphas: tuple
    value: float
    threshold: float
    exceptional: bool


@dataclass(frozen=True)
class BVReport:
    rows: tuple
    Q: int
    X: int
    epsilon: float

    @property
    def exceptional_count(self) -> int:
        return sum(r.exceptional for r in self.rows)

    @property
    def exceptional_fraction(self) -> float:
        return self.exceptional_count / len(self.rows) if self.rows else 0.0

    @property
    def mean_value(self) -> float:
        return math.fsum(r.value for r in self.rows) / len(self.rows) if self.rows else 0.0

    @property
    def max_value(self) -> float:
        return max((r.value for r in self.rows), default=0.0)


def check_bv_hypothesis(Q: int, X: int) -> None:
    if 10 * Q * Q > X:
        raise HypothesisError(f"10Q^2 <= X violated (Q={Q}, X={X}): standing hypothesis of the "
                              "averaging over moduli q in [Q, 2Q)")


def exceptional_scan(table, Q: int, X: int, phase_source=None, epsilon: float = 0.5, *,
                     restarts: int = 2, seed: int = 0, threads: int = 1,
                     full_range: bool = False) -> BVReport:
    """Flag moduli whose sup correlation (or BV discrepancy) reaches eps X / Q.

    ``phase_source``: None for the discrepancy, an int s for sup_correlation
    of degree s, or a PolyPhase used for every residue (max over a).
    """
    check_bv_hypothesis(Q, X)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    threshold = epsilon * X / Q
    moduli = list(range(1, Q + 1)) if full_range else list(range(Q, 2 * Q))

    def one(q):
        if phase_source is None:
            a, v = bv_discrepancy_detail(table, q, X)
            alphas = ()
        elif isinstance(phase_source, PolyPhase):
            vals = [(abs(correlation_sum(table, full_progression(q, a, X), phase_source)), a)
                    for a in reduced_residues(q)]
            v, a = max(vals, key=lambda t: t[0])
            alphas = phase_source.alphas
        else:
            res = sup_correlation(table, q, X, int(phase_source), restarts=restarts, seed=seed)
            a, v, alphas = res.a, res.value, res.phase.alphas
        return BVRow(q, a, alphas, float(v), threshold, bool(v >= threshold))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            rows = tuple(ex.map(one, moduli))
    else:
        rows = tuple(one(q) for q in moduli)
    return BVReport(rows, Q, X, epsilon)
