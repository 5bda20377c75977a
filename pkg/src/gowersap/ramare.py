"""Dirichlet decomposition f = f' * g and the Ramare-identity pipeline.

f' is the completely multiplicative function agreeing with f on primes.
The window [Y, Z) of primes drives Ramare's weight

    w(n) = 1 / (#{Y <= p < Z : p | n} + 1)

and the identity sum_{Y<=p<Z, p|n} w(n/p) = 1_{some window prime divides n}
for n free of squares of window primes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from .arithfn import ArithTable, SpfTable, factorize, multiplicative_values, primes_in, sieve_spf
from .errors import CoverageError, DomainError
from .progressions import FSpec, ProgressionSpec, compensated_sum, tabulate_F
from .seeds import derive_seed


# -- multiplicative specifications ---------------------------------------------

@dataclass(frozen=True)
class MultSpec:
    """A multiplicative function through its prime-power values f(p^k)."""

    func: Callable[[int, int], complex]
    completely_multiplicative: bool = False
    name: str = "custom"

    def value(self, p: int, k: int) -> complex:
        if k == 0:
            return 1.0
        if self.completely_multiplicative:
            return complex(self.func(p, 1)) ** k
        return complex(self.func(p, k))

    @classmethod
    def mobius(cls) -> "MultSpec":
        return cls(lambda p, k: -1.0 if k == 1 else 0.0, name="mobius")

    @classmethod
    def liouville(cls) -> "MultSpec":
        return cls(lambda p, k: (-1.0) ** k, completely_multiplicative=True, name="liouville")

    @classmethod
    def unit(cls) -> "MultSpec":
        return cls(lambda p, k: 1.0, completely_multiplicative=True, name="unit")

    @classmethod
    def squarefree(cls) -> "MultSpec":
        return cls(lambda p, k: 1.0 if k == 1 else 0.0, name="squarefree")

    @classmethod
    def random(cls, seed: int, completely_multiplicative: bool = False) -> "MultSpec":
        """Values drawn uniformly from the closed unit disc, fixed per (seed, p, k)."""

        @lru_cache(maxsize=None)
        def f(p, k):
            rng = np.random.default_rng(derive_seed(seed, p, k))
            r, t = math.sqrt(rng.random()), rng.random()
            return complex(r * math.cos(2 * math.pi * t), r * math.sin(2 * math.pi * t))

        return cls(f, completely_multiplicative, name=f"random{seed}")

    @classmethod
    def from_table(cls, rows: dict, default=None, name: str = "custom") -> "MultSpec":
        """rows maps (p, k) to a value; p or k may be '*' as a wildcard."""

        def f(p, k):
            for key in ((p, k), ("*", k), (p, "*"), ("*", "*")):
                if key in rows:
                    return rows[key]
            if default is None:
                raise DomainError(f"no value given for {p}^{k}")
            return default

        return cls(f, name=name)

    @classmethod
    def from_file(cls, path) -> "MultSpec":
        """Read prime-power values from a text file.

        One entry per line, ``p k value`` with ``*`` allowed for p or k and a
        Python complex literal as value (``-1``, ``0.6+0.8j``).  ``default
        value`` sets the fallback and ``completely_multiplicative`` on its own
        line makes only the k = 1 rows matter.  ``#`` starts a comment.
        """
        from pathlib import Path

        rows, default, cm = {}, None, False
        for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            try:
                if parts[0] == "default" and len(parts) == 2:
                    default = complex(parts[1])
                elif parts[0] == "completely_multiplicative" and len(parts) == 1:
                    cm = True
                elif len(parts) == 3:
                    key = tuple(x if x == "*" else int(x) for x in parts[:2])
                    rows[key] = complex(parts[2])
                else:
                    raise ValueError(line)
            except ValueError as exc:
                raise DomainError(f"{path}:{lineno}: cannot parse {raw!r}") from exc
        for key, v in rows.items():
            if abs(v) > 1 + 1e-12:
                raise DomainError(f"|f({key[0]}^{key[1]})| = {abs(v):.6g} exceeds 1")
        base = cls.from_table(rows, default, name=Path(path).stem)
        return cls(base.func, cm, base.name)


@dataclass(frozen=True)
class GSpec:
    """Prime-power values of the convolution complement g with f = f' * g."""

    func: Callable[[int, int], complex]
    K_max: int

    def value(self, p: int, k: int) -> complex:
        if k == 0:
            return 1.0
        if k > self.K_max:
            raise DomainError(f"g(p^{k}) requested beyond K_max={self.K_max}")
        return self.func(p, k)


def decompose(f: MultSpec, K_max: int) -> tuple[MultSpec, GSpec]:
    """Split f into f' (completely multiplicative, f'(p) = f(p)) and g.

    g solves f(p^k) = sum_{j=0}^{k} f'(p^j) g(p^{k-j}) by forward
    substitution (unit diagonal).
    """
    fprime = MultSpec(lambda p, k: f.value(p, 1), completely_multiplicative=True,
                      name=f"{f.name}'")

    @lru_cache(maxsize=None)
    def g_row(p):
        fp = f.value(p, 1)
        g = [1.0 + 0j]
        for k in range(1, K_max + 1):
            acc = f.value(p, k)
            for j in range(1, k + 1):
                acc -= fp ** j * g[k - j]
            g.append(complex(acc))
        return tuple(g)

    return fprime, GSpec(lambda p, k: g_row(p)[k], K_max)


def g_closed_form(f: MultSpec, p: int, k: int) -> complex:
    """g(p^k) = f(p^k) - f(p) f(p^{k-1}); an independent route to the same values."""
    if k == 0:
        return 1.0
    return f.value(p, k) - f.value(p, 1) * f.value(p, k - 1)


def max_exponent(X: int) -> int:
    return max(1, int(math.log2(max(X, 2))) + 1)


def verify_convolution(f_table, fprime_table, g: GSpec, X: int, spf: SpfTable | None = None) -> float:
    """max_{n<=X} |f(n) - (f' * g)(n)|, convolving over every l with g(l) != 0."""
    for t in (f_table, fprime_table):
        if len(t) - 1 < X:
            raise CoverageError("tables must cover [1, X]")
    fv = np.asarray(f_table.values if isinstance(f_table, ArithTable) else f_table, dtype=np.complex128)
    fpv = np.asarray(fprime_table.values if isinstance(fprime_table, ArithTable) else fprime_table,
                     dtype=np.complex128)
    gv = multiplicative_values(g.value, X, bound=2.0, spf=spf)
    conv = np.zeros(X + 1, np.complex128)
    for ell in np.flatnonzero(gv[1:X + 1]) + 1:
        ell = int(ell)
        conv[ell::ell] += gv[ell] * fpv[1:X // ell + 1]
    return float(np.max(np.abs(fv[1:X + 1] - conv[1:X + 1])))


def squarefull_numbers(N: int, primes=None):
    """Yield (n, [(p, e), ...]) for squarefull n <= N (n = 1 included)."""
    if primes is None:
        primes = primes_in(2, math.isqrt(N) + 1)
    primes = [int(p) for p in primes]

    def rec(i, n, fac):
        yield n, fac
        for j in range(i, len(primes)):
            p = primes[j]
            pk = p * p
            if n * pk > N:
                break
            e = 2
            while n * pk <= N:
                yield from rec(j + 1, n * pk, fac + [(p, e)])
                pk *= p
                e += 1

    yield from rec(0, 1, [])


@dataclass(frozen=True)
class GPartialSums:
    N: int
    N_cap: int
    tail_weighted: float
    head: float


def g_partial_sums(g: GSpec, N: int, N_cap: int | None = None, want_tail: bool = True) -> GPartialSums:
    """Head sum_{n<=N} |g(n)| and tail sum_{N<=n<=N_cap} |g(n)|/n.

    g(p) = 0 confines the support to squarefull n, which are generated
    recursively; a branch stops as soon as a factor g(p^e) vanishes.
    """
    if N < 1:
        raise ValueError("N must be positive")
    N_cap = N * N if N_cap is None else N_cap
    top = max(N, N_cap) if want_tail else N
    primes = [int(p) for p in primes_in(2, math.isqrt(top) + 1)]
    head, tail = [], []

    def rec(i, n, gval):
        if n <= N:
            head.append(gval)
        if want_tail and N <= n <= N_cap:
            tail.append(gval / n)
        for j in range(i, len(primes)):
            p = primes[j]
            pk = p * p
            if n * pk > top:
                break
            e = 2
            while n * pk <= top:
                if e > g.K_max:
                    raise DomainError(f"K_max={g.K_max} too small for n up to {top}")
                gv = abs(g.value(p, e))
                if gv:
                    rec(j + 1, n * pk, gval * gv)
                pk *= p
                e += 1

    if g.K_max >= 1 and g.value(2, 1):
        raise DomainError("g(p) must vanish")
    rec(0, 1, 1.0)
    return GPartialSums(N, N_cap, math.fsum(tail), math.fsum(head))


# -- windows and weights ----------------------------------------------------------

@dataclass(frozen=True)
class RamareWindow:
    Y: float
    Z: float
    primes: np.ndarray = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not 2 <= self.Y < self.Z:
            raise DomainError("window needs 2 <= Y < Z")
        object.__setattr__(self, "primes", primes_in(self.Y, self.Z))

    @classmethod
    def for_pipeline(cls, eta: float, X: int, Q: int) -> "RamareWindow":
        """Y = 1/eta, Z = (X/Q^2)^(1/20)."""
        return cls(1.0 / eta, (X / Q ** 2) ** (1 / 20))

    def contains(self, p: int) -> bool:
        return self.Y <= p < self.Z


def window_prime_count(n: int, w: RamareWindow, spf: SpfTable | None = None) -> int:
    fac = factorize(n, spf) if spf is not None else [(int(p), 1) for p in w.primes if n % int(p) == 0]
    return sum(1 for p, _ in fac if w.contains(p))


def ramare_weight(n: int, w: RamareWindow, spf: SpfTable | None = None) -> Fraction:
    if n < 1:
        raise DomainError("n must be positive")
    return Fraction(1, window_prime_count(n, w, spf) + 1)


def musq_window(n: int, w: RamareWindow) -> int:
    """1 iff no window prime p has p^2 | n."""
    return 0 if any(n % (int(p) * int(p)) == 0 for p in w.primes) else 1


@dataclass(frozen=True)
class IdentityCheck:
    lhs: Fraction | None
    expected: int | None
    passed: bool | None

    @property
    def applicable(self) -> bool:
        return self.lhs is not None


def ramare_identity_check(n: int, w: RamareWindow, spf: SpfTable | None = None) -> IdentityCheck:
    if not musq_window(n, w):
        return IdentityCheck(None, None, None)
    divs = [int(p) for p in w.primes if n % int(p) == 0]
    lhs = sum((ramare_weight(n // p, w, spf) for p in divs), Fraction(0))
    expected = 1 if divs else 0
    return IdentityCheck(lhs, expected, lhs == expected)


def window_counts(X: int, w: RamareWindow) -> np.ndarray:
    """cnt[n] = number of distinct window primes dividing n, for 0 <= n <= X."""
    cnt = np.zeros(X + 1, np.int32)
    for p in w.primes:
        cnt[int(p)::int(p)] += 1
    return cnt


def musq_table(X: int, w: RamareWindow) -> np.ndarray:
    ok = np.ones(X + 1, bool)
    for p in w.primes:
        ok[int(p) ** 2::int(p) ** 2] = False
    return ok


def ramare_identity_scan(X: int, w: RamareWindow) -> tuple[int, int, int]:
    """Exact check of the identity for every n <= X: (passed, failed, not applicable).

    Weights of the quotients come from a direct sieve count of window prime
    divisors.  Left sides are accumulated as integer numerators over the
    common denominator lcm(1, ..., c_max + 1), so the comparison is exact.
    """
    cnt = window_counts(X, w)
    ok = musq_table(X, w)
    D = math.lcm(*range(1, int(cnt.max()) + 2))
    num = np.zeros(X + 1, np.int64)
    hit = np.zeros(X + 1, bool)
    share = D // (cnt + 1)
    for p in w.primes:
        p = int(p)
        if p > X:
            break
        num[p::p] += share[1: X // p + 1]
        hit[p::p] = True
    app = ok.copy()
    app[0] = False
    good = app & (num == D * hit)
    passed = int(good.sum())
    return passed, int(app.sum()) - passed, X - int(app.sum())


def coprime_window_count(p: ProgressionSpec, w: RamareWindow) -> int:
    """#{n in I_q, n = a (mod q) : no window prime divides n}, by sieving the progression."""
    first = p.lo + (p.a - p.lo) % p.q
    if first > p.hi:
        return 0
    L = (p.hi - first) // p.q + 1
    alive = np.ones(L, bool)
    for ell in w.primes:
        ell = int(ell)
        if p.q % ell == 0:
            # n = a (mod ell) with gcd(a, q) = 1: never divisible
            continue
        # first + q m = 0 (mod ell)
        m0 = (-first * pow(p.q, -1, ell)) % ell
        alive[m0::ell] = False
    return int(alive.sum())


def mertens_prediction(p: ProgressionSpec, w: RamareWindow) -> float:
    """(|I|/q) * prod over window primes not dividing q of (1 - 1/p)."""
    prod = 1.0
    for ell in w.primes:
        if p.q % int(ell):
            prod *= 1.0 - 1.0 / int(ell)
    return p.length / p.q * prod


# -- the Sigma partition --------------------------------------------------------------

@dataclass(frozen=True)
class SigmaPartition:
    total: complex
    part_musq_zero: complex
    part_coprime: complex
    part_sigma: complex
    residual: float
    abs_F_mass: float
    sigma_mform: complex = 0j
    sigma_prime: complex = 0j
    dropped_musq: complex = 0j
    dropped_coprime: complex = 0j
    slices: tuple = ()  # ((P, value), ...) full dyadic ranges [P, 2P) inside [Y, Z)
    boundary: tuple | None = None  # (P, value) for the truncated range [P, Z)

    @property
    def tolerance(self) -> float:
        return 1e-9 * (1 + self.abs_F_mass)

    @property
    def exact(self) -> bool:
        return self.residual <= self.tolerance


def _values(t, X):
    v = t.values if isinstance(t, ArithTable) else t
    if len(v) - 1 < X:
        raise CoverageError("table does not cover [1, X]")
    return np.asarray(v[: X + 1], dtype=np.complex128)


def dyadic_ranges(w: RamareWindow) -> tuple[list[tuple[float, float]], tuple[float, float] | None]:
    full, P = [], w.Y
    while 2 * P <= w.Z:
        full.append((P, 2 * P))
        P *= 2
    boundary = (P, w.Z) if P < w.Z else None
    return full, boundary


_MODES = ("sigma", "all", "musq_dropped", "p_divides_m")


def _mform(fv, F, cnt, ok, X, primes, mode="all"):
    """sum over window primes p and m <= X/p of w(m) f(m) f(p) F(pm).

    mode "sigma" keeps mu^2(m) = 1 and p not dividing m (this is Sigma
    rewritten with n = pm); "all" drops both conditions; "musq_dropped" and
    "p_divides_m" are the two remainders, so all = sigma + the remainders.
    """
    parts = []
    for p in primes:
        mmax = X // p
        if mmax < 1:
            continue
        m = np.arange(1, mmax + 1)
        term = fv[m] / (cnt[m] + 1) * fv[p] * F[p * m]
        if mode == "sigma":
            term = term[ok[m] & (m % p != 0)]
        elif mode == "musq_dropped":
            term = term[~ok[m] & (m % p != 0)]
        elif mode == "p_divides_m":
            term = term[m % p == 0]
        parts.append(compensated_sum(term))
    return complex(math.fsum(z.real for z in parts), math.fsum(z.imag for z in parts))


def sigma_partition(f_table, spec: FSpec | np.ndarray, w: RamareWindow, X: int | None = None) -> SigmaPartition:
    """Split sum_{n<=X} f(n) F(n) into the mu^2_[Y,Z) = 0 part, the part free of
    window primes, and Sigma (computed from Ramare weights, not from the
    identity), then rewrite Sigma over m = n/p, drop the two conditions and
    cut the p-range dyadically."""
    if isinstance(spec, FSpec):
        X = spec.X if X is None else X
        if X != spec.X:
            raise CoverageError("f table and FSpec must share X")
        F = tabulate_F(spec)
    else:
        F = np.asarray(spec, dtype=np.complex128)
        X = len(F) - 1 if X is None else X
    fv = _values(f_table, X)
    F = F[: X + 1]
    cnt = window_counts(X, w)
    ok = musq_table(X, w)
    primes = [int(p) for p in w.primes if p <= X]

    fF = fv * F
    fF[0] = 0
    n_idx = np.arange(X + 1)
    total = compensated_sum(fF[1:])
    part_zero = compensated_sum(fF[~ok])
    part_cop = compensated_sum(fF[ok & (cnt == 0) & (n_idx >= 1)])

    weights = np.zeros(X + 1, np.float64)
    wq = 1.0 / (cnt + 1)
    for p in primes:
        weights[p::p] += wq[1: X // p + 1]
    weights[~ok] = 0.0
    part_sig = compensated_sum(fF * weights)

    residual = abs(total - (part_zero + part_cop + part_sig))
    mass = math.fsum(np.abs(F[1:]).tolist())

    sig_m = _mform(fv, F, cnt, ok, X, primes, "sigma")
    sig_prime = _mform(fv, F, cnt, ok, X, primes, "all")
    drop1 = _mform(fv, F, cnt, ok, X, primes, "musq_dropped")
    drop2 = _mform(fv, F, cnt, ok, X, primes, "p_divides_m")

    full, bnd = dyadic_ranges(w)
    slices = []
    for P, P2 in full:
        ps = [p for p in primes if P <= p < P2]
        slices.append((P, _mform(fv, F, cnt, ok, X, ps)))
    boundary = None
    if bnd is not None:
        ps = [p for p in primes if bnd[0] <= p < bnd[1]]
        boundary = (bnd[0], _mform(fv, F, cnt, ok, X, ps))
    return SigmaPartition(total, part_zero, part_cop, part_sig, float(residual), mass,
                          sig_m, sig_prime, drop1, drop2, tuple(slices), boundary)


def _slice_primes(w: RamareWindow, P: float, X: int) -> list[int]:
    return [int(p) for p in w.primes if P <= p < 2 * P and p <= X]


def sigma_prime_slice(f_table, F: np.ndarray, w: RamareWindow, P: float, X: int) -> complex:
    """Sigma'(P): the m-form sum with p restricted to [P, 2P) inside the window."""
    fv = _values(f_table, X)
    cnt = window_counts(X, w)
    return _mform(fv, np.asarray(F[: X + 1], np.complex128), cnt, None, X, _slice_primes(w, P, X))


@dataclass(frozen=True)
class CauchySchwarzGap:
    lhs: float
    rhs: float
    ok: bool

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs else 0.0


def cauchy_schwarz_gap(f_table, spec: FSpec | np.ndarray, w: RamareWindow, P: float,
                       X: int | None = None) -> CauchySchwarzGap:
    """|Sigma'(P)|^2 against (X/P) sum_{m<=X/P} |sum_{p, p<=X/m} f(p) F(pm)|^2,
    p running over window primes in [P, 2P)."""
    if isinstance(spec, FSpec):
        X = spec.X if X is None else X
        F = tabulate_F(spec)
    else:
        F = np.asarray(spec, dtype=np.complex128)
        X = len(F) - 1 if X is None else X
    fv = _values(f_table, X)
    lhs = abs(sigma_prime_slice(fv, F, w, P, X)) ** 2
    mmax = int(X // P)
    inner = np.zeros(mmax + 1, np.complex128)
    for p in _slice_primes(w, P, X):
        m = np.arange(1, X // p + 1)
        inner[m] += fv[p] * F[p * m]
    rhs = X / P * math.fsum((np.abs(inner[1:]) ** 2).tolist())
    return CauchySchwarzGap(float(lhs), float(rhs), bool(lhs <= rhs * (1 + 1e-12) + 1e-300))
