"""Type-II bilinear sums over F and the lcm-multiplicity statistics.

The bilinear sum is

    sum_{K<=k,k'<2K} | sum_{l in I(k,k')} F(k l) conj F(k' l) |

evaluated straight from a tabulation of F.  A second route expands F into
its progressions, merges the two congruence conditions on l and evaluates
each piece as a sum of a composed polynomial phase; the two must agree.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import CostError, CoverageError, DomainError, HypothesisError
from .phases import PolyPhase, best_denominator, composed_phase, phase_turns, turns_to_unit
from .progressions import FSpec, ProgressionSpec, tabulate_F

__all__ = [
    "TypeIIConfig", "TypeIIResult", "typeII_sum", "typeII_sum_decomposed", "typeII_inner",
    "typeII_inner_decomposed", "Congruence", "solve_linear", "crt_pair", "congruence_merge",
    "LcmStats", "lcm_stats", "sigma_D", "sigma_D_table", "sigma_D_second_moment",
    "composed_phase", "ContrapositiveCase", "contrapositive_case", "single_phase_fspec",
]

LCM_MAX_Q = 10**4


# -- type-II sums ---------------------------------------------------------------

@dataclass(frozen=True)
class TypeIIConfig:
    K: int
    L: int
    Q: int
    delta: float
    spec: FSpec
    intervals: Callable[[int, int], tuple[int, int]] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.K < 1:
            raise DomainError("K must be at least 1")
        if self.L < 1:
            raise DomainError("L must be at least 1")
        if 10 * self.Q * self.Q > self.L:
            raise HypothesisError(f"10Q^2 <= L violated (Q={self.Q}, L={self.L}): hypothesis of "
                                  "type-II sums")
        if not 0 < self.delta < 0.5:
            raise DomainError("delta must lie in (0, 1/2)")

    def interval(self, k: int, kp: int) -> tuple[int, int]:
        """I(k, k') as an inclusive integer range inside [0, L]."""
        if self.intervals is None:
            return 0, self.L
        lo, hi = self.intervals(k, kp)
        lo, hi = max(0, int(lo)), min(self.L, int(hi))
        return lo, hi

    @property
    def needed_X(self) -> int:
        return (2 * self.K - 1) * self.L


@dataclass(frozen=True)
class TypeIIResult:
    value: float
    normalized: float
    exceeds: bool
    K: int
    L: int
    delta: float


def _check_cover(cfg: TypeIIConfig, F: np.ndarray) -> None:
    if len(F) - 1 < cfg.needed_X:
        raise CoverageError(f"F tabulated to {len(F) - 1}, products k*l reach {cfg.needed_X}")


def typeII_inner(F: np.ndarray, k: int, kp: int, lo: int, hi: int) -> complex:
    if lo > hi:
        return 0j
    ell = np.arange(lo, hi + 1)
    return complex(np.sum(F[k * ell] * np.conj(F[kp * ell])))


def typeII_sum(cfg: TypeIIConfig, F: np.ndarray | None = None, threads: int = 1) -> TypeIIResult:
    """Direct evaluation from the tabulated F; parallel over k, summed in k order."""
    F = tabulate_F(cfg.spec) if F is None else np.asarray(F, np.complex128)
    _check_cover(cfg, F)
    ks = range(cfg.K, 2 * cfg.K)

    def row(k):
        return [abs(typeII_inner(F, k, kp, *cfg.interval(k, kp))) for kp in ks]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(row, ks))
    else:
        rows = [row(k) for k in ks]
    value = math.fsum(v for r in rows for v in r)
    norm = value / (cfg.K ** 2 * cfg.L)
    return TypeIIResult(value, norm, bool(norm >= cfg.delta), cfg.K, cfg.L, cfg.delta)


# -- congruences ----------------------------------------------------------------------

@dataclass(frozen=True)
class Congruence:
    """l = residue (mod modulus), 0 <= residue < modulus."""

    modulus: int
    residue: int

    def contains(self, ell: int) -> bool:
        return (ell - self.residue) % self.modulus == 0


def solve_linear(k: int, a: int, q: int) -> Congruence | None:
    """All l with k l = a (mod q), or None when gcd(k, q) does not divide a."""
    g = math.gcd(k, q)
    if a % g:
        return None
    m = q // g
    if m == 1:
        return Congruence(1, 0)
    return Congruence(m, (a // g) * pow(k // g, -1, m) % m)


def crt_pair(c1: Congruence, c2: Congruence) -> Congruence | None:
    """Intersection of two congruence classes (moduli need not be coprime)."""
    g = math.gcd(c1.modulus, c2.modulus)
    diff = c2.residue - c1.residue
    if diff % g:
        return None
    m1, m2 = c1.modulus // g, c2.modulus // g
    lcm = c1.modulus * m2
    t = 0 if m2 == 1 else (diff // g) * pow(m1, -1, m2) % m2
    return Congruence(lcm, (c1.residue + c1.modulus * t) % lcm)


def congruence_merge(k: int, kp: int, q: int, qp: int, a: int, ap: int) -> Congruence | None:
    """Solve k l = a (mod q) and k' l = a' (mod q') simultaneously.

    The returned modulus is [q, q'] when k, k' are prime to q, q'; in general
    it is the lcm of the reduced moduli q/(k,q) and q'/(k',q').  Residues
    need not be reduced; the merge is plain CRT either way.
    """
    if q < 1 or qp < 1:
        raise DomainError("moduli must be positive")
    c1 = solve_linear(k, a, q)
    c2 = solve_linear(kp, ap, qp)
    if c1 is None or c2 is None:
        return None
    return crt_pair(c1, c2)


def _ell_range(p: ProgressionSpec, k: int) -> tuple[int, int]:
    # l with k l in [lo, hi]
    return -(-p.lo // k), p.hi // k


def typeII_inner_decomposed(spec: FSpec, k: int, kp: int, lo: int, hi: int) -> complex:
    """The inner sum rebuilt progression pair by progression pair.

    For each (q, q') the admissible l form one residue class mod r; writing
    l = b + r m turns psi_q((k l - a_q)/q) into the composed phase of psi_q
    at scale k r / q and shift (k b - a_q)/q, and likewise for q'.
    """
    parts = []
    for p, phi in spec.entries:
        for pp, phip in spec.entries:
            c = congruence_merge(k, kp, p.q, pp.q, p.a, pp.a)
            if c is None:
                continue
            l1, h1 = _ell_range(p, k)
            l2, h2 = _ell_range(pp, kp)
            lo_e, hi_e = max(lo, l1, l2), min(hi, h1, h2)
            if lo_e > hi_e:
                continue
            b = lo_e + (c.residue - lo_e) % c.modulus
            if b > hi_e:
                continue
            count = (hi_e - b) // c.modulus + 1
            r = c.modulus
            beta = composed_phase(phi, k * r // p.q, (k * b - p.a) // p.q)
            betap = composed_phase(phip, kp * r // pp.q, (kp * b - pp.a) // pp.q)
            m = np.arange(count)
            parts.append(complex(np.sum(turns_to_unit(phase_turns(beta, m) - phase_turns(betap, m)))))
    return complex(math.fsum(z.real for z in parts), math.fsum(z.imag for z in parts))


def typeII_sum_decomposed(cfg: TypeIIConfig) -> TypeIIResult:
    ks = range(cfg.K, 2 * cfg.K)
    value = math.fsum(abs(typeII_inner_decomposed(cfg.spec, k, kp, *cfg.interval(k, kp)))
                      for k in ks for kp in ks)
    norm = value / (cfg.K ** 2 * cfg.L)
    return TypeIIResult(value, norm, bool(norm >= cfg.delta), cfg.K, cfg.L, cfg.delta)


# -- lcm multiplicities -------------------------------------------------------------

def sigma_D(q: int, D: float) -> int:
    """Number of divisors of q in [D, 8D]."""
    if q < 1 or D <= 0:
        raise DomainError("need q >= 1 and D > 0")
    c = 0
    for d in range(1, math.isqrt(q) + 1):
        if q % d == 0:
            for e in {d, q // d}:
                if D <= e <= 8 * D:
                    c += 1
    return c


def sigma_D_table(Q: int, D: float) -> np.ndarray:
    """sigma_D(q) for q in [Q, 2Q), indexed by q - Q."""
    out = np.zeros(Q, np.int64)
    for d in range(max(1, math.ceil(D)), math.floor(8 * D) + 1):
        first = -(-Q // d) * d
        out[first - Q: Q: d] += 1
    return out


def sigma_D_second_moment(Q: int, D: float) -> int:
    t = sigma_D_table(Q, D)
    return int(np.dot(t, t))


@dataclass(frozen=True)
class LcmStats:
    Q: int
    R: int
    pairs: np.ndarray  # (n, 3): q, q', [q, q']
    mult: np.ndarray  # m_q([q, q']) for each pair
    sigma: np.ndarray  # sigma_D(q) for q in [Q, 2Q)
    D: float

    @property
    def size(self) -> int:
        return len(self.pairs)

    def row_counts(self) -> np.ndarray:
        """#{q' : (q, q') in E} for each q in [Q, 2Q)."""
        return np.bincount(self.pairs[:, 0] - self.Q, minlength=self.Q)

    def m_table(self) -> dict:
        """{(q, r): m_q(r)} over the r that occur."""
        out = {}
        for (q, _, r), m in zip(self.pairs.tolist(), self.mult.tolist()):
            out[(q, r)] = m
        return out

    def histogram(self) -> dict:
        """{m: number of pairs (q, q') with m_q([q, q']) = m}."""
        vals, cnt = np.unique(self.mult, return_counts=True)
        return dict(zip(vals.tolist(), cnt.tolist()))

    def tail(self, m0: int) -> int:
        return int(np.count_nonzero(self.mult >= m0))

    def pointwise_ok(self) -> bool:
        """m_q(r) <= sigma_D(q) for every pair."""
        return bool(np.all(self.mult <= self.sigma[self.pairs[:, 0] - self.Q]))


def lcm_stats(Q: int, R: int, threads: int = 1) -> LcmStats:
    if Q < 1:
        raise DomainError("Q must be positive")
    if not Q <= R <= 4 * Q * Q:
        raise DomainError("need Q <= R <= 4Q^2")
    if Q > LCM_MAX_Q:
        raise CostError(f"lcm_stats enumerates Q^2 pairs; Q={Q} exceeds {LCM_MAX_Q}")
    qp = np.arange(Q, 2 * Q, dtype=np.int64)

    def row(q):
        lcm = q * qp // np.gcd(q, qp)
        keep = (lcm >= R) & (lcm < 2 * R)
        l = lcm[keep]
        _, inv, cnt = np.unique(l, return_inverse=True, return_counts=True)
        return np.column_stack((np.full(len(l), q), qp[keep], l)), cnt[inv]

    qs = range(Q, 2 * Q)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(row, qs))
    else:
        rows = [row(q) for q in qs]
    pairs = np.concatenate([r[0] for r in rows]) if rows else np.zeros((0, 3), np.int64)
    mult = np.concatenate([r[1] for r in rows]) if rows else np.zeros(0, np.int64)
    D = Q * Q / (2 * R)
    return LcmStats(Q, R, pairs.reshape(-1, 3), mult, sigma_D_table(Q, D), D)


# -- the contrapositive at desk scale --------------------------------------------

def single_phase_fspec(q: int, a: int, X: int, phi: PolyPhase, Q: int | None = None) -> FSpec:
    """F = indicator of n = a (mod q) on [0, X] twisted by phi((n - a)/q)."""
    return FSpec(((ProgressionSpec(q, a, 0, X), phi),), q if Q is None else Q, X)


@dataclass(frozen=True)
class ContrapositiveCase:
    normalized: float
    exceeds: bool
    r: int
    residual: float
    r_max: int
    N: int

    @property
    def structured(self) -> bool:
        return self.residual <= self.r_max

    @property
    def consistent(self) -> bool:
        """A large type-II sum must come with a small-denominator approximation."""
        return self.structured or not self.exceeds


def contrapositive_case(phi: PolyPhase, K: int, L: int, q: int, a: int, delta: float,
                        exponent: float = 3.0, threads: int = 1) -> ContrapositiveCase:
    """Type-II sum for a single-phase F, and best_denominator of phi over KL/q
    with r_max = delta^(-exponent)."""
    X = 2 * K * L
    spec = single_phase_fspec(q, a, X, phi)
    res = typeII_sum(TypeIIConfig(K, L, q, delta, spec), threads=threads)
    r_max = int(round(delta ** (-exponent)))
    N = K * L // q
    dio = best_denominator(phi, N, r_max)
    return ContrapositiveCase(res.normalized, res.exceeds, dio.r, dio.residual, r_max, N)
