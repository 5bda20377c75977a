"""Polynomial phases n -> e(a_s n^s + ... + a_1 n + a_0) on the torus.

Coefficients are kept as exact rationals reduced mod 1.  Evaluation goes
through 64-bit fixed point: each coefficient becomes an integer A_i with
a_i ~ A_i / 2^64, and the phase sum_i A_i n^i is accumulated with wrapping
uint64 arithmetic, which is arithmetic mod 1 with no loss as n grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numba
import numpy as np

from .errors import CostError, DomainError
from .gowers import ComplexSeq

TWO64 = 1 << 64
EQUIDIST_BUDGET = 5 * 10**10


def _frac_mod1(x) -> Fraction:
    if isinstance(x, str):
        x = Fraction(x.strip())
    f = Fraction(x)
    return f - math.floor(f)


@dataclass(frozen=True)
class PolyPhase:
    """Coefficients (a_1, ..., a_s) mod 1 plus an optional constant a_0."""

    coeffs: tuple
    alpha0: Fraction = Fraction(0)

    def __post_init__(self):
        cs = tuple(_frac_mod1(c) for c in self.coeffs)
        if len(cs) < 1:
            raise ValueError("a phase needs degree s >= 1")
        object.__setattr__(self, "coeffs", cs)
        object.__setattr__(self, "alpha0", _frac_mod1(self.alpha0))

    @classmethod
    def zero(cls, s: int = 1) -> "PolyPhase":
        return cls((0,) * s)

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    @property
    def alphas(self) -> tuple[float, ...]:
        return tuple(float(c) for c in self.coeffs)

    def all_coeffs(self) -> tuple[Fraction, ...]:
        """(a_0, a_1, ..., a_s)."""
        return (self.alpha0,) + self.coeffs

    def fixed_point(self) -> list[int]:
        return [round(c * TWO64) % TWO64 for c in self.all_coeffs()]

    def value_at(self, n: int) -> Fraction:
        """Exact phase at integer n, reduced mod 1."""
        return _frac_mod1(sum(c * n ** i for i, c in enumerate(self.all_coeffs())))

    def scaled(self, m: int) -> "PolyPhase":
        return PolyPhase(tuple(m * c for c in self.coeffs), m * self.alpha0)


def phase_turns(phi: PolyPhase, n) -> np.ndarray:
    """phi(n) mod 1 as uint64 fixed point (2^64 = one turn)."""
    n = np.asarray(n, dtype=np.int64).view(np.uint64)
    A = [np.uint64(a) for a in phi.fixed_point()]
    acc = np.full(n.shape, A[-1], dtype=np.uint64)
    for a in reversed(A[:-1]):
        acc = acc * n + a
    return acc


def turns_to_unit(turns: np.ndarray) -> np.ndarray:
    angle = (turns >> np.uint64(11)).astype(np.float64) * (2.0 * math.pi / 2.0 ** 53)
    return np.exp(1j * angle)


def phase_values(phi: PolyPhase, n) -> np.ndarray:
    """e(phi(n)) for an integer array n."""
    return turns_to_unit(phase_turns(phi, n))


def eval_phase(phi: PolyPhase, N: int) -> ComplexSeq:
    if N < 1:
        raise ValueError("N must be positive")
    return ComplexSeq(phase_values(phi, np.arange(N)), bounded=True)


def weyl_sum(phi: PolyPhase, start: int, step: int, length: int, m: int = 1) -> complex:
    """(1/length) sum_{j<length} e(m phi(start + j step))."""
    if length < 1:
        raise ValueError("length must be positive")
    n = start + step * np.arange(length, dtype=np.int64)
    turns = phase_turns(phi, n) * np.uint64(m % TWO64)
    return complex(turns_to_unit(turns).mean())


def composed_phase(phi: PolyPhase, scale: int, shift: int = 0) -> PolyPhase:
    """Coefficients of m -> phi(scale m + shift), exact, reduced mod 1.

    beta_i = scale^i sum_{j >= i} a_j C(j, i) shift^(j - i).
    """
    if scale < 1 or int(scale) != scale:
        raise DomainError("scale must be a positive integer")
    if shift < 0 or int(shift) != shift:
        raise DomainError("shift must be a nonnegative integer")
    a = phi.all_coeffs()
    s = phi.degree
    beta = []
    for i in range(s + 1):
        tot = sum(a[j] * comb(j, i) * shift ** (j - i) for j in range(i, s + 1))
        beta.append(tot * scale ** i)
    return PolyPhase(tuple(beta[1:]), beta[0])


def _dist_int(x: Fraction) -> Fraction:
    """Distance to the nearest integer."""
    f = x - math.floor(x)
    return min(f, 1 - f)


def smoothness_norm(phi: PolyPhase, N: int) -> float:
    """max_i N^i ||a_i||."""
    return float(max(N ** i * _dist_int(c) for i, c in enumerate(phi.coeffs, start=1)))


@dataclass(frozen=True)
class DioApprox:
    r: int
    residual: float
    N: int
    exact_residual: Fraction = Fraction(0)
    convergent_agrees: bool | None = None


def convergents(x: Fraction):
    """Yield continued-fraction convergents p/q of a rational x."""
    p0, q0, p1, q1 = 0, 1, 1, 0
    num, den = x.numerator, x.denominator
    while den:
        a, rem = divmod(num, den)
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
        yield Fraction(p1, q1)
        num, den = den, rem


def best_denominator(phi: PolyPhase, N: int, r_max: int) -> DioApprox:
    """r in [1, r_max] minimizing max_i N^i ||r a_i|| (ties -> smallest r)."""
    if r_max < 1:
        raise ValueError("r_max must be >= 1")
    coeffs = phi.coeffs
    D = 1
    for c in coeffs:
        D = D * c.denominator // math.gcd(D, c.denominator)
    nums = [int(c * D) for c in coeffs]
    weights = [N ** i for i in range(1, len(coeffs) + 1)]
    best_r, best_val = 0, None
    for r in range(1, r_max + 1):
        worst = 0
        for a, w in zip(nums, weights):
            x = r * a % D
            v = w * min(x, D - x)
            if v > worst:
                worst = v
        if best_val is None or worst < best_val:
            best_r, best_val = r, worst
            if worst == 0:
                break
    exact = Fraction(best_val, D)
    agrees = None
    if len(coeffs) == 1:
        a = coeffs[0]
        cands = [c.denominator for c in convergents(a) if c.denominator <= r_max]
        q_best = cands[-1]
        agrees = _dist_int(q_best * a) == _dist_int(best_r * a)
    return DioApprox(best_r, float(exact), N, exact, agrees)


# -- total equidistribution -------------------------------------------------

@dataclass(frozen=True)
class EquidistReport:
    delta: float
    defect: float
    witness: tuple  # (start, step, length, frequency)
    N: int = 0

    @property
    def equidistributed(self) -> bool:
        return self.defect <= self.delta


@numba.njit(cache=True)
def _best_run(prefix, lmin, lmax):
    """Max over runs [a, b) with lmin <= b - a <= lmax of |prefix[b]-prefix[a]|/(b-a)."""
    n = prefix.shape[0] - 1
    best = -1.0
    best_a = 0
    best_len = 0
    for a in range(0, n - lmin + 1):
        pa = prefix[a]
        top = min(n, a + lmax)
        for b in range(a + lmin, top + 1):
            z = prefix[b] - pa
            L = b - a
            v = (z.real * z.real + z.imag * z.imag) / (L * L)
            if v > best:
                best = v
                best_a = a
                best_len = L
    return math.sqrt(max(best, 0.0)), best_a, best_len


def equidist_cost(N: int, delta: float, m_max: int | None = None) -> float:
    lmin = math.ceil(delta * N)
    c = math.ceil(1 / delta)
    m_max = c if m_max is None else m_max
    return float(m_max) * c * N * lmin


def equidist_defect(phi: PolyPhase, N: int, delta: float, m_max: int | None = None,
                    budget: float = EQUIDIST_BUDGET) -> EquidistReport:
    """Largest |average of e(m phi)| over sub-progressions of [0, N).

    Steps d <= ceil(1/delta), frequencies 1 <= m <= m_max (default
    ceil(1/delta); -m gives the conjugate average), lengths >= delta N.
    Runs longer than 2 lmin - 1 split into two admissible runs whose averages
    bound theirs, so only lengths in [lmin, 2 lmin - 1] are scanned.
    Ties within 1e-12 keep the earlier witness in (m, d, residue, start)
    order.
    """
    if not 0 < delta < 0.5:
        raise ValueError("delta must lie in (0, 1/2)")
    if N < 2 / delta:
        raise ValueError("need N >= 2/delta")
    c = math.ceil(1 / delta)
    m_max = c if m_max is None else m_max
    if equidist_cost(N, delta, m_max) > budget:
        raise CostError(f"equidistribution scan needs ~{equidist_cost(N, delta, m_max):.3g} "
                        f"evaluations (budget {budget:.3g})")
    lmin = math.ceil(delta * N)
    turns = phase_turns(phi, np.arange(N))
    best = -1.0
    witness = (0, 1, N, 1)
    for m in range(1, m_max + 1):
        u = turns_to_unit(turns * np.uint64(m))
        for d in range(1, c + 1):
            for r in range(d):
                sub = u[r::d]
                if len(sub) < lmin:
                    continue
                prefix = np.concatenate(([0j], np.cumsum(sub)))
                v, a, L = _best_run(prefix, lmin, 2 * lmin - 1)
                if v > best + 1e-12:
                    best = v
                    witness = (r + a * d, d, L, m)
    return EquidistReport(delta, min(best, 1.0), witness, N)
