"""Gowers U^k norms of finite sequences on intervals.

Interval convention: f on [0, Y] is embedded (zero padded) in Z/N with
N = 2^k (Y+1), the U^k(Z/N) norm is taken, and the result is divided by the
U^k(Z/N) norm of the indicator of [0, Y].  Any N > 2Y gives the same ratio,
because a combinatorial cube whose vertices all land in [0, Y] mod N is then
an honest cube of integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numba
import numpy as np
from scipy import fft as sfft

from .errors import CostError, DegreeError, DomainError

STRATEGIES = ("auto", "naive", "recursive_fft", "u1_mean")
MAX_K = 6
NAIVE_BUDGET = 2 * 10**9
# rows per batched FFT in the innermost recursion level
_BATCH_ROWS = 256


@dataclass(frozen=True)
class ComplexSeq:
    values: np.ndarray
    bounded: bool = False

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.ndim != 1 or len(v) < 1:
            raise ValueError("ComplexSeq needs a non-empty 1-d array")
        if not np.all(np.isfinite(v)):
            raise ValueError("ComplexSeq values must be finite")
        if self.bounded and np.max(np.abs(v)) > 1 + 1e-12:
            raise ValueError("bounded flag set but max |f| > 1")
        object.__setattr__(self, "values", v)

    @property
    def Y(self) -> int:
        return len(self.values) - 1

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class GowersResult:
    k: int
    norm: float
    raw_numerator: float
    normalizer: float
    strategy: str
    Y: int = field(default=0)


def _as_seq(f) -> ComplexSeq:
    return f if isinstance(f, ComplexSeq) else ComplexSeq(np.asarray(f))


# -- naive enumeration ------------------------------------------------------

@numba.njit(cache=True)
def _cube_sum(f, k):
    """Sum over integer cubes {x + w.h} inside [0, Y] of the conjugated product.

    Direct enumeration; each h_j is restricted to the exact range that keeps
    the newly created vertices inside [0, Y].
    """
    Y1 = f.shape[0]
    nv = 1 << k
    parity = np.zeros(nv, np.bool_)
    for v in range(nv):
        c = 0
        w = v
        while w:
            c += w & 1
            w >>= 1
        parity[v] = (c & 1) == 1
    pos = np.zeros(nv, np.int64)
    prod = np.zeros(k + 1, np.complex128)
    h = np.zeros(k + 1, np.int64)
    hmax = np.zeros(k + 1, np.int64)
    total = 0j
    for x in range(Y1):
        pos[0] = x
        prod[0] = f[x]
        if k == 0:
            total += f[x]
            continue
        level = 1
        h[1] = -x - 1
        hmax[1] = Y1 - 1 - x
        while level > 0:
            h[level] += 1
            if h[level] > hmax[level]:
                level -= 1
                continue
            half = 1 << (level - 1)
            p = prod[level - 1]
            hl = h[level]
            for v in range(half):
                u = pos[v] + hl
                pos[half + v] = u
                if parity[half + v]:
                    p *= np.conj(f[u])
                else:
                    p *= f[u]
            if level == k:
                total += p
            else:
                prod[level] = p
                lo = pos[0]
                hi = pos[0]
                for v in range(1, 2 * half):
                    if pos[v] < lo:
                        lo = pos[v]
                    if pos[v] > hi:
                        hi = pos[v]
                level += 1
                h[level] = -lo - 1
                hmax[level] = Y1 - 1 - hi
    return total


def _naive_sum(values: np.ndarray, k: int) -> float:
    return float(_cube_sum(np.ascontiguousarray(values, dtype=np.complex128), k).real)


# -- Fourier / recursive route ----------------------------------------------

def _u2_sum(g: np.ndarray) -> float:
    """sum_{x,h1,h2} g(x) conj g(x+h1) conj g(x+h2) g(x+h1+h2) on Z/N."""
    F = sfft.fft(g)
    a = np.abs(F) ** 2
    return float(np.dot(a, a)) / len(g)


def _u2_sums_batch(rows: np.ndarray) -> np.ndarray:
    F = sfft.fft(rows, axis=1)
    a = (F.real ** 2 + F.imag ** 2)
    return np.einsum("ij,ij->i", a, a) / rows.shape[1]


def _diff(g: np.ndarray, h: int) -> np.ndarray:
    # cyclic multiplicative derivative: g(x+h) conj g(x)
    return np.roll(g, -h) * np.conj(g)


def _u3_interval_sum(seg: np.ndarray) -> float:
    """U^3 count over Z of a sequence supported on [0, m).

    Each derivative seg(x+h) conj seg(x) lives on an interval of length at
    most m, and its U^2 count over Z equals the cyclic one for any modulus
    >= 2m - 1, so every row uses a short FFT instead of the full embedding.
    """
    m = len(seg)
    if m == 0:
        return 0.0
    M = sfft.next_fast_len(2 * m)
    padded = np.zeros(3 * m, np.complex128)
    padded[m:2 * m] = seg
    cs = np.conj(seg)[None, :]
    base = np.arange(m)[None, :] + m
    hs = np.arange(-(m - 1), m)
    parts = []
    for start in range(0, len(hs), _BATCH_ROWS):
        chunk = hs[start:start + _BATCH_ROWS]
        rows = padded[base + chunk[:, None]] * cs
        F = sfft.fft(rows, n=M, axis=1)
        a = F.real ** 2 + F.imag ** 2
        parts.extend((np.einsum("ij,ij->i", a, a) / M).tolist())
    return math.fsum(parts)


def _recursive_sum(g: np.ndarray, k: int, lo: int, hi: int, cyclic: bool) -> float:
    """Unnormalized U^k sum of g on Z/N.

    When ``cyclic`` is False the support of g is the interval [lo, hi]
    without wraparound and only |h| <= hi - lo contribute; otherwise every
    h in Z/N is used.
    """
    N = len(g)
    if k == 1:
        s = g.sum()
        return float(s.real ** 2 + s.imag ** 2)
    if k == 2:
        return _u2_sum(g)
    if k == 3 and not cyclic:
        return _u3_interval_sum(g[lo:hi + 1]) if hi >= lo else 0.0
    if cyclic:
        hs = np.arange(N)
    else:
        w = hi - lo
        if w < 0:
            return 0.0
        hs = np.arange(-w, w + 1)
    if k == 3:
        parts = []
        for start in range(0, len(hs), _BATCH_ROWS):
            chunk = hs[start:start + _BATCH_ROWS]
            idx = (np.arange(N)[None, :] + chunk[:, None]) % N
            rows = g[idx] * np.conj(g)[None, :]
            parts.extend(_u2_sums_batch(rows).tolist())
        return math.fsum(parts)
    parts = []
    for h in hs:
        h = int(h)
        d = _diff(g, h % N)
        if cyclic:
            parts.append(_recursive_sum(d, k - 1, 0, N - 1, True))
        else:
            nlo, nhi = max(lo, lo - h), min(hi, hi - h)
            if nlo > nhi:
                continue
            parts.append(_recursive_sum(d, k - 1, nlo, nhi, False))
    return math.fsum(parts)


def cyclic_gowers_norm(values, k: int) -> float:
    """Averaged U^k norm on Z/N, N = len(values), with no interval embedding."""
    if k < 1:
        raise DegreeError("k must be at least 1")
    g = np.asarray(values, dtype=np.complex128)
    N = len(g)
    s = _recursive_sum(g, k, 0, N - 1, cyclic=True)
    avg = s / float(N) ** (k + 1)
    return max(avg, 0.0) ** (1.0 / 2 ** k)


def cyclic_gowers_norm_naive(values, k: int) -> float:
    """Brute force over all (x, h_1..h_k) in (Z/N)^{k+1}; for tiny N only."""
    g = np.asarray(values, dtype=np.complex128)
    N = len(g)
    if N ** (k + 1) > 10**7:
        raise CostError("naive cyclic enumeration too large")
    grids = np.meshgrid(*([np.arange(N)] * (k + 1)), indexing="ij")
    x, hs = grids[0], grids[1:]
    prod = np.ones(x.shape, np.complex128)
    for v in range(1 << k):
        pos = x.copy()
        bits = 0
        for j in range(k):
            if v >> j & 1:
                pos = pos + hs[j]
                bits += 1
        val = g[pos % N]
        prod *= np.conj(val) if bits % 2 else val
    avg = prod.sum().real / N ** (k + 1)
    return max(avg, 0.0) ** (1.0 / 2 ** k)


def _embedded_sum(values: np.ndarray, k: int, N: int) -> float:
    Y = len(values) - 1
    g = np.zeros(N, np.complex128)
    g[: Y + 1] = values
    return _recursive_sum(g, k, 0, Y, cyclic=False)


@lru_cache(maxsize=256)
def _indicator_sum(k: int, Y: int, N: int) -> float:
    return _embedded_sum(np.ones(Y + 1, np.complex128), k, N)


def choose_strategy(k: int, Y: int) -> str:
    if k == 1:
        return "u1_mean"
    return "recursive_fft"


def gowers_norm(f, k: int, strategy: str = "auto", embed_size: int | None = None,
                naive_budget: int = NAIVE_BUDGET) -> GowersResult:
    """Interval-normalized U^k norm of f on [0, Y].

    ``embed_size`` overrides N = 2^k (Y+1); it must exceed 2Y.
    """
    if k < 1:
        raise DegreeError("k must be at least 1")
    if k > MAX_K:
        raise DegreeError(f"k > {MAX_K} is not supported")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    seq = _as_seq(f)
    values = seq.values
    Y = seq.Y
    if strategy == "auto":
        strategy = choose_strategy(k, Y)
    if strategy == "u1_mean":
        if k != 1:
            raise DegreeError("u1_mean applies only to k = 1")
        s = values.sum()
        raw = float(abs(s) ** 2)
        norm_ = float((Y + 1) ** 2)
        return GowersResult(1, float(abs(s)) / (Y + 1), raw, norm_, "u1_mean", Y)
    N = embed_size if embed_size is not None else 2 ** k * (Y + 1)
    if N <= 2 * Y:
        raise ValueError("embedding group must have order > 2Y")
    scale = float(N) ** (k + 1)
    if strategy == "naive":
        if (Y + 1) ** (k + 1) > naive_budget:
            raise CostError(f"naive U^{k} on Y={Y} needs ~{(Y + 1) ** (k + 1):.3g} "
                            f"operations (budget {naive_budget:.3g})")
        num = _naive_sum(values, k)
        den = _naive_sum(np.ones(Y + 1), k)
    else:
        num = _embedded_sum(values, k, N)
        den = _indicator_sum(k, Y, N)
    raw, normalizer = max(num, 0.0) / scale, den / scale
    norm = (raw / normalizer) ** (1.0 / 2 ** k)
    return GowersResult(k, float(norm), raw, normalizer, strategy, Y)


def multiplicative_derivative(f, h: int, N: int | None = None) -> ComplexSeq:
    """g[n] = f[n+h] conj f[n] on the overlap of [0,Y] and [-h, Y-h].

    The result is indexed like f (positions 0..Y), zero off the overlap,
    then zero padded to length N when N is given.
    """
    seq = _as_seq(f)
    v = seq.values
    Y = seq.Y
    if abs(h) > Y:
        raise DomainError("|h| must not exceed Y")
    size = Y + 1 if N is None else N
    if size < Y + 1:
        raise ValueError("N must be at least Y+1")
    g = np.zeros(size, np.complex128)
    lo, hi = max(0, -h), min(Y, Y - h)
    if lo <= hi:
        n = np.arange(lo, hi + 1)
        g[lo:hi + 1] = v[n + h] * np.conj(v[n])
    return ComplexSeq(g)


def progression_sequence(table, q: int, a: int, X: int) -> ComplexSeq:
    """m -> table[n_0 + q m] along the positive n <= X with n = a (mod q).

    n_0 is the least positive member of the class (a itself unless a = 0,
    which happens only for q = 1 and then gives the interval [1, X]).
    """
    if q < 1:
        raise DomainError("q must be positive")
    if not 0 <= a < q:
        raise DomainError("need 0 <= a < q")
    if math.gcd(a, q) != 1:
        raise DomainError(f"residue {a} is not reduced mod {q}")
    if X > table.upper_bound:
        raise DomainError(f"X={X} exceeds table bound {table.upper_bound}")
    n0 = a if a > 0 else q
    if X < n0:
        raise DomainError("progression is empty")
    vals = np.asarray(table.values[n0:X + 1:q], dtype=np.complex128)
    return ComplexSeq(vals, bounded=True)


def gowers_norm_in_progression(table, q: int, a: int, X: int, k: int,
                               strategy: str = "auto") -> GowersResult:
    """||f(q . + a)||_{U^k(X/q)} for the tabulated function f."""
    if q > X:
        raise DomainError("need q <= X")
    return gowers_norm(progression_sequence(table, q, a, X), k, strategy)
