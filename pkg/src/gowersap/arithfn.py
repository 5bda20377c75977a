"""Sieve tabulation of the arithmetic functions studied here.

Everything is built on a linear (smallest-prime-factor) sieve compiled with
numba.  Tables index n directly, so ``values[n]`` is f(n) for 1 <= n <= X.
Slot 0 holds the value used when a progression touches n = 0: 0 for the
Mobius/Liouville/custom kinds and 1 for the unit function.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numba
import numpy as np

from .errors import CapacityError, DomainError

MAX_ENTRIES = 10**9

KIND_TAGS = {"mobius": 1, "liouville": 2, "unit": 3, "custom": 4}
_TAG_KINDS = {v: k for k, v in KIND_TAGS.items()}

CACHE_MAGIC = b"GPAT"
CACHE_VERSION = 1


@dataclass(frozen=True)
class SpfTable:
    upper_bound: int
    spf: np.ndarray

    def factorize(self, n: int) -> list[tuple[int, int]]:
        return factorize(n, self)


@dataclass(frozen=True)
class ArithTable:
    """Dense values of an arithmetic function on [0, X]."""

    kind: str
    upper_bound: int
    values: np.ndarray
    name: str = ""

    def __post_init__(self):
        if self.kind not in KIND_TAGS:
            raise ValueError(f"unknown table kind {self.kind!r}")
        if len(self.values) != self.upper_bound + 1:
            raise ValueError("values must cover indices 0..X")
        self.values.flags.writeable = False

    def __getitem__(self, n):
        return self.values[n]

    def __len__(self):
        return len(self.values)

    def as_complex(self) -> np.ndarray:
        return self.values.astype(np.complex128)

    def as_float(self) -> np.ndarray:
        if np.iscomplexobj(self.values):
            raise TypeError("table is complex valued")
        return self.values.astype(np.float64)


def _check_capacity(X: int, max_entries: int | None) -> None:
    limit = MAX_ENTRIES if max_entries is None else max_entries
    if X + 1 > limit:
        raise CapacityError(f"X={X} exceeds the memory budget of {limit} table entries")


@numba.njit(cache=True)
def _linear_sieve_spf(X):
    spf = np.zeros(X + 1, np.int32)
    if X >= 1:
        spf[1] = 1
    primes = np.empty(max(16, int(1.3 * X / max(1.0, math.log(max(X, 2)))) + 16), np.int32)
    n_primes = 0
    for i in range(2, X + 1):
        if spf[i] == 0:
            spf[i] = i
            primes[n_primes] = i
            n_primes += 1
        si = spf[i]
        for j in range(n_primes):
            p = primes[j]
            if p > si or np.int64(i) * p > X:
                break
            spf[i * p] = p
    return spf


@numba.njit(cache=True)
def _linear_sieve_mobius(X):
    # 2 marks "not yet reached"; only primes are still unmarked when visited
    mu = np.full(X + 1, 2, np.int8)
    mu[0] = 0
    if X >= 1:
        mu[1] = 1
    primes = np.empty(max(16, int(1.3 * X / max(1.0, math.log(max(X, 2)))) + 16), np.int32)
    n_primes = 0
    for i in range(2, X + 1):
        if mu[i] == 2:
            mu[i] = -1
            primes[n_primes] = i
            n_primes += 1
        mi = mu[i]
        for j in range(n_primes):
            p = primes[j]
            ip = np.int64(i) * p
            if ip > X:
                break
            if i % p == 0:
                mu[ip] = 0
                break
            mu[ip] = -mi
    return mu


@numba.njit(cache=True)
def _linear_sieve_liouville(X):
    lam = np.zeros(X + 1, np.int8)
    if X >= 1:
        lam[1] = 1
    primes = np.empty(max(16, int(1.3 * X / max(1.0, math.log(max(X, 2)))) + 16), np.int32)
    n_primes = 0
    for i in range(2, X + 1):
        if lam[i] == 0:
            lam[i] = -1
            primes[n_primes] = i
            n_primes += 1
        li = lam[i]
        for j in range(n_primes):
            p = primes[j]
            ip = np.int64(i) * p
            if ip > X:
                break
            lam[ip] = -li
            if i % p == 0:
                break
    return lam


@numba.njit(cache=True)
def _multiplicative_fill(spf, pp_values, out):
    # out[n] = out[n / p^e] * pp_values[p^e] with p = spf[n]
    X = spf.shape[0] - 1
    ppow = np.zeros(X + 1, np.int64)
    for n in range(2, X + 1):
        p = spf[n]
        m = n // p
        if m > 1 and spf[m] == p:
            ppow[n] = ppow[m] * p
        else:
            ppow[n] = p
        out[n] = out[n // ppow[n]] * pp_values[ppow[n]]


def sieve_spf(X: int, max_entries: int | None = None) -> SpfTable:
    if X < 1:
        raise ValueError("X must be positive")
    _check_capacity(X, max_entries)
    if X >= 2**31:
        raise CapacityError("spf table is int32; X must be below 2**31")
    spf = _linear_sieve_spf(X)
    spf.flags.writeable = False
    return SpfTable(X, spf)


def sieve_mobius(X: int, max_entries: int | None = None) -> ArithTable:
    if X < 1:
        raise ValueError("X must be positive")
    _check_capacity(X, max_entries)
    return ArithTable("mobius", X, _linear_sieve_mobius(X))


def sieve_liouville(X: int, max_entries: int | None = None) -> ArithTable:
    if X < 1:
        raise ValueError("X must be positive")
    _check_capacity(X, max_entries)
    return ArithTable("liouville", X, _linear_sieve_liouville(X))


def unit_table(X: int, max_entries: int | None = None) -> ArithTable:
    _check_capacity(X, max_entries)
    return ArithTable("unit", X, np.ones(X + 1, np.int8))


def prime_powers(X: int, spf: SpfTable | None = None):
    """Yield (p, k, p**k) for every prime power p**k <= X."""
    if spf is None:
        spf = sieve_spf(max(X, 2))
    primes = np.flatnonzero(spf.spf[: X + 1] == np.arange(X + 1))
    for p in primes:
        p = int(p)
        if p < 2:
            continue
        pk, k = p, 1
        while pk <= X:
            yield p, k, pk
            pk *= p
            k += 1


def multiplicative_values(value, X: int, bound: float = 1.0, spf: SpfTable | None = None) -> np.ndarray:
    """Complex array of a multiplicative function given by value(p, k).

    Raises DomainError if some |value(p, k)| exceeds ``bound``.
    """
    if spf is None or spf.upper_bound < X:
        spf = sieve_spf(max(X, 2))
    pp = np.zeros(X + 1, np.complex128)
    for p, k, pk in prime_powers(X, spf):
        v = complex(value(p, k))
        if abs(v) > bound + 1e-12:
            raise DomainError(f"|f({p}^{k})| = {abs(v):.6g} exceeds {bound}")
        pp[pk] = v
    out = np.zeros(X + 1, np.complex128)
    if X >= 1:
        out[1] = 1.0
    _multiplicative_fill(spf.spf[: X + 1], pp, out)
    return out


def table_from_multspec(spec, X: int, spf: SpfTable | None = None,
                        max_entries: int | None = None) -> ArithTable:
    """Tabulate the multiplicative function described by ``spec``.

    ``spec`` needs a ``value(p, k)`` method (see ramare.MultSpec).
    """
    _check_capacity(X, max_entries)
    values = multiplicative_values(spec.value, X, bound=1.0, spf=spf)
    name = getattr(spec, "name", "")
    return ArithTable("custom", X, values, name=name)


def factorize(n: int, spf: SpfTable) -> list[tuple[int, int]]:
    if n < 1 or n > spf.upper_bound:
        raise DomainError(f"n={n} outside the sieved range [1, {spf.upper_bound}]")
    out = []
    s = spf.spf
    while n > 1:
        p = int(s[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return out


def trial_factorize(n: int) -> list[tuple[int, int]]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def primes_in(lo: float, hi: float) -> np.ndarray:
    """Primes p with lo <= p < hi."""
    top = math.ceil(hi) - 1
    if top < 2:
        return np.zeros(0, np.int64)
    spf = _linear_sieve_spf(top)
    n = np.arange(top + 1)
    ps = np.flatnonzero((spf == n) & (n >= 2))
    return ps[ps >= lo].astype(np.int64)


# -- cache files ------------------------------------------------------------

def cache_path(cache_dir, kind: str, X: int) -> Path:
    return Path(cache_dir) / f"{kind}_{X}.gpat"


def save_table(table: ArithTable, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = CACHE_MAGIC + struct.pack("<IBQ", CACHE_VERSION, KIND_TAGS[table.kind], table.upper_bound)
    body = table.values[1:]
    if table.kind == "custom":
        body = np.ascontiguousarray(body, dtype="<c16")
    else:
        body = np.ascontiguousarray(body, dtype=np.int8)
    tmp = path.with_suffix(".tmp")
    with open(tmp, "wb") as fh:
        fh.write(header)
        fh.write(body.tobytes())
    tmp.replace(path)
    return path


def load_table(path) -> ArithTable:
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(4 + 13)
        if head[:4] != CACHE_MAGIC:
            raise ValueError(f"{path}: not a GPAT cache file")
        version, tag, X = struct.unpack("<IBQ", head[4:])
        if version != CACHE_VERSION:
            raise ValueError(f"{path}: unsupported cache version {version}")
        kind = _TAG_KINDS[tag]
        dtype = np.dtype("<c16") if kind == "custom" else np.dtype(np.int8)
        body = np.frombuffer(fh.read(), dtype=dtype)
    if len(body) != X:
        raise ValueError(f"{path}: truncated value array")
    values = np.empty(X + 1, dtype=np.complex128 if kind == "custom" else np.int8)
    values[0] = 1 if kind == "unit" else 0
    values[1:] = body
    return ArithTable(kind, int(X), values)


_BUILDERS = {"mobius": sieve_mobius, "liouville": sieve_liouville, "unit": unit_table}


def build_table(kind: str, X: int, cache_dir=None) -> ArithTable:
    """Build a builtin table, going through the cache directory when given."""
    if kind not in _BUILDERS:
        raise ValueError(f"no builtin sieve for kind {kind!r}")
    if cache_dir is not None:
        path = cache_path(cache_dir, kind, X)
        if path.exists():
            return load_table(path)
        table = _BUILDERS[kind](X)
        save_table(table, path)
        return table
    return _BUILDERS[kind](X)
