import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gowersap.arithfn import sieve_spf, table_from_multspec, trial_factorize, unit_table
from gowersap.errors import DomainError
from gowersap.phases import PolyPhase
from gowersap.progressions import FSpec, ProgressionSpec, random_fspec, tabulate_F
from gowersap.ramare import (GSpec, MultSpec, RamareWindow, cauchy_schwarz_gap,
                             coprime_window_count, decompose, dyadic_ranges, g_closed_form,
                             g_partial_sums, mertens_prediction, musq_window,
                             ramare_identity_check, ramare_identity_scan, ramare_weight,
                             sigma_partition, squarefull_numbers, verify_convolution)

W = RamareWindow(3, 10)


# -- decomposition ---------------------------------------------------------------

def test_decompose_mobius():
    _, g = decompose(MultSpec.mobius(), 6)
    for p in (2, 3, 101):
        assert [g.value(p, k) for k in range(1, 5)] == pytest.approx([0, -1, 0, 0])


def test_decompose_completely_multiplicative():
    for f in (MultSpec.liouville(), MultSpec.unit(), MultSpec.random(3, True)):
        _, g = decompose(f, 8)
        assert all(abs(g.value(p, k)) < 1e-15 for p in (2, 5, 13) for k in range(1, 9))


def test_decompose_squarefree():
    _, g = decompose(MultSpec.squarefree(), 5)
    assert g.value(7, 2) == pytest.approx(-1) and g.value(7, 3) == pytest.approx(0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_g_invariants(seed):
    f = MultSpec.random(seed)
    _, g = decompose(f, 10)
    for p in (2, 3, 5, 7):
        assert abs(g.value(p, 1)) < 1e-15
        for k in range(1, 11):
            assert abs(g.value(p, k)) <= 2 + 1e-12
            assert g.value(p, k) == pytest.approx(g_closed_form(f, p, k), abs=1e-12)


def test_g_beyond_kmax():
    _, g = decompose(MultSpec.mobius(), 3)
    with pytest.raises(DomainError):
        g.value(2, 4)


def _conv(f, X):
    fp, g = decompose(f, 20)
    return verify_convolution(table_from_multspec(f, X), table_from_multspec(fp, X), g, X)


def test_verify_convolution_examples():
    assert _conv(MultSpec.mobius(), 10**4) <= 1e-12
    assert _conv(MultSpec.liouville(), 10**4) == 0
    assert _conv(MultSpec.random(17), 10**3) <= 1e-10


def test_verify_convolution_random_specs():
    worst = max(_conv(MultSpec.random(s), 10**4) for s in range(50))
    assert worst <= 1e-10


def test_verify_convolution_catches_wrong_g():
    f = MultSpec.mobius()
    fp, _ = decompose(f, 20)
    zero = GSpec(lambda p, k: 0.0, 20)
    assert verify_convolution(table_from_multspec(f, 100), table_from_multspec(fp, 100), zero, 100) >= 1


def test_squarefull_enumeration():
    got = sorted(n for n, _ in squarefull_numbers(1000))
    want = [n for n in range(1, 1001) if all(e >= 2 for _, e in trial_factorize(n))]
    assert got == want


def test_g_support_squarefull():
    _, g = decompose(MultSpec.mobius(), 20)
    for n in range(2, 3000):
        fac = trial_factorize(n)
        val = math.prod(g.value(p, e) for p, e in fac)
        if val != 0:
            assert all(e >= 2 for _, e in fac)


def test_head_examples():
    _, g = decompose(MultSpec.mobius(), 20)
    assert g_partial_sums(g, 1, want_tail=False).head == pytest.approx(1)
    # n = 1 plus |g| at 4, 9, 25, 36, 49, 100
    assert g_partial_sums(g, 100, want_tail=False).head == pytest.approx(7)


def test_partial_sums_bruteforce():
    f = MultSpec.random(5)
    _, g = decompose(f, 20)
    N, cap = 500, 5000

    def gn(n):
        return math.prod((g.value(p, e) for p, e in trial_factorize(n)), start=1)

    res = g_partial_sums(g, N, cap)
    assert res.head == pytest.approx(sum(abs(gn(n)) for n in range(1, N + 1)), rel=1e-12)
    assert res.tail_weighted == pytest.approx(sum(abs(gn(n)) / n for n in range(N, cap + 1)), rel=1e-12)


# -- weights and the identity -------------------------------------------------------

def test_weight_examples():
    assert ramare_weight(1, W) == 1
    assert ramare_weight(15, W) == Fraction(1, 3)
    assert ramare_weight(2**10, W) == 1
    spf = sieve_spf(1000)
    assert ramare_weight(210, W, spf) == Fraction(1, 4)


def test_identity_examples():
    c = ramare_identity_check(15, W)
    assert (c.lhs, c.expected, c.passed) == (1, 1, True)
    c = ramare_identity_check(8, W)
    assert (c.lhs, c.expected, c.passed) == (0, 0, True)
    c = ramare_identity_check(105, W)
    assert c.lhs == 1 and c.passed
    assert not ramare_identity_check(18, W).applicable


def test_musq_examples():
    assert musq_window(9, W) == 0
    assert musq_window(18, W) == 0
    assert musq_window(12, W) == 1


@pytest.mark.parametrize("Y,Z", [(3, 10), (10, 100), (100, 1000)])
def test_identity_scan_all_n(Y, Z):
    X = 10**5
    w = RamareWindow(Y, Z)
    passed, failed, na = ramare_identity_scan(X, w)
    assert failed == 0
    assert passed + na == X
    bad = np.zeros(X + 1, bool)
    for p in w.primes:
        bad[int(p) ** 2::int(p) ** 2] = True
    assert na == int(bad.sum())


def test_identity_scan_matches_rational_check():
    w = RamareWindow(5, 40)
    X = 3000
    results = [ramare_identity_check(n, w) for n in range(1, X + 1)]
    assert all(r.passed for r in results if r.applicable)
    passed, failed, na = ramare_identity_scan(X, w)
    assert (passed, failed, na) == (sum(r.applicable for r in results), 0,
                                    sum(not r.applicable for r in results))


def test_window_validation():
    with pytest.raises(DomainError):
        RamareWindow(1.5, 10)
    with pytest.raises(DomainError):
        RamareWindow(10, 10)


# -- sieve term ---------------------------------------------------------------------------

def test_coprime_count_examples():
    assert coprime_window_count(ProgressionSpec(1, 0, 1, 100), RamareWindow(2, 10)) == 22
    empty = RamareWindow(24, 29)
    p = ProgressionSpec(7, 3, 0, 5000)
    assert coprime_window_count(p, empty) == p.count()


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 60), st.integers(0, 10**4), st.integers(2, 40), st.integers(1, 200))
def test_coprime_count_bruteforce(q, lo, Y, span):
    a = next(x for x in range(q) if math.gcd(x, q) == 1) if q > 1 else 0
    p = ProgressionSpec(q, a, lo, lo + 37 * span)
    w = RamareWindow(Y, Y + span)
    want = sum(1 for n in p.members().tolist() if all(n % int(r) for r in w.primes))
    assert coprime_window_count(p, w) == want


def test_coprime_ratio_bounded():
    ratios = []
    for Y, Z in ((3, 30), (5, 200), (11, 1000)):
        w = RamareWindow(Y, Z)
        for q in (1, 7, 30):
            p = ProgressionSpec(q, 1 % q, 0, 10**5)
            c = coprime_window_count(p, w)
            ratios.append(c / ((p.length / q) * math.log(Y) / math.log(Z)))
            assert c == pytest.approx(mertens_prediction(p, w), rel=0.2)
    assert max(ratios) <= 3


# -- the partition ---------------------------------------------------------------------------

def test_partition_unit_single_progression():
    X = 10**4
    spec = FSpec(((ProgressionSpec(150, 7, 0, X), PolyPhase.zero()),), 100, X)
    part = sigma_partition(unit_table(X), spec, RamareWindow(10, 100))
    assert part.residual <= 1e-9
    F = tabulate_F(spec)
    assert part.total == pytest.approx(F[1:].sum())


def test_partition_empty():
    X = 10**4
    part = sigma_partition(unit_table(X), FSpec((), 100, X), RamareWindow(10, 100))
    assert part.total == part.part_sigma == part.part_coprime == part.part_musq_zero == 0
    assert part.sigma_prime == 0


def test_partition_direct_sigma(mu):
    # Sigma from its definition with rational weights, on a small range
    X = 2000
    rng = np.random.default_rng(0)
    F = rng.standard_normal(X + 1) + 1j * rng.standard_normal(X + 1)
    w = RamareWindow(3, 30)
    part = sigma_partition(mu, F, w, X)
    sig = 0j
    for n in range(1, X + 1):
        if musq_window(n, w):
            lhs = sum((ramare_weight(n // int(p), w) for p in w.primes if n % int(p) == 0), Fraction(0))
            sig += mu.values[n] * F[n] * float(lhs)
    assert part.part_sigma == pytest.approx(sig, abs=1e-9)
    assert part.sigma_mform == pytest.approx(part.part_sigma, abs=1e-9)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_partition_randomized(seed):
    rng = np.random.default_rng(seed)
    X = 10**4
    spec = random_fspec(rng, 20, X, n_moduli=6, degree=2)
    table = table_from_multspec(MultSpec.random(seed % 1000), X)
    w = RamareWindow(3, 60)
    part = sigma_partition(table, spec, w)
    assert part.residual <= part.tolerance
    tol = part.tolerance
    assert abs(part.sigma_prime - (part.sigma_mform + part.dropped_musq + part.dropped_coprime)) <= tol
    pieces = sum(v for _, v in part.slices) + (part.boundary[1] if part.boundary else 0)
    assert abs(part.sigma_prime - pieces) <= tol
    for P, _ in part.slices:
        assert cauchy_schwarz_gap(table, spec, w, P).ok


def test_dyadic_ranges_cover_window():
    full, bnd = dyadic_ranges(RamareWindow(3, 50))
    assert full == [(3, 6), (6, 12), (12, 24), (24, 48)]
    assert bnd == (48, 50)
    full, bnd = dyadic_ranges(RamareWindow(5, 40))
    assert full[-1] == (20, 40) and bnd is None


def test_cauchy_schwarz_examples(mu):
    X = 10**4
    spec = FSpec(((ProgressionSpec(150, 7, 0, X), PolyPhase(("0.3",))),), 100, X)
    w = RamareWindow(3, 100)
    assert cauchy_schwarz_gap(unit_table(X), spec, w, 3).ok
    gap = cauchy_schwarz_gap(mu, spec, w, 10)
    assert gap.ok and 0 <= gap.ratio <= 1
    zero = cauchy_schwarz_gap(mu, np.zeros(X + 1), w, 10)
    assert zero.lhs == zero.rhs == 0


# -- specs from files -------------------------------------------------------------------------

def test_multspec_from_file(tmp_path):
    path = tmp_path / "chi.txt"
    path.write_text("# a twisted Liouville\ncompletely_multiplicative\n* 1 -1\n3 1 0.6+0.8j\n")
    f = MultSpec.from_file(path)
    assert f.value(3, 2) == pytest.approx((0.6 + 0.8j) ** 2)
    assert f.value(5, 3) == pytest.approx(-1)
    bad = tmp_path / "bad.txt"
    bad.write_text("2 1 2.0\n")
    with pytest.raises(DomainError):
        MultSpec.from_file(bad)
    with pytest.raises(DomainError):
        MultSpec.from_table({(2, 1): -1}).value(3, 1)
