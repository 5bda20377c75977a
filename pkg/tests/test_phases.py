import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gowersap.errors import CostError, DomainError
from gowersap.gowers import gowers_norm
from gowersap.phases import (PolyPhase, best_denominator, composed_phase, convergents,
                             equidist_defect, eval_phase, phase_turns, phase_values,
                             smoothness_norm, weyl_sum)

GOLDEN = "0.6180339887"


def exact_unit(phi: PolyPhase, n: int) -> complex:
    t = phi.value_at(n)
    return cmath.exp(2j * math.pi * float(t))


def test_polyphase_mod_one():
    phi = PolyPhase((1.25, -0.5), 3.75)
    assert phi.coeffs == (Fraction(1, 4), Fraction(1, 2))
    assert phi.alpha0 == Fraction(3, 4)
    assert phi.degree == 2
    assert PolyPhase(("1/3",)).coeffs[0] == Fraction(1, 3)
    with pytest.raises(ValueError):
        PolyPhase(())


def test_eval_zero_and_half():
    assert np.allclose(eval_phase(PolyPhase.zero(3), 10).values, 1)
    v = eval_phase(PolyPhase(("1/2",)), 10).values
    assert np.allclose(v, [(-1) ** n for n in range(10)], atol=1e-15)


def test_eval_quarter_square():
    phi = PolyPhase((0, "1/4"))
    v = eval_phase(phi, 8).values
    want = [exact_unit(phi, n) for n in range(8)]
    assert np.allclose(v, want, atol=1e-15)
    assert np.allclose(v[:4], v[4:])


def test_unit_modulus(rng):
    phi = PolyPhase(tuple(rng.random(3).tolist()))
    assert np.allclose(np.abs(eval_phase(phi, 5000).values), 1, atol=1e-12)


def test_fixed_point_exact_for_dyadic_coefficients():
    phi = PolyPhase((Fraction(123456789, 2**40), Fraction(987654321, 2**40)))
    n = np.array([10**9 - 7, 999_999_937, 123_456_789])
    got = phase_values(phi, n)
    want = [exact_unit(phi, int(x)) for x in n]
    assert np.allclose(got, want, atol=1e-12)


def test_fixed_point_error_bound(rng):
    phi = PolyPhase(tuple(Fraction(float(x)) for x in rng.random(2)))
    for n in (10**3, 10**5, 10**6):
        turns = int(phase_turns(phi, np.array([n]))[0])
        exact = phi.value_at(n)
        err = abs(Fraction(turns, 2**64) - exact)
        err = min(err, 1 - err)
        assert err <= Fraction(sum(n**i for i in range(3)), 2**64)


def test_weyl_examples():
    assert weyl_sum(PolyPhase.zero(), 0, 1, 50) == pytest.approx(1)
    assert abs(weyl_sum(PolyPhase((GOLDEN,)), 0, 1, 10**4)) <= 0.02
    assert abs(weyl_sum(PolyPhase(("1/3",)), 2, 3, 40)) == pytest.approx(1, abs=1e-12)


def test_weyl_frequency(rng):
    phi = PolyPhase(tuple(rng.random(2).tolist()))
    direct = np.mean([exact_unit(phi.scaled(3), 5 + 2 * j) for j in range(300)])
    assert abs(weyl_sum(phi, 5, 2, 300, m=3) - direct) <= 1e-10


def test_smoothness_examples():
    assert smoothness_norm(PolyPhase.zero(2), 100) == 0
    assert smoothness_norm(PolyPhase((0, "0.000001")), 1000) == pytest.approx(1.0)
    assert smoothness_norm(PolyPhase(("0.5",)), 100) == 50


def test_best_denominator_examples():
    d = best_denominator(PolyPhase(("1/2",)), 10**6, 10)
    assert (d.r, d.residual) == (2, 0)
    d = best_denominator(PolyPhase(("3/7",)), 50, 20)
    assert (d.r, d.residual, d.convergent_agrees) == (7, 0, True)
    d = best_denominator(PolyPhase(("0.333336", "0.2500004")), 1000, 100)
    assert d.r == 12
    oracle = min(range(1, 101), key=lambda r: (max(
        1000 ** i * min(x % 1, 1 - x % 1)
        for i, x in ((1, r * Fraction("0.333336")), (2, r * Fraction("0.2500004")))), r))
    assert d.r == oracle
    assert d.residual == pytest.approx(4.8)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.fractions(min_value=0, max_value=1, max_denominator=10**6), min_size=1, max_size=3),
       st.integers(1, 10**4))
def test_rmax_one_is_smoothness(coeffs, N):
    phi = PolyPhase(tuple(coeffs))
    assert best_denominator(phi, N, 1).residual == pytest.approx(smoothness_norm(phi, N), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.fractions(min_value=0, max_value=1, max_denominator=10**9), st.integers(1, 400))
def test_continued_fraction_agreement(alpha, r_max):
    d = best_denominator(PolyPhase((alpha,)), 1, r_max)
    assert d.convergent_agrees
    assert list(convergents(Fraction(alpha)))[-1] == alpha


def test_equidist_examples():
    rep = equidist_defect(PolyPhase.zero(), 1000, 0.1)
    assert rep.defect == pytest.approx(1) and not rep.equidistributed
    rep = equidist_defect(PolyPhase((GOLDEN,)), 10**4, 0.1)
    assert rep.defect <= 0.1 and rep.equidistributed
    rep = equidist_defect(PolyPhase(("1/5",)), 10**4, 0.1)
    assert rep.defect >= 0.99 and rep.witness[1] == 5
    start, step, length, m = rep.witness
    assert length >= 0.1 * 10**4 and step >= 1


def test_equidist_witness_is_real(rng):
    phi = PolyPhase(tuple(rng.random(2).tolist()))
    rep = equidist_defect(phi, 600, 0.2)
    start, step, length, m = rep.witness
    assert abs(weyl_sum(phi, start, step, length, m)) == pytest.approx(rep.defect, abs=1e-12)


def test_equidist_bruteforce(rng):
    phi = PolyPhase(tuple(rng.random(2).tolist()))
    N, delta = 120, 0.25
    rep = equidist_defect(phi, N, delta)
    best = 0.0
    u = phase_values(phi, np.arange(N))
    for m in range(1, 5):
        for d in range(1, 5):
            for a in range(N):
                for L in range(30, (N - 1 - a) // d + 2):
                    best = max(best, abs(np.mean(u[a:a + d * L:d][:L] ** m)))
    assert rep.defect == pytest.approx(best, abs=1e-9)


def test_equidist_monotone_in_delta(rng):
    for _ in range(3):
        phi = PolyPhase(tuple(rng.random(2).tolist()))
        vals = [equidist_defect(phi, 1500, d).defect for d in (0.3, 0.2, 0.1)]
        assert vals[0] <= vals[1] + 1e-12 <= vals[2] + 2e-12


def test_equidist_errors():
    with pytest.raises(CostError):
        equidist_defect(PolyPhase(("0.1",)), 10**7, 0.01)
    with pytest.raises(ValueError):
        equidist_defect(PolyPhase(("0.1",)), 100, 0.6)


def test_composed_phase_examples():
    phi = PolyPhase(("0.3", "0.7"), "0.1")
    assert composed_phase(phi, 1, 0) == phi
    assert composed_phase(PolyPhase(("0.3",)), 4).coeffs == (Fraction(1, 5),)
    c = composed_phase(PolyPhase((0, "1/8")), 2, 3)
    assert c.coeffs == (Fraction(1, 2), Fraction(1, 2)) and c.alpha0 == Fraction(1, 8)
    with pytest.raises(DomainError):
        composed_phase(phi, 0)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 50), st.integers(0, 10**3), st.integers(0, 2**32 - 1))
def test_composed_matches_substitution(scale, shift, seed):
    rng = np.random.default_rng(seed)
    phi = PolyPhase(tuple(rng.random(int(rng.integers(1, 4))).tolist()))
    m = np.arange(10**4 + 1)
    direct = phase_values(phi, scale * m + shift)
    comp = phase_values(composed_phase(phi, scale, shift), m)
    assert np.max(np.abs(direct - comp)) <= 1e-10


def test_gowers_bridge():
    phi = PolyPhase(("0.1234", "0.777"))
    for k in (3, 4):
        assert gowers_norm(eval_phase(phi, 40), k).norm == pytest.approx(1, abs=1e-9)
    # s = k with a badly approximable top coefficient stays visibly below 1
    quad = PolyPhase((0, GOLDEN))
    assert gowers_norm(eval_phase(quad, 400), 2).norm < 0.5
