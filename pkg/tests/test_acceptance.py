"""End-to-end checks at the heights and bounds the tool is meant for."""

import math
from fractions import Fraction

import numpy as np
import pytest

from orbitsieve.congruence import (
    DensityOracle,
    check_axiom_s2,
    closed_form_omega,
    density,
    is_onto,
    project,
)
from orbitsieve.group_core import words
from orbitsieve.helpers.primes import primes_up_to, squarefree_up_to
from orbitsieve.models import GroupElement, SieveSequence
from orbitsieve.orbit_enum import counts_by_height, enumerate_orbit, unipotent_slice_check, weight_table
from orbitsieve.sieve import legendre_sum, ratio_profile, remainder
from orbitsieve.spectral import choose_b, fit_growth, reconstruction_check


def test_unipotent_slices_of_short_words(hecke4):
    for m in words(hecke4, 6):
        assert unipotent_slice_check(hecke4, GroupElement.from_tuple(m), 12)


def test_counts_monotone_and_even(small_slice):
    heights = [2, 5, 10, 50, 100, 500, 1000, 2000]
    counts = [n for _, n in counts_by_height(small_slice, heights)]
    assert counts == sorted(counts)
    assert all(n % 2 == 0 for n in counts)


def test_base_point_postconditions():
    for k in range(0, 121):
        T = 2 * 10 ** (k * math.log10(5e5) / 120)
        b = choose_b(T)
        assert 1 < b <= math.e
        ratio = math.log(T) / math.log(b)
        assert abs(ratio - round(ratio)) < 1e-9


@pytest.mark.slow
def test_reconstruction_at_scale():
    result = reconstruction_check(samples=10_000, seed=0)
    assert result.max_relative_error <= 1e-9
    assert result.boundary_error <= 1e-12


@pytest.mark.slow
@pytest.mark.parametrize("z", [10, 20, 30])
def test_legendre_at_ten_thousand(hecke4, z):
    slice = enumerate_orbit(hecke4, 10_000)
    seq = SieveSequence.from_table(weight_table(slice))
    direct, mobius = legendre_sum(seq, z)
    assert direct == mobius


@pytest.mark.slow
def test_closed_form_and_surjectivity_up_to_fifty(hecke4):
    for p in primes_up_to(50):
        pg = project(hecke4, p)
        if p == 2:
            assert pg.order == 2
            assert not is_onto(pg)
            continue
        assert pg.order == p * (p * p - 1)
        assert density(pg).omega == closed_form_omega(p)
        if p % 4 == 3:
            assert density(pg).omega == 0


@pytest.mark.slow
def test_multiplicativity_up_to_hundred(hecke4):
    oracle = DensityOracle(hecke4, prime_bound=50)
    assert oracle.ramified == {2}
    report = check_axiom_s2(oracle, 100, direct_limit=100)
    assert report.holds, report.violations
    assert oracle(65) == Fraction(1, 21)


@pytest.mark.slow
def test_growth_exponent_in_thin_range(hecke4):
    slice = enumerate_orbit(hecke4, 10**5)
    heights = [round(10 ** (j / 4)) for j in range(8, 21)]
    fit = fit_growth(counts_by_height(slice, heights))
    assert fit.in_thin_range


def _quarter_decades(lo: int, hi: int) -> list[int]:
    return [round(10 ** (j / 4)) for j in range(4 * lo, 4 * hi + 1)]


def test_perturbed_power_law_recovered():
    points = [(t, round(50 * t**0.7 + t**0.5)) for t in _quarter_decades(3, 6)]
    assert fit_growth(points).delta_hat == pytest.approx(0.7, abs=0.02)


@pytest.fixture(scope="module")
def million_slice(hecke4):
    return enumerate_orbit(hecke4, 10**6)


@pytest.mark.slow
def test_growth_windows_agree(million_slice):
    low = fit_growth(counts_by_height(million_slice, _quarter_decades(3, 5)))
    high = fit_growth(counts_by_height(million_slice, _quarter_decades(4, 6)))
    assert low.in_thin_range and high.in_thin_range
    assert abs(low.delta_hat - high.delta_hat) < 0.02


@pytest.mark.slow
@pytest.mark.parametrize("r", [1, 4])
def test_almost_prime_ratio_steady_across_decades(million_slice, r):
    delta_hat = fit_growth(counts_by_height(million_slice, _quarter_decades(3, 6))).delta_hat
    points = ratio_profile(million_slice, [10**4, 10**5, 10**6], r, delta_hat)
    assert all(p.count > 0 for p in points)
    for before, after in zip(points, points[1:]):
        assert 0.5 < after.ratio / before.ratio < 2


def _remainder_share(slice, oracle, height) -> Fraction:
    seq = SieveSequence.from_table(weight_table(slice, height=height))
    total = sum(
        (
            abs(remainder(seq, q, oracle.record(q)))
            for q in squarefree_up_to(20)
            if math.gcd(q, oracle.ramified_product) == 1
        ),
        Fraction(0),
    )
    return total / seq.X


@pytest.mark.slow
def test_remainders_shrink_relative_to_mass(million_slice, oracle):
    assert _remainder_share(million_slice, oracle, 10**5) < _remainder_share(million_slice, oracle, 10**3)


@pytest.mark.slow
@pytest.mark.parametrize("q", range(2, 31))
def test_image_mod_q_is_a_group(hecke4, q):
    pg = project(hecke4, q)
    codes = pg.codes
    a, b, c, d = (codes // q**3) % q, (codes // q**2) % q, (codes // q) % q, codes % q
    assert np.all((a * d - b * c) % q == 1 % q)
    assert ((1 % q) * q**3 + 1 % q) in set(codes.tolist())
    for g in hecke4.symmetric_generators():
        e, f, h, k = (x % q for x in g.as_tuple())
        product = ((((a * e + b * h) % q) * q + (a * f + b * k) % q) * q + (c * e + d * h) % q) * q + (
            c * f + d * k
        ) % q
        assert np.all(np.isin(product, codes))


@pytest.mark.slow
@pytest.mark.parametrize("q1, q2", [(3, 5), (5, 13), (3, 7)])
def test_row_orbit_splits_over_coprime_moduli(hecke4, q1, q2):
    rows = project(hecke4, q1 * q2).row_orbit
    left, right = project(hecke4, q1).row_orbit, project(hecke4, q2).row_orbit
    split = {((c % q1, d % q1), (c % q2, d % q2)) for c, d in rows}
    assert len(split) == len(rows)
    assert split == {(x, y) for x in left for y in right}
