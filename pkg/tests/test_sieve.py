import math
from fractions import Fraction

import pytest

from orbitsieve.congruence import DensityOracle
from orbitsieve.errors import DomainError
from orbitsieve.models import SieveSequence
from orbitsieve.orbit_enum import almost_prime_counts, enumerate_orbit, weight_table
from orbitsieve.sieve import (
    admissible_R,
    beta_bounds,
    corollary_table,
    legendre_sum,
    mobius_density_sum,
    progression_sum,
    ratio_profile,
    remainder,
    r_threshold,
    run_sieve,
    sieve_decomposition,
    sieve_level,
    sifting_cutoff,
)


@pytest.fixture(scope="module")
def tiny_seq(tiny_slice):
    return SieveSequence.from_table(weight_table(tiny_slice))


@pytest.fixture(scope="module")
def small_seq(small_slice):
    return SieveSequence.from_table(weight_table(small_slice))


@pytest.fixture(scope="module")
def smooth_seq(small_slice):
    return SieveSequence.from_table(weight_table(small_slice, Fraction(1, 10)))


class TestProgressions:
    def test_q_one_is_total(self, small_seq):
        assert progression_sum(small_seq, 1) == small_seq.X

    def test_tiny(self, tiny_seq):
        assert tiny_seq.X == 4
        assert progression_sum(tiny_seq, 2) == 0

    def test_beyond_support(self, small_seq):
        assert progression_sum(small_seq, 2003) == 0

    def test_rejects_square_factors(self, small_seq):
        with pytest.raises(DomainError):
            progression_sum(small_seq, 4)

    def test_matches_point_count(self, small_slice, small_seq):
        assert progression_sum(small_seq, 5) == sum(1 for p in small_slice.points if p.fvalue % 5 == 0)

    def test_remainder(self, small_seq, oracle):
        assert remainder(small_seq, 1, oracle.record(1)) == 0
        assert remainder(small_seq, 3, oracle.record(3)) == progression_sum(small_seq, 3)
        with pytest.raises(DomainError):
            remainder(small_seq, 3, oracle.record(5))

    def test_no_values_divisible_by_three(self, small_seq):
        # c^2 + d^2 = 0 mod 3 forces 3 | gcd(c, d)
        assert progression_sum(small_seq, 3) == 0
        assert progression_sum(small_seq, 7) == 0


class TestLegendre:
    def test_z_two(self, small_seq):
        assert legendre_sum(small_seq, 2) == (small_seq.X, small_seq.X)

    def test_tiny(self, tiny_seq):
        assert legendre_sum(tiny_seq, 10) == (4, 4)

    @pytest.mark.parametrize("z", [3, 5, 10, 17.5, 30])
    def test_identity_sharp(self, small_seq, z):
        direct, mobius = legendre_sum(small_seq, z)
        assert direct == mobius

    @pytest.mark.parametrize("z", [5, 30])
    def test_identity_smoothed(self, smooth_seq, z):
        direct, mobius = legendre_sum(smooth_seq, z)
        assert direct == mobius
        assert isinstance(direct, Fraction)

    def test_rejects_small_z(self, small_seq):
        with pytest.raises(DomainError):
            legendre_sum(small_seq, 1.9)


class TestDensitySums:
    def test_factorizes(self, oracle):
        for z in (3, 10, 30):
            result = mobius_density_sum(z, oracle)
            assert result.agrees

    def test_values(self, oracle):
        assert mobius_density_sum(2, oracle).direct == 1
        assert mobius_density_sum(6, oracle).direct == Fraction(2, 3)

    def test_decomposition(self, small_seq, oracle):
        parts = sieve_decomposition(small_seq, 20, oracle)
        assert parts.sigma2 == 0
        assert parts.sigma1 + parts.sigma2 + parts.sigma3 == parts.S_star == parts.S_direct

    def test_subset_guard(self, sl2z):
        full = DensityOracle(sl2z, prime_bound=5, ramified=set())
        with pytest.raises(DomainError):
            mobius_density_sum(200, full)


class TestBetaSieve:
    def test_at_two(self):
        bounds = beta_bounds(2, 100, 0)
        assert bounds.f_lower == 0
        assert bounds.F_upper == pytest.approx(math.exp(0.5772156649015329), rel=1e-12)
        assert bounds.D == 0

    def test_lower_positive_above_two(self):
        assert beta_bounds(2.1, 100, 0).f_lower > 0

    def test_domains(self):
        assert beta_bounds(3.5, 100, 0).F_upper is None
        assert beta_bounds(1.5, 100, 0).f_lower is None
        with pytest.raises(DomainError):
            beta_bounds(5, 100, 0)
        with pytest.raises(DomainError):
            beta_bounds(2, 10, 0)
        with pytest.raises(DomainError):
            beta_bounds(2, 100, 3)


class TestLevels:
    def test_sieve_level(self):
        assert sieve_level(10**6, 1, Fraction(1, 2)) == pytest.approx(10**1.5, rel=1e-12)

    def test_smoothing_lowers_level(self):
        assert sieve_level(10**6, 1, Fraction(1, 2), Fraction(1, 10)) < sieve_level(10**6, 1, Fraction(1, 2))

    def test_empty_range_rejected(self):
        with pytest.raises(DomainError):
            sieve_level(10**6, Fraction(5, 6), Fraction(5, 6))
        with pytest.raises(DomainError):
            sieve_level(10**6, 1, Fraction(2, 5))

    def test_cutoff(self):
        assert sifting_cutoff(100) == pytest.approx(10)
        with pytest.raises(DomainError):
            sifting_cutoff(0.5)

    def test_r_threshold(self):
        assert r_threshold(10**6, 10**3) == pytest.approx(4)
        with pytest.raises(DomainError):
            r_threshold(100, 1)

    @pytest.mark.parametrize(
        "delta, theta, expected",
        [
            (Fraction(199, 200), Fraction(5, 6), 25),
            (1, Fraction(39, 64), 11),
            (1, Fraction(11, 20), 9),
            (0.995, Fraction(5, 6), 25),
        ],
    )
    def test_admissible_r(self, delta, theta, expected):
        assert admissible_R(delta, theta) == expected

    def test_admissible_r_strict_at_integers(self):
        # 4 / (1 - 1/2) = 8 exactly, so R must be 9
        assert admissible_R(1, Fraction(1, 2)) == 9

    def test_corollary_table(self):
        assert [row.R for row in corollary_table()] == [25, 11, 9]


class TestRunSieve:
    def test_degenerate_height(self, hecke4, oracle):
        report = run_sieve(enumerate_orbit(hecke4, 1), oracle, 0.8)
        assert report.X == 0
        assert report.S_direct == report.S_mobius == 0
        assert set(report.almost_prime_counts.values()) == {0}

    def test_full_run(self, small_slice, oracle):
        report = run_sieve(small_slice, oracle, 0.9, theta=Fraction(1, 2), r_values=(2, 11))
        assert report.legendre_holds
        assert report.X == small_slice.size
        assert report.Q_theory == pytest.approx(2000 ** 0.2)
        assert report.z >= 2
        assert report.admissible_R == 11
        assert report.almost_prime_counts[11] == small_slice.size
        assert report.almost_prime_counts == almost_prime_counts(small_slice, [2, 11])
        assert report.ramified == (2,)
        assert report.decomposition is not None

    def test_level_override(self, small_slice, oracle):
        report = run_sieve(small_slice, oracle, None, level_q=30, sift_z=20)
        assert report.Q_used == 30
        assert report.z == 20
        assert report.moduli_used == sum(1 for q in range(1, 31) if q % 2 and q not in (9, 25, 27))
        assert report.legendre_holds
        assert report.bounds is not None
        assert report.ratios == {}

    def test_collapsed_level_is_flagged(self, small_slice, oracle):
        report = run_sieve(small_slice, oracle, 0.6690272, theta=Fraction(5, 6))
        assert report.Q_theory is None
        assert report.Q_used == 1
        assert report.level_collapsed
        assert any("level collapsed" in note for note in report.notes)
        level_note = next(note for note in report.notes if note.startswith("no theoretical level"))
        assert "delta=0.669027" in level_note
        assert "theta=5/6" in level_note

    def test_overrides_are_not_collapsed(self, small_slice, oracle):
        assert not run_sieve(small_slice, oracle, 0.9, theta=Fraction(1, 2)).level_collapsed
        assert not run_sieve(small_slice, oracle, 0.6, level_q=10).level_collapsed

    def test_smoothed_run(self, small_slice, oracle):
        report = run_sieve(small_slice, oracle, 0.9, theta=Fraction(1, 2), epsilon=Fraction(1, 10))
        assert report.legendre_holds
        assert report.height == Fraction(1800)

    def test_ratio_profile(self, small_slice):
        points = ratio_profile(small_slice, [10, 100, 1000], 3, 0.8)
        assert [p.height for p in points] == [10, 100, 1000]
        counts = [p.count for p in points]
        assert counts == sorted(counts)
        assert all(p.ratio > 0 for p in points)
