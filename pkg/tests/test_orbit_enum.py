import math
from fractions import Fraction

import pytest

from orbitsieve.errors import (
    DomainError,
    FrontierOverflowError,
    HeightShortfallError,
    UnexhaustedSliceError,
)
from orbitsieve.helpers.primes import prime_factor_count
from orbitsieve.models import IDENTITY, OrbitSlice
from orbitsieve.orbit_enum import (
    almost_prime_count,
    almost_prime_counts,
    audit_orbit,
    count,
    counts_by_height,
    enumerate_orbit,
    restrict,
    sandwich_check,
    smoothed_count,
    smoothed_weight,
    unipotent_slice_check,
    weight_table,
)
from tests.conftest import S


class TestEnumerate:
    def test_height_one_is_empty(self, hecke4):
        assert enumerate_orbit(hecke4, 1).size == 0

    def test_unit_rows(self, tiny_slice):
        assert {(p.c, p.d) for p in tiny_slice.points} == {(0, 1), (0, -1), (1, 0), (-1, 0)}
        assert tiny_slice.exhausted
        assert tiny_slice.contains_minus_identity
        assert count(tiny_slice) == 4

    def test_points_sorted_and_below_height(self, small_slice):
        keys = [(p.fvalue, (p.c, p.d)) for p in small_slice.points]
        assert keys == sorted(keys)
        assert all(p.fvalue < 2000 for p in small_slice.points)

    def test_closed_under_negation(self, small_slice):
        rows = {(p.c, p.d) for p in small_slice.points}
        assert all((-c, -d) in rows for c, d in rows)
        assert small_slice.size % 2 == 0

    def test_rows_are_primitive(self, small_slice):
        assert all(math.gcd(p.c, p.d) == 1 for p in small_slice.points)

    def test_hecke4_is_thin(self, small_slice, sl2z):
        full = enumerate_orbit(sl2z, 2000)
        assert small_slice.size < full.size
        rows = {(p.c, p.d) for p in full.points}
        assert all((p.c, p.d) in rows for p in small_slice.points)

    def test_full_group_reaches_every_primitive_row(self, sl2z):
        slice = enumerate_orbit(sl2z, 200)
        expected = {
            (c, d)
            for c in range(-15, 16)
            for d in range(-15, 16)
            if c * c + d * d < 200 and math.gcd(c, d) == 1
        }
        assert {(p.c, p.d) for p in slice.points} == expected

    def test_stable_in_beta(self, hecke4):
        audited = audit_orbit(hecke4, 2000)
        assert audited.audited and audited.exhausted
        assert enumerate_orbit(hecke4, 2000, beta=8).points == audited.points

    def test_parallel_matches_serial(self, hecke4, small_slice):
        assert enumerate_orbit(hecke4, 2000, workers=2).points == small_slice.points

    def test_rejects_bad_parameters(self, hecke4):
        with pytest.raises(DomainError):
            enumerate_orbit(hecke4, 0)
        with pytest.raises(DomainError):
            enumerate_orbit(hecke4, 10, beta=Fraction(1, 2))

    def test_node_cap(self, hecke4):
        with pytest.raises(FrontierOverflowError) as info:
            enumerate_orbit(hecke4, 10_000, node_cap=50)
        assert info.value.details["nodes_visited"] > 50
        assert "points_so_far" in info.value.details

    def test_unexhausted_refused(self, tiny_slice):
        partial = tiny_slice.model_copy(update={"exhausted": False})
        with pytest.raises(UnexhaustedSliceError):
            count(partial)
        with pytest.raises(UnexhaustedSliceError):
            almost_prime_count(partial, 1)

    def test_slice_validation(self):
        with pytest.raises(ValueError):
            OrbitSlice(presentation_name="x", height=10, beta=4, exhausted=True, points=())

    @pytest.mark.slow
    def test_height_ten_thousand_audited(self, hecke4):
        slice = enumerate_orbit(hecke4, 10_000, audit=True)
        assert slice.exhausted
        assert slice.size % 2 == 0
        assert almost_prime_count(slice, math.ceil(math.log2(10_000))) == slice.size


class TestHeights:
    def test_counts_by_height(self, small_slice):
        rows = dict(counts_by_height(small_slice, [2, 100, 2000]))
        assert rows[Fraction(2)] == 4
        assert rows[Fraction(2000)] == small_slice.size
        assert rows[Fraction(100)] == sum(1 for p in small_slice.points if p.fvalue < 100)

    def test_fractional_heights(self, small_slice):
        (_, n), = counts_by_height(small_slice, [Fraction(17, 2)])
        assert n == sum(1 for p in small_slice.points if p.fvalue <= 8)

    def test_restrict(self, small_slice):
        sub = restrict(small_slice, 100)
        assert sub.height == 100
        assert all(p.fvalue < 100 for p in sub.points)
        with pytest.raises(HeightShortfallError):
            restrict(small_slice, 2001)
        with pytest.raises(HeightShortfallError):
            counts_by_height(small_slice, [4000])


class TestWeights:
    def test_ramp_examples(self):
        eps = Fraction(1, 10)
        assert smoothed_weight(1, 100, eps) == 1
        assert smoothed_weight(200, 100, eps) == 0
        assert smoothed_weight(Fraction(100) / (1 + eps), 100, eps) == 1
        assert smoothed_weight(Fraction(100) / (1 - eps), 100, eps) == 0

    def test_ramp_is_monotone(self):
        values = [smoothed_weight(n, 100, Fraction(1, 10)) for n in range(85, 115)]
        assert values == sorted(values, reverse=True)
        assert all(0 <= v <= 1 for v in values)

    def test_sharp(self):
        assert smoothed_weight(99, 100) == 1
        assert smoothed_weight(100, 100) == 0

    def test_epsilon_range(self):
        with pytest.raises(DomainError):
            smoothed_weight(1, 100, Fraction(1, 2))

    def test_sharp_table(self, tiny_slice):
        table = weight_table(tiny_slice)
        assert table.entries == {1: Fraction(4)}
        assert table.sharp

    def test_empty_table(self, hecke4):
        assert weight_table(enumerate_orbit(hecke4, 1)).entries == {}

    def test_smoothed_table_support(self, small_slice):
        eps = Fraction(1, 5)
        table = weight_table(small_slice, eps)
        assert table.height == 1600
        assert max(table.entries) < 2000
        with pytest.raises(HeightShortfallError):
            weight_table(small_slice, eps, height=1800)

    def test_sandwich(self, small_slice):
        report = sandwich_check(small_slice, 1000, Fraction(1, 10))
        assert report.holds
        assert report.shrunk_smoothed is not None
        assert report.count_lower <= report.count <= report.count_upper

    def test_smoothed_count_between_sharp_counts(self, small_slice):
        eps = Fraction(1, 4)
        h = smoothed_count(small_slice, 1200, eps)
        (_, lower), (_, upper) = counts_by_height(small_slice, [Fraction(1200) / (1 + eps), Fraction(1200) / (1 - eps)])
        assert lower <= h <= upper


class TestAlmostPrimes:
    def test_unit_rows_count_for_any_r(self, tiny_slice):
        assert almost_prime_count(tiny_slice, 1) == 4

    def test_large_r_counts_everything(self, small_slice):
        assert almost_prime_count(small_slice, math.ceil(math.log2(2000))) == small_slice.size

    def test_against_direct_factoring(self, small_slice):
        counts = almost_prime_counts(small_slice, [1, 2, 3])
        for r, n in counts.items():
            assert n == sum(1 for p in small_slice.points if prime_factor_count(p.fvalue) <= r)
        assert counts[1] <= counts[2] <= counts[3]

    def test_distinct_factors_count_more(self, small_slice):
        assert almost_prime_count(small_slice, 2, distinct=True) >= almost_prime_count(small_slice, 2)

    def test_rejects_nonpositive_r(self, small_slice):
        with pytest.raises(DomainError):
            almost_prime_count(small_slice, 0)


class TestUnipotentSlices:
    def test_identity_row_is_fixed(self, hecke4):
        assert unipotent_slice_check(hecke4, IDENTITY, 10)

    def test_s_gives_quadratic(self, hecke4):
        assert unipotent_slice_check(hecke4, S, 10)

    def test_short_runs_are_vacuous(self, hecke4):
        assert unipotent_slice_check(hecke4, S, 3)
