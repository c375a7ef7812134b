from fractions import Fraction

import numpy as np
import pytest

from orbitsieve.congruence import (
    DensityOracle,
    check_axiom_s2,
    check_goursat,
    closed_form_omega,
    density,
    density_table,
    is_onto,
    local_density_bound_K,
    local_density_product,
    project,
    ramified_set,
    sl2_order,
)
from orbitsieve.errors import DomainError, ModulusBudgetError
from orbitsieve.models import DensityRecord, ResidueMatrix


class TestProjection:
    @pytest.mark.parametrize("q, order", [(2, 2), (3, 24), (5, 120)])
    def test_orders(self, hecke4, q, order):
        assert project(hecke4, q).order == order

    def test_mod_two_elements(self, hecke4):
        pg = project(hecke4, 2)
        assert ResidueMatrix(q=2, a=1, b=0, c=0, d=1) in pg
        assert ResidueMatrix(q=2, a=0, b=1, c=1, d=0) in pg
        assert ResidueMatrix(q=2, a=1, b=1, c=0, d=1) not in pg
        assert pg.row_orbit == frozenset({(0, 1), (1, 0)})

    def test_codes_sorted_and_closed(self, hecke4):
        pg = project(hecke4, 7)
        assert np.all(np.diff(pg.codes) > 0)
        elements = pg.elements()
        assert len(elements) == sl2_order(7)

    def test_sorted_array_path(self, sl2z):
        # 65^4 codes exceed the bitmap limit
        pg = project(sl2z, 65)
        assert pg.order == sl2_order(65)

    def test_onto(self, hecke4):
        assert is_onto(project(hecke4, 5))
        assert is_onto(project(hecke4, 3))
        assert not is_onto(project(hecke4, 2))
        with pytest.raises(DomainError):
            is_onto(project(hecke4, 6))

    def test_budget(self, hecke4):
        with pytest.raises(ModulusBudgetError):
            project(hecke4, 11, element_budget=1000)
        with pytest.raises(DomainError):
            project(hecke4, 1)

    def test_sl2_order(self):
        assert sl2_order(1) == 1
        assert sl2_order(5) == 120
        assert sl2_order(4) == 48
        assert sl2_order(15) == 24 * 120


class TestRamification:
    def test_hecke4(self, oracle):
        assert 2 in oracle.ramified
        assert not any(p % 4 == 1 for p in oracle.ramified)

    def test_full_group_unramified(self, sl2z):
        assert ramified_set(sl2z, 30) == set()

    def test_parallel(self, hecke4, oracle):
        assert ramified_set(hecke4, 30, workers=2) == oracle.ramified


class TestDensities:
    def test_examples(self, hecke4):
        five = density(project(hecke4, 5))
        assert (five.omega, five.o_q, five.index) == (Fraction(1, 3), 8, 24)
        assert density(project(hecke4, 3)).omega == 0
        two = density(project(hecke4, 2))
        assert (two.omega, two.o_q, two.index) == (0, 0, 2)

    def test_closed_form(self):
        assert closed_form_omega(2) == Fraction(1, 3)
        assert closed_form_omega(13) == Fraction(1, 7)
        assert closed_form_omega(7) == 0
        with pytest.raises(DomainError):
            closed_form_omega(9)

    @pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 17])
    def test_closed_form_matches_projection(self, hecke4, p):
        assert density(project(hecke4, p)).omega == closed_form_omega(p)

    def test_full_group_at_two(self, sl2z):
        assert density(project(sl2z, 2)).omega == closed_form_omega(2)

    def test_record_validation(self):
        with pytest.raises(ValueError):
            DensityRecord(q=5, omega=Fraction(1, 2), o_q=8, index=24)
        with pytest.raises(ValueError):
            DensityRecord(q=1, omega=Fraction(1, 2), o_q=1, index=2)

    def test_goursat(self, hecke4):
        assert check_goursat(hecke4, 3, 5)
        assert check_goursat(hecke4, 7, 1)
        with pytest.raises(DomainError):
            check_goursat(hecke4, 3, 6)

    @pytest.mark.slow
    def test_goursat_five_thirteen(self, hecke4):
        assert check_goursat(hecke4, 5, 13)
        assert density(project(hecke4, 65)).omega == Fraction(1, 3) * Fraction(1, 7)


class TestOracle:
    def test_small_moduli(self, oracle):
        assert oracle(1) == 1
        assert oracle(5) == Fraction(1, 3)
        assert oracle(3) == 0
        assert oracle(2) == 0
        assert oracle(65) == Fraction(1, 21)

    def test_beyond_prime_bound(self, oracle):
        assert oracle(37) == Fraction(2, 38)
        assert oracle(5 * 37) == Fraction(1, 3) * Fraction(1, 19)
        assert oracle(43) == 0

    def test_ramified_part_is_projected(self, oracle):
        record = oracle.record(10)
        assert record.ramified
        assert record.omega == 0

    def test_rejects_square_factors(self, oracle):
        with pytest.raises(DomainError):
            oracle.record(12)

    def test_table(self, oracle):
        table = density_table(oracle, 30)
        assert table.ramified == tuple(sorted(oracle.ramified))
        assert table.omega(13) == Fraction(1, 7)
        assert table.omega(4) is None
        assert [r.q for r in table.records][:5] == [1, 2, 3, 5, 6]
        assert not table.failures

    def test_table_records_budget_failures(self, hecke4):
        # |SL2(Z/19Z)| = 6840 is over budget; 37 lies beyond the bound and uses the closed form
        small = DensityOracle(hecke4, prime_bound=30, ramified={2}, element_budget=5000)
        table = density_table(small, 40)
        assert {19, 23, 29, 38} <= set(table.failures)
        assert 17 not in table.failures
        assert table.omega(37) == Fraction(1, 19)
        assert table.omega(19) is None

    def test_axioms(self, oracle):
        report = check_axiom_s2(oracle, 30)
        assert report.holds, report.violations
        assert report.direct_checks > 0


class TestLocalDensityProduct:
    def test_empty_product(self):
        assert local_density_product(3, {2}).value == 1

    def test_six(self):
        assert local_density_product(6, {2}).value == Fraction(2, 3)

    def test_with_oracle(self, oracle):
        assert local_density_product(14, oracle.ramified, oracle.omega).value == Fraction(2, 3) * Fraction(6, 7)

    def test_rejects_small_z(self):
        with pytest.raises(DomainError):
            local_density_product(1.5)

    def test_bound_k(self, oracle):
        K = local_density_bound_K(100, oracle.ramified, oracle.omega)
        assert K >= 0
        assert local_density_bound_K(3, {2}) == 0
