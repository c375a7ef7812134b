# Copyright 2026 Thin Orbit Sieve Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""
Images of the group in SL2(Z/qZ) and the local densities omega(q).

project() closes the generator images under right multiplication with a
vectorized BFS: every frontier element is multiplied by every generator in
one numpy pass, and membership is tracked either by a bitmap over all q^4
codes (small q) or by a sorted code array.
"""

import logging
import math
from fractions import Fraction

import numpy as np

from .constants import Constants
from .errors import DomainError, ModulusBudgetError, OrbitSieveError
from .helpers.primes import factorize, is_prime, is_squarefree, primes_below, primes_up_to, squarefree_up_to
from .helpers.workers import pool_map
from .models.congruence_base import (
    AxiomReport,
    DensityRecord,
    DensityTable,
    LocalDensityProduct,
    ProjectionGroup,
)
from .models.orbit_base import GroupPresentation

logger = logging.getLogger(__name__)


def sl2_order(q: int) -> int:
    """|SL2(Z/qZ)| = q^3 * prod over p | q of (1 - p^-2)."""
    if q < 1:
        raise DomainError(f"modulus must be positive, got {q}")
    order = q**3
    for p, _ in factorize(q):
        order = order // (p * p) * (p * p - 1)
    return order


def _decode(codes: np.ndarray, q: int) -> tuple[np.ndarray, ...]:
    d = codes % q
    rest = codes // q
    c = rest % q
    rest //= q
    return rest // q, rest % q, c, d


def project(
    pres: GroupPresentation,
    q: int,
    element_budget: int = Constants.DEFAULT_ELEMENT_BUDGET,
) -> ProjectionGroup:
    """Close the generator images mod q into the finite group G_q.

    Raises:
        DomainError: q < 2
        ModulusBudgetError: |SL2(Z/qZ)| exceeds the element budget
    """
    if q < 2:
        raise DomainError(f"modulus must be at least 2, got {q}")
    full = sl2_order(q)
    if full > element_budget:
        raise ModulusBudgetError(
            f"|SL2(Z/{q}Z)| = {full} exceeds the element budget {element_budget}",
            {"q": q, "order": full, "budget": element_budget},
        )

    gens = [tuple(x % q for x in g.as_tuple()) for g in pres.symmetric_generators()]
    span = q**4
    identity = np.array([((1 % q) * q * q * q) + (1 % q)], dtype=np.int64)

    use_bitmap = span <= Constants.BITMAP_LIMIT
    if use_bitmap:
        seen = np.zeros(span, dtype=bool)
        seen[identity] = True
    else:
        seen_codes = identity.copy()

    frontier = identity
    while frontier.size:
        a, b, c, d = _decode(frontier, q)
        candidates = []
        for e, f, g, h in gens:
            na = (a * e + b * g) % q
            nb = (a * f + b * h) % q
            nc = (c * e + d * g) % q
            nd = (c * f + d * h) % q
            candidates.append(((na * q + nb) * q + nc) * q + nd)
        fresh = np.unique(np.concatenate(candidates))
        if use_bitmap:
            fresh = fresh[~seen[fresh]]
            seen[fresh] = True
        else:
            fresh = fresh[~np.isin(fresh, seen_codes, assume_unique=True)]
            seen_codes = np.union1d(seen_codes, fresh)
        frontier = fresh

    codes = np.flatnonzero(seen).astype(np.int64) if use_bitmap else seen_codes
    a, b, c, d = _decode(codes, q)
    row_codes = np.unique(c * q + d)
    unipotent = int(np.count_nonzero((a == 1 % q) & (c == 0) & (d == 1 % q)))
    logger.debug("G_%d of %s: %d of %d elements, %d rows", q, pres.name, codes.size, full, row_codes.size)
    return ProjectionGroup(
        presentation_name=pres.name,
        q=q,
        codes=codes,
        row_codes=row_codes,
        unipotent_count=unipotent,
    )


def is_onto(pg: ProjectionGroup) -> bool:
    """True iff G_p is all of SL2(Z/pZ), p prime."""
    if not is_prime(pg.q):
        raise DomainError(f"onto test needs a prime modulus, got {pg.q}")
    return pg.order == pg.q * (pg.q * pg.q - 1)


def _onto_at(args: tuple[GroupPresentation, int, int]) -> tuple[int, bool]:
    pres, p, budget = args
    return p, is_onto(project(pres, p, budget))


def ramified_set(
    pres: GroupPresentation,
    p_max: int = Constants.DEFAULT_PRIME_BOUND,
    workers: int = 1,
    element_budget: int = Constants.DEFAULT_ELEMENT_BUDGET,
) -> set[int]:
    """Primes p <= p_max at which the group does not surject onto SL2(Z/pZ)."""
    if p_max < 2:
        raise DomainError(f"prime bound must be at least 2, got {p_max}")
    results = pool_map(_onto_at, [(pres, p, element_budget) for p in primes_up_to(p_max)], workers)
    ramified = {p for p, onto in results if not onto}
    logger.info("ramified primes of %s up to %d: %s", pres.name, p_max, sorted(ramified))
    return ramified


def density(pg: ProjectionGroup) -> DensityRecord:
    """omega(q) = #{(c, d) in the row orbit : c^2 + d^2 = 0 mod q} / [G_q : stabilizer]."""
    q = pg.q
    c = pg.row_codes // q
    d = pg.row_codes % q
    o_q = int(np.count_nonzero((c * c + d * d) % q == 0))
    index, rem = divmod(pg.order, pg.unipotent_count)
    if rem:
        raise OrbitSieveError(f"unipotent subgroup of order {pg.unipotent_count} does not divide |G_{q}|")
    return DensityRecord(q=q, omega=Fraction(o_q, index), o_q=o_q, index=index)


def closed_form_omega(p: int) -> Fraction:
    """omega(p) for an unramified prime: 1/3 at 2, 2/(p+1) if p = 1 mod 4, else 0."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if p == 2:
        return Fraction(1, 3)
    if p % 4 == 1:
        return Fraction(2, p + 1)
    return Fraction(0)


def _closed_form_record(p: int) -> DensityRecord:
    if p == 2:
        return DensityRecord(q=2, omega=Fraction(1, 3), o_q=1, index=3)
    o_p = 2 * (p - 1) if p % 4 == 1 else 0
    return DensityRecord(q=p, omega=Fraction(o_p, p * p - 1), o_q=o_p, index=p * p - 1)


def check_goursat(
    pres: GroupPresentation,
    q1: int,
    q2: int,
    element_budget: int = Constants.DEFAULT_ELEMENT_BUDGET,
) -> bool:
    """|G_{q1 q2}| = |G_q1| |G_q2| and omega(q1 q2) = omega(q1) omega(q2)."""
    if math.gcd(q1, q2) != 1:
        raise DomainError(f"moduli {q1} and {q2} are not coprime")
    if q1 == 1 or q2 == 1:
        return True
    g1 = project(pres, q1, element_budget)
    g2 = project(pres, q2, element_budget)
    g12 = project(pres, q1 * q2, element_budget)
    if g12.order != g1.order * g2.order:
        logger.info("G_%d has order %d, expected %d", q1 * q2, g12.order, g1.order * g2.order)
        return False
    return density(g12).omega == density(g1).omega * density(g2).omega


def _omega_or_closed_form(omega):
    return omega if omega is not None else closed_form_omega


def local_density_product(z: float, ramified=frozenset(), omega=None) -> LocalDensityProduct:
    """V(z) = prod over primes p < z outside the ramified set of (1 - omega(p)).

    ``omega`` maps a prime to its density and defaults to closed_form_omega.
    """
    if z < 2:
        raise DomainError(f"z must be at least 2, got {z}")
    omega = _omega_or_closed_form(omega)
    value = Fraction(1)
    for p in primes_below(z):
        if p not in ramified:
            value *= 1 - omega(p)
    approx = float(value)
    kappa = 1 / (approx * math.log(z)) if approx > 0 and z > 2 else None
    return LocalDensityProduct(
        z=float(z), ramified=tuple(sorted(ramified)), value=value, approx=approx, kappa_ratio=kappa
    )


def local_density_bound_K(z: float, ramified=frozenset(), omega=None) -> float:
    """Least K >= 0 with prod over v <= p <= z of (1 - omega(p))^-1 <= (log z / log v)(1 + K / log v)
    for every prime v <= z, primes in the ramified set skipped.
    """
    if z < 2:
        raise DomainError(f"z must be at least 2, got {z}")
    omega = _omega_or_closed_form(omega)
    primes = [p for p in primes_up_to(int(z)) if p not in ramified]
    log_z = math.log(z)
    worst = 0.0
    tail = 1.0
    # Walk v downward so the tail product over [v, z] grows one factor at a time.
    for v in reversed(primes):
        factor = 1 - omega(v)
        if factor <= 0:
            raise DomainError(f"omega({v}) = {omega(v)} leaves no residue classes")
        tail /= float(factor)
        log_v = math.log(v)
        worst = max(worst, (tail * log_v / log_z - 1) * log_v)
    return worst


class DensityOracle:
    """omega(q) for square-free q.

    Primes up to the bound and the ramified part of q are computed by finite
    closure; primes beyond the bound use the closed form, and the pieces are
    combined multiplicatively.
    """

    def __init__(
        self,
        pres: GroupPresentation,
        prime_bound: int = Constants.DEFAULT_PRIME_BOUND,
        ramified=None,
        element_budget: int = Constants.DEFAULT_ELEMENT_BUDGET,
        workers: int = 1,
    ):
        self.pres = pres
        self.prime_bound = prime_bound
        self.element_budget = element_budget
        self.ramified = set(ramified) if ramified is not None else ramified_set(
            pres, prime_bound, workers, element_budget
        )
        self._cache: dict[int, DensityRecord] = {}

    @property
    def ramified_product(self) -> int:
        return math.prod(self.ramified)

    def _computed(self, q: int) -> DensityRecord:
        if q not in self._cache:
            self._cache[q] = density(project(self.pres, q, self.element_budget))
        return self._cache[q]

    def record(self, q: int) -> DensityRecord:
        if q < 1 or not is_squarefree(q):
            raise DomainError(f"densities are only defined for square-free q >= 1, got {q}")
        if q == 1:
            return DensityRecord(q=1, omega=Fraction(1), o_q=1, index=1)
        primes = [p for p, _ in factorize(q)]
        ramified_part = math.prod(p for p in primes if p in self.ramified)
        parts = []
        if ramified_part > 1:
            parts.append(self._computed(ramified_part))
        for p in primes:
            if p in self.ramified:
                continue
            parts.append(self._computed(p) if p <= self.prime_bound else _closed_form_record(p))
        o_q = math.prod(r.o_q for r in parts)
        index = math.prod(r.index for r in parts)
        return DensityRecord(
            q=q, omega=Fraction(o_q, index), o_q=o_q, index=index, ramified=ramified_part > 1
        )

    def omega(self, q: int) -> Fraction:
        return self.record(q).omega

    def __call__(self, q: int) -> Fraction:
        return self.omega(q)


def density_table(oracle: DensityOracle, q_max: int) -> DensityTable:
    """Records for every square-free q <= q_max; budget failures are kept, not raised."""
    records = []
    failures: dict[int, str] = {}
    for q in squarefree_up_to(q_max):
        try:
            records.append(oracle.record(q))
        except ModulusBudgetError as exc:
            logger.warning("skipping q=%d: %s", q, exc.message)
            failures[q] = exc.message
    return DensityTable(
        presentation_name=oracle.pres.name,
        prime_bound=oracle.prime_bound,
        ramified=tuple(oracle.ramified),
        records=tuple(records),
        failures=failures,
    )


def check_axiom_s2(oracle: DensityOracle, q_max: int, direct_limit: int = 60) -> AxiomReport:
    """omega(1) = 1, omega(q) < 1 for q > 1, and multiplicativity away from the ramified primes.

    Composite q <= direct_limit coprime to the ramified set are also projected
    directly and compared with the product of their prime densities.
    """
    violations = []
    checked = direct = 0
    if oracle.omega(1) != 1:
        violations.append("omega(1) != 1")
    for q in squarefree_up_to(q_max, start=2):
        checked += 1
        w = oracle.omega(q)
        if not w < 1:
            violations.append(f"omega({q}) = {w} is not below 1")
        primes = [p for p, _ in factorize(q)]
        if len(primes) < 2 or any(p in oracle.ramified for p in primes) or q > direct_limit:
            continue
        if sl2_order(q) > oracle.element_budget:
            continue
        direct += 1
        actual = density(project(oracle.pres, q, oracle.element_budget)).omega
        expected = math.prod((oracle.omega(p) for p in primes), start=Fraction(1))
        if actual != expected:
            violations.append(f"omega({q}) = {actual} but the prime densities multiply to {expected}")
    if violations:
        logger.warning("density axioms fail for %s: %s", oracle.pres.name, "; ".join(violations))
    return AxiomReport(q_max=q_max, checked=checked, direct_checks=direct, violations=tuple(violations))
