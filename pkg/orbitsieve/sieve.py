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
The combinatorial sieve on the f-values of an orbit slice.

Sums over progressions, the remainders r(q) = |A_q| - omega(q) X, the
Legendre identity S(z) = sum over q | P(z) of mu(q) |A_q|, the beta-sieve
functions and the level / cutoff / R rules. X is the exact mass of the
weight table, so the ramified correction X_{q'} is zero and every identity
below is checked in exact rational arithmetic.
"""

import logging
import math
from fractions import Fraction
from typing import Iterable

from .congruence import DensityOracle, local_density_bound_K, local_density_product
from .constants import Constants
from .errors import DomainError
from .helpers.primes import is_squarefree, primes_below, squarefree_divisors, squarefree_up_to
from .models.congruence_base import DensityRecord
from .models.orbit_base import OrbitSlice, to_fraction
from .models.sieve_base import (
    CorollaryRow,
    MobiusDensitySum,
    RatioPoint,
    SieveBounds,
    SieveDecomposition,
    SieveEnvelope,
    SieveReport,
    SieveSequence,
)
from .orbit_enum import _factor_counts, almost_prime_counts, restrict, weight_table

logger = logging.getLogger(__name__)

# Direct sums over q | P(z) enumerate subsets; refuse beyond this many.
_MAX_SUBSETS = 1 << 20


def progression_sum(seq: SieveSequence, q: int) -> Fraction:
    """|A_q|: the mass of a_n over n divisible by q."""
    if q < 1 or not is_squarefree(q):
        raise DomainError(f"progression sums need a square-free q >= 1, got {q}")
    entries = seq.weights.entries
    if q == 1:
        return seq.X
    total = Fraction(0)
    for n in range(q, seq.max_n + 1, q):
        a_n = entries.get(n)
        if a_n:
            total += a_n
    return total


def remainder(seq: SieveSequence, q: int, omega: DensityRecord | Fraction) -> Fraction:
    """r(q) = |A_q| - omega(q) X."""
    if isinstance(omega, DensityRecord):
        if omega.q != q:
            raise DomainError(f"density record is for q={omega.q}, not {q}")
        omega = omega.omega
    return progression_sum(seq, q) - omega * seq.X


def legendre_sum(seq: SieveSequence, z: float) -> tuple[Fraction, Fraction]:
    """(S_direct, S_mobius) for the primes below z; equal by Moebius inversion."""
    if z < 2:
        raise DomainError(f"sifting cutoff must be at least 2, got {z}")
    primes = primes_below(z)
    entries = seq.weights.entries
    s_direct = Fraction(0)
    for n, a_n in entries.items():
        if all(n % p for p in primes if p <= n):
            s_direct += a_n
    s_mobius = Fraction(0)
    # Divisors beyond the largest index have |A_q| = 0, so they are pruned.
    for q, mu in squarefree_divisors(primes, limit=max(seq.max_n, 1)):
        s_mobius += mu * progression_sum(seq, q)
    if s_direct != s_mobius:
        logger.warning("Legendre identity fails at z=%s: %s != %s", z, s_direct, s_mobius)
    return s_direct, s_mobius


def _subset_guard(primes: list[int], z: float) -> None:
    if len(primes) > 20 or (1 << len(primes)) > _MAX_SUBSETS:
        raise DomainError(
            f"{len(primes)} primes below z={z} with nonzero density; too many divisors of P(z) to sum directly",
            {"z": z, "primes": len(primes)},
        )


def mobius_density_sum(z: float, oracle: DensityOracle) -> MobiusDensitySum:
    """Sum of mu(q) omega(q) over q | P(z), directly and as
    prod over unramified p < z of (1 - omega(p)) times the ramified sum.
    """
    if z < 2:
        raise DomainError(f"sifting cutoff must be at least 2, got {z}")
    primes = primes_below(z)
    ramified = [p for p in primes if p in oracle.ramified]
    # Unramified primes of density zero kill every q they divide.
    live = [p for p in primes if p not in oracle.ramified and oracle.omega(p)]
    _subset_guard(ramified + live, z)
    direct = sum(
        (mu * oracle.omega(q) for q, mu in squarefree_divisors(sorted(ramified + live))),
        Fraction(0),
    )
    product = math.prod((1 - oracle.omega(p) for p in primes if p not in oracle.ramified), start=Fraction(1))
    ramified_sum = sum((mu * oracle.omega(q) for q, mu in squarefree_divisors(ramified)), Fraction(0))
    factorized = product * ramified_sum
    if direct != factorized:
        logger.warning("density sum does not factor at z=%s: %s != %s", z, direct, factorized)
    return MobiusDensitySum(z=z, direct=direct, factorized=factorized)


def sieve_decomposition(seq: SieveSequence, z: float, oracle: DensityOracle) -> SieveDecomposition:
    """Split S*(z) into the main term X * sum mu(q) omega(q) and the remainder term."""
    s_direct, s_mobius = legendre_sum(seq, z)
    sigma1 = seq.X * mobius_density_sum(z, oracle).direct
    return SieveDecomposition(
        z=z, sigma1=sigma1, sigma3=s_mobius - sigma1, S_star=s_mobius, S_direct=s_direct
    )


def beta_bounds(s: float, Q: float, K: float) -> SieveBounds:
    """f(s) = 2 e^gamma log(s - 1) / s on [2, 4], F(s) = 2 e^gamma / s on [1, 3],
    and D = c K^11 (log log log Q)^3 / log log Q.

    Either of f, F is None where s lies outside its interval.
    """
    if not 1 <= s <= 4:
        raise DomainError(f"s = {s} lies outside [1, 4]")
    if K < 0:
        raise DomainError(f"K must be nonnegative, got {K}")
    if Q <= math.exp(2 * K):
        raise DomainError(f"level Q = {Q} must exceed e^(2K) = {math.exp(2 * K)}")
    if Q <= math.exp(math.e):
        raise DomainError(f"level Q = {Q} must exceed e^e for log log log Q to be positive")
    scale = 2 * math.exp(Constants.EULER_GAMMA)
    f_lower = scale * math.log(s - 1) / s if 2 <= s <= 4 else None
    F_upper = scale / s if s <= 3 else None
    loglog = math.log(math.log(Q))
    D = Constants.SIEVE_C_CONST * K**11 * math.log(loglog) ** 3 / loglog
    return SieveBounds(s=s, Q=Q, K=K, f_lower=f_lower, F_upper=F_upper, D=D)


def _show(x: Fraction) -> str:
    """Short fractions as p/q, anything else as a decimal."""
    return str(x) if x.denominator <= 1000 else f"{float(x):.6g}"


def _check_exponents(delta: Fraction, theta: Fraction) -> None:
    if not Fraction(1, 2) <= theta < delta <= 1:
        raise DomainError(f"need 1/2 <= theta < delta <= 1, got theta={_show(theta)}, delta={_show(delta)}")


def sieve_level(height, delta, theta, epsilon=0) -> float:
    """Q = T^((delta - theta) / (2 (1 + eps)))."""
    height = to_fraction(height)
    delta, theta, epsilon = to_fraction(delta), to_fraction(theta), to_fraction(epsilon)
    _check_exponents(delta, theta)
    if epsilon < 0:
        raise DomainError(f"smoothing width must be nonnegative, got {epsilon}")
    if height <= 0:
        raise DomainError(f"height must be positive, got {height}")
    exponent = (delta - theta) / (2 * (1 + epsilon))
    return math.exp(float(exponent) * math.log(height))


def sifting_cutoff(Q: float, epsilon=0) -> float:
    """z = Q^(1/s) with s = 2 (1 + eps)."""
    epsilon = to_fraction(epsilon)
    if Q < 1:
        raise DomainError(f"level must be at least 1, got {Q}")
    return Q ** (1 / (2 * (1 + float(epsilon))))


def r_threshold(height, Q: float) -> float:
    """R must exceed 2 log T / log Q."""
    if Q <= 1:
        raise DomainError(f"level must exceed 1, got {Q}")
    return 2 * math.log(to_fraction(height)) / math.log(Q)


def admissible_R(delta, theta) -> int:
    """Least integer R with R > 4 / (delta - theta)."""
    delta, theta = to_fraction(delta), to_fraction(theta)
    if theta >= delta:
        raise DomainError(f"theta = {_show(theta)} must be below delta = {_show(delta)}")
    bound = 4 / (delta - theta)
    return math.floor(bound) + 1


def corollary_table() -> tuple[CorollaryRow, ...]:
    """The admissible R for the three published (delta, theta) regimes."""
    rows = [
        ("gamburd, delta > 149/150", Fraction(199, 200), Constants.GAP_PRESETS["gamburd"]),
        ("kim_sarnak, delta = 1", Fraction(1), Constants.GAP_PRESETS["kim_sarnak"]),
        ("delta - theta > 4/9", Fraction(1), Fraction(11, 20)),
    ]
    return tuple(CorollaryRow(label=l, delta=d, theta=t, R=admissible_R(d, t)) for l, d, t in rows)


def ratio_profile(
    slice: OrbitSlice, heights: Iterable, r: int, delta_hat: float, workers: int = 1
) -> list[RatioPoint]:
    """(T, |O(T, R)| log T / T^delta) at each height, from one factorization pass."""
    omega = _factor_counts(slice, False, workers)
    out = []
    for t in heights:
        t = to_fraction(t)
        sub = restrict(slice, t)
        n = sum(1 for p in sub.points if omega[p.fvalue] <= r)
        ratio = n * math.log(t) / float(t) ** delta_hat if t > 1 else 0.0
        out.append(RatioPoint(height=t, R=r, count=n, ratio=ratio))
    return out


def envelopes(
    bounds: SieveBounds, X: Fraction, V: Fraction, remainder_sum: Fraction, S_star: Fraction
) -> SieveEnvelope:
    """Evaluate both sides of the beta-sieve inequality around S*(z)."""
    xv = float(X * V)
    rq = float(remainder_sum)
    lower = (bounds.f_lower - bounds.D) * xv - rq if bounds.f_lower is not None else None
    upper = (bounds.F_upper + bounds.D) * xv + rq if bounds.F_upper is not None else None
    return SieveEnvelope(lower=lower, upper=upper, S_star=S_star)


def _empty_report(slice: OrbitSlice, height: Fraction, epsilon, theta, delta_hat, r_values) -> SieveReport:
    zero = Fraction(0)
    return SieveReport(
        presentation_name=slice.presentation_name,
        height=height,
        epsilon=epsilon,
        delta_hat=delta_hat,
        theta=theta,
        Q_used=1,
        z=2.0,
        X=zero,
        S_direct=zero,
        S_mobius=zero,
        V_z=Fraction(1),
        remainder_sum=zero,
        remainder_ratio=0.0,
        almost_prime_counts={r: 0 for r in r_values},
        ratios={r: 0.0 for r in r_values},
        notes=("height <= 1: the slice is empty",),
    )


def run_sieve(
    slice: OrbitSlice,
    oracle: DensityOracle,
    delta_hat: float | None,
    theta=Constants.GAP_PRESETS[Constants.DEFAULT_THETA],
    r_values: Iterable[int] = Constants.DEFAULT_R_LIST,
    epsilon=None,
    height=None,
    level_q: int | None = None,
    sift_z: float | None = None,
    workers: int = 1,
) -> SieveReport:
    """Assemble the full sieve run on one exhausted slice.

    Args:
        slice: exhausted orbit slice
        oracle: densities omega(q)
        delta_hat: growth exponent used for Q and the ratio diagnostics
        theta: spectral gap exponent
        r_values: R values to count almost-primes for
        epsilon: smoothing width, None for sharp weights
        height: sieve height T; defaults to the largest the slice supports
        level_q: override of the level used for the remainder sum
        sift_z: override of the sifting cutoff

    Returns:
        SieveReport: every computed quantity, exact where possible
    """
    theta = to_fraction(theta)
    epsilon = None if epsilon is None else to_fraction(epsilon)
    r_values = sorted(set(r_values))
    weights = weight_table(slice, epsilon, height)
    T = weights.height
    if T <= 1:
        return _empty_report(slice, T, epsilon, theta, delta_hat, r_values)
    seq = SieveSequence.from_table(weights)
    notes = [
        "ramified primes are the surjectivity failures up to "
        f"{oracle.prime_bound}; primes with an exceptional spectral gap are not detected"
    ]

    Q_theory = None
    admissible = threshold = None
    if delta_hat is not None:
        try:
            Q_theory = sieve_level(T, to_fraction(min(delta_hat, 1.0)), theta, epsilon or 0)
            admissible = admissible_R(to_fraction(min(delta_hat, 1.0)), theta)
        except DomainError as exc:
            notes.append(f"no theoretical level: {exc.message}")
            logger.warning("no theoretical sieve level: %s", exc.message)
    else:
        notes.append("no growth exponent given; theoretical level skipped")

    Q_used = level_q if level_q is not None else max(1, math.floor(Q_theory or 1))
    if sift_z is not None:
        z = float(sift_z)
    else:
        z = sifting_cutoff(Q_theory, epsilon or 0) if Q_theory and Q_theory >= 1 else 2.0
    z = max(z, 2.0)
    collapsed = level_q is None and sift_z is None and Q_used == 1 and z <= 2.0
    if collapsed:
        notes.append("level collapsed to Q = 1 and z = 2: the sieve is trivial; set level_q or sift_z")
        logger.warning("sieve level collapsed to 1 for %s at T=%s", slice.presentation_name, T)
    if Q_used > 1:
        threshold = r_threshold(T, Q_used)

    s_direct, s_mobius = legendre_sum(seq, z)
    v_z = local_density_product(z, oracle.ramified, oracle.omega)

    remainder_sum = Fraction(0)
    moduli = 0
    for q in squarefree_up_to(Q_used):
        if math.gcd(q, oracle.ramified_product) != 1:
            continue
        remainder_sum += abs(remainder(seq, q, oracle.record(q)))
        moduli += 1

    decomposition = mobius = None
    try:
        mobius = mobius_density_sum(z, oracle)
        sigma1 = seq.X * mobius.direct
        decomposition = SieveDecomposition(
            z=z, sigma1=sigma1, sigma3=s_mobius - sigma1, S_star=s_mobius, S_direct=s_direct
        )
    except DomainError as exc:
        notes.append(f"decomposition skipped: {exc.message}")

    K = local_density_bound_K(z, oracle.ramified, oracle.omega)
    bounds = envelope = None
    if Q_used > 1 and z > 1:
        try:
            bounds = beta_bounds(math.log(Q_used) / math.log(z), Q_used, K)
            envelope = envelopes(bounds, seq.X, v_z.value, remainder_sum, s_mobius)
        except DomainError as exc:
            notes.append(f"beta-sieve bounds not evaluated: {exc.message}")

    counts = almost_prime_counts(restrict(slice, T), r_values, workers=workers)
    log_t = math.log(T)
    ratios = (
        {r: c * log_t / float(T) ** delta_hat for r, c in counts.items()} if delta_hat is not None else {}
    )
    logger.info(
        "sieve %s at T=%s: X=%s, z=%.3g, Q=%d, S=%s", slice.presentation_name, T, seq.X, z, Q_used, s_mobius
    )
    return SieveReport(
        presentation_name=slice.presentation_name,
        height=T,
        epsilon=epsilon,
        delta_hat=delta_hat,
        theta=theta,
        Q_theory=Q_theory,
        Q_used=Q_used,
        z=z,
        X=seq.X,
        S_direct=s_direct,
        S_mobius=s_mobius,
        V_z=v_z.value,
        remainder_sum=remainder_sum,
        remainder_ratio=float(remainder_sum / seq.X),
        moduli_used=moduli,
        ramified=tuple(sorted(oracle.ramified)),
        K_estimate=K,
        decomposition=decomposition,
        mobius_density=mobius,
        bounds=bounds,
        envelope=envelope,
        almost_prime_counts=counts,
        ratios=ratios,
        admissible_R=admissible,
        r_threshold=threshold,
        level_collapsed=collapsed,
        notes=tuple(notes),
    )
