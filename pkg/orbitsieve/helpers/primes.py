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
Prime tables and deterministic trial division.

All factorization in the package goes through a shared PrimeTable that
grows on demand: factoring n needs the primes up to isqrt(n), which is
tiny at the heights we enumerate (f < 10^8 needs primes below 10^4).
"""

import logging
import math
from bisect import bisect_left
from typing import Iterator

import numpy as np

logger = logging.getLogger(__name__)


def prime_sieve(limit: int) -> np.ndarray:
    """Eratosthenes sieve returning the primes <= limit as int64."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


class PrimeTable:
    """Growable table of small primes used for trial division."""

    def __init__(self, limit: int = 1 << 12):
        self._limit = 0
        self._primes: list[int] = []
        self.ensure(limit)

    @property
    def limit(self) -> int:
        return self._limit

    def ensure(self, limit: int) -> None:
        """Make sure every prime <= limit is in the table."""
        if limit <= self._limit:
            return
        # Grow geometrically so repeated small extensions stay cheap.
        target = max(limit, 2 * self._limit)
        self._primes = prime_sieve(target).tolist()
        self._limit = target
        logger.debug("prime table extended to %d (%d primes)", target, len(self._primes))

    def primes_below(self, z: float) -> list[int]:
        """Primes p with p < z."""
        bound = math.ceil(z) - 1
        self.ensure(max(bound, 2))
        return self._primes[: bisect_left(self._primes, math.ceil(z))]

    def primes_up_to(self, bound: int) -> list[int]:
        return self.primes_below(bound + 1)

    def factorize(self, n: int) -> list[tuple[int, int]]:
        """Prime factorization of n >= 1 as sorted (p, e) pairs; factorize(1) == []."""
        if n < 1:
            raise ValueError(f"cannot factor {n}")
        self.ensure(math.isqrt(n) + 1)
        factors: list[tuple[int, int]] = []
        for p in self._primes:
            if p * p > n:
                break
            if n % p == 0:
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                factors.append((p, e))
        if n > 1:
            factors.append((n, 1))
        return factors

    def is_prime(self, n: int) -> bool:
        if n < 2:
            return False
        return self.factorize(n) == [(n, 1)]

    def big_omega(self, n: int) -> int:
        """Number of prime factors of n counted with multiplicity."""
        return sum(e for _, e in self.factorize(n))

    def small_omega(self, n: int) -> int:
        """Number of distinct prime factors of n."""
        return len(self.factorize(n))

    def is_squarefree(self, n: int) -> bool:
        return n >= 1 and all(e == 1 for _, e in self.factorize(n))

    def mobius(self, n: int) -> int:
        factors = self.factorize(n)
        if any(e > 1 for _, e in factors):
            return 0
        return -1 if len(factors) % 2 else 1


_TABLE = PrimeTable()


def default_table() -> PrimeTable:
    return _TABLE


def factorize(n: int) -> list[tuple[int, int]]:
    return _TABLE.factorize(n)


def prime_factor_count(n: int, distinct: bool = False) -> int:
    """Omega(n) (with multiplicity), or omega(n) when ``distinct`` is set."""
    return _TABLE.small_omega(n) if distinct else _TABLE.big_omega(n)


def is_prime(n: int) -> bool:
    return _TABLE.is_prime(n)


def is_squarefree(n: int) -> bool:
    return _TABLE.is_squarefree(n)


def mobius(n: int) -> int:
    return _TABLE.mobius(n)


def primes_below(z: float) -> list[int]:
    return _TABLE.primes_below(z)


def primes_up_to(bound: int) -> list[int]:
    return _TABLE.primes_up_to(bound)


def squarefree_up_to(bound: int, start: int = 1) -> Iterator[int]:
    """Square-free integers in [start, bound], ascending."""
    for q in range(max(start, 1), bound + 1):
        if _TABLE.is_squarefree(q):
            yield q


def squarefree_divisors(primes: list[int], limit: int | None = None) -> Iterator[tuple[int, int]]:
    """(q, mu(q)) for every product q of a subset of ``primes``.

    With ``limit`` set, subsets whose product exceeds it are pruned without
    ever forming the full product of the list.
    """
    stack: list[tuple[int, int, int]] = [(0, 1, 1)]
    while stack:
        index, q, mu = stack.pop()
        if index == len(primes):
            yield q, mu
            continue
        stack.append((index + 1, q, mu))
        nq = q * primes[index]
        if limit is None or nq <= limit:
            stack.append((index + 1, nq, -mu))
