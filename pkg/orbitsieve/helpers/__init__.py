from .primes import (
    PrimeTable,
    default_table,
    factorize,
    is_prime,
    is_squarefree,
    mobius,
    prime_factor_count,
    prime_sieve,
    primes_below,
    primes_up_to,
    squarefree_divisors,
    squarefree_up_to,
)
from .workers import chunked, pool_map

__all__ = [
    "PrimeTable",
    "chunked",
    "default_table",
    "factorize",
    "is_prime",
    "is_squarefree",
    "mobius",
    "pool_map",
    "prime_factor_count",
    "prime_sieve",
    "primes_below",
    "primes_up_to",
    "squarefree_divisors",
    "squarefree_up_to",
]
