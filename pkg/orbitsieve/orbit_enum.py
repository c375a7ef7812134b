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
Orbit enumeration, smoothed weights and almost-prime counts.

The orbit O = (0, 1)Gamma is in bijection with the cosets Gamma_inf \\ Gamma,
so enumerate_orbit walks canonical coset representatives breadth first,
right-multiplying by the generators and their inverses. A node is expanded
only while its Frobenius norm squared stays below beta^2 * 2T; nodes above
the bound are kept (their bottom rows still count) but not expanded.
"""

import bisect
import logging
from fractions import Fraction
from typing import Iterable

from .constants import Constants
from .errors import DomainError, FrontierOverflowError, HeightShortfallError, UnexhaustedSliceError
from .group_core import Matrix, _canonical, _check_envelope, _mul, _norm_sq, multiply
from .helpers.primes import prime_factor_count
from .helpers.workers import chunked, pool_map
from .models.orbit_base import (
    GroupElement,
    GroupPresentation,
    OrbitPoint,
    OrbitSlice,
    SandwichReport,
    WeightTable,
    to_fraction,
)

logger = logging.getLogger(__name__)

__all__ = [
    "almost_prime_count",
    "almost_prime_counts",
    "audit_orbit",
    "count",
    "counts_by_height",
    "enumerate_orbit",
    "prime_factor_count",
    "restrict",
    "sandwich_check",
    "smoothed_count",
    "smoothed_weight",
    "unipotent_slice_check",
    "weight_table",
]

_MINUS_IDENTITY: Matrix = (-1, 0, 0, -1)


def _expand_chunk(args: tuple[list[Matrix], list[Matrix], int, int]) -> list[Matrix]:
    nodes, gens, h, word_length = args
    children = []
    for x in nodes:
        for g in gens:
            children.append(_canonical(_check_envelope(_mul(x, g), word_length), h))
    return children


def _enumerate(
    pres: GroupPresentation,
    height: Fraction,
    beta: Fraction,
    node_cap: int,
    workers: int,
) -> OrbitSlice:
    h = pres.cusp_width
    gens = [g.as_tuple() for g in pres.symmetric_generators()]
    bound = beta * beta * 2 * height

    start = _canonical((1, 0, 0, 1), h)
    visited: set[Matrix] = {start}
    frontier: list[Matrix] = [start]
    depth = 0
    pruned = 0
    max_word_length = 0

    while frontier:
        expandable = [x for x in frontier if _norm_sq(x) <= bound]
        pruned += len(frontier) - len(expandable)
        if not expandable:
            break
        depth += 1
        chunks = chunked(expandable, max(workers, 1))
        results = pool_map(_expand_chunk, [(c, gens, h, depth) for c in chunks], workers)

        fresh: set[Matrix] = set()
        for children in results:
            for y in children:
                if y not in visited:
                    fresh.add(y)
        if fresh:
            max_word_length = depth
        visited.update(fresh)
        # Sorting keeps level order, and hence the result, independent of scheduling.
        frontier = sorted(fresh)
        logger.debug("level %d: %d new nodes, %d visited", depth, len(fresh), len(visited))

        if len(visited) > node_cap:
            partial = sum(1 for x in visited if x[2] * x[2] + x[3] * x[3] < height)
            raise FrontierOverflowError(
                f"orbit search for {pres.name} at T={height} exceeded {node_cap} nodes",
                {
                    "presentation": pres.name,
                    "height": str(height),
                    "beta": str(beta),
                    "nodes_visited": len(visited),
                    "frontier": len(frontier),
                    "word_length": depth,
                    "points_so_far": partial,
                },
            )

    rows = {(x[2], x[3]) for x in visited if x[2] * x[2] + x[3] * x[3] < height}
    has_minus_identity = _MINUS_IDENTITY in visited
    if has_minus_identity:
        # -I is central, so every point comes with its negative.
        rows |= {(-c, -d) for c, d in rows}
    points = tuple(
        OrbitPoint.of(c, d) for c, d in sorted(rows, key=lambda r: (r[0] * r[0] + r[1] * r[1], r))
    )
    logger.info(
        "enumerated %s at T=%s beta=%s: %d points, %d nodes, %d pruned, depth %d",
        pres.name, height, beta, len(points), len(visited), pruned, max_word_length,
    )
    return OrbitSlice(
        presentation_name=pres.name,
        height=height,
        beta=beta,
        points=points,
        exhausted=True,
        contains_minus_identity=has_minus_identity,
        nodes_visited=len(visited),
        max_word_length=max_word_length,
    )


def enumerate_orbit(
    pres: GroupPresentation,
    height,
    beta=Constants.DEFAULT_BETA,
    node_cap: int = Constants.DEFAULT_NODE_CAP,
    workers: int = 1,
    audit: bool = False,
) -> OrbitSlice:
    """Enumerate the orbit points (c, d) with c^2 + d^2 < height.

    Args:
        pres: the group presentation
        height: T > 0, an int, Fraction or decimal string
        beta: prune factor >= 1
        node_cap: abort once more coset nodes than this were visited
        workers: worker processes for level expansion
        audit: also run at 2*beta and only report exhausted if both agree

    Returns:
        OrbitSlice: the deduplicated points, sorted by (f, c, d)

    Raises:
        FrontierOverflowError: the node cap was hit; details hold partial statistics
        DomainError: height <= 0 or beta < 1
    """
    height = to_fraction(height)
    beta = to_fraction(beta)
    if height <= 0:
        raise DomainError(f"height must be positive, got {height}")
    if beta < 1:
        raise DomainError(f"prune factor must be at least 1, got {beta}")
    if audit:
        return audit_orbit(pres, height, beta, node_cap=node_cap, workers=workers)
    return _enumerate(pres, height, beta, node_cap, workers)


def audit_orbit(
    pres: GroupPresentation,
    height,
    beta=Constants.DEFAULT_BETA,
    node_cap: int = Constants.DEFAULT_NODE_CAP,
    workers: int = 1,
) -> OrbitSlice:
    """Enumerate at beta and 2*beta; the slice is exhausted only if the point sets agree."""
    height = to_fraction(height)
    beta = to_fraction(beta)
    base = _enumerate(pres, height, beta, node_cap, workers)
    doubled = _enumerate(pres, height, 2 * beta, node_cap, workers)
    agree = base.points == doubled.points
    if not agree:
        logger.warning(
            "prune audit failed for %s at T=%s: %d points at beta=%s, %d at beta=%s",
            pres.name, height, base.size, beta, doubled.size, 2 * beta,
        )
    return base.model_copy(update={"audited": True, "exhausted": agree})


def count(slice: OrbitSlice) -> int:
    """|O(T)|; refuses slices whose enumeration was not certified complete."""
    if not slice.exhausted:
        raise UnexhaustedSliceError(
            f"slice of {slice.presentation_name} at T={slice.height} is not exhausted",
            {"presentation": slice.presentation_name, "height": str(slice.height)},
        )
    return slice.size


def restrict(slice: OrbitSlice, height) -> OrbitSlice:
    """The sub-slice of points with f < height, for height <= slice.height."""
    height = to_fraction(height)
    if height > slice.height:
        raise HeightShortfallError(
            f"cannot restrict a slice of height {slice.height} to {height}",
            {"available": str(slice.height), "requested": str(height)},
        )
    points = tuple(p for p in slice.points if p.fvalue < height)
    return slice.model_copy(update={"height": height, "points": points})


def counts_by_height(slice: OrbitSlice, heights: Iterable) -> list[tuple[Fraction, int]]:
    """(T, |O(T)|) for each requested T, read off a single enumeration."""
    fvalues = sorted(slice.fvalues())
    out = []
    for t in heights:
        t = to_fraction(t)
        if t > slice.height:
            raise HeightShortfallError(
                f"height {t} is above the enumerated height {slice.height}",
                {"available": str(slice.height), "requested": str(t)},
            )
        # f < t  <=>  f < ceil(t) for integer f
        out.append((t, bisect.bisect_left(fvalues, -(-t.numerator // t.denominator))))
    return out


def smoothed_weight(n: int, height, epsilon=None) -> Fraction:
    """w_T(n): 1 up to T/(1+eps), 0 from T/(1-eps) on, linear in between.

    With epsilon None the weight is the sharp indicator of n < T.
    """
    height = to_fraction(height)
    if epsilon is None:
        return Fraction(1 if n < height else 0)
    epsilon = to_fraction(epsilon)
    if not (0 < epsilon < Fraction(1, 2)):
        raise DomainError(f"smoothing width must lie in (0, 1/2), got {epsilon}")
    lo = height / (1 + epsilon)
    hi = height / (1 - epsilon)
    if n <= lo:
        return Fraction(1)
    if n >= hi:
        return Fraction(0)
    return (hi - n) / (hi - lo)


def weight_table(slice: OrbitSlice, epsilon=None, height=None) -> WeightTable:
    """a_n(T) = sum of w_T over the orbit points with f = n.

    ``height`` defaults to the slice height for sharp weights and to
    slice.height * (1 - eps) otherwise, the largest T the slice supports.
    """
    epsilon = None if epsilon is None else to_fraction(epsilon)
    if height is None:
        height = slice.height if epsilon is None else slice.height * (1 - epsilon)
    height = to_fraction(height)
    needed = height if epsilon is None else height / (1 - epsilon)
    if needed > slice.height:
        raise HeightShortfallError(
            f"weights at T={height} need points up to {needed}, slice stops at {slice.height}",
            {"available": str(slice.height), "needed": str(needed)},
        )
    entries: dict[int, Fraction] = {}
    for p in slice.points:
        w = smoothed_weight(p.fvalue, height, epsilon)
        if w:
            entries[p.fvalue] = entries.get(p.fvalue, Fraction(0)) + w
    return WeightTable(height=height, epsilon=epsilon, entries=dict(sorted(entries.items())))


def smoothed_count(slice: OrbitSlice, height, epsilon) -> Fraction:
    """H_eps(T) = sum over n of a_n(T)."""
    return weight_table(slice, epsilon, height).total()


def sandwich_check(slice: OrbitSlice, height, epsilon) -> SandwichReport:
    """Bracket the smoothed count by sharp counts at T/(1+eps) and T/(1-eps)."""
    height = to_fraction(height)
    epsilon = to_fraction(epsilon)
    lo = height / (1 + epsilon)
    hi = height / (1 - epsilon)
    (_, lower), (_, upper), (_, sharp) = counts_by_height(slice, [lo, hi, height])
    shrunk = grown = None
    if height * (1 + epsilon) / (1 - epsilon) <= slice.height:
        shrunk = smoothed_count(slice, height * (1 - epsilon), epsilon)
        grown = smoothed_count(slice, height * (1 + epsilon), epsilon)
    return SandwichReport(
        height=height,
        epsilon=epsilon,
        count_lower=lower,
        smoothed=smoothed_count(slice, height, epsilon),
        count_upper=upper,
        count=sharp,
        shrunk_smoothed=shrunk,
        grown_smoothed=grown,
    )


def _omega_chunk(args: tuple[list[int], bool]) -> list[int]:
    values, distinct = args
    return [prime_factor_count(n, distinct) for n in values]


def _factor_counts(slice: OrbitSlice, distinct: bool, workers: int) -> dict[int, int]:
    values = sorted(set(slice.fvalues()))
    chunks = chunked(values, max(workers, 1))
    results = pool_map(_omega_chunk, [(c, distinct) for c in chunks], workers)
    return {n: k for c, r in zip(chunks, results) for n, k in zip(c, r)}


def almost_prime_counts(
    slice: OrbitSlice, r_values: Iterable[int], distinct: bool = False, workers: int = 1
) -> dict[int, int]:
    """|O(T, R)| for each R, factoring every distinct f-value once."""
    r_values = list(r_values)
    for r in r_values:
        if r < 1:
            raise DomainError(f"R must be a positive integer, got {r}")
    if not slice.exhausted:
        raise UnexhaustedSliceError(
            f"slice of {slice.presentation_name} at T={slice.height} is not exhausted",
            {"presentation": slice.presentation_name, "height": str(slice.height)},
        )
    omega = _factor_counts(slice, distinct, workers)
    return {r: sum(1 for p in slice.points if omega[p.fvalue] <= r) for r in r_values}


def almost_prime_count(slice: OrbitSlice, r: int, distinct: bool = False, workers: int = 1) -> int:
    """Number of points whose f-value has at most R prime factors.

    Factors are counted with multiplicity unless ``distinct`` is set; f = 1
    has none and always counts.
    """
    return almost_prime_counts(slice, [r], distinct, workers)[r]


def unipotent_slice_check(pres: GroupPresentation, gamma: GroupElement, n_max: int) -> bool:
    """True iff n -> f((0, 1) gamma alpha^n), n = 0..n_max, has vanishing third differences."""
    alpha = pres.cusp_generator
    x = gamma
    values = []
    for n in range(n_max + 1):
        values.append(x.c * x.c + x.d * x.d)
        x = multiply(x, alpha, word_length=n + 1)
    for _ in range(3):
        values = [b - a for a, b in zip(values, values[1:])]
    return all(v == 0 for v in values)
