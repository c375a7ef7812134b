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
Exact arithmetic in SL2(Z)

Matrices are written (a, b; c, d). The cusp stabilizer is the strictly
unipotent group of matrices (1, n*h; 0, 1) where h is the cusp width of
the presentation, so -I is never absorbed into a coset and the bottom
rows (c, d) and (-c, -d) stay distinct.

The public functions take and return GroupElement models. The enumeration
code calls the tuple kernels (_mul, _canonical) directly to stay fast.
"""

import json
import logging
import os
from collections import deque
from pathlib import Path
from typing import Iterable

from dotenv import dotenv_values

from .constants import Constants
from .errors import CuspWordNotFoundError, EnvelopeOverflowError, PresentationError
from .models.orbit_base import IDENTITY, GroupElement, GroupPresentation

logger = logging.getLogger(__name__)

Matrix = tuple[int, int, int, int]

_PRESETS_FILE = os.path.join(os.path.dirname(__file__), "data", "presentations.json")


def _mul(x: Matrix, y: Matrix) -> Matrix:
    a, b, c, d = x
    e, f, g, h = y
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def _check_envelope(m: Matrix, word_length: int | None = None) -> Matrix:
    limit = Constants.INT128_LIMIT
    for entry in m:
        if entry >= limit or entry <= -limit:
            raise EnvelopeOverflowError(word_length, entry)
    return m


def _canonical(m: Matrix, h: int) -> Matrix:
    a, b, c, d = m
    if c == 0:
        # a = d = +-1 here; a left translate by (1, k*h; 0, 1) moves b by k*h*d.
        return (a, b % h, 0, d)
    period = h * abs(c)
    reduced = a % period
    k = (reduced - a) // (h * c)
    return (reduced, b + k * h * d, c, d)


def _norm_sq(m: Matrix) -> int:
    a, b, c, d = m
    return a * a + b * b + c * c + d * d


def multiply(x: GroupElement, y: GroupElement, word_length: int | None = None) -> GroupElement:
    """Matrix product x*y.

    Args:
        x: left factor
        y: right factor
        word_length: length of the word being built, reported on overflow

    Returns:
        GroupElement: the product, determinant one

    Raises:
        EnvelopeOverflowError: an entry leaves the signed 128-bit range
    """
    return GroupElement.from_tuple(_check_envelope(_mul(x.as_tuple(), y.as_tuple()), word_length))


def inverse(x: GroupElement) -> GroupElement:
    """Adjugate (d, -b; -c, a), the inverse of a determinant-one matrix."""
    return GroupElement(a=x.d, b=-x.b, c=-x.c, d=x.a)


def power(x: GroupElement, n: int) -> GroupElement:
    """x**n for any integer n, by repeated squaring."""
    base = x if n >= 0 else inverse(x)
    n = abs(n)
    result = IDENTITY.as_tuple()
    acc = base.as_tuple()
    while n:
        if n & 1:
            result = _check_envelope(_mul(result, acc))
        n >>= 1
        if n:
            acc = _check_envelope(_mul(acc, acc))
    return GroupElement.from_tuple(result)


def stabilizes_infinity(x: GroupElement) -> bool:
    """True iff x = (1, *; 0, 1). -I is not counted as a stabilizer."""
    return x.a == 1 and x.c == 0 and x.d == 1


def canonical_coset_rep(x: GroupElement, h: int) -> GroupElement:
    """Reduce the top row of x by left translates (1, k*h; 0, 1).

    For c != 0 the returned a lies in [0, h*|c|); for c == 0 the entry b is
    reduced into [0, h). The bottom row is never changed.
    """
    if h < 1:
        raise PresentationError(f"cusp width must be positive, got {h}")
    return GroupElement.from_tuple(_canonical(x.as_tuple(), h))


def frobenius_norm_sq(x: GroupElement) -> int:
    """a^2 + b^2 + c^2 + d^2."""
    return _norm_sq(x.as_tuple())


def words(pres: GroupPresentation, max_length: int) -> dict[Matrix, int]:
    """All distinct elements of word length <= max_length, mapped to their shortest length."""
    gens = [g.as_tuple() for g in pres.symmetric_generators()]
    start = IDENTITY.as_tuple()
    lengths: dict[Matrix, int] = {start: 0}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        depth = lengths[x]
        if depth == max_length:
            continue
        for g in gens:
            y = _check_envelope(_mul(x, g), depth + 1)
            if y not in lengths:
                lengths[y] = depth + 1
                queue.append(y)
    return lengths


def verify_cusp_width(pres: GroupPresentation, max_word_length: int = Constants.DEFAULT_WORD_CAP) -> int:
    """Find (1, h; 0, 1) as a word of length <= max_word_length.

    Returns:
        int: the shortest word length realizing the cusp generator

    Raises:
        CuspWordNotFoundError: no such word within the length cap
    """
    target = pres.cusp_generator.as_tuple()
    found = words(pres, max_word_length).get(target)
    if found is None:
        raise CuspWordNotFoundError(
            f"(1,{pres.cusp_width};0,1) is not a word of length <= {max_word_length} "
            f"in the generators of {pres.name}",
            {"presentation": pres.name, "cusp_width": pres.cusp_width, "word_cap": max_word_length},
        )
    logger.debug("cusp generator of %s found at word length %d", pres.name, found)
    return found


def parse_generator_rows(text: str) -> list[Matrix]:
    """Parse "a b c d; a b c d; ..." into integer 4-tuples."""
    rows = []
    for chunk in text.replace("\n", ";").split(";"):
        chunk = chunk.strip().strip("[]()")
        if not chunk:
            continue
        parts = chunk.replace(",", " ").split()
        if len(parts) != 4:
            raise PresentationError(f"generator row {chunk!r} does not have four entries")
        try:
            rows.append(tuple(int(p) for p in parts))
        except ValueError as exc:
            raise PresentationError(f"generator row {chunk!r} is not integral") from exc
    if not rows:
        raise PresentationError("no generator rows given")
    return rows


def build_presentation(
    name: str,
    rows: Iterable[Matrix],
    cusp_width: int,
    description: str | None = None,
    word_cap: int = Constants.DEFAULT_WORD_CAP,
    verify: bool = True,
) -> GroupPresentation:
    """Validate generators and, unless ``verify`` is off, the declared cusp width."""
    try:
        generators = tuple(GroupElement.from_tuple(tuple(r)) for r in rows)
        pres = GroupPresentation(
            name=name, generators=generators, cusp_width=cusp_width, description=description
        )
    except ValueError as exc:
        raise PresentationError(f"invalid presentation {name!r}: {exc}") from exc
    if verify:
        verify_cusp_width(pres, word_cap)
    return pres


def load_presets() -> dict[str, dict]:
    """Raw preset definitions shipped in data/presentations.json."""
    with open(_PRESETS_FILE, "r") as f:
        return {entry["name"]: entry for entry in json.load(f)}


def load_presentation(spec: str, word_cap: int = Constants.DEFAULT_WORD_CAP) -> GroupPresentation:
    """Load a preset by name, or a key=value presentation file by path.

    The file format is the one used for run configs:

        name=hecke4
        generators=1 4 0 1; 0 -1 1 0
        cusp_width=4
    """
    presets = load_presets()
    if spec in presets:
        entry = presets[spec]
        return build_presentation(
            entry["name"], entry["generators"], entry["cusp_width"],
            entry.get("description"), word_cap,
        )
    path = Path(spec)
    if not path.is_file():
        raise PresentationError(
            f"unknown presentation {spec!r}; presets are {', '.join(sorted(presets))}"
        )
    values = dotenv_values(path)
    missing = [k for k in ("name", "generators", "cusp_width") if not values.get(k)]
    if missing:
        raise PresentationError(f"{path} is missing {', '.join(missing)}")
    return build_presentation(
        values["name"],
        parse_generator_rows(values["generators"]),
        int(values["cusp_width"]),
        values.get("description"),
        word_cap,
    )
