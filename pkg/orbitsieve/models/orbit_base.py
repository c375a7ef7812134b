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

"""Core value types: matrices, presentations, orbit slices and weight tables."""

import hashlib
import json
from fractions import Fraction
from typing import Annotated, Any

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PlainSerializer,
    PlainValidator,
    PositiveInt,
    model_validator,
)

from ..constants import Constants
from ..errors import EnvelopeOverflowError


def to_fraction(value: Any) -> Fraction:
    """Coerce ints, decimal strings, "p/q" strings and floats to a Fraction.

    Floats go through their repr so that 1.5 becomes 3/2 and 0.1 becomes 1/10.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise ValueError(f"cannot interpret {value!r} as a rational")


Rational = Annotated[
    Fraction,
    PlainValidator(to_fraction),
    PlainSerializer(str, return_type=str, when_used="json"),
]


class OrbitSieveModel(BaseModel):
    """Base class for all orbitsieve value types."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)


class GroupElement(OrbitSieveModel):
    """Exact 2x2 integer matrix (a, b; c, d) of determinant one."""

    a: int
    b: int
    c: int
    d: int

    @model_validator(mode="after")
    def _check_det(self) -> "GroupElement":
        for entry in (self.a, self.b, self.c, self.d):
            if abs(entry) >= Constants.INT128_LIMIT:
                raise EnvelopeOverflowError(None, entry)
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(
                f"({self.a},{self.b};{self.c},{self.d}) has determinant "
                f"{self.a * self.d - self.b * self.c}, expected 1"
            )
        return self

    @classmethod
    def from_tuple(cls, entries: tuple[int, int, int, int]) -> "GroupElement":
        a, b, c, d = entries
        return cls(a=a, b=b, c=c, d=d)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    @property
    def bottom_row(self) -> tuple[int, int]:
        return (self.c, self.d)

    def __str__(self) -> str:
        return f"({self.a},{self.b};{self.c},{self.d})"


IDENTITY = GroupElement(a=1, b=0, c=0, d=1)


class GroupPresentation(OrbitSieveModel):
    """A finitely generated subgroup of SL2(Z) with a cusp of width h at infinity."""

    name: str
    generators: tuple[GroupElement, ...] = Field(min_length=1)
    cusp_width: PositiveInt
    description: str | None = None

    def symmetric_generators(self) -> tuple[GroupElement, ...]:
        """Generators followed by their inverses, without repeats, in declaration order."""
        seen: dict[tuple[int, int, int, int], GroupElement] = {}
        for g in self.generators:
            seen.setdefault(g.as_tuple(), g)
        for g in self.generators:
            inv = GroupElement(a=g.d, b=-g.b, c=-g.c, d=g.a)
            seen.setdefault(inv.as_tuple(), inv)
        return tuple(seen.values())

    @property
    def cusp_generator(self) -> GroupElement:
        return GroupElement(a=1, b=self.cusp_width, c=0, d=1)

    def generator_rows(self) -> list[list[int]]:
        return [list(g.as_tuple()) for g in self.generators]

    def digest(self) -> str:
        """Short hash of the generators and cusp width; the name is not part of it."""
        payload = json.dumps({"generators": self.generator_rows(), "cusp_width": self.cusp_width})
        return hashlib.sha256(payload.encode()).hexdigest()[:12]


class OrbitPoint(OrbitSieveModel):
    """A bottom row (c, d) of the orbit together with f(c, d) = c^2 + d^2."""

    c: int
    d: int
    fvalue: int

    @model_validator(mode="after")
    def _check_fvalue(self) -> "OrbitPoint":
        if (self.c, self.d) == (0, 0):
            raise ValueError("(0, 0) is not the bottom row of a determinant-one matrix")
        if self.fvalue != self.c * self.c + self.d * self.d:
            raise ValueError(f"fvalue {self.fvalue} != c^2 + d^2 for ({self.c}, {self.d})")
        return self

    @classmethod
    def of(cls, c: int, d: int) -> "OrbitPoint":
        return cls(c=c, d=d, fvalue=c * c + d * d)


class OrbitSlice(OrbitSieveModel):
    """The deduplicated orbit points below a height, with enumeration audit data."""

    presentation_name: str
    height: Rational
    beta: Rational
    points: tuple[OrbitPoint, ...] = ()
    exhausted: bool
    audited: bool = False
    contains_minus_identity: bool = False
    nodes_visited: int = 0
    max_word_length: int = 0

    @model_validator(mode="after")
    def _check_points(self) -> "OrbitSlice":
        if self.height <= 0:
            raise ValueError("height must be positive")
        if self.beta < 1:
            raise ValueError("prune factor must be at least 1")
        rows = set()
        for p in self.points:
            if p.fvalue >= self.height:
                raise ValueError(f"point ({p.c}, {p.d}) has f = {p.fvalue} >= height {self.height}")
            rows.add((p.c, p.d))
        if len(rows) != len(self.points):
            raise ValueError("orbit points must be distinct")
        if self.height > 1 and (0, 1) not in rows:
            raise ValueError("(0, 1) must belong to every slice above height 1")
        if self.contains_minus_identity and any((-c, -d) not in rows for c, d in rows):
            raise ValueError("slice reached -I but is not closed under negation")
        return self

    @property
    def size(self) -> int:
        return len(self.points)

    def fvalues(self) -> list[int]:
        return [p.fvalue for p in self.points]


class WeightTable(OrbitSieveModel):
    """The finitely supported sequence n -> a_n(T) of (smoothed) orbit counts.

    ``epsilon`` is None for sharp weights, i.e. the indicator of f < T.
    """

    height: Rational
    epsilon: Rational | None = None
    entries: dict[int, Rational] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_support(self) -> "WeightTable":
        if self.epsilon is not None and not (0 < self.epsilon < Fraction(1, 2)):
            raise ValueError("smoothing width must lie in (0, 1/2)")
        ceiling = self.support_bound
        for n, a_n in self.entries.items():
            if n < 1:
                raise ValueError(f"index {n} is not a positive integer")
            if a_n < 0:
                raise ValueError(f"a_{n} = {a_n} is negative")
            if a_n and n > ceiling:
                raise ValueError(f"a_{n} is nonzero beyond the support bound {ceiling}")
        return self

    @property
    def support_bound(self) -> Fraction:
        """Largest n that may carry weight: T/(1 - eps), or T itself for sharp weights."""
        if self.epsilon is None:
            return self.height
        return self.height / (1 - self.epsilon)

    @property
    def sharp(self) -> bool:
        return self.epsilon is None

    def total(self) -> Fraction:
        return sum(self.entries.values(), Fraction(0))


class SandwichReport(OrbitSieveModel):
    """Smoothed count H_eps(T) next to the sharp counts that must bracket it.

    ``count_lower <= smoothed <= count_upper`` always holds for a complete
    slice. The shrunk/grown pair is the equivalent bracket of |O(T)| and is
    only filled in when the slice reaches T(1+eps)/(1-eps).
    """

    height: Rational
    epsilon: Rational
    count_lower: int
    smoothed: Rational
    count_upper: int
    count: int
    shrunk_smoothed: Rational | None = None
    grown_smoothed: Rational | None = None

    @property
    def holds(self) -> bool:
        ok = self.count_lower <= self.smoothed <= self.count_upper
        if self.shrunk_smoothed is not None and self.grown_smoothed is not None:
            ok = ok and self.shrunk_smoothed <= self.count <= self.grown_smoothed
        return ok
