"""Value types for images of the group modulo q and their local densities."""

from fractions import Fraction

import numpy as np
from pydantic import ConfigDict, Field, PositiveInt, field_validator, model_validator

from .orbit_base import OrbitSieveModel, Rational


class ResidueMatrix(OrbitSieveModel):
    """(a, b; c, d) with entries reduced into [0, q) and determinant 1 mod q."""

    q: int = Field(ge=2)
    a: int
    b: int
    c: int
    d: int

    @model_validator(mode="after")
    def _check(self) -> "ResidueMatrix":
        for entry in (self.a, self.b, self.c, self.d):
            if not 0 <= entry < self.q:
                raise ValueError(f"entry {entry} is not reduced mod {self.q}")
        if (self.a * self.d - self.b * self.c) % self.q != 1 % self.q:
            raise ValueError(f"determinant is not 1 mod {self.q}")
        return self


class ProjectionGroup(OrbitSieveModel):
    """The image G_q of the group in SL2(Z/qZ).

    Elements are stored as sorted int64 codes ((a*q + b)*q + c)*q + d; the
    (0, 1)-orbit as sorted codes c*q + d.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    presentation_name: str
    q: int = Field(ge=2)
    codes: np.ndarray
    row_codes: np.ndarray
    unipotent_count: PositiveInt

    @property
    def order(self) -> int:
        return int(self.codes.size)

    @property
    def row_orbit(self) -> frozenset[tuple[int, int]]:
        q = self.q
        return frozenset((int(r) // q, int(r) % q) for r in self.row_codes)

    def elements(self) -> list[ResidueMatrix]:
        q = self.q
        out = []
        for code in self.codes.tolist():
            code, d = divmod(code, q)
            code, c = divmod(code, q)
            a, b = divmod(code, q)
            out.append(ResidueMatrix(q=q, a=a, b=b, c=c, d=d))
        return out

    def __contains__(self, m: ResidueMatrix) -> bool:
        q = self.q
        code = ((m.a * q + m.b) * q + m.c) * q + m.d
        i = int(np.searchsorted(self.codes, code))
        return i < self.codes.size and int(self.codes[i]) == code


class DensityRecord(OrbitSieveModel):
    """omega(q) = |O_q| / [Gamma : Gamma_1(q)]."""

    q: PositiveInt
    omega: Rational
    o_q: int = Field(ge=0)
    index: PositiveInt
    ramified: bool = False

    @model_validator(mode="after")
    def _check_ratio(self) -> "DensityRecord":
        if self.omega != Fraction(self.o_q, self.index):
            raise ValueError(f"omega {self.omega} != {self.o_q}/{self.index}")
        if self.q == 1 and self.omega != 1:
            raise ValueError("omega(1) must be 1")
        return self


class DensityTable(OrbitSieveModel):
    """Density records for square-free q up to a bound, plus moduli that could not be computed."""

    presentation_name: str
    prime_bound: int
    ramified: tuple[int, ...]
    records: tuple[DensityRecord, ...]
    failures: dict[int, str] = Field(default_factory=dict)

    @field_validator("ramified")
    @classmethod
    def _sorted(cls, v: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(sorted(set(v)))

    def omega(self, q: int) -> Fraction | None:
        for r in self.records:
            if r.q == q:
                return r.omega
        return None


class LocalDensityProduct(OrbitSieveModel):
    """V(z) = prod over p < z, p not ramified, of (1 - omega(p))."""

    z: float
    ramified: tuple[int, ...]
    value: Rational
    approx: float
    # 1/(V(z) log z); bounded above and below for a dimension-one sieve.
    kappa_ratio: float | None = None


class AxiomReport(OrbitSieveModel):
    """Outcome of checking omega(1) = 1, omega(q) < 1 and multiplicativity."""

    q_max: int
    checked: int
    direct_checks: int
    violations: tuple[str, ...] = ()

    @property
    def holds(self) -> bool:
        return not self.violations
