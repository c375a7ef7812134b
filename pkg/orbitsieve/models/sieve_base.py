"""Value types produced by the combinatorial sieve."""

from fractions import Fraction

from pydantic import Field, model_validator

from ..constants import Constants
from .orbit_base import OrbitSieveModel, Rational, WeightTable


class SieveSequence(OrbitSieveModel):
    """The weighted sequence a_n(T) together with its exact total mass X."""

    weights: WeightTable
    X: Rational
    height: Rational

    @model_validator(mode="after")
    def _check_mass(self) -> "SieveSequence":
        if self.X != self.weights.total():
            raise ValueError(f"X = {self.X} differs from the table total {self.weights.total()}")
        if self.height > 1 and self.X <= 0:
            raise ValueError("a sequence above height 1 must carry positive mass")
        return self

    @classmethod
    def from_table(cls, weights: WeightTable) -> "SieveSequence":
        return cls(weights=weights, X=weights.total(), height=weights.height)

    @property
    def max_n(self) -> int:
        return max(self.weights.entries, default=0)


class SieveBounds(OrbitSieveModel):
    """The beta-sieve functions at s and the error term D at level Q."""

    s: float
    Q: float
    K: float
    f_lower: float | None = None
    F_upper: float | None = None
    D: float
    gamma_euler: float = Constants.EULER_GAMMA
    c_const: float = Constants.SIEVE_C_CONST


class SieveEnvelope(OrbitSieveModel):
    """(f - D) X V - R(Q) <= S* <= (F + D) X V + R(Q), where each side is defined."""

    lower: float | None = None
    upper: float | None = None
    S_star: Rational

    @property
    def within(self) -> bool:
        value = float(self.S_star)
        return (self.lower is None or self.lower <= value) and (self.upper is None or value <= self.upper)


class MobiusDensitySum(OrbitSieveModel):
    """Sum of mu(q) omega(q) over q | P(z), summed directly and in factorized form."""

    z: float
    direct: Rational
    factorized: Rational

    @property
    def agrees(self) -> bool:
        return self.direct == self.factorized


class SieveDecomposition(OrbitSieveModel):
    """S*(z) = Sigma1 + Sigma2 + Sigma3 with Sigma2 = 0 since the ramified correction vanishes."""

    z: float
    sigma1: Rational
    sigma2: Rational = Fraction(0)
    sigma3: Rational
    S_star: Rational
    S_direct: Rational


class CorollaryRow(OrbitSieveModel):
    label: str
    delta: Rational
    theta: Rational
    R: int


class RatioPoint(OrbitSieveModel):
    """|O(T, R)| log T / T^delta at one height."""

    height: Rational
    R: int
    count: int
    ratio: float


class SieveReport(OrbitSieveModel):
    presentation_name: str
    height: Rational
    epsilon: Rational | None = None
    delta_hat: float | None = None
    theta: Rational
    Q_theory: float | None = None
    Q_used: int
    z: float
    X: Rational
    S_direct: Rational
    S_mobius: Rational
    V_z: Rational
    remainder_sum: Rational
    remainder_ratio: float
    moduli_used: int = 0
    ramified: tuple[int, ...] = ()
    K_estimate: float | None = None
    decomposition: SieveDecomposition | None = None
    mobius_density: MobiusDensitySum | None = None
    bounds: SieveBounds | None = None
    envelope: SieveEnvelope | None = None
    almost_prime_counts: dict[int, int] = Field(default_factory=dict)
    ratios: dict[int, float] = Field(default_factory=dict)
    admissible_R: int | None = None
    r_threshold: float | None = None
    # Q = 1 and z = 2 with no override: nothing is sifted.
    level_collapsed: bool = False
    notes: tuple[str, ...] = ()

    @property
    def legendre_holds(self) -> bool:
        return self.S_direct == self.S_mobius
