"""The merged report of one pipeline run."""

from pydantic import Field

from .congruence_base import DensityTable
from .orbit_base import OrbitSieveModel, Rational
from .sieve_base import CorollaryRow, RatioPoint, SieveReport
from .spectral_base import SpectralReport


class OrbitSummary(OrbitSieveModel):
    presentation_name: str
    height: Rational
    beta: Rational
    count: int
    even: bool
    exhausted: bool
    audited: bool
    contains_minus_identity: bool
    nodes_visited: int
    max_word_length: int


class ReportBundle(OrbitSieveModel):
    """Everything the pipeline produced for one config hash; missing steps are listed, not invented."""

    config_hash: str
    orbit: OrbitSummary | None = None
    density: DensityTable | None = None
    sieve: SieveReport | None = None
    spectral: SpectralReport | None = None
    growth: tuple[tuple[Rational, int], ...] = ()
    ratio_profile: tuple[RatioPoint, ...] = ()
    corollary: tuple[CorollaryRow, ...] = ()
    missing: tuple[str, ...] = Field(default_factory=tuple)

    @property
    def complete(self) -> bool:
        return not self.missing
