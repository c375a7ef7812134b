"""Value types for the kernel identities and growth fits."""

import math

from pydantic import Field, model_validator

from .orbit_base import OrbitSieveModel, Rational

_B_TOLERANCE = 1e-12
_LOG_RATIO_TOLERANCE = 1e-9
_LAMBDA_TOLERANCE = 1e-12


class SpectralParams(OrbitSieveModel):
    """Spectral parameter s = s_real + i s_imag with lambda = s(1 - s), and the base point b for height T."""

    s_real: float
    s_imag: float = 0.0
    lam: float
    delta: float
    theta: Rational
    b: float
    height: float

    @model_validator(mode="after")
    def _check(self) -> "SpectralParams":
        s = self.s
        if abs((s * (1 - s)).real - self.lam) > _LAMBDA_TOLERANCE * max(1.0, abs(self.lam)):
            raise ValueError(f"lambda {self.lam} != s(1 - s) for s = {s}")
        if not 1 < self.b <= math.e * (1 + _B_TOLERANCE):
            raise ValueError(f"b = {self.b} lies outside (1, e]")
        ratio = math.log(self.height) / math.log(self.b)
        if abs(ratio - round(ratio)) > _LOG_RATIO_TOLERANCE:
            raise ValueError(f"log T / log b = {ratio} is not an integer")
        return self

    @property
    def s(self) -> complex | float:
        return complex(self.s_real, self.s_imag) if self.s_imag else self.s_real


class GrowthFit(OrbitSieveModel):
    """Least-squares line log |O(T)| = log c0 + delta log T."""

    heights: tuple[Rational, ...] = Field(min_length=4)
    counts: tuple[int, ...] = Field(min_length=4)
    delta_hat: float
    c0_hat: float
    residual: float
    trimmed: bool = False

    @model_validator(mode="after")
    def _check(self) -> "GrowthFit":
        if len(self.heights) != len(self.counts):
            raise ValueError("heights and counts differ in length")
        if any(b <= a for a, b in zip(self.heights, self.heights[1:])):
            raise ValueError("heights must be strictly increasing")
        if self.delta_hat <= 0:
            raise ValueError(f"growth exponent {self.delta_hat} is not positive")
        return self

    @property
    def in_thin_range(self) -> bool:
        """1/2 < delta_hat < 1, the range of a thin group with a cusp."""
        return 0.5 < self.delta_hat < 1.0


class ReconstructionCheck(OrbitSieveModel):
    samples: int
    seed: int
    max_relative_error: float
    boundary_error: float


class CriticalLineCheck(OrbitSieveModel):
    height: float
    b: float
    ts: tuple[float, ...]
    max_relative_error: float


class SpectralReport(OrbitSieveModel):
    presentation_name: str
    fit: GrowthFit | None = None
    window_fits: tuple[GrowthFit, ...] = ()
    params: SpectralParams | None = None
    lambda0: float | None = None
    kernel_constant: float | None = None
    reconstruction: ReconstructionCheck
    critical_line: CriticalLineCheck
    gap_presets: dict[str, Rational]
    applicable_presets: dict[str, bool] = Field(default_factory=dict)
    notes: tuple[str, ...] = ()
