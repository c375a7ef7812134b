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
Scalar kernels of the counting identity, parameter conversions and growth fits.

For an eigenvalue lambda = s(1 - s) the count at height T is rebuilt from the
counts at heights 1 and b as K_T(s) F(1) + L_T(s) F(b), where

    K_T(s) = (T^s b^(1-s) - T^(1-s) b^s) / (b^(1-s) - b^s)
    L_T(s) = (T^(1-s) - T^s) / (b^(1-s) - b^s)

and b = exp(log T / ceil(log T)) makes log T / log b an integer.
"""

import logging
import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .constants import Constants
from .errors import DomainError
from .models.orbit_base import to_fraction
from .models.spectral_base import CriticalLineCheck, GrowthFit, ReconstructionCheck, SpectralParams

logger = logging.getLogger(__name__)

Scalar = float | complex


def choose_b(height: float) -> float:
    """exp(log T / ceil(log T)), which lies in (1, e]."""
    height = float(height)
    if height <= 1:
        raise DomainError(f"height must exceed 1, got {height}")
    log_t = math.log(height)
    # Absorb rounding so that T = e^k gives exactly k steps.
    steps = max(1, math.ceil(log_t - 1e-12))
    return min(math.exp(log_t / steps), math.e)


def _validate(b: float, s: Scalar) -> None:
    if b <= 0 or b == 1:
        raise DomainError(f"base point must be positive and different from 1, got {b}")
    if s == 0.5:
        raise DomainError("s = 1/2 is a removable singularity of the kernels")


def _denominator(b: float, s: Scalar) -> Scalar:
    den = b ** (1 - s) - b**s
    if abs(den) < 1e-300:
        raise DomainError(f"b^(1-s) - b^s vanishes at b={b}, s={s}")
    return den


def _real_if_real(value: Scalar, s: Scalar) -> Scalar:
    if isinstance(value, complex) and not isinstance(s, complex):
        return value.real
    return value


def kernel_K(height: float, b: float, s: Scalar) -> Scalar:
    """K_T(s); complex for s off the real axis."""
    _validate(b, s)
    T = float(height)
    value = (T**s * b ** (1 - s) - T ** (1 - s) * b**s) / _denominator(b, s)
    return _real_if_real(value, s)


def kernel_L(height: float, b: float, s: Scalar) -> Scalar:
    """L_T(s); complex for s off the real axis."""
    _validate(b, s)
    T = float(height)
    value = (T ** (1 - s) - T**s) / _denominator(b, s)
    return _real_if_real(value, s)


def kernel_K_trig(height: float, b: float, t: float) -> float:
    """K_T(1/2 + it) = T^(1/2) sin(t log(b/T)) / sin(t log b)."""
    T = float(height)
    den = math.sin(t * math.log(b))
    if den == 0:
        raise DomainError(f"sin(t log b) vanishes at t={t}, b={b}")
    return math.sqrt(T) * math.sin(t * math.log(b / T)) / den


def kernel_L_trig(height: float, b: float, t: float) -> float:
    """L_T(1/2 + it) = (T/b)^(1/2) sin(t log T) / sin(t log b)."""
    T = float(height)
    den = math.sin(t * math.log(b))
    if den == 0:
        raise DomainError(f"sin(t log b) vanishes at t={t}, b={b}")
    return math.sqrt(T / b) * math.sin(t * math.log(T)) / den


def kernel_bound_constant(b: float, s: float) -> float:
    """C with |K_T(s)| <= C T^s for T > 1 and s in (1/2, 1]."""
    return 2 / abs(_denominator(b, s))


def reconstruct(height: float, b: float, s: Scalar, F1: Scalar, Fb: Scalar) -> Scalar:
    """K_T(s) F1 + L_T(s) Fb."""
    return kernel_K(height, b, s) * F1 + kernel_L(height, b, s) * Fb


def lambda_from_s(s):
    """lambda = s(1 - s); Fractions stay exact, critical-line values come back real."""
    if isinstance(s, Fraction):
        return s * (1 - s)
    value = s * (1 - s)
    if isinstance(value, complex) and abs(value.imag) < 1e-12 * max(1.0, abs(value)):
        return value.real
    return value


def s_from_lambda(lam) -> Scalar:
    """The root s with Re s >= 1/2: real in [1/2, 1] for lambda <= 1/4, else 1/2 + it."""
    lam = float(lam)
    if lam <= 0.25:
        return 0.5 + math.sqrt(0.25 - lam)
    return complex(0.5, math.sqrt(lam - 0.25))


def lambda_s_roundtrip(value, from_lambda: bool = False):
    """Convert s to lambda, or lambda to s when ``from_lambda`` is set."""
    return s_from_lambda(value) if from_lambda else lambda_from_s(value)


def gap_presets() -> dict[str, Fraction]:
    return dict(Constants.GAP_PRESETS)


def resolve_theta(value) -> Fraction:
    """A preset name or a rational in [1/2, 1)."""
    if isinstance(value, str) and value in Constants.GAP_PRESETS:
        return Constants.GAP_PRESETS[value]
    try:
        theta = to_fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(
            f"theta {value!r} is neither a preset ({', '.join(Constants.GAP_PRESETS)}) nor a rational"
        ) from exc
    if not Fraction(1, 2) <= theta < 1:
        raise DomainError(f"theta must lie in [1/2, 1), got {theta}")
    return theta


def gap_preset_applicable(name: str, delta: float) -> bool:
    """A gap exponent is usable only below the growth exponent, e.g. 5/6 needs delta > 5/6."""
    if name not in Constants.GAP_PRESETS:
        raise DomainError(f"unknown gap preset {name!r}")
    return Constants.GAP_PRESETS[name] < to_fraction(delta)


def spectral_params(height, delta: float, theta, s: Scalar | None = None) -> SpectralParams:
    """Parameters at height T; s defaults to delta, the base eigenvalue delta(1 - delta)."""
    s = delta if s is None else s
    T = float(height)
    s_c = complex(s)
    lam = lambda_from_s(s)
    return SpectralParams(
        s_real=s_c.real,
        s_imag=s_c.imag,
        lam=float(lam.real if isinstance(lam, complex) else lam),
        delta=float(delta),
        theta=resolve_theta(theta),
        b=choose_b(T),
        height=T,
    )


def fit_growth(points: Iterable[tuple], trim: bool = False) -> GrowthFit:
    """Ordinary least squares of log count on log T.

    Args:
        points: (T, |O(T)|) pairs, heights distinct, counts positive
        trim: drop heights within the smallest decade before fitting

    Raises:
        DomainError: fewer than 4 usable points or a span under two decades
    """
    rows = sorted((to_fraction(t), int(n)) for t, n in points)
    if any(b[0] == a[0] for a, b in zip(rows, rows[1:])):
        raise DomainError("heights must be distinct")
    if any(n <= 0 or t <= 1 for t, n in rows):
        raise DomainError("growth fits need heights above 1 and positive counts")
    if trim and rows:
        floor = rows[0][0] * 10
        rows = [r for r in rows if r[0] >= floor]
    if len(rows) < 4:
        raise DomainError(f"growth fit needs at least 4 points, got {len(rows)}")
    log_t = np.log(np.array([float(t) for t, _ in rows]))
    log_n = np.log(np.array([float(n) for _, n in rows]))
    if (log_t[-1] - log_t[0]) / math.log(10) < 2 - 1e-9:
        raise DomainError("heights must span at least two decades")
    slope, intercept = np.polyfit(log_t, log_n, 1)
    residual = float(np.max(np.abs(log_n - (slope * log_t + intercept))))
    logger.debug("growth fit over %d points: delta=%.6f c0=%.6f", len(rows), slope, math.exp(intercept))
    if slope <= 0:
        raise DomainError(f"counts do not grow (slope {slope:.4f})")
    return GrowthFit(
        heights=tuple(t for t, _ in rows),
        counts=tuple(n for _, n in rows),
        delta_hat=float(slope),
        c0_hat=float(math.exp(intercept)),
        residual=residual,
        trimmed=trim,
    )


def fit_windows(points: Sequence[tuple], decades: int = 2) -> list[GrowthFit]:
    """Fits over every window [10^k, 10^(k + decades)] holding at least 4 points."""
    rows = sorted((to_fraction(t), int(n)) for t, n in points)
    if not rows:
        return []
    fits = []
    k = math.floor(math.log10(rows[0][0]))
    top = math.log10(rows[-1][0])
    while k + decades <= top + 1e-9:
        lo, hi = Fraction(10) ** k, Fraction(10) ** (k + decades)
        window = [r for r in rows if lo <= r[0] <= hi]
        if len(window) >= 4:
            try:
                fits.append(fit_growth(window))
            except DomainError as exc:
                logger.debug("window [%s, %s] skipped: %s", lo, hi, exc.message)
        k += 1
    return fits


def critical_line_check(height: float, b: float, ts: Iterable[float]) -> CriticalLineCheck:
    """Largest relative gap between the closed and sine forms of K and L at s = 1/2 + it."""
    ts = tuple(float(t) for t in ts)
    worst = 0.0
    for t in ts:
        s = complex(0.5, t)
        pairs = (
            (kernel_K(height, b, s), kernel_K_trig(height, b, t)),
            (kernel_L(height, b, s), kernel_L_trig(height, b, t)),
        )
        for closed, trig in pairs:
            worst = max(worst, abs(closed - trig) / (1 + abs(trig)))
    return CriticalLineCheck(height=float(height), b=float(b), ts=ts, max_relative_error=worst)


def reconstruction_check(
    samples: int = 10_000,
    seed: int = 0,
    heights: Sequence[float] = (10.0, 1e2, 1e3, 1e4, 1e5, 1e6),
) -> ReconstructionCheck:
    """Rebuild A T^s + B T^(1-s) from F(1) = A + B and F(b) = A b^s + B b^(1-s) on random inputs."""
    rng = np.random.default_rng(seed)
    A = rng.uniform(-10, 10, samples)
    B = rng.uniform(-10, 10, samples)
    S = rng.uniform(0.51, 1.0, samples)
    T = rng.choice(np.asarray(heights, dtype=float), samples)
    worst = boundary = 0.0
    for a, bb, s, t in zip(A.tolist(), B.tolist(), S.tolist(), T.tolist()):
        b = choose_b(t)
        F1 = a + bb
        Fb = a * b**s + bb * b ** (1 - s)
        target = a * t**s + bb * t ** (1 - s)
        worst = max(worst, abs(reconstruct(t, b, s, F1, Fb) - target) / (1 + abs(target)))
        boundary = max(
            boundary,
            abs(kernel_K(1.0, b, s) - 1),
            abs(kernel_L(1.0, b, s)),
            abs(kernel_K(b, b, s)),
            abs(kernel_L(b, b, s) - 1),
        )
    return ReconstructionCheck(
        samples=samples, seed=seed, max_relative_error=worst, boundary_error=boundary
    )


def critical_line_magnitude_ok(height: float, b: float, t: float) -> bool:
    """|K|, |L| <= T^(1/2) log T / log b when log T / log b is an integer."""
    bound = math.sqrt(height) * math.log(height) / math.log(b)
    s = complex(0.5, t)
    return abs(kernel_K(height, b, s)) <= bound + 1e-9 and abs(kernel_L(height, b, s)) <= bound + 1e-9


__all__ = [
    "choose_b",
    "critical_line_check",
    "critical_line_magnitude_ok",
    "fit_growth",
    "fit_windows",
    "gap_preset_applicable",
    "gap_presets",
    "kernel_K",
    "kernel_K_trig",
    "kernel_L",
    "kernel_L_trig",
    "kernel_bound_constant",
    "lambda_from_s",
    "lambda_s_roundtrip",
    "reconstruct",
    "reconstruction_check",
    "resolve_theta",
    "s_from_lambda",
    "spectral_params",
]
