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
Error types shared by every orbitsieve module.

Each error carries a machine-readable code, a severity and a free-form
details dict, so the CLI can render the same envelope for any failure:

    {"status": "error", "errors": [{"code": ..., "message": ..., ...}]}
"""

from enum import Enum
from typing import Any, Dict, Optional


class ErrorCode(str, Enum):
    """Error codes surfaced by the library."""
    ENVELOPE_OVERFLOW = "envelope_overflow"
    PRESENTATION_INVALID = "presentation_invalid"
    CUSP_WORD_NOT_FOUND = "cusp_word_not_found"
    FRONTIER_OVERFLOW = "frontier_overflow"
    SLICE_NOT_EXHAUSTED = "slice_not_exhausted"
    HEIGHT_SHORTFALL = "height_shortfall"
    MODULUS_BUDGET = "modulus_budget"
    DOMAIN = "domain"
    ARTIFACT_MISSING = "artifact_missing"
    ARTIFACT_MIXED = "artifact_mixed"
    ARTIFACT_VERSION = "artifact_version"


class Severity(str, Enum):
    RECOVERABLE = "recoverable"
    CRITICAL = "critical"


class OrbitSieveError(Exception):
    """Base class for all library errors."""

    code: ErrorCode = ErrorCode.DOMAIN
    severity: Severity = Severity.CRITICAL

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Render the error in the status/errors envelope."""
        return {
            "status": "error",
            "errors": [
                {
                    "code": self.code.value,
                    "message": self.message,
                    "severity": self.severity.value,
                    "details": self.details,
                }
            ],
        }


class EnvelopeOverflowError(OrbitSieveError, OverflowError):
    """A matrix entry left the signed 128-bit envelope."""
    code = ErrorCode.ENVELOPE_OVERFLOW

    def __init__(self, word_length: Optional[int], entry: int):
        where = f"at word length {word_length}" if word_length is not None else "outside a word search"
        super().__init__(
            f"Matrix entry of {entry.bit_length()} bits exceeds the 128-bit envelope {where}",
            {"word_length": word_length, "bits": entry.bit_length()},
        )


class PresentationError(OrbitSieveError, ValueError):
    code = ErrorCode.PRESENTATION_INVALID


class CuspWordNotFoundError(PresentationError):
    code = ErrorCode.CUSP_WORD_NOT_FOUND


class FrontierOverflowError(OrbitSieveError):
    """The BFS visited more nodes than the configured cap.

    ``details`` carries the partial statistics of the aborted run.
    """
    code = ErrorCode.FRONTIER_OVERFLOW
    severity = Severity.RECOVERABLE


class UnexhaustedSliceError(OrbitSieveError):
    code = ErrorCode.SLICE_NOT_EXHAUSTED
    severity = Severity.RECOVERABLE


class HeightShortfallError(OrbitSieveError, ValueError):
    code = ErrorCode.HEIGHT_SHORTFALL
    severity = Severity.RECOVERABLE


class ModulusBudgetError(OrbitSieveError):
    code = ErrorCode.MODULUS_BUDGET
    severity = Severity.RECOVERABLE


class DomainError(OrbitSieveError, ValueError):
    """A parameter lies outside the domain an operation is defined on."""
    code = ErrorCode.DOMAIN


class ArtifactError(OrbitSieveError):
    code = ErrorCode.ARTIFACT_MISSING
    severity = Severity.RECOVERABLE

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None,
                 code: ErrorCode = ErrorCode.ARTIFACT_MISSING):
        super().__init__(message, details)
        self.code = code
