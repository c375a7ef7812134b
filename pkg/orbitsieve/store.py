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

"""Orbit cache and run artifacts on disk."""

import csv
import io
import json
import logging
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

from pydantic import BaseModel

from .constants import Constants
from .errors import ArtifactError, ErrorCode
from .models.congruence_base import DensityTable
from .models.orbit_base import GroupPresentation, OrbitPoint, OrbitSlice
from .models.sieve_base import CorollaryRow, RatioPoint, SieveReport

logger = logging.getLogger(__name__)


def _dumps(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _slug(value: Fraction) -> str:
    return str(value).replace("/", "_")


class ArtifactStore:
    """Reads and writes the files of one run.

    Every JSON artifact carries the config hash of the run that produced it;
    reading an artifact written under a different hash is refused. Wall
    times and cache hits go to runtime.json only, so every other file is a
    pure function of the config.
    """

    def __init__(self, out_dir: str | Path, cache_dir: str | Path, config_hash: str):
        self.out_dir = Path(out_dir)
        self.cache_dir = Path(cache_dir)
        self.config_hash = config_hash

    # orbit cache

    def cache_path(self, pres: GroupPresentation, height: Fraction, beta: Fraction) -> Path:
        return self.cache_dir / (
            f"orbit-{pres.name}-{pres.digest()}-T{_slug(height)}-b{_slug(beta)}.json"
        )

    def load_orbit(self, pres: GroupPresentation, height: Fraction, beta: Fraction) -> OrbitSlice | None:
        """The cached slice of ``pres``, or None on a miss.

        Unreadable files, another schema version and another group's
        generators all count as a miss.
        """
        path = self.cache_path(pres, height, beta)
        if not path.is_file():
            return None
        try:
            with open(path, "r") as f:
                data = json.load(f)
        except (OSError, ValueError) as exc:
            logger.warning("orbit cache %s is unreadable (%s); re-enumerating", path, exc)
            return None
        if not isinstance(data, dict) or data.get("version") != Constants.CACHE_SCHEMA_VERSION:
            logger.warning(
                "orbit cache %s has version %s, expected %s; re-enumerating",
                path, data.get("version") if isinstance(data, dict) else None, Constants.CACHE_SCHEMA_VERSION,
            )
            return None
        if data.get("generators") != pres.generator_rows() or data.get("cusp_width") != pres.cusp_width:
            logger.warning("orbit cache %s belongs to another group; re-enumerating", path)
            return None
        try:
            return OrbitSlice(
                presentation_name=data["presentation_name"],
                height=data["T"],
                beta=data["beta"],
                exhausted=data["exhausted"],
                audited=data.get("audited", False),
                contains_minus_identity=data.get("contains_minus_identity", False),
                nodes_visited=data.get("nodes_visited", 0),
                max_word_length=data.get("max_word_length", 0),
                points=tuple(OrbitPoint.of(c, d) for c, d in data["points"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            logger.warning("orbit cache %s is incomplete (%r); re-enumerating", path, exc)
            return None

    def save_orbit(self, slice: OrbitSlice, pres: GroupPresentation) -> Path:
        path = self.cache_path(pres, slice.height, slice.beta)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = {
            "version": Constants.CACHE_SCHEMA_VERSION,
            "presentation_name": slice.presentation_name,
            "generators": pres.generator_rows(),
            "cusp_width": pres.cusp_width,
            "T": str(slice.height),
            "beta": str(slice.beta),
            "exhausted": slice.exhausted,
            "audited": slice.audited,
            "contains_minus_identity": slice.contains_minus_identity,
            "nodes_visited": slice.nodes_visited,
            "max_word_length": slice.max_word_length,
            "points": [[p.c, p.d] for p in slice.points],
        }
        path.write_text(_dumps(payload))
        return path

    # artifacts

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def exists(self, name: str) -> bool:
        return self.path(name).is_file()

    def write_json(self, name: str, payload: BaseModel | dict) -> Path:
        if isinstance(payload, BaseModel):
            payload = payload.model_dump(mode="json")
        document = {
            "schema_version": Constants.ARTIFACT_SCHEMA_VERSION,
            "config_hash": self.config_hash,
            "data": payload,
        }
        target = self.path(name)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(_dumps(document))
        return target

    def read_json(self, name: str) -> dict:
        """The ``data`` section of an artifact written under this config hash."""
        target = self.path(name)
        if not target.is_file():
            raise ArtifactError(f"{name} is missing from {self.out_dir}", {"artifact": name})
        with open(target, "r") as f:
            document = json.load(f)
        if document.get("schema_version") != Constants.ARTIFACT_SCHEMA_VERSION:
            raise ArtifactError(
                f"{name} has schema version {document.get('schema_version')}",
                {"artifact": name},
                code=ErrorCode.ARTIFACT_VERSION,
            )
        if document.get("config_hash") != self.config_hash:
            raise ArtifactError(
                f"{name} was produced by a different configuration",
                {"artifact": name, "expected": self.config_hash, "found": document.get("config_hash")},
                code=ErrorCode.ARTIFACT_MIXED,
            )
        return document["data"]

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
        target = self.path(name)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(buffer.getvalue())
        return target

    def record_runtime(self, step: str, wall_time: float, cache_hit: bool | None = None) -> None:
        """Merge the timing of one step into runtime.json."""
        target = self.path(Constants.RUNTIME_ARTIFACT)
        data = json.loads(target.read_text()) if target.is_file() else {}
        data[step] = {"wall_time_s": round(wall_time, 6), "cache_hit": cache_hit}
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(_dumps(data))

    # tables

    def write_density_csv(self, table: DensityTable) -> Path:
        return self.write_csv(
            Constants.DENSITY_CSV,
            ["q", "o_q", "index", "omega_num", "omega_den", "ramified_flag"],
            (
                [r.q, r.o_q, r.index, r.omega.numerator, r.omega.denominator, int(r.ramified)]
                for r in table.records
            ),
        )

    def write_sieve_csv(self, report: SieveReport) -> Path:
        rows = []
        for r, n in sorted(report.almost_prime_counts.items()):
            rows.append([
                str(report.height),
                "" if report.Q_theory is None else f"{report.Q_theory:.6g}",
                report.Q_used,
                f"{report.z:.6g}",
                str(report.S_mobius),
                str(report.V_z),
                str(report.remainder_sum),
                r,
                n,
                "" if r not in report.ratios else f"{report.ratios[r]:.6g}",
            ])
        return self.write_csv(
            Constants.SIEVE_CSV,
            ["T", "Q_theory", "Q_used", "z", "S_value", "V_z", "remainder_sum", "R", "count_R", "ratio"],
            rows,
        )

    def write_growth_csv(self, points: Iterable[tuple[Fraction, int]]) -> Path:
        return self.write_csv(
            Constants.GROWTH_CSV,
            ["T", "count", "log_T", "log_count"],
            (
                [str(t), n, f"{math.log(t):.12g}", "" if n <= 0 else f"{math.log(n):.12g}"]
                for t, n in points
            ),
        )

    def write_ratio_csv(self, points: Iterable[RatioPoint]) -> Path:
        return self.write_csv(
            Constants.RATIO_CSV,
            ["T", "R", "count", "ratio"],
            ([str(p.height), p.R, p.count, f"{p.ratio:.12g}"] for p in points),
        )

    def write_admissible_csv(self, rows: Iterable[CorollaryRow]) -> Path:
        return self.write_csv(
            Constants.ADMISSIBLE_R_CSV,
            ["label", "delta", "theta", "R"],
            ([r.label, str(r.delta), str(r.theta), r.R] for r in rows),
        )
