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
Thin orbit sieve CLI - enumerate orbits, compute densities and run the sieve.

Usage:
    python -m app --help
    python -m app orbit --group hecke4 --height 1.5
    python -m app density --prime-bound 50
    python -m app sieve --height 10000 --z 20
    python -m app spectral
    python -m app report
"""

import functools
import json
import logging
import math
import os
import sys
import time
from typing import Optional

import click

from orbitsieve import congruence, orbit_enum, sieve, spectral
from orbitsieve.config import RunConfig, load_run_config
from orbitsieve.constants import Constants
from orbitsieve.errors import ArtifactError, DomainError, ErrorCode, OrbitSieveError
from orbitsieve.group_core import load_presets
from orbitsieve.models import (
    DensityTable,
    GrowthFit,
    OrbitSlice,
    OrbitSummary,
    ReportBundle,
    SieveReport,
    SpectralReport,
)
from orbitsieve.store import ArtifactStore

# Fix Windows console encoding
if sys.platform == 'win32':
    os.system('chcp 65001 > nul 2>&1')
    if hasattr(sys.stdout, 'reconfigure'):
        sys.stdout.reconfigure(encoding='utf-8', errors='replace')

logger = logging.getLogger(__name__)

EXIT_LEGENDRE = 1
EXIT_ERROR = 2

CRITICAL_LINE_TS = tuple(0.1 + 0.1 * k for k in range(100))


def print_header(title: str):
    """Print a header with borders."""
    border = "=" * (len(title) + 4)
    print(f"\n{border}")
    print(f"| {title} |")
    print(f"{border}\n")


def print_success(msg: str):
    print(f"[OK] {msg}")


def print_error(msg: str):
    print(f"[ERROR] {msg}")


def print_info(msg: str):
    print(f"[INFO] {msg}")


# pipeline steps


def _store(cfg: RunConfig) -> ArtifactStore:
    return ArtifactStore(cfg.out_dir, cfg.cache_dir, cfg.config_hash())


def run_orbit(cfg: RunConfig, audit: bool = False) -> tuple[OrbitSlice, bool]:
    """Load the slice from the cache or enumerate it; returns (slice, cache_hit)."""
    store = _store(cfg)
    pres = cfg.presentation()
    cached = store.load_orbit(pres, cfg.height, cfg.beta)
    if cached is not None and (cached.audited or not audit):
        logger.info("orbit cache hit for %s at T=%s", pres.name, cfg.height)
        return cached, True
    slice = orbit_enum.enumerate_orbit(
        pres, cfg.height, cfg.beta, node_cap=cfg.node_cap, workers=cfg.workers, audit=audit
    )
    store.save_orbit(slice, pres)
    return slice, False


def orbit_summary(slice: OrbitSlice) -> OrbitSummary:
    return OrbitSummary(
        presentation_name=slice.presentation_name,
        height=slice.height,
        beta=slice.beta,
        count=slice.size,
        even=slice.size % 2 == 0,
        exhausted=slice.exhausted,
        audited=slice.audited,
        contains_minus_identity=slice.contains_minus_identity,
        nodes_visited=slice.nodes_visited,
        max_word_length=slice.max_word_length,
    )


def growth_points(cfg: RunConfig, slice: OrbitSlice) -> list[tuple]:
    return orbit_enum.counts_by_height(slice, cfg.effective_growth_heights())


def estimate_delta(cfg: RunConfig, slice: OrbitSlice) -> tuple[Optional[float], Optional[GrowthFit]]:
    """The configured delta, else the slope of the growth fit, else None."""
    fit = None
    try:
        fit = spectral.fit_growth(growth_points(cfg, slice))
    except DomainError as exc:
        logger.info("no growth fit: %s", exc.message)
    if cfg.delta is not None:
        return cfg.delta, fit
    return (fit.delta_hat if fit else None), fit


def make_oracle(cfg: RunConfig) -> congruence.DensityOracle:
    return congruence.DensityOracle(cfg.presentation(), cfg.prime_bound, workers=cfg.workers)


def run_density(cfg: RunConfig):
    oracle = make_oracle(cfg)
    table = congruence.density_table(oracle, cfg.prime_bound)
    axioms = congruence.check_axiom_s2(oracle, cfg.prime_bound)
    return table, axioms


def run_sieve(cfg: RunConfig, slice: OrbitSlice) -> SieveReport:
    delta_hat, _ = estimate_delta(cfg, slice)
    return sieve.run_sieve(
        slice,
        make_oracle(cfg),
        delta_hat,
        theta=cfg.theta_value,
        r_values=cfg.r_list,
        epsilon=cfg.epsilon,
        level_q=cfg.level_q,
        sift_z=cfg.sift_z,
        workers=cfg.workers,
    )


def run_spectral(cfg: RunConfig, slice: OrbitSlice) -> SpectralReport:
    delta_hat, fit = estimate_delta(cfg, slice)
    points = growth_points(cfg, slice)
    notes = []
    params = kernel_constant = lambda0 = None
    T = float(cfg.height)
    if delta_hat is not None and T > 1:
        try:
            params = spectral.spectral_params(T, delta_hat, cfg.theta_value)
            lambda0 = float(spectral.lambda_from_s(delta_hat))
            if delta_hat > 0.5:
                kernel_constant = spectral.kernel_bound_constant(params.b, delta_hat)
        except (DomainError, ValueError) as exc:
            notes.append(f"spectral parameters unavailable: {exc}")
    else:
        notes.append("no growth exponent: spectral parameters skipped")
    line_height = max(T, math.e)
    applicable = (
        {name: spectral.gap_preset_applicable(name, delta_hat) for name in Constants.GAP_PRESETS}
        if delta_hat is not None
        else {}
    )
    return SpectralReport(
        presentation_name=slice.presentation_name,
        fit=fit,
        window_fits=tuple(spectral.fit_windows(points)),
        params=params,
        lambda0=lambda0,
        kernel_constant=kernel_constant,
        reconstruction=spectral.reconstruction_check(),
        critical_line=spectral.critical_line_check(line_height, spectral.choose_b(line_height), CRITICAL_LINE_TS),
        gap_presets=spectral.gap_presets(),
        applicable_presets=applicable,
        notes=tuple(notes),
    )


REPORT_STEPS = {
    Constants.ORBIT_ARTIFACT: "orbit",
    Constants.DENSITY_ARTIFACT: "density",
    Constants.SIEVE_ARTIFACT: "sieve",
    Constants.SPECTRAL_ARTIFACT: "spectral",
}


def run_report(cfg: RunConfig) -> ReportBundle:
    """Merge the artifacts of earlier steps; raises if none exist."""
    store = _store(cfg)
    found, missing = {}, []
    for name, step in REPORT_STEPS.items():
        try:
            found[step] = store.read_json(name)
        except ArtifactError as exc:
            if exc.code is not ErrorCode.ARTIFACT_MISSING:
                raise
            missing.append(step)
    if not found:
        raise ArtifactError(
            f"no artifacts in {cfg.out_dir}; run {', '.join(REPORT_STEPS.values())} first",
            {"required_steps": list(REPORT_STEPS.values())},
        )

    spectral_report = SpectralReport.model_validate(found["spectral"]) if "spectral" in found else None
    sieve_report = SieveReport.model_validate(found["sieve"]) if "sieve" in found else None

    growth, ratios = (), ()
    slice = store.load_orbit(cfg.presentation(), cfg.height, cfg.beta)
    if slice is not None:
        growth = tuple(growth_points(cfg, slice))
        delta_hat = sieve_report.delta_hat if sieve_report else None
        if delta_hat is None and spectral_report and spectral_report.fit:
            delta_hat = spectral_report.fit.delta_hat
        if delta_hat is not None:
            chosen = sieve_report.admissible_R if sieve_report and sieve_report.admissible_R else max(cfg.r_list)
            decades = [10**k for k in range(1, 20) if 10**k <= cfg.height]
            # R = 1 counts primes along the orbit.
            ratios = tuple(
                point
                for r in sorted({1, chosen})
                for point in sieve.ratio_profile(slice, decades, r, delta_hat, cfg.workers)
            )
    else:
        missing.append("orbit cache")

    density = found.get("density")
    return ReportBundle(
        config_hash=cfg.config_hash(),
        orbit=OrbitSummary.model_validate(found["orbit"]) if "orbit" in found else None,
        density=DensityTable.model_validate(density["table"]) if density else None,
        sieve=sieve_report,
        spectral=spectral_report,
        growth=growth,
        ratio_profile=ratios,
        corollary=sieve.corollary_table(),
        missing=tuple(missing),
    )


# click plumbing


def run_options(fn):
    """Options shared by every pipeline command; unset flags fall back to config and environment."""
    options = [
        click.option("--group", default=None, help="Preset name or path to a key=value presentation file"),
        click.option("--generators", default=None, help='Inline generators "a b c d; a b c d"'),
        click.option("--cusp-width", type=int, default=None, help="Cusp width for inline generators"),
        click.option("--height", default=None, help="Height T (integer, decimal or p/q)"),
        click.option("--epsilon", default=None, help="Smoothing width in (0, 1/2); omit for sharp weights"),
        click.option("--beta", default=None, help="Prune factor >= 1"),
        click.option("--prime-bound", type=int, default=None, help="Largest prime scanned for ramification"),
        click.option("--level-q", type=int, default=None, help="Level used for the remainder sum"),
        click.option("--z", "sift_z", type=float, default=None, help="Sifting cutoff override"),
        click.option("--r-list", default=None, help="Comma separated R values"),
        click.option("--theta", default=None, help="Gap preset name or rational"),
        click.option("--delta", type=float, default=None, help="Growth exponent override"),
        click.option("--growth-heights", default=None, help="Comma separated heights for the growth fit"),
        click.option("--node-cap", type=int, default=None, help="Abort enumeration past this many nodes"),
        click.option("--out-dir", default=None, help="Artifact directory"),
        click.option("--cache-dir", default=None, help="Orbit cache directory"),
        click.option("--workers", type=int, default=None, help="Worker processes"),
        click.option("--timings", is_flag=True, help="Print wall times of this step"),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def _config(ctx: click.Context, flags: dict) -> RunConfig:
    keys = set(RunConfig.model_fields)
    overrides = {k: v for k, v in flags.items() if k in keys and v is not None}
    return load_run_config(ctx.obj.get("config_file"), overrides)


def guarded(fn):
    """Turn library errors into an [ERROR] line, the JSON envelope on stderr and exit status 2."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except OrbitSieveError as exc:
            print_error(exc.message)
            click.echo(json.dumps(exc.to_dict(), sort_keys=True), err=True)
            sys.exit(EXIT_ERROR)

    return wrapper


def _finish(cfg: RunConfig, step: str, started: float, cache_hit, timings: bool):
    elapsed = time.perf_counter() - started
    _store(cfg).record_runtime(step, elapsed, cache_hit)
    if timings:
        print_info(f"{step} took {elapsed:.3f} s" + (" (cache hit)" if cache_hit else ""))


@click.group()
@click.option("--config", "config_file", default=None, type=click.Path(), help="key=value config file")
@click.option(
    "--log-level",
    default="WARNING",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    help="Library log level",
)
@click.pass_context
def cli(ctx: click.Context, config_file: Optional[str], log_level: str):
    """Thin orbit sieve CLI"""
    logging.basicConfig(
        level=getattr(logging, log_level.upper()),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    ctx.ensure_object(dict)
    ctx.obj["config_file"] = config_file


@cli.command()
@run_options
@click.option("--audit/--no-audit", default=False, help="Confirm the slice at twice the prune factor")
@click.pass_context
@guarded
def orbit(ctx: click.Context, audit: bool, timings: bool, **flags):
    """Enumerate the orbit points below the height."""
    cfg = _config(ctx, flags)
    started = time.perf_counter()
    print_header(f"Orbit of {cfg.group} below T={cfg.height}")
    slice, hit = run_orbit(cfg, audit)
    summary = orbit_summary(slice)
    _store(cfg).write_json(Constants.ORBIT_ARTIFACT, summary)
    if hit:
        print_info("loaded from cache")
    print(f"count: {summary.count}")
    print(f"parity: {'even' if summary.even else 'odd'}")
    print(f"exhausted: {str(summary.exhausted).lower()}")
    print(f"nodes visited: {summary.nodes_visited}, max word length: {summary.max_word_length}")
    if slice.contains_minus_identity:
        print_info("-I lies in the group; the orbit is closed under negation")
    _finish(cfg, "orbit", started, hit, timings)


@cli.command()
@run_options
@click.pass_context
@guarded
def density(ctx: click.Context, timings: bool, **flags):
    """Ramified primes and local densities omega(q)."""
    cfg = _config(ctx, flags)
    started = time.perf_counter()
    print_header(f"Local densities of {cfg.group}")
    table, axioms = run_density(cfg)
    store = _store(cfg)
    store.write_density_csv(table)
    store.write_json(Constants.DENSITY_ARTIFACT, {
        "table": table.model_dump(mode="json"),
        "axioms": axioms.model_dump(mode="json"),
    })
    print(f"ramified: {', '.join(map(str, table.ramified)) or 'none'} (primes <= {cfg.prime_bound})")
    for record in table.records:
        flag = " ramified" if record.ramified else ""
        print(f"q={record.q}: omega={record.omega} (o_q={record.o_q}, index={record.index}){flag}")
    for q, message in sorted(table.failures.items()):
        print_error(f"q={q}: {message}")
    if axioms.holds:
        print_success(f"multiplicativity holds ({axioms.checked} moduli, {axioms.direct_checks} projected)")
    else:
        for violation in axioms.violations:
            print_error(violation)
    _finish(cfg, "density", started, None, timings)


@cli.command(name="sieve")
@run_options
@click.pass_context
@guarded
def sieve_cmd(ctx: click.Context, timings: bool, **flags):
    """Run the sieve on the orbit values."""
    cfg = _config(ctx, flags)
    started = time.perf_counter()
    print_header(f"Sieve on {cfg.group} at T={cfg.height}")
    slice, hit = run_orbit(cfg)
    report = run_sieve(cfg, slice)
    store = _store(cfg)
    store.write_json(Constants.SIEVE_ARTIFACT, report)
    store.write_sieve_csv(report)
    print(f"X = {report.X}")
    if report.Q_theory is not None:
        print(f"Q (theory) = {report.Q_theory:.6g}")
    print(f"Q used = {report.Q_used}, z = {report.z:.6g}")
    print(f"V(z) = {report.V_z} ~ {float(report.V_z):.6g}")
    print(f"sum |r(q)| = {report.remainder_sum} over {report.moduli_used} moduli")
    for r, n in sorted(report.almost_prime_counts.items()):
        ratio = report.ratios.get(r)
        print(f"R={r}: {n} points" + (f", ratio {ratio:.6g}" if ratio is not None else ""))
    if report.admissible_R is not None:
        print(f"admissible R = {report.admissible_R}")
    for note in report.notes:
        if note.startswith("level collapsed"):
            note = "level collapsed to 1: the sieve is trivial; pass --level-q and --z, or a --theta below delta_hat"
        print_info(note)
    _finish(cfg, "sieve", started, hit, timings)
    if report.legendre_holds:
        print_success(f"S_direct == S_mobius: exact ({report.S_direct})")
    else:
        print_error(f"Legendre identity fails: {report.S_direct} != {report.S_mobius}")
        sys.exit(EXIT_LEGENDRE)


@cli.command(name="spectral")
@run_options
@click.pass_context
@guarded
def spectral_cmd(ctx: click.Context, timings: bool, **flags):
    """Growth fit and kernel identity checks."""
    cfg = _config(ctx, flags)
    started = time.perf_counter()
    print_header(f"Spectral diagnostics for {cfg.group}")
    slice, hit = run_orbit(cfg)
    report = run_spectral(cfg, slice)
    store = _store(cfg)
    store.write_json(Constants.SPECTRAL_ARTIFACT, report)
    store.write_growth_csv(growth_points(cfg, slice))
    if report.fit:
        print(f"delta_hat = {report.fit.delta_hat:.6f}, c0_hat = {report.fit.c0_hat:.6g}")
    for fit in report.window_fits:
        print(f"window [{fit.heights[0]}, {fit.heights[-1]}]: delta_hat = {fit.delta_hat:.6f}")
    if report.params:
        print(f"b = {report.params.b:.12g}, lambda = {report.params.lam:.6g}")
    print(f"reconstruction max relative error: {report.reconstruction.max_relative_error:.3e}")
    print(f"critical line max relative error: {report.critical_line.max_relative_error:.3e}")
    for name, ok in report.applicable_presets.items():
        print(f"{name} ({report.gap_presets[name]}): {'applicable' if ok else 'not applicable'}")
    for note in report.notes:
        print_info(note)
    _finish(cfg, "spectral", started, hit, timings)


@cli.command()
@run_options
@click.pass_context
@guarded
def report(ctx: click.Context, timings: bool, **flags):
    """Merge all artifacts into report.json and plot-ready CSVs."""
    cfg = _config(ctx, flags)
    started = time.perf_counter()
    print_header("Report")
    bundle = run_report(cfg)
    store = _store(cfg)
    store.write_json(Constants.REPORT_ARTIFACT, bundle)
    store.write_admissible_csv(bundle.corollary)
    if bundle.growth:
        store.write_growth_csv(bundle.growth)
    if bundle.ratio_profile:
        store.write_ratio_csv(bundle.ratio_profile)
    if bundle.spectral and bundle.spectral.fit:
        print(f"delta_hat = {bundle.spectral.fit.delta_hat:.6f}")
    for row in bundle.corollary:
        print(f"{row.label}: R = {row.R}")
    for step in bundle.missing:
        print_error(f"missing: {step}")
    if bundle.complete:
        print_success("report complete")
    _finish(cfg, "report", started, None, timings)


@cli.command()
def presets():
    """List the shipped presentations."""
    print_header("Presentations")
    for name, entry in load_presets().items():
        gens = "; ".join(" ".join(map(str, g)) for g in entry["generators"])
        print(f"{name}: width {entry['cusp_width']}, generators [{gens}]")
        if entry.get("description"):
            print(f"    {entry['description']}")


if __name__ == "__main__":
    cli()
