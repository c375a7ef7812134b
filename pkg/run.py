# Copyright 2026 Thin Orbit Sieve Authors
# Single command launcher for the full pipeline

"""
Thin orbit sieve pipeline launcher

Usage:
    python run.py [--config run.env] [extra flags passed to every step]

Runs orbit, density, sieve, spectral and report in order, each as its own
process, and stops at the first step that fails.
"""

import subprocess
import sys
import time

STEPS = ["orbit", "density", "sieve", "spectral", "report"]


def run_step(step: str, config_args: list[str], extra: list[str]) -> int:
    """Run one CLI step; returns its exit status."""
    print(f"[*] Running {step}...")
    started = time.perf_counter()
    result = subprocess.run(
        [sys.executable, "-m", "app", *config_args, step, *extra],
        creationflags=subprocess.CREATE_NO_WINDOW if sys.platform == 'win32' else 0
    )
    elapsed = time.perf_counter() - started
    if result.returncode == 0:
        print(f"[OK] {step} finished in {elapsed:.1f} s")
    else:
        print(f"[ERROR] {step} exited with status {result.returncode}")
    return result.returncode


def main():
    args = sys.argv[1:]
    config_args = []
    if len(args) >= 2 and args[0] == "--config":
        config_args, args = args[:2], args[2:]

    print("=" * 50)
    print("  Thin Orbit Sieve")
    print(f"  Steps: {' -> '.join(STEPS)}")
    print("=" * 50 + "\n")

    for step in STEPS:
        status = run_step(step, config_args, args)
        if status != 0:
            sys.exit(status)
    print("\n[OK] Pipeline complete")


if __name__ == "__main__":
    try:
        main()
    except KeyboardInterrupt:
        print("\n[*] Interrupted")
        sys.exit(130)
