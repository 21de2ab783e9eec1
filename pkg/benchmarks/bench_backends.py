#!/usr/bin/env python3
"""Benchmark the compiled kernel against the NumPy fallback.

Runs a handful of representative pixel workloads through both backends and
prints trials/second plus the speedup.  Usage:

    python benchmarks/bench_backends.py [--trials 500]
"""

import argparse
import time

import numpy as np

from udnsim.channel import ChannelModel
from udnsim.config import (
    Direction,
    DuplexMode,
    ScenarioConfig,
    SchedulerKind,
    build_deployment,
)
from udnsim.engine import fallback
from udnsim.engine.params import build_params

try:
    from udnsim.engine import _kernel
except ImportError:
    _kernel = None

CASES = {
    "full-load single-slope, 2500 BS/km2": ScenarioConfig(
        lambda_bs_per_km2=2500, full_load=True,
        channel_model=ChannelModel.SINGLE_SLOPE_NLOS,
        bs_height_m=1.5, ue_height_m=1.5),
    "full-load LoS/NLoS, 2500 BS/km2": ScenarioConfig(
        lambda_bs_per_km2=2500, full_load=True,
        bs_height_m=1.5, ue_height_m=1.5),
    "idle mode, 300 UE/km2, 2500 BS/km2": ScenarioConfig(
        lambda_bs_per_km2=2500, rho_ue_per_km2=300,
        bs_height_m=1.5, ue_height_m=1.5),
    "idle mode, 300 UE/km2, 50 BS/km2": ScenarioConfig(
        lambda_bs_per_km2=50, rho_ue_per_km2=300,
        bs_height_m=1.5, ue_height_m=1.5),
    "dynamic TDD uplink ic=3, 250 BS/km2": ScenarioConfig(
        lambda_bs_per_km2=250, rho_ue_per_km2=300,
        duplex=DuplexMode.DYNAMIC_TDD,
        scheduler=SchedulerKind.PROPORTIONAL_FAIR, ic_depth=3,
        bs_height_m=1.5, ue_height_m=1.5),
}


def run_case(runner, runtime, is_ul, trials):
    t0 = time.perf_counter()
    sinr, _, _ = runner(runtime, 0, 0.775, 0.775, is_ul, 0, trials)
    return time.perf_counter() - t0, float(np.mean(sinr > 1.0))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=500)
    args = ap.parse_args()

    print(f"{'case':45s} {'numpy':>12s} {'cython':>12s} {'speedup':>8s}")
    for name, cfg in CASES.items():
        is_ul = cfg.duplex is DuplexMode.DYNAMIC_TDD
        params = build_params(cfg, build_deployment(cfg))
        t_np, cov_np = run_case(fallback.run_pixel, fallback.Runtime(params),
                                is_ul, args.trials)
        row = f"{name:45s} {args.trials / t_np:9.0f}/s"
        if _kernel is not None:
            t_cy, cov_cy = run_case(_kernel.run_pixel, _kernel.Runtime(params),
                                    is_ul, args.trials)
            if not np.isclose(cov_np, cov_cy, atol=0.05):
                raise SystemExit(f"backends disagree on {name}: "
                                 f"{cov_np:.3f} vs {cov_cy:.3f}")
            row += f" {args.trials / t_cy:9.0f}/s {t_np / t_cy:7.1f}x"
        else:
            row += f" {'(not built)':>12s} {'-':>8s}"
        print(row)


if __name__ == "__main__":
    main()
