"""Batch command line: run one scenario (preset, config file, or flags) and
write the coverage map as PNG/CSV.

Exit status: 0 on success, 2 on usage errors, 1 on runtime failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import presets
from .channel import ChannelModel
from .config import (
    ConfigError,
    Direction,
    DuplexMode,
    ScenarioConfig,
    SchedulerKind,
    UlPowerMode,
    build_deployment,
)
from .engine import backend_name, scan_grid
from .heatmap import write_csv, write_png

_CHANNELS = {"single": ChannelModel.SINGLE_SLOPE_NLOS, "3gpp": ChannelModel.THREE_GPP_LOS_NLOS}
_SCHEDULERS = {"rr": SchedulerKind.ROUND_ROBIN, "pf": SchedulerKind.PROPORTIONAL_FAIR}
_DUPLEX = {"dl": DuplexMode.DOWNLINK_ONLY, "tdd": DuplexMode.DYNAMIC_TDD}
_UL_POWER = {"frac": UlPowerMode.FRACTIONAL, "full": UlPowerMode.FULL_POWER}


def build_argparser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="udnsim",
        description="Monte Carlo SINR coverage heat maps for dense small-cell layouts",
    )
    p.add_argument("--preset", choices=presets.PRESET_NAMES,
                   help="bundled experiment preset")
    p.add_argument("--density", choices=sorted(presets.DENSITIES),
                   help="reference density used with --preset")
    p.add_argument("--config", type=Path, help="JSON scenario file (flat keys)")
    p.add_argument("--lambda", dest="lambda_bs", type=float, help="BS density per km^2")
    p.add_argument("--rho", type=float, help="active-UE density per km^2")
    p.add_argument("--area-km", type=float, help="square region side length")
    p.add_argument("--grid", type=int, help="map resolution (pixels per side)")
    p.add_argument("--trials", type=int, help="Monte Carlo trials per pixel")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--gamma-db", type=float, help="SINR threshold in dB")
    p.add_argument("--antenna-delta-m", type=float,
                   help="BS-to-UE antenna height difference in metres")
    p.add_argument("--channel", choices=sorted(_CHANNELS))
    p.add_argument("--imc", choices=["on", "off"])
    p.add_argument("--full-load", action="store_true",
                   help="every BS transmits; UE drops are skipped")
    p.add_argument("--scheduler", choices=sorted(_SCHEDULERS))
    p.add_argument("--duplex", choices=sorted(_DUPLEX))
    p.add_argument("--direction", choices=["dl", "ul"], help="which map to scan")
    p.add_argument("--ic", type=int, metavar="N",
                   help="cancel the N strongest DL interferers at UL receivers")
    p.add_argument("--ul-power", choices=sorted(_UL_POWER))
    p.add_argument("--cutoff-km", type=float, help="interferer cutoff radius")
    p.add_argument("--workers", type=int, help="parallel pixel workers")
    p.add_argument("--out", type=Path, required=False, default=Path("coverage.png"))
    p.add_argument("--format", choices=["png", "csv", "both"], default="both")
    p.add_argument("--quiet", action="store_true")
    return p


def _scenario_from_args(args) -> tuple[ScenarioConfig, Direction]:
    direction = None
    if args.preset:
        cfg, direction = presets.expand_preset(args.preset, args.density or "lte50")
    elif args.config:
        cfg = ScenarioConfig.from_json(args.config.read_text())
    else:
        cfg = ScenarioConfig()

    overrides = {}
    if args.lambda_bs is not None:
        overrides["lambda_bs_per_km2"] = args.lambda_bs
    if args.rho is not None:
        overrides["rho_ue_per_km2"] = args.rho
    if args.area_km is not None:
        overrides["side_km"] = args.area_km
    if args.grid is not None:
        overrides["resolution"] = args.grid
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.gamma_db is not None:
        overrides["gamma"] = 10.0 ** (args.gamma_db / 10.0)
    if args.antenna_delta_m is not None:
        if args.antenna_delta_m < 0:
            raise ConfigError("antenna delta must be >= 0")
        overrides["ue_height_m"] = 1.5
        overrides["bs_height_m"] = 1.5 + args.antenna_delta_m
    if args.channel:
        overrides["channel_model"] = _CHANNELS[args.channel]
    if args.imc:
        overrides["imc_enabled"] = args.imc == "on"
    if args.full_load:
        overrides["full_load"] = True
    if args.scheduler:
        overrides["scheduler"] = _SCHEDULERS[args.scheduler]
    if args.duplex:
        overrides["duplex"] = _DUPLEX[args.duplex]
    if args.ic is not None:
        overrides["ic_depth"] = args.ic
    if args.ul_power:
        overrides["ul_power_mode"] = _UL_POWER[args.ul_power]
    if args.cutoff_km is not None:
        overrides["cutoff_km"] = args.cutoff_km
    cfg = cfg.with_overrides(**overrides) if overrides else cfg
    cfg.validate()
    if args.direction:
        direction = Direction(args.direction)
    return cfg, direction or Direction.DL


def run_cli(argv=None) -> int:
    parser = build_argparser()
    args = parser.parse_args(argv)
    try:
        cfg, direction = _scenario_from_args(args)
    except (ConfigError, KeyError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        deployment = build_deployment(cfg)
        if not args.quiet:
            total = cfg.resolution**2
            print(f"backend={backend_name()} bs={deployment.n_bs} "
                  f"grid={cfg.resolution}x{cfg.resolution} trials={cfg.trials} "
                  f"direction={direction.value}")

            def progress(done, n=total):
                if done % max(1, n // 20) == 0 or done == n:
                    print(f"  {done}/{n} pixels", file=sys.stderr)
        else:
            progress = None
        cmap = scan_grid(cfg, deployment, direction,
                         progress=progress, workers=args.workers)
        out: Path = args.out
        out.parent.mkdir(parents=True, exist_ok=True)
        wrote = []
        if args.format in ("png", "both"):
            png_path = out if out.suffix == ".png" else out.with_suffix(".png")
            png_path.write_bytes(write_png(cmap))
            wrote.append(png_path)
        if args.format in ("csv", "both"):
            csv_path = out.with_suffix(".csv")
            csv_path.write_bytes(write_csv(cmap))
            wrote.append(csv_path)
        if not args.quiet:
            avg = float(cmap.values.mean())
            print(f"mean coverage {avg:.4f}; wrote {', '.join(map(str, wrote))}")
        return 0
    except KeyboardInterrupt:
        return 1
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
