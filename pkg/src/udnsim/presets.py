"""Bundled experiment presets.

Each preset pins one panel of the five bundled experiments (propagation
baseline, antenna height, LoS transition, idle mode, scheduling, dynamic
TDD) at one of the three reference densities.
"""

from __future__ import annotations

from .channel import ChannelModel
from .config import Direction, DuplexMode, ScenarioConfig, SchedulerKind, UlPowerMode

DENSITIES = {"lte50": 50.0, "dense250": 250.0, "udn2500": 2500.0}

_COMMON = dict(side_km=1.5, rho_ue_per_km2=300.0, gamma=1.0, trials=10000,
               resolution=100, master_seed=42)

# name -> (config field overrides, scan direction)
_PRESETS = {
    # single-slope propagation baseline, every BS transmitting
    "fig2b": (dict(channel_model=ChannelModel.SINGLE_SLOPE_NLOS, full_load=True,
                   bs_height_m=1.5, ue_height_m=1.5), Direction.DL),
    # same baseline with the 8.5 m BS/UE antenna height gap
    "fig2c": (dict(channel_model=ChannelModel.SINGLE_SLOPE_NLOS, full_load=True,
                   bs_height_m=10.0, ue_height_m=1.5), Direction.DL),
    # probabilistic LoS/NLoS model, every BS transmitting
    "fig2d": (dict(channel_model=ChannelModel.THREE_GPP_LOS_NLOS, full_load=True,
                   bs_height_m=1.5, ue_height_m=1.5), Direction.DL),
    # idle mode with finite UE density, round-robin
    "fig4a": (dict(channel_model=ChannelModel.THREE_GPP_LOS_NLOS, imc_enabled=True,
                   bs_height_m=1.5, ue_height_m=1.5,
                   scheduler=SchedulerKind.ROUND_ROBIN), Direction.DL),
    # idle mode with proportional-fair scheduling
    "fig4b": (dict(channel_model=ChannelModel.THREE_GPP_LOS_NLOS, imc_enabled=True,
                   bs_height_m=1.5, ue_height_m=1.5,
                   scheduler=SchedulerKind.PROPORTIONAL_FAIR), Direction.DL),
    # dynamic TDD, downlink map
    "fig5a": (dict(channel_model=ChannelModel.THREE_GPP_LOS_NLOS, imc_enabled=True,
                   bs_height_m=1.5, ue_height_m=1.5,
                   scheduler=SchedulerKind.PROPORTIONAL_FAIR,
                   duplex=DuplexMode.DYNAMIC_TDD, ic_depth=0,
                   ul_power_mode=UlPowerMode.FRACTIONAL), Direction.DL),
    # dynamic TDD, uplink map, no cancellation, fractional power
    "fig5b": (dict(channel_model=ChannelModel.THREE_GPP_LOS_NLOS, imc_enabled=True,
                   bs_height_m=1.5, ue_height_m=1.5,
                   scheduler=SchedulerKind.PROPORTIONAL_FAIR,
                   duplex=DuplexMode.DYNAMIC_TDD, ic_depth=0,
                   ul_power_mode=UlPowerMode.FRACTIONAL), Direction.UL),
    # uplink with the top-3 interferers cancelled
    "fig5c": (dict(channel_model=ChannelModel.THREE_GPP_LOS_NLOS, imc_enabled=True,
                   bs_height_m=1.5, ue_height_m=1.5,
                   scheduler=SchedulerKind.PROPORTIONAL_FAIR,
                   duplex=DuplexMode.DYNAMIC_TDD, ic_depth=3,
                   ul_power_mode=UlPowerMode.FRACTIONAL), Direction.UL),
    # uplink with cancellation and full-power transmission
    "fig5d": (dict(channel_model=ChannelModel.THREE_GPP_LOS_NLOS, imc_enabled=True,
                   bs_height_m=1.5, ue_height_m=1.5,
                   scheduler=SchedulerKind.PROPORTIONAL_FAIR,
                   duplex=DuplexMode.DYNAMIC_TDD, ic_depth=3,
                   ul_power_mode=UlPowerMode.FULL_POWER), Direction.UL),
}

PRESET_NAMES = tuple(_PRESETS)


def expand_preset(name: str, density: str) -> tuple[ScenarioConfig, Direction]:
    """Fully specified scenario + scan direction for (preset, density)."""
    if name not in _PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    if density not in DENSITIES:
        raise KeyError(f"unknown density {density!r}; choose from {tuple(DENSITIES)}")
    overrides, direction = _PRESETS[name]
    cfg = ScenarioConfig(**_COMMON, lambda_bs_per_km2=DENSITIES[density], **overrides)
    cfg.validate()
    return cfg, direction
