"""Flattened scenario parameters shared by the trial backends.

Both backends consume the same `TrialParams`; the compiled kernel
additionally uses the uniform spatial hash of BS positions built here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..channel import ChannelModel, dbm_to_mw
from ..config import Direction, DuplexMode, ScenarioConfig, SchedulerKind, UlPowerMode
from ..geometry import Deployment


@dataclass
class SpatialHash:
    """CSR bucketing of BS indices on a torus grid (cells_per_side^2 cells)."""

    cells_per_side: int
    cell_size_km: float
    start: np.ndarray   # (cells+1,) int64
    order: np.ndarray   # (n_bs,) int64, BS indices grouped by cell

    @classmethod
    def build(cls, bs_x: np.ndarray, bs_y: np.ndarray, side_km: float) -> "SpatialHash":
        n = bs_x.size
        g = max(1, min(int(math.sqrt(max(n, 1) / 3.0)), 512))
        cs = side_km / g
        cx = np.minimum((bs_x / cs).astype(np.int64), g - 1)
        cy = np.minimum((bs_y / cs).astype(np.int64), g - 1)
        cell = cx * g + cy
        order = np.argsort(cell, kind="stable").astype(np.int64)
        counts = np.bincount(cell, minlength=g * g)
        start = np.zeros(g * g + 1, dtype=np.int64)
        np.cumsum(counts, out=start[1:])
        return cls(g, cs, start, order)


@dataclass
class TrialParams:
    side_km: float
    bs_x: np.ndarray
    bs_y: np.ndarray
    l_ue_bs_km: float           # BS<->UE antenna height gap, km
    model_3gpp: bool
    imc: bool
    full_load: bool
    tdd: bool
    pf: bool
    ic_depth: int
    ul_full_power: bool
    gamma: float
    m_background: int
    poisson_ue_count: bool
    ue_mean: float              # Poisson mean when poisson_ue_count
    p_bs_mw: float
    noise_ue_mw: float
    noise_bs_mw: float
    ue_max_tx_dbm: float
    master_seed: int
    cutoff_km: float            # <= 0 means "no cutoff"
    spatial: SpatialHash = field(repr=False, default=None)

    @property
    def n_bs(self) -> int:
        return int(self.bs_x.size)


def build_params(config: ScenarioConfig, deployment: Deployment) -> TrialParams:
    config.validate()
    if deployment.n_bs == 0:
        raise ValueError("no coverage: deployment has no BSs")
    bs_x = np.ascontiguousarray(deployment.bs_x, dtype=np.float64)
    bs_y = np.ascontiguousarray(deployment.bs_y, dtype=np.float64)
    return TrialParams(
        side_km=deployment.region.side_km,
        bs_x=bs_x,
        bs_y=bs_y,
        l_ue_bs_km=deployment.delta_h_m / 1000.0,
        model_3gpp=config.channel_model is ChannelModel.THREE_GPP_LOS_NLOS,
        imc=config.imc_enabled,
        full_load=config.full_load,
        tdd=config.duplex is DuplexMode.DYNAMIC_TDD,
        pf=config.scheduler is SchedulerKind.PROPORTIONAL_FAIR,
        ic_depth=int(config.ic_depth),
        ul_full_power=config.ul_power_mode is UlPowerMode.FULL_POWER,
        gamma=float(config.gamma),
        m_background=config.n_background_ues,
        poisson_ue_count=bool(config.poisson_ue_count and not config.full_load),
        ue_mean=config.rho_ue_per_km2 * config.side_km**2,
        p_bs_mw=dbm_to_mw(config.powers.bs_tx_dbm),
        noise_ue_mw=dbm_to_mw(config.powers.noise_at_ue_dbm),
        noise_bs_mw=dbm_to_mw(config.powers.noise_at_bs_dbm),
        ue_max_tx_dbm=config.powers.ue_max_tx_dbm,
        master_seed=int(config.master_seed),
        cutoff_km=float(config.cutoff_km) if config.cutoff_km else -1.0,
        spatial=SpatialHash.build(bs_x, bs_y, deployment.region.side_km),
    )


def check_direction(config: ScenarioConfig, direction: Direction) -> None:
    if direction is Direction.UL and config.duplex is DuplexMode.DOWNLINK_ONLY:
        raise ValueError("uplink maps require dynamic TDD duplexing")
