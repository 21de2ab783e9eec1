"""Scenario configuration: every tunable knob of one experiment, plus JSON
(de)serialization and the deterministic deployment builder.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
from dataclasses import dataclass, field, fields, replace

from . import geometry, rng
from .channel import ChannelModel, PowerConstants


class ConfigError(ValueError):
    pass


class SchedulerKind(enum.Enum):
    ROUND_ROBIN = "rr"
    PROPORTIONAL_FAIR = "pf"


class DuplexMode(enum.Enum):
    DOWNLINK_ONLY = "dl"
    DYNAMIC_TDD = "tdd"


class UlPowerMode(enum.Enum):
    FRACTIONAL = "fractional"   # P0 = -59 dBm, alpha = 0.8, clipped at 23 dBm
    FULL_POWER = "full"         # always 23 dBm


class Direction(enum.Enum):
    DL = "dl"
    UL = "ul"


UL_FRACTIONAL_P0_DBM = -59.0
UL_FRACTIONAL_ALPHA = 0.8

_ENUM_FIELDS = {
    "channel_model": ChannelModel,
    "scheduler": SchedulerKind,
    "duplex": DuplexMode,
    "ul_power_mode": UlPowerMode,
}


@dataclass(frozen=True)
class ScenarioConfig:
    side_km: float = 1.5
    lambda_bs_per_km2: float = 50.0
    rho_ue_per_km2: float = 300.0
    bs_height_m: float = 10.0
    ue_height_m: float = 1.5
    channel_model: ChannelModel = ChannelModel.THREE_GPP_LOS_NLOS
    imc_enabled: bool = True
    full_load: bool = False
    scheduler: SchedulerKind = SchedulerKind.ROUND_ROBIN
    duplex: DuplexMode = DuplexMode.DOWNLINK_ONLY
    ic_depth: int = 0
    ul_power_mode: UlPowerMode = UlPowerMode.FRACTIONAL
    gamma: float = 1.0          # linear SINR threshold
    trials: int = 10000
    resolution: int = 100
    master_seed: int = 42
    cutoff_km: float | None = None
    poisson_ue_count: bool = False
    powers: PowerConstants = field(default_factory=PowerConstants)

    def validate(self) -> None:
        checks = [
            (self.side_km > 0, "side_km must be > 0"),
            (self.lambda_bs_per_km2 >= 0, "lambda_bs_per_km2 must be >= 0"),
            (self.rho_ue_per_km2 >= 0, "rho_ue_per_km2 must be >= 0"),
            (self.bs_height_m >= self.ue_height_m >= 0,
             "need bs_height_m >= ue_height_m >= 0"),
            (self.gamma > 0, "gamma must be > 0"),
            (self.trials >= 1, "trials must be >= 1"),
            (self.resolution >= 1, "resolution must be >= 1"),
            (self.ic_depth >= 0, "ic_depth must be >= 0"),
            (self.cutoff_km is None or self.cutoff_km > 0,
             "cutoff_km must be > 0 when set"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)
        if not all(math.isfinite(v) for v in (self.side_km, self.gamma)):
            raise ConfigError("side_km and gamma must be finite")

    @property
    def region(self) -> geometry.Region:
        return geometry.Region(self.side_km)

    @property
    def delta_h_m(self) -> float:
        return self.bs_height_m - self.ue_height_m

    @property
    def n_bs(self) -> int:
        return int(round(self.lambda_bs_per_km2 * self.side_km**2))

    @property
    def n_background_ues(self) -> int:
        if self.full_load:
            return 0
        return int(round(self.rho_ue_per_km2 * self.side_km**2))

    def with_overrides(self, **kwargs) -> "ScenarioConfig":
        cfg = replace(self, **kwargs)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        d = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "powers":
                d.update(
                    bs_tx_dbm=v.bs_tx_dbm,
                    ue_max_tx_dbm=v.ue_max_tx_dbm,
                    noise_at_bs_dbm=v.noise_at_bs_dbm,
                    noise_at_ue_dbm=v.noise_at_ue_dbm,
                )
            elif isinstance(v, enum.Enum):
                d[f.name] = v.value
            else:
                d[f.name] = v
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        d = dict(d)
        power_keys = ("bs_tx_dbm", "ue_max_tx_dbm", "noise_at_bs_dbm", "noise_at_ue_dbm")
        pw = {k: d.pop(k) for k in power_keys if k in d}
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for name, enum_cls in _ENUM_FIELDS.items():
            if name in d and not isinstance(d[name], enum_cls):
                try:
                    d[name] = enum_cls(d[name])
                except ValueError:
                    allowed = [e.value for e in enum_cls]
                    raise ConfigError(f"{name} must be one of {allowed}") from None
        if pw:
            d["powers"] = PowerConstants(**pw)
        cfg = cls(**d)
        cfg.validate()
        return cfg

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        return cls.from_dict(json.loads(text))


def build_deployment(config: ScenarioConfig, macro_isd_km: float | None = 0.5) -> geometry.Deployment:
    """Draw the scenario's fixed BS layout from the master seed."""
    config.validate()
    region = config.region
    stream = rng.Stream(rng.deployment_key(config.master_seed))
    dep = geometry.deploy_bs(region, config.lambda_bs_per_km2, stream)
    grid = None
    if macro_isd_km:
        grid = geometry.build_macro_grid(region, macro_isd_km)
    return geometry.Deployment(
        region, dep.bs_x, dep.bs_y,
        bs_antenna_height_m=config.bs_height_m,
        ue_antenna_height_m=config.ue_height_m,
        macro_grid=grid,
    )


def fingerprint(config: ScenarioConfig, deployment: geometry.Deployment) -> str:
    """Stable short hash of a scenario (config + exact BS layout)."""
    h = hashlib.sha256()
    h.update(json.dumps(config.to_dict(), sort_keys=True).encode())
    h.update(b"|")
    for arr in (deployment.bs_x, deployment.bs_y):
        h.update(",".join(v.hex() for v in arr.tolist()).encode())
    h.update(f"|{deployment.bs_antenna_height_m}|{deployment.ue_antenna_height_m}".encode())
    return h.hexdigest()[:16]
