"""udnsim: Monte Carlo SINR coverage heat maps for ultra-dense small-cell
networks, with an interactive what-if planning service."""

from .config import (
    Direction,
    DuplexMode,
    ScenarioConfig,
    SchedulerKind,
    UlPowerMode,
    build_deployment,
)
from .channel import ChannelModel, PowerConstants
from .geometry import Deployment, Point2D, Region

__version__ = "0.1.0"

__all__ = [
    "ChannelModel",
    "Deployment",
    "Direction",
    "DuplexMode",
    "Point2D",
    "PowerConstants",
    "Region",
    "ScenarioConfig",
    "SchedulerKind",
    "UlPowerMode",
    "build_deployment",
    "__version__",
]
