"""Propagation model: LoS probabilities, LoS/NLoS path-loss pairs per link
type, the single-slope baseline, Rayleigh fading and dB conversions.

Path-loss formulas take the 3D distance r in km and return dB.  The
probabilistic model uses a distinct LoS/NLoS pair per link class
(BS-to-UE, BS-to-BS, UE-to-UE); the single-slope baseline applies the
NLoS BS-to-UE law (exponent 3.75) to every link regardless of LoS state.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import rng as _rng

# r is floored here before any log; a UE landing exactly on a BS has
# probability zero but must not produce log(0).
MIN_DISTANCE_KM = 1e-6

# piecewise boundary of the BS-link LoS probability
LOS_BREAK_KM = 0.0677
UE_UE_LOS_RANGE_KM = 0.05


class ChannelError(ValueError):
    pass


class LinkType(enum.Enum):
    BS_TO_UE = "bs_to_ue"
    BS_TO_BS = "bs_to_bs"
    UE_TO_UE = "ue_to_ue"


class ChannelModel(enum.Enum):
    SINGLE_SLOPE_NLOS = "single_slope"
    THREE_GPP_LOS_NLOS = "3gpp"


@dataclass(frozen=True)
class PowerConstants:
    """Transmit powers and receiver noise floors over 10 MHz."""

    bs_tx_dbm: float = 24.0
    ue_max_tx_dbm: float = 23.0
    noise_at_bs_dbm: float = -91.0
    noise_at_ue_dbm: float = -95.0


@dataclass(frozen=True)
class LinkSample:
    r_km: float
    is_los: bool
    path_loss_db: float
    fading_gain: float


# (intercept, slope) of intercept + slope * log10(r_km)
_PL_LOS = {
    LinkType.BS_TO_UE: (103.8, 20.9),
    LinkType.BS_TO_BS: (101.9, 40.0),
    LinkType.UE_TO_UE: (98.45, 20.0),
}
_PL_NLOS = {
    LinkType.BS_TO_UE: (145.4, 37.5),
    LinkType.BS_TO_BS: (169.36, 40.0),
    LinkType.UE_TO_UE: (175.78, 40.0),
}
SINGLE_SLOPE_INTERCEPT_DB = 145.4
SINGLE_SLOPE_DB_PER_DECADE = 37.5  # path loss exponent 3.75


def los_probability(link: LinkType, r_km) -> float | np.ndarray:
    """LoS probability at 3D distance r (km); clamped to [0, 1].

    BS links: 1 - 5*exp(-0.156/r) up to the 0.0677 km break, then
    5*exp(-r/0.03).  UE-to-UE links: 1 within 0.05 km, else 0.
    """
    r = np.asarray(r_km, dtype=np.float64)
    if np.any(r < 0.0):
        raise ChannelError("distance must be >= 0")
    if link is LinkType.UE_TO_UE:
        p = np.where(r <= UE_UE_LOS_RANGE_KM, 1.0, 0.0)
    else:
        with np.errstate(divide="ignore"):
            # r = 0 gives exp(-inf) = 0, i.e. certain LoS
            p_near = 1.0 - 5.0 * np.exp(-0.156 / r)
        p_far = 5.0 * np.exp(-r / 0.03)
        p = np.where(r <= LOS_BREAK_KM, p_near, p_far)
        p = np.clip(p, 0.0, 1.0)
    return float(p) if np.isscalar(r_km) else p


def path_loss_db(
    model: ChannelModel, link: LinkType, is_los, r_km
) -> float | np.ndarray:
    """Table of path-loss laws; r in km, result in dB.

    The single-slope baseline ignores both the link type and the LoS flag.
    """
    r = np.asarray(r_km, dtype=np.float64)
    if np.any(r <= 0.0):
        raise ChannelError("path loss requires r > 0 (apply the minimum-distance floor)")
    logr = np.log10(r)
    if model is ChannelModel.SINGLE_SLOPE_NLOS:
        pl = SINGLE_SLOPE_INTERCEPT_DB + SINGLE_SLOPE_DB_PER_DECADE * logr
    else:
        a_l, b_l = _PL_LOS[link]
        a_n, b_n = _PL_NLOS[link]
        pl = np.where(is_los, a_l + b_l * logr, a_n + b_n * logr)
    return float(pl) if np.isscalar(r_km) and np.isscalar(is_los) else pl


def floored_r_km(r_km):
    return np.maximum(r_km, MIN_DISTANCE_KM)


def sample_los(p: float, rng: _rng.Stream) -> bool:
    if not 0.0 <= p <= 1.0:
        raise ChannelError("probability out of range")
    return rng.next_u01() < p


def sample_fading(rng: _rng.Stream) -> float:
    """Unit-mean exponential power gain (squared Rayleigh envelope)."""
    return rng.next_exp1()


def dbm_to_mw(x_dbm):
    return 10.0 ** (x_dbm / 10.0)


def db_to_linear(x_db):
    return 10.0 ** (x_db / 10.0)


def mw_to_dbm(x_mw):
    return 10.0 * math.log10(x_mw) if np.isscalar(x_mw) else 10.0 * np.log10(x_mw)
