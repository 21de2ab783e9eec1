"""Probe SINR assembly: received powers, cross-link interference terms and
partial interference cancellation.

All arithmetic is linear (mW).  Interference cancellation removes the
strongest `ic_depth` downlink-BS terms by instantaneous received power at
an uplink receiver; interference from uplink UEs is never cancelled.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .channel import dbm_to_mw


class SinrError(ValueError):
    pass


class SourceKind(enum.Enum):
    DL_BS = "dl_bs"
    UL_UE = "ul_ue"


@dataclass(frozen=True)
class InterferenceTerm:
    kind: SourceKind
    source_index: int
    received_power_mw: float


@dataclass(frozen=True)
class SinrSample:
    signal_mw: float
    interference_mw: float
    noise_mw: float

    @property
    def sinr(self) -> float:
        return self.signal_mw / (self.interference_mw + self.noise_mw)


def received_power_mw(tx_dbm: float, fading_gain: float, path_loss_db: float) -> float:
    return dbm_to_mw(tx_dbm) * fading_gain * 10.0 ** (-path_loss_db / 10.0)


def apply_ic(terms: list[InterferenceTerm], ic_depth: int) -> list[InterferenceTerm]:
    """Drop the ic_depth strongest DL-BS terms (ties broken by lower index);
    UL-UE terms always survive."""
    if ic_depth < 0:
        raise SinrError("ic_depth must be >= 0")
    if ic_depth == 0:
        return list(terms)
    dl = [t for t in terms if t.kind is SourceKind.DL_BS]
    dl.sort(key=lambda t: (-t.received_power_mw, t.source_index))
    cancelled = {id(t) for t in dl[:ic_depth]}
    return [t for t in terms if id(t) not in cancelled]


def combine(signal_mw: float, terms: list[InterferenceTerm], noise_mw: float) -> SinrSample:
    if noise_mw <= 0.0:
        raise SinrError("noise must be > 0")
    total = 0.0
    for t in terms:
        if t.received_power_mw < 0.0:
            raise SinrError("interference terms must be >= 0")
        total += t.received_power_mw
    return SinrSample(signal_mw, total, noise_mw)


def dl_sinr(
    signal_mw: float,
    interferers: list[InterferenceTerm],
    noise_at_ue_mw: float,
) -> SinrSample:
    """Downlink probe: all surviving terms add up, no cancellation."""
    return combine(signal_mw, interferers, noise_at_ue_mw)


def ul_sinr(
    signal_mw: float,
    interferers: list[InterferenceTerm],
    noise_at_bs_mw: float,
    ic_depth: int,
) -> SinrSample:
    """Uplink probe at its serving BS, after partial IC."""
    return combine(signal_mw, apply_ic(interferers, ic_depth), noise_at_bs_mw)


def ul_residual_dl_interference(powers_mw: np.ndarray, ic_depth: int) -> float:
    """Sum of DL-BS powers after removing the ic_depth largest (array form,
    used by the backends; summation in source order for reproducibility)."""
    if ic_depth <= 0 or powers_mw.size == 0:
        return float(np.sum(powers_mw))
    k = min(ic_depth, powers_mw.size)
    order = np.lexsort((np.arange(powers_mw.size), -powers_mw))
    keep = np.ones(powers_mw.size, dtype=bool)
    keep[order[:k]] = False
    return float(np.sum(powers_mw[keep]))
