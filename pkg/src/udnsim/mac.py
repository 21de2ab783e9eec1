"""Per-cell scheduling (round robin / proportional fair), dynamic-TDD
direction assignment, and uplink transmit power.

A rotating round-robin schedule observed at a random subframe is a uniform
pick over a cell's attached UEs, which is how RR is modeled here.  PF picks
the UE at the instantaneous fading peak; the probe, which is always the
scheduled UE in its own cell, gets a serving-link fading drawn as the max
of K unit exponentials (K = attached count) under PF to reflect being
served at a channel peak.  Interfering links keep plain Exp(1) fading.
"""

from __future__ import annotations

import numpy as np

from . import rng as _rng
from .config import Direction, DuplexMode, SchedulerKind, UlPowerMode
from .config import UL_FRACTIONAL_ALPHA, UL_FRACTIONAL_P0_DBM


class MacError(ValueError):
    pass


def assign_directions(
    ue_count: int,
    duplex: DuplexMode,
    probe_direction: Direction,
    trial_key: int,
) -> np.ndarray:
    """Per-UE requested directions (index 0 is the probe, forced to the
    direction being measured).  Dynamic TDD draws i.i.d. 50/50 DL/UL."""
    dirs = np.zeros(ue_count, dtype=np.int8)  # 0 = DL, 1 = UL
    if duplex is DuplexMode.DYNAMIC_TDD and ue_count > 1:
        u = _rng.u01_array(trial_key, _rng.P_DIR, np.arange(1, ue_count))
        dirs[1:] = (u >= 0.5).astype(np.int8)
    if ue_count > 0:
        dirs[0] = 0 if probe_direction is Direction.DL else 1
    return dirs


def schedule_cell(
    attached: np.ndarray,
    kind: SchedulerKind,
    bs_index: int,
    trial_key: int,
) -> int:
    """Scheduled UE of one (non-probe) cell.

    RR: uniform pick keyed by the BS index.  PF: the attached UE with the
    maximal own-link fading; with i.i.d. Exp(1) fading this is the argmin
    of the per-UE selection uniforms (ties go to the lower UE index).
    """
    attached = np.asarray(attached, dtype=np.int64)
    k = attached.size
    if k == 0:
        raise MacError("cannot schedule an empty cell")
    if k == 1:
        return int(attached[0])
    if kind is SchedulerKind.ROUND_ROBIN:
        u = _rng.u01(trial_key, _rng.P_SCHED_RR, bs_index)
        idx = int(u * k)
        return int(attached[min(idx, k - 1)])
    u = _rng.u01_array(trial_key, _rng.P_SCHED_PF, attached)
    return int(attached[int(np.argmin(u))])


def pf_select(attached: np.ndarray, fading: np.ndarray) -> int:
    """PF pick given explicit instantaneous fading gains (argmax)."""
    attached = np.asarray(attached)
    if attached.size == 0:
        raise MacError("cannot schedule an empty cell")
    return int(attached[int(np.argmax(fading))])


def probe_signal_fading(kind: SchedulerKind, attached_count: int, trial_key: int) -> float:
    """Serving-link fading for the probe.

    Under PF the probe is served at a fading peak: max of K i.i.d. Exp(1),
    computed as -log(min of K uniforms).  Under RR (or K = 1) it is a
    single Exp(1) draw.
    """
    if attached_count < 1:
        raise MacError("probe cell must contain the probe")
    k = attached_count if kind is SchedulerKind.PROPORTIONAL_FAIR else 1
    u = min(_rng.u01(trial_key, _rng.P_FADE_SIGNAL, c) for c in range(k))
    return -float(np.log(u))


def ul_tx_power_dbm(path_loss_db: float, mode: UlPowerMode,
                    ue_max_tx_dbm: float = 23.0):
    """Uplink transmit power: fractional compensation clipped at the UE
    maximum, or plain full power."""
    if mode is UlPowerMode.FULL_POWER:
        return np.full_like(np.asarray(path_loss_db, dtype=np.float64), ue_max_tx_dbm) \
            if not np.isscalar(path_loss_db) else ue_max_tx_dbm
    p = UL_FRACTIONAL_P0_DBM + UL_FRACTIONAL_ALPHA * np.asarray(path_loss_db, dtype=np.float64)
    p = np.minimum(p, ue_max_tx_dbm)
    return float(p) if np.isscalar(path_loss_db) else p
