"""User association: every UE attaches to the BS with the minimum sampled
path loss for this trial; idle-mode capability derives the active-BS set.

LoS states are redrawn per trial from per-(UE, BS) counter-keyed uniforms,
so association is a pure function of the trial key.  Fading is excluded
from the serving-cell choice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from . import rng as _rng
from .channel import (
    ChannelModel,
    LinkType,
    floored_r_km,
    los_probability,
    path_loss_db,
)
from .geometry import Deployment


class AssociationError(ValueError):
    pass


@dataclass
class AssociationResult:
    serving_bs: np.ndarray      # per-UE serving BS index
    serving_pl_db: np.ndarray   # per-UE path loss to the serving BS
    active_bs: np.ndarray       # sorted active BS indices
    n_bs: int

    def attached_ues(self, bs: int) -> np.ndarray:
        return np.nonzero(self.serving_bs == bs)[0]


def _pair_path_loss(model, ue_idx, bs_idx, r3d_km, trial_key):
    """Sampled path loss for UE<->BS link pairs (vectorized)."""
    r = floored_r_km(r3d_km)
    if model is ChannelModel.SINGLE_SLOPE_NLOS:
        return path_loss_db(model, LinkType.BS_TO_UE, False, r)
    p_los = los_probability(LinkType.BS_TO_UE, r)
    u = _rng.u01_array(trial_key, _rng.P_LOS_UE_BS, ue_idx, bs_idx)
    return path_loss_db(model, LinkType.BS_TO_UE, u < p_los, r)


def associate(
    ue_xy: np.ndarray,
    deployment: Deployment,
    model: ChannelModel,
    trial_key: int,
    imc_enabled: bool = True,
) -> AssociationResult:
    """Minimum-path-loss association over all (UE, BS) pairs.

    Straightforward full-matrix evaluation; the engine backends use an
    equivalent pruned search for large deployments.  UE row u corresponds
    to global UE index u (0 is the probe).
    """
    n = deployment.n_bs
    if n == 0:
        raise AssociationError("no coverage: deployment has no BSs")
    ue_xy = np.asarray(ue_xy, dtype=np.float64).reshape(-1, 2)
    m = ue_xy.shape[0]
    side = deployment.region.side_km
    dx = np.abs(ue_xy[:, 0:1] - deployment.bs_x[None, :]) % side
    dy = np.abs(ue_xy[:, 1:2] - deployment.bs_y[None, :]) % side
    dx = np.minimum(dx, side - dx)
    dy = np.minimum(dy, side - dy)
    r3d = np.sqrt(dx * dx + dy * dy + (deployment.delta_h_m / 1000.0) ** 2)
    ue_idx = np.repeat(np.arange(m), n).reshape(m, n)
    bs_idx = np.tile(np.arange(n), (m, 1))
    pl = _pair_path_loss(model, ue_idx, bs_idx, r3d, trial_key)
    serving = np.argmin(pl, axis=1)  # ties resolve to the lowest BS index
    serving_pl = pl[np.arange(m), serving]
    active = derive_active_set(serving, imc_enabled, n)
    return AssociationResult(serving.astype(np.int64), serving_pl, active, n)


def derive_active_set(serving_bs: np.ndarray, imc_enabled: bool, bs_count: int) -> np.ndarray:
    """Active BSs: those with at least one attached UE, or all when IMC is off."""
    if not imc_enabled:
        return np.arange(bs_count, dtype=np.int64)
    return np.unique(np.asarray(serving_bs, dtype=np.int64))


class CandidateIndex:
    """Exact pruned min-path-loss search over a fixed deployment.

    For each UE the nearest BS bounds the achievable path loss from above
    by the NLoS law; any BS whose LoS law at its own distance exceeds that
    bound cannot win, which caps the candidate radius.  Results are
    identical to the full-matrix search.
    """

    def __init__(self, deployment: Deployment, model: ChannelModel):
        self.deployment = deployment
        self.model = model
        self.side = deployment.region.side_km
        pts = np.column_stack([deployment.bs_x, deployment.bs_y])
        # boxsize makes the tree toroidal
        self.tree = cKDTree(pts, boxsize=self.side) if deployment.n_bs else None
        self.l_km = deployment.delta_h_m / 1000.0

    def associate(self, ue_xy: np.ndarray, trial_key: int, imc_enabled: bool = True
                  ) -> AssociationResult:
        dep = self.deployment
        n = dep.n_bs
        if n == 0:
            raise AssociationError("no coverage: deployment has no BSs")
        ue_xy = np.asarray(ue_xy, dtype=np.float64).reshape(-1, 2)
        m = ue_xy.shape[0]
        if self.model is ChannelModel.SINGLE_SLOPE_NLOS:
            # single slope is monotone in distance: serve the nearest BS
            _, serving = self.tree.query(ue_xy % self.side)
            ddx = np.abs(ue_xy[:, 0] - dep.bs_x[serving]) % self.side
            ddy = np.abs(ue_xy[:, 1] - dep.bs_y[serving]) % self.side
            ddx = np.minimum(ddx, self.side - ddx)
            ddy = np.minimum(ddy, self.side - ddy)
            r = floored_r_km(np.sqrt(ddx * ddx + ddy * ddy + self.l_km**2))
            pl = path_loss_db(self.model, LinkType.BS_TO_UE, False, r)
            active = derive_active_set(serving, imc_enabled, n)
            return AssociationResult(serving.astype(np.int64), pl, active, n)

        d1, _ = self.tree.query(ue_xy % self.side)
        r1 = floored_r_km(np.sqrt(d1 * d1 + self.l_km**2))
        worst_best = path_loss_db(self.model, LinkType.BS_TO_UE, False, r1)
        # radius beyond which even a LoS BS exceeds the worst-case best PL
        r_cut = 10.0 ** ((worst_best - 103.8) / 20.9) * (1.0 + 1e-12)
        d_cut = np.sqrt(np.maximum(r_cut**2 - self.l_km**2, 0.0))
        d_cut = np.maximum(d_cut, d1 * (1.0 + 1e-12))
        groups = self.tree.query_ball_point(ue_xy % self.side, np.minimum(d_cut, self.side))
        counts = np.fromiter((len(g) for g in groups), count=m, dtype=np.int64)
        bs_idx = np.concatenate([np.asarray(g, dtype=np.int64) for g in groups]) \
            if m else np.empty(0, dtype=np.int64)
        ue_idx = np.repeat(np.arange(m), counts)
        ddx = np.abs(ue_xy[ue_idx, 0] - dep.bs_x[bs_idx]) % self.side
        ddy = np.abs(ue_xy[ue_idx, 1] - dep.bs_y[bs_idx]) % self.side
        ddx = np.minimum(ddx, self.side - ddx)
        ddy = np.minimum(ddy, self.side - ddy)
        r = floored_r_km(np.sqrt(ddx * ddx + ddy * ddy + self.l_km**2))
        pl = _pair_path_loss(self.model, ue_idx, bs_idx, r, trial_key)
        # per-UE argmin with ties to the lowest BS index
        order = np.lexsort((bs_idx, pl, ue_idx))
        starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
        pick = order[starts]
        serving = bs_idx[pick]
        serving_pl = pl[pick]
        active = derive_active_set(serving, imc_enabled, n)
        return AssociationResult(serving, serving_pl, active, n)
