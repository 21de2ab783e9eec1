"""Pure-NumPy trial backend (and the canonical statement of the trial
draw protocol).

One trial of pixel p and index t is a pure function of the trial key
k = trial_key(master_seed, p, t).  Global UE index 0 is the probe;
background UEs are 1..m.  Draw addressing:

1.  background count    m = round(rho * area), or Poisson arrivals on
                        (k, P_COUNT, 0..) when poisson_ue_count is set
2.  background UE u     x = u01(k, P_UE_X, u-1) * side, same for y
3.  association         3GPP model: link (u, b) is LoS iff
                        u01(k, P_LOS_UE_BS, u, b) < p_los(r_ub); serving BS
                        is the path-loss argmin, ties to the lower BS index.
                        Single-slope: no LoS draws, nearest BS wins.
4.  active set          all BSs when full_load or IMC off, else the set of
                        serving BSs
5.  probe fading        h_sig = -log(min over c<K' of u01(k, P_FADE_SIGNAL, c)),
                        K' = attached count of the probe's cell under PF, 1
                        under RR
6.  TDD scheduling      per active cell b (not the probe's): RR picks
                        attached[int(u01(k, P_SCHED_RR, b) * K)] (clamped),
                        attached sorted ascending; PF picks the attached UE
                        minimizing u01(k, P_SCHED_PF, u).  The cell direction
                        is its scheduled UE's request:
                        UL iff u01(k, P_DIR, v) >= 0.5.  The probe's cell
                        always schedules the probe in the measured direction.
                        Downlink-only mode and cells without UEs transmit DL.
7.  interference        fading of interfering BS b into the trial receiver is
                        exp1(k, P_FADE_BS, b); of interfering UE v,
                        exp1(k, P_FADE_UE, v).  BS->BS LoS uniforms are
                        u01(k, P_LOS_BS_BS, b); UE->BS reuse P_LOS_UE_BS with
                        the receiving BS as the pair's BS counter.
8.  uplink power        fractional: min(ue_max, -59 + 0.8 * serving PL) dBm;
                        full power: ue_max.

Scheduling draws are only consulted where they can affect the probe's
SINR (dynamic TDD); with downlink-only duplexing every active cell
transmits DL regardless of its schedule, so those draws are skipped.
"""

from __future__ import annotations

import numpy as np

from .. import rng as _rng
from ..association import CandidateIndex
from ..channel import (
    LOS_BREAK_KM,
    MIN_DISTANCE_KM,
    UE_UE_LOS_RANGE_KM,
)
from ..geometry import torus_d2, torus_distances
from ..sinr import ul_residual_dl_interference
from .params import TrialParams

BACKEND_NAME = "numpy"

# path-loss coefficients (intercept, slope per decade)
_BU_LOS = (103.8, 20.9)
_BU_NLOS = (145.4, 37.5)
_BB_LOS = (101.9, 40.0)
_BB_NLOS = (169.36, 40.0)
_UU_LOS = (98.45, 20.0)
_UU_NLOS = (175.78, 40.0)


def _p_los_bs(r):
    with np.errstate(divide="ignore"):
        near = 1.0 - 5.0 * np.exp(-0.156 / r)
    far = 5.0 * np.exp(-r / 0.03)
    return np.clip(np.where(r <= LOS_BREAK_KM, near, far), 0.0, 1.0)


class Runtime:
    """Prepared per-scenario state for the NumPy backend."""

    def __init__(self, params: TrialParams):
        self.p = params
        from ..channel import ChannelModel
        from ..geometry import Deployment, Region

        model = (ChannelModel.THREE_GPP_LOS_NLOS if params.model_3gpp
                 else ChannelModel.SINGLE_SLOPE_NLOS)
        dep = Deployment(
            Region(params.side_km), params.bs_x, params.bs_y,
            bs_antenna_height_m=params.l_ue_bs_km * 1000.0,
            ue_antenna_height_m=0.0,
        )
        self.index = CandidateIndex(dep, model)


class PixelContext:
    """Per-pixel precomputed probe->BS link quantities."""

    def __init__(self, rt: Runtime, pixel_index: int, px: float, py: float):
        p = rt.p
        self.pixel_index = pixel_index
        self.px, self.py = px, py
        d2 = torus_d2(p.bs_x, p.bs_y, px, py, p.side_km)
        self.d2d = np.sqrt(d2)
        self.r3 = np.maximum(np.sqrt(d2 + p.l_ue_bs_km**2), MIN_DISTANCE_KM)
        logr = np.log10(self.r3)
        if p.model_3gpp:
            self.plos = _p_los_bs(self.r3)
            self.pl_los = _BU_LOS[0] + _BU_LOS[1] * logr
            self.pl_nlos = _BU_NLOS[0] + _BU_NLOS[1] * logr
        else:
            self.plos = np.zeros_like(self.r3)
            self.pl_los = self.pl_nlos = _BU_NLOS[0] + _BU_NLOS[1] * logr
        # uplink receiver caches keyed by serving BS index
        self._bb_cache: dict[int, tuple] = {}

    def bs_to_bs_links(self, rt: Runtime, s0: int):
        """(d2d, p_los, pl_los, pl_nlos) of every BS toward receiver s0."""
        got = self._bb_cache.get(s0)
        if got is not None:
            return got
        p = rt.p
        d2d = torus_distances(p.bs_x, p.bs_y, p.bs_x[s0], p.bs_y[s0], p.side_km)
        r = np.maximum(d2d, MIN_DISTANCE_KM)  # equal BS heights
        logr = np.log10(r)
        if p.model_3gpp:
            plos = _p_los_bs(r)
            pll = _BB_LOS[0] + _BB_LOS[1] * logr
            pln = _BB_NLOS[0] + _BB_NLOS[1] * logr
        else:
            plos = np.zeros_like(r)
            pll = pln = _BU_NLOS[0] + _BU_NLOS[1] * logr
        got = (d2d, plos, pll, pln)
        if len(self._bb_cache) < 32:
            self._bb_cache[s0] = got
        return got


def _ul_power_dbm(pl_db, p: TrialParams):
    if p.ul_full_power:
        return np.full_like(np.asarray(pl_db, dtype=np.float64), p.ue_max_tx_dbm)
    return np.minimum(-59.0 + 0.8 * np.asarray(pl_db, dtype=np.float64), p.ue_max_tx_dbm)


def _schedule_tdd_cells(p, key, serving, s0):
    """Scheduled UE and direction of every scheduled cell except s0.

    Returns (cells, sched_ue, is_ul) arrays; cells ascending.
    """
    m1 = serving.size
    order = np.argsort(serving, kind="stable")  # ascending cell, then ue
    srv_sorted = serving[order]
    cells, starts, counts = np.unique(srv_sorted, return_index=True, return_counts=True)
    if p.pf:
        metric = _rng.u01_array(key, _rng.P_SCHED_PF, order)
        pick_order = np.lexsort((order, metric, srv_sorted))
        picked = order[pick_order[starts]]
    else:
        u = _rng.u01_array(key, _rng.P_SCHED_RR, cells)
        idx = np.minimum((u * counts).astype(np.int64), counts - 1)
        picked = order[starts + idx]
    keep = cells != s0
    cells, picked = cells[keep], picked[keep]
    is_ul = _rng.u01_array(key, _rng.P_DIR, picked) >= 0.5 if picked.size else \
        np.zeros(0, dtype=bool)
    # the probe never carries a drawn direction; it cannot be picked here
    return cells, picked, is_ul


def simulate_trial(rt: Runtime, ctx: PixelContext, trial_index: int, is_ul: bool,
                   collect: bool = False):
    """One end-to-end trial; returns (signal_mw, interference_mw, noise_mw)
    plus a snapshot dict when collect is set."""
    p = rt.p
    key = _rng.trial_key(p.master_seed, ctx.pixel_index, trial_index)
    side = p.side_km
    n = p.n_bs

    # background UEs
    if p.full_load:
        m = 0
    elif p.poisson_ue_count:
        m = _rng.Stream(key).poisson(p.ue_mean)
    else:
        m = p.m_background
    if m:
        bg_idx = np.arange(m)
        bx = _rng.u01_array(key, _rng.P_UE_X, bg_idx) * side
        by = _rng.u01_array(key, _rng.P_UE_Y, bg_idx) * side
        ue_xy = np.vstack([[ctx.px, ctx.py], np.column_stack([bx, by])])
    else:
        ue_xy = np.array([[ctx.px, ctx.py]])

    assoc = rt.index.associate(ue_xy, key, imc_enabled=p.imc and not p.full_load)
    serving = assoc.serving_bs
    s0 = int(serving[0])
    pl_serv0 = float(assoc.serving_pl_db[0])
    if p.full_load or not p.imc:
        active_mask = np.ones(n, dtype=bool)
    else:
        active_mask = np.zeros(n, dtype=bool)
        active_mask[assoc.active_bs] = True

    # probe serving-link fading
    k_probe = int(np.count_nonzero(serving == s0)) if p.pf else 1
    h_sig = -np.log(min(_rng.u01(key, _rng.P_FADE_SIGNAL, c) for c in range(k_probe)))

    # cell directions (True = UL); default DL
    if p.tdd and m:
        cells, sched_ue, cell_ul = _schedule_tdd_cells(p, key, serving, s0)
    else:
        cells = sched_ue = np.zeros(0, dtype=np.int64)
        cell_ul = np.zeros(0, dtype=bool)

    is_ul_cell = np.zeros(n, dtype=bool)
    if cells.size:
        is_ul_cell[cells] = cell_ul
    is_ul_cell[s0] = is_ul  # probe's cell runs in the measured direction

    dl_mask = active_mask & ~is_ul_cell
    dl_mask[s0] = False

    if not is_ul:
        # receiver: the probe UE
        u = _rng.u01_array(key, _rng.P_LOS_UE_BS,
                           np.zeros(n, dtype=np.int64), np.arange(n))
        pl_probe = np.where(u < ctx.plos, ctx.pl_los, ctx.pl_nlos)
        if p.cutoff_km > 0.0:
            dl_mask &= ctx.d2d <= p.cutoff_km
        b = np.nonzero(dl_mask)[0]
        fade = _rng.exp1_array(key, _rng.P_FADE_BS, b)
        i_dl = float(np.sum(p.p_bs_mw * fade * 10.0 ** (-pl_probe[b] / 10.0)))
        i_ul = 0.0
        if cells.size:
            v = sched_ue[cell_ul]
            if v.size:
                d = torus_distances(ue_xy[v, 0], ue_xy[v, 1], ctx.px, ctx.py, side)
                keep = d <= p.cutoff_km if p.cutoff_km > 0.0 else np.ones(v.size, bool)
                v, d = v[keep], d[keep]
                r = np.maximum(d, MIN_DISTANCE_KM)  # equal UE heights
                logr = np.log10(r)
                pl = np.where(r <= UE_UE_LOS_RANGE_KM,
                              _UU_LOS[0] + _UU_LOS[1] * logr,
                              _UU_NLOS[0] + _UU_NLOS[1] * logr)
                pwr = _ul_power_dbm(assoc.serving_pl_db[v], p)
                fade_u = _rng.exp1_array(key, _rng.P_FADE_UE, v)
                terms = 10.0 ** (pwr / 10.0) * fade_u * 10.0 ** (-pl / 10.0)
                i_ul = float(np.sum(terms))
        signal = p.p_bs_mw * h_sig * 10.0 ** (-pl_serv0 / 10.0)
        interference, noise = i_dl + i_ul, p.noise_ue_mw
    else:
        # receiver: the probe's serving BS
        d2d_bb, plos_bb, pll_bb, pln_bb = ctx.bs_to_bs_links(rt, s0)
        if p.cutoff_km > 0.0:
            dl_mask &= d2d_bb <= p.cutoff_km
        b = np.nonzero(dl_mask)[0]
        u = _rng.u01_array(key, _rng.P_LOS_BS_BS, b)
        pl_bb = np.where(u < plos_bb[b], pll_bb[b], pln_bb[b])
        fade = _rng.exp1_array(key, _rng.P_FADE_BS, b)
        dl_powers = p.p_bs_mw * fade * 10.0 ** (-pl_bb / 10.0)
        i_dl = ul_residual_dl_interference(dl_powers, p.ic_depth)
        i_ul = 0.0
        if cells.size:
            v = sched_ue[cell_ul]
            if v.size:
                d2u = torus_d2(ue_xy[v, 0], ue_xy[v, 1],
                               p.bs_x[s0], p.bs_y[s0], side)
                keep = np.sqrt(d2u) <= p.cutoff_km if p.cutoff_km > 0.0                     else np.ones(v.size, bool)
                v, d2u = v[keep], d2u[keep]
                r = np.maximum(np.sqrt(d2u + p.l_ue_bs_km**2), MIN_DISTANCE_KM)
                logr = np.log10(r)
                if p.model_3gpp:
                    pv = _p_los_bs(r)
                    uu = _rng.u01_array(key, _rng.P_LOS_UE_BS, v,
                                        np.full(v.size, s0, dtype=np.int64))
                    pl = np.where(uu < pv,
                                  _BU_LOS[0] + _BU_LOS[1] * logr,
                                  _BU_NLOS[0] + _BU_NLOS[1] * logr)
                else:
                    pl = _BU_NLOS[0] + _BU_NLOS[1] * logr
                pwr = _ul_power_dbm(assoc.serving_pl_db[v], p)
                fade_u = _rng.exp1_array(key, _rng.P_FADE_UE, v)
                i_ul = float(np.sum(10.0 ** (pwr / 10.0) * fade_u * 10.0 ** (-pl / 10.0)))
        probe_tx = float(_ul_power_dbm(pl_serv0, p))
        signal = 10.0 ** (probe_tx / 10.0) * h_sig * 10.0 ** (-pl_serv0 / 10.0)
        interference, noise = i_dl + i_ul, p.noise_bs_mw

    if not collect:
        return signal, interference, noise, None
    snapshot = {
        "ue_xy": ue_xy,
        "serving_bs": serving,
        "serving_pl_db": assoc.serving_pl_db,
        "active_bs": np.nonzero(active_mask)[0],
        "probe_cell": s0,
        "probe_cell_attached": int(np.count_nonzero(serving == s0)),
        "signal_fading": float(h_sig),
        "scheduled_cells": cells,
        "scheduled_ues": sched_ue,
        "cell_is_ul": is_ul_cell,
    }
    return signal, interference, noise, snapshot


def run_pixel(rt: Runtime, pixel_index: int, px: float, py: float, is_ul: bool,
              t0: int, count: int):
    """SINR components for trials t0..t0+count-1 of one probe location."""
    ctx = PixelContext(rt, pixel_index, px, py)
    p = rt.p
    sig = np.empty(count)
    itf = np.empty(count)
    noise = p.noise_bs_mw if is_ul else p.noise_ue_mw
    if p.full_load and not is_ul:
        _run_full_load_dl(rt, ctx, t0, count, sig, itf)
    else:
        for i in range(count):
            s, ifr, _, _ = simulate_trial(rt, ctx, t0 + i, is_ul)
            sig[i], itf[i] = s, ifr
    return sig / (itf + noise), sig, itf


def _run_full_load_dl(rt: Runtime, ctx: PixelContext, t0: int, count: int,
                      sig: np.ndarray, itf: np.ndarray):
    """Vectorized full-load downlink path (all BSs transmit, no UEs)."""
    p = rt.p
    n = p.n_bs
    g_los = p.p_bs_mw * 10.0 ** (-ctx.pl_los / 10.0)
    g_nlos = p.p_bs_mw * 10.0 ** (-ctx.pl_nlos / 10.0)
    in_range = np.ones(n, dtype=bool) if p.cutoff_km <= 0.0 else ctx.d2d <= p.cutoff_km
    bs_idx = np.arange(n)
    chunk = max(1, min(count, 1024 * 1024 // max(n, 1)))
    for lo in range(0, count, chunk):
        hi = min(lo + chunk, count)
        tt = np.arange(t0 + lo, t0 + hi)
        keys = np.array([_rng.trial_key(p.master_seed, ctx.pixel_index, int(t))
                         for t in tt], dtype=np.uint64)
        if p.model_3gpp:
            hL = _rng._fold_arr(_rng._fold_arr(
                _rng._mix64_arr(keys[:, None] ^ np.uint64(
                    (_rng.P_LOS_UE_BS * _rng.ABSORB_MULT) & _rng.MASK64)),
                np.zeros(1, dtype=np.uint64)), bs_idx.astype(np.uint64))
            u = ((hL >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
            los = u < ctx.plos
            g = np.where(los, g_los, g_nlos)
            pl = np.where(los, ctx.pl_los, ctx.pl_nlos)
            serving = np.argmin(pl, axis=1)
        else:
            g = np.broadcast_to(g_nlos, (hi - lo, n))
            serving = np.full(hi - lo, int(np.argmin(ctx.pl_nlos)))
        hF = _rng._fold_arr(_rng._fold_arr(
            _rng._mix64_arr(keys[:, None] ^ np.uint64(
                (_rng.P_FADE_BS * _rng.ABSORB_MULT) & _rng.MASK64)),
            bs_idx.astype(np.uint64)), np.zeros(1, dtype=np.uint64))
        fade = -np.log(((hF >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53)
        gh = g * fade
        total = np.sum(np.where(in_range, gh, 0.0), axis=1)
        rows = np.arange(hi - lo)
        own = np.where(in_range[serving], gh[rows, serving], 0.0)
        itf[lo:hi] = total - own
        # full load means one UE per cell, so PF coincides with RR here
        h_sig = np.array([-np.log(_rng.u01(int(k), _rng.P_FADE_SIGNAL, 0))
                          for k in keys])
        if p.model_3gpp:
            pl_own = np.where(
                u[rows, serving] < ctx.plos[serving],
                ctx.pl_los[serving], ctx.pl_nlos[serving])
        else:
            pl_own = ctx.pl_nlos[serving]
        sig[lo:hi] = p.p_bs_mw * h_sig * 10.0 ** (-pl_own / 10.0)
