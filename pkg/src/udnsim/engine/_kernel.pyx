# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled trial kernel.

Implements the draw protocol documented in engine.fallback with plain C
loops.  Association uses an exact pruned search over a spatial hash of the
BS layout: the best path loss seen so far bounds the radius any contender
could occupy (via the LoS law, which lower-bounds every path-loss curve),
and far rings are rejected with a cheap per-ring LoS-probability bound
before any transcendental is evaluated.  Results are identical to the
full-matrix association.
"""

from libc.math cimport exp, log, log10, sqrt, fmin, fmax, fabs
from libc.stdint cimport uint64_t, int64_t, int32_t, int8_t

import numpy as np

cdef double TWO_NEG53 = 1.0 / 9007199254740992.0
cdef double MIN_R_KM = 1e-6
cdef double LOS_BREAK = 0.0677
cdef double UE_UE_LOS = 0.05

cdef uint64_t ABSORB_MULT = 0xD1B54A32D192ED03UL
cdef uint64_t CHAIN_INIT = 0x9E3779B97F4A7C15UL

# purposes, mirroring udnsim.rng
cdef uint64_t P_UE_X = 3, P_UE_Y = 4, P_LOS_UE_BS = 5, P_LOS_BS_BS = 6
cdef uint64_t P_FADE_BS = 7, P_FADE_UE = 8, P_FADE_SIGNAL = 9
cdef uint64_t P_SCHED_RR = 10, P_SCHED_PF = 11, P_DIR = 12, P_COUNT = 13
cdef uint64_t TAG_TRIAL = 0x7B1A

# path-loss coefficients
cdef double BU_LA = 103.8, BU_LB = 20.9, BU_NA = 145.4, BU_NB = 37.5
cdef double BB_LA = 101.9, BB_LB = 40.0, BB_NA = 169.36, BB_NB = 40.0
cdef double UU_LA = 98.45, UU_LB = 20.0, UU_NA = 175.78, UU_NB = 40.0

cdef int BB_CACHE_SLOTS = 12


cdef inline uint64_t _mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9UL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBUL
    return z ^ (z >> 31)


cdef inline uint64_t _fold(uint64_t h, uint64_t w) nogil:
    return _mix64(h ^ (w * ABSORB_MULT))


cdef inline double _to_u(uint64_t h) nogil:
    return (<double>(h >> 11) + 0.5) * TWO_NEG53


cdef inline double _u01(uint64_t key, uint64_t purpose, uint64_t c1, uint64_t c2) nogil:
    return _to_u(_fold(_fold(_fold(key, purpose), c1), c2))


# partially folded forms: b1 = fold(fold(key, purpose), c1), b2 = fold(key, purpose)
cdef inline double _u01_b1(uint64_t b1, uint64_t c2) nogil:
    return _to_u(_fold(b1, c2))


cdef inline double _u01_b2(uint64_t b2, uint64_t c1, uint64_t c2) nogil:
    return _to_u(_fold(_fold(b2, c1), c2))


cdef inline double _wrap(double delta, double side) nogil:
    # |delta| < side holds for all callers (coordinates live in [0, side))
    cdef double d = fabs(delta)
    if d > 0.5 * side:
        d = side - d
    return d


cdef inline double _p_los_bs(double r) nogil:
    # piecewise-exponential LoS probability of BS links; r floored upstream
    if r <= LOS_BREAK:
        return 1.0 - 5.0 * exp(-0.156 / r)
    return 5.0 * exp(-r / 0.03)


def protocol_constants():
    """Constants shared with the Python implementation (consistency test)."""
    return {
        "ABSORB_MULT": int(ABSORB_MULT),
        "CHAIN_INIT": int(CHAIN_INIT),
        "TAG_TRIAL": int(TAG_TRIAL),
        "P_LOS_UE_BS": int(P_LOS_UE_BS),
        "P_FADE_BS": int(P_FADE_BS),
    }


def mix64(z):
    return int(_mix64(<uint64_t>(z & 0xFFFFFFFFFFFFFFFF)))


def u01(key, purpose, c1=0, c2=0):
    return _u01(<uint64_t>key, <uint64_t>purpose, <uint64_t>c1, <uint64_t>c2)


cdef class Runtime:
    """Prepared scenario state for the compiled backend."""

    cdef readonly int n
    cdef double side, l_km, gamma
    cdef double p_bs_mw, noise_ue_mw, noise_bs_mw, ue_max_dbm, cutoff, ue_mean
    cdef bint model_3gpp, imc, full_load, tdd, pf, ul_full, poisson
    cdef int ic_depth
    cdef int64_t m_bg, master_seed
    cdef double[::1] bs_x, bs_y
    cdef int g
    cdef double cs
    cdef int64_t[::1] grid_start, grid_order

    def __init__(self, params):
        self.n = params.n_bs
        self.side = params.side_km
        self.l_km = params.l_ue_bs_km
        self.gamma = params.gamma
        self.p_bs_mw = params.p_bs_mw
        self.noise_ue_mw = params.noise_ue_mw
        self.noise_bs_mw = params.noise_bs_mw
        self.ue_max_dbm = params.ue_max_tx_dbm
        self.cutoff = params.cutoff_km
        self.ue_mean = params.ue_mean
        self.model_3gpp = params.model_3gpp
        self.imc = params.imc
        self.full_load = params.full_load
        self.tdd = params.tdd
        self.pf = params.pf
        self.ul_full = params.ul_full_power
        self.poisson = params.poisson_ue_count
        self.ic_depth = params.ic_depth
        self.m_bg = params.m_background
        self.master_seed = params.master_seed
        self.bs_x = np.ascontiguousarray(params.bs_x, dtype=np.float64)
        self.bs_y = np.ascontiguousarray(params.bs_y, dtype=np.float64)
        self.g = params.spatial.cells_per_side
        self.cs = params.spatial.cell_size_km
        self.grid_start = np.ascontiguousarray(params.spatial.start, dtype=np.int64)
        self.grid_order = np.ascontiguousarray(params.spatial.order, dtype=np.int64)


cdef struct Work:
    # probe->BS link tables (per pixel)
    double *d2d
    double *plos_p
    double *pl_los_p
    double *pl_nlos_p
    double *g_los_p       # p_bs * 10^(-pl/10), linear gains
    double *g_nlos_p
    # per-trial scratch
    double *ue_x
    double *ue_y
    int32_t *serving
    double *pl_serv
    int64_t *bs_stamp
    int32_t *attach_cnt
    int32_t *cell_off
    int32_t *cell_cur
    int32_t *attached
    int32_t *sched_ue
    int8_t *cell_ul
    int64_t *cell_stamp
    double *powers_dl
    # BS->BS receiver cache
    int64_t *bb_s0
    double *bb_d2d
    double *bb_plos
    double *bb_glos
    double *bb_gnlos
    int bb_used
    int bb_next
    int64_t mmax
    int64_t cell_epoch
    int64_t trial_epoch


cdef inline int _cell_of(Runtime rt, double x, double y) nogil:
    cdef int cx = <int>(x / rt.cs)
    cdef int cy = <int>(y / rt.cs)
    if cx >= rt.g:
        cx = rt.g - 1
    if cy >= rt.g:
        cy = rt.g - 1
    return cx * rt.g + cy


cdef int _associate_ue(Runtime rt, Work *w, double x, double y,
                       uint64_t base_los, double *out_pl) nogil:
    """Min-path-loss serving BS for one UE; exact pruned ring search.

    base_los = fold(fold(trial key, P_LOS_UE_BS), ue index).
    """
    cdef int g = rt.g
    cdef double cs = rt.cs
    cdef double side = rt.side
    cdef double l2 = rt.l_km * rt.l_km
    cdef double best_pl = 1e300
    cdef int best_j = -1
    cdef double best_d2 = 1e300
    cdef double r_los_cut2 = 1e300, r_nlos_cut2 = 1e300
    cdef int cx = <int>(x / cs), cy = <int>(y / cs)
    cdef int q, ox, oy, ccx, ccy, cell, j
    cdef int64_t s, e, k
    cdef double ring_d, ring_r, ring_p, dx, dy, d2, r2, rf, u, p, pl, cut
    cdef int visited = 0, total_cells = g * g
    if cx >= g:
        cx = g - 1
    if cy >= g:
        cy = g - 1

    w.cell_epoch += 1
    q = 0
    while True:
        if q > 0:
            ring_d = (q - 1) * cs
            if rt.model_3gpp:
                if ring_d * ring_d + l2 > r_los_cut2:
                    break
            else:
                if ring_d * ring_d > best_d2:
                    break
            ring_r = sqrt(ring_d * ring_d + l2)
            ring_p = 1.0
            if ring_r > LOS_BREAK:
                ring_p = 5.0 * exp(-ring_r / 0.03) * (1.0 + 1e-9)
        else:
            ring_p = 1.0
        if visited >= total_cells:
            break
        # enumerate the Chebyshev ring at radius q (deduped when wrapping)
        for ox in range(-q, q + 1):
            oy = -q
            while oy <= q:
                if q > 0 and -q < ox < q and -q < oy < q:
                    oy += 1
                    continue
                ccx = (cx + ox) % g
                if ccx < 0:
                    ccx += g
                ccy = (cy + oy) % g
                if ccy < 0:
                    ccy += g
                cell = ccx * g + ccy
                if w.cell_stamp[cell] == w.cell_epoch:
                    oy += 1
                    continue
                w.cell_stamp[cell] = w.cell_epoch
                visited += 1
                s = rt.grid_start[cell]
                e = rt.grid_start[cell + 1]
                for k in range(s, e):
                    j = <int>rt.grid_order[k]
                    dx = _wrap(x - rt.bs_x[j], side)
                    dy = _wrap(y - rt.bs_y[j], side)
                    d2 = dx * dx + dy * dy
                    if not rt.model_3gpp:
                        if d2 < best_d2 or (d2 == best_d2 and j < best_j):
                            best_d2 = d2
                            best_j = j
                        continue
                    r2 = d2 + l2
                    if r2 > r_los_cut2:
                        continue
                    if r2 > r_nlos_cut2:
                        # only a LoS draw could beat the current best
                        u = _u01_b1(base_los, <uint64_t>j)
                        if u >= ring_p:
                            continue
                        rf = fmax(sqrt(r2), MIN_R_KM)
                        p = _p_los_bs(rf)
                        if u >= p:
                            continue
                        pl = BU_LA + BU_LB * log10(rf)
                    else:
                        rf = fmax(sqrt(r2), MIN_R_KM)
                        u = _u01_b1(base_los, <uint64_t>j)
                        p = _p_los_bs(rf)
                        if u < p:
                            pl = BU_LA + BU_LB * log10(rf)
                        else:
                            pl = BU_NA + BU_NB * log10(rf)
                    if pl < best_pl or (pl == best_pl and j < best_j):
                        best_pl = pl
                        best_j = j
                        cut = 10.0 ** ((best_pl - BU_LA) / BU_LB) * (1.0 + 1e-12)
                        r_los_cut2 = cut * cut
                        cut = 10.0 ** ((best_pl - BU_NA) / BU_NB) * (1.0 + 1e-12)
                        r_nlos_cut2 = cut * cut
                oy += 1
        q += 1
        if q > 2 * g:
            break

    if not rt.model_3gpp:
        rf = fmax(sqrt(best_d2 + l2), MIN_R_KM)
        best_pl = BU_NA + BU_NB * log10(rf)
    out_pl[0] = best_pl
    return best_j


cdef void _bb_tables(Runtime rt, Work *w, int s0, double **d2d, double **plos,
                     double **glos, double **gnlos) nogil:
    """Per-receiver BS->BS link tables, cached across trials of a pixel."""
    cdef int slot = -1, i, b
    cdef double dx, dy, d, rf, pl
    for i in range(w.bb_used):
        if w.bb_s0[i] == s0:
            slot = i
            break
    if slot < 0:
        if w.bb_used < BB_CACHE_SLOTS:
            slot = w.bb_used
            w.bb_used += 1
        else:
            slot = w.bb_next
            w.bb_next = (w.bb_next + 1) % BB_CACHE_SLOTS
        w.bb_s0[slot] = s0
        for b in range(rt.n):
            dx = _wrap(rt.bs_x[b] - rt.bs_x[s0], rt.side)
            dy = _wrap(rt.bs_y[b] - rt.bs_y[s0], rt.side)
            d = sqrt(dx * dx + dy * dy)
            rf = fmax(d, MIN_R_KM)
            w.bb_d2d[slot * rt.n + b] = d
            if rt.model_3gpp:
                w.bb_plos[slot * rt.n + b] = _p_los_bs(rf)
                pl = BB_LA + BB_LB * log10(rf)
                w.bb_glos[slot * rt.n + b] = rt.p_bs_mw * 10.0 ** (-pl / 10.0)
                pl = BB_NA + BB_NB * log10(rf)
                w.bb_gnlos[slot * rt.n + b] = rt.p_bs_mw * 10.0 ** (-pl / 10.0)
            else:
                w.bb_plos[slot * rt.n + b] = 0.0
                pl = BU_NA + BU_NB * log10(rf)
                w.bb_glos[slot * rt.n + b] = rt.p_bs_mw * 10.0 ** (-pl / 10.0)
                w.bb_gnlos[slot * rt.n + b] = w.bb_glos[slot * rt.n + b]
    d2d[0] = w.bb_d2d + slot * rt.n
    plos[0] = w.bb_plos + slot * rt.n
    glos[0] = w.bb_glos + slot * rt.n
    gnlos[0] = w.bb_gnlos + slot * rt.n


cdef void _run_trial(Runtime rt, Work *w, int64_t pixel_index, double px, double py,
                     bint is_ul, int64_t t, double *out_sig, double *out_itf) nogil:
    cdef uint64_t key = _fold(_fold(_fold(_fold(
        CHAIN_INIT, <uint64_t>rt.master_seed), TAG_TRIAL),
        <uint64_t>pixel_index), <uint64_t>t)
    cdef uint64_t base_los_ue = _fold(key, P_LOS_UE_BS)
    cdef uint64_t base_probe_los = _fold(base_los_ue, 0)
    cdef uint64_t base_fade_bs = _fold(key, P_FADE_BS)
    cdef uint64_t base_fade_ue = _fold(key, P_FADE_UE)
    cdef uint64_t base_los_bb = _fold(key, P_LOS_BS_BS)
    cdef int n = rt.n
    cdef int64_t m, u, v
    cdef int b, s0, k0, c, kcell, idx, cnt_dl, i, worst
    cdef double acc, total_dl, total_ul, h_sig, pl, pl0, fade, d, d2u, dx, dy, rf
    cdef double uu, p, pw, best, sig, probe_dbm
    cdef double *bb_d2d
    cdef double *bb_plos
    cdef double *bb_glos
    cdef double *bb_gnlos
    cdef bint all_active = rt.full_load or (not rt.imc)

    # 1. background UE count and positions
    if rt.full_load:
        m = 0
    elif rt.poisson:
        m = 0
        acc = 0.0
        while m < w.mmax - 1:
            acc += -log(_u01(key, P_COUNT, <uint64_t>m, 0))
            if acc > rt.ue_mean:
                break
            m += 1
    else:
        m = rt.m_bg
    w.ue_x[0] = px
    w.ue_y[0] = py
    for u in range(1, m + 1):
        w.ue_x[u] = _u01(key, P_UE_X, <uint64_t>(u - 1), 0) * rt.side
        w.ue_y[u] = _u01(key, P_UE_Y, <uint64_t>(u - 1), 0) * rt.side

    # 2. association; attach counts are stamped per trial
    w.trial_epoch += 1
    for u in range(0, m + 1):
        b = _associate_ue(rt, w, w.ue_x[u], w.ue_y[u],
                          _fold(base_los_ue, <uint64_t>u), &pl)
        w.serving[u] = b
        w.pl_serv[u] = pl
        if w.bs_stamp[b] != w.trial_epoch:
            w.bs_stamp[b] = w.trial_epoch
            w.attach_cnt[b] = 0
        w.attach_cnt[b] += 1
    s0 = w.serving[0]
    pl0 = w.pl_serv[0]

    # 3. probe serving-link fading (PF: max of K draws = -log of the min)
    k0 = w.attach_cnt[s0] if rt.pf else 1
    best = 2.0
    for c in range(k0):
        uu = _u01(key, P_FADE_SIGNAL, <uint64_t>c, 0)
        if uu < best:
            best = uu
    h_sig = -log(best)

    # 4. dynamic-TDD scheduling of the other cells
    if rt.tdd and m > 0:
        idx = 0
        for b in range(n):
            if w.bs_stamp[b] == w.trial_epoch:
                w.cell_off[b] = idx
                w.cell_cur[b] = idx
                idx += w.attach_cnt[b]
        for u in range(0, m + 1):
            b = w.serving[u]
            w.attached[w.cell_cur[b]] = <int32_t>u
            w.cell_cur[b] += 1
        for b in range(n):
            if w.bs_stamp[b] != w.trial_epoch or b == s0:
                continue
            kcell = w.attach_cnt[b]
            if rt.pf:
                v = w.attached[w.cell_off[b]]
                best = _u01(key, P_SCHED_PF, <uint64_t>v, 0)
                for i in range(1, kcell):
                    u = w.attached[w.cell_off[b] + i]
                    uu = _u01(key, P_SCHED_PF, <uint64_t>u, 0)
                    if uu < best:
                        best = uu
                        v = u
            else:
                idx = <int>(_u01(key, P_SCHED_RR, <uint64_t>b, 0) * kcell)
                if idx > kcell - 1:
                    idx = kcell - 1
                v = w.attached[w.cell_off[b] + idx]
            w.sched_ue[b] = <int32_t>v
            w.cell_ul[b] = 1 if _u01(key, P_DIR, <uint64_t>v, 0) >= 0.5 else 0

    # 5. interference and signal
    total_dl = 0.0
    total_ul = 0.0
    if not is_ul:
        for b in range(n):
            if b == s0:
                continue
            if not all_active and w.bs_stamp[b] != w.trial_epoch:
                continue
            if rt.tdd and m > 0 and w.bs_stamp[b] == w.trial_epoch and w.cell_ul[b]:
                continue
            if rt.cutoff > 0.0 and w.d2d[b] > rt.cutoff:
                continue
            if rt.model_3gpp and _u01_b1(base_probe_los, <uint64_t>b) < w.plos_p[b]:
                pw = w.g_los_p[b]
            else:
                pw = w.g_nlos_p[b]
            fade = -log(_u01_b2(base_fade_bs, <uint64_t>b, 0))
            total_dl += pw * fade
        if rt.tdd and m > 0:
            for b in range(n):
                if b == s0 or w.bs_stamp[b] != w.trial_epoch or not w.cell_ul[b]:
                    continue
                v = w.sched_ue[b]
                dx = _wrap(w.ue_x[v] - px, rt.side)
                dy = _wrap(w.ue_y[v] - py, rt.side)
                d = sqrt(dx * dx + dy * dy)
                if rt.cutoff > 0.0 and d > rt.cutoff:
                    continue
                rf = fmax(d, MIN_R_KM)
                if rf <= UE_UE_LOS:
                    pl = UU_LA + UU_LB * log10(rf)
                else:
                    pl = UU_NA + UU_NB * log10(rf)
                if rt.ul_full:
                    probe_dbm = rt.ue_max_dbm
                else:
                    probe_dbm = fmin(-59.0 + 0.8 * w.pl_serv[v], rt.ue_max_dbm)
                fade = -log(_u01_b2(base_fade_ue, <uint64_t>v, 0))
                total_ul += 10.0 ** (probe_dbm / 10.0) * fade * 10.0 ** (-pl / 10.0)
        sig = rt.p_bs_mw * h_sig * 10.0 ** (-pl0 / 10.0)
    else:
        _bb_tables(rt, w, s0, &bb_d2d, &bb_plos, &bb_glos, &bb_gnlos)
        cnt_dl = 0
        for b in range(n):
            if b == s0:
                continue
            if not all_active and w.bs_stamp[b] != w.trial_epoch:
                continue
            if rt.tdd and m > 0 and w.bs_stamp[b] == w.trial_epoch and w.cell_ul[b]:
                continue
            if rt.cutoff > 0.0 and bb_d2d[b] > rt.cutoff:
                continue
            if rt.model_3gpp and _u01_b2(base_los_bb, <uint64_t>b, 0) < bb_plos[b]:
                pw = bb_glos[b]
            else:
                pw = bb_gnlos[b]
            fade = -log(_u01_b2(base_fade_bs, <uint64_t>b, 0))
            w.powers_dl[cnt_dl] = pw * fade
            cnt_dl += 1
        for c in range(rt.ic_depth):
            if cnt_dl == 0:
                break
            worst = -1
            best = -1.0
            for i in range(cnt_dl):
                if w.powers_dl[i] > best:
                    best = w.powers_dl[i]
                    worst = i
            if worst < 0:
                break
            w.powers_dl[worst] = -1.0
        for i in range(cnt_dl):
            if w.powers_dl[i] >= 0.0:
                total_dl += w.powers_dl[i]
        if rt.tdd and m > 0:
            for b in range(n):
                if b == s0 or w.bs_stamp[b] != w.trial_epoch or not w.cell_ul[b]:
                    continue
                v = w.sched_ue[b]
                dx = _wrap(w.ue_x[v] - rt.bs_x[s0], rt.side)
                dy = _wrap(w.ue_y[v] - rt.bs_y[s0], rt.side)
                d2u = dx * dx + dy * dy
                if rt.cutoff > 0.0 and sqrt(d2u) > rt.cutoff:
                    continue
                rf = fmax(sqrt(d2u + rt.l_km * rt.l_km), MIN_R_KM)
                if rt.model_3gpp:
                    uu = _u01_b2(base_los_ue, <uint64_t>v, <uint64_t>s0)
                    p = _p_los_bs(rf)
                    if uu < p:
                        pl = BU_LA + BU_LB * log10(rf)
                    else:
                        pl = BU_NA + BU_NB * log10(rf)
                else:
                    pl = BU_NA + BU_NB * log10(rf)
                if rt.ul_full:
                    probe_dbm = rt.ue_max_dbm
                else:
                    probe_dbm = fmin(-59.0 + 0.8 * w.pl_serv[v], rt.ue_max_dbm)
                fade = -log(_u01_b2(base_fade_ue, <uint64_t>v, 0))
                total_ul += 10.0 ** (probe_dbm / 10.0) * fade * 10.0 ** (-pl / 10.0)
        if rt.ul_full:
            probe_dbm = rt.ue_max_dbm
        else:
            probe_dbm = fmin(-59.0 + 0.8 * pl0, rt.ue_max_dbm)
        sig = 10.0 ** (probe_dbm / 10.0) * h_sig * 10.0 ** (-pl0 / 10.0)

    out_sig[0] = sig
    out_itf[0] = total_dl + total_ul


def run_pixel(Runtime rt, pixel_index, px, py, is_ul, t0, count):
    """SINR, signal and interference (mW) for `count` trials of one pixel."""
    cdef int n = rt.n
    cdef int64_t pix = pixel_index
    cdef double fpx = px, fpy = py
    cdef bint ul = bool(is_ul)
    cdef int64_t start = t0
    cdef int64_t cnt = count
    cdef int64_t mmax = rt.m_bg + 1
    if rt.poisson:
        mmax = <int64_t>(rt.ue_mean * 3.0) + 64
    cdef int gcells = rt.g * rt.g

    sinr_np = np.empty(cnt, dtype=np.float64)
    sig_np = np.empty(cnt, dtype=np.float64)
    itf_np = np.empty(cnt, dtype=np.float64)

    d2d_np = np.empty(n); plos_np = np.empty(n)
    pll_np = np.empty(n); pln_np = np.empty(n)
    gl_np = np.empty(n); gn_np = np.empty(n)
    uex_np = np.empty(mmax); uey_np = np.empty(mmax)
    serving_np = np.empty(mmax, dtype=np.int32)
    plserv_np = np.empty(mmax)
    bs_stamp_np = np.zeros(n, dtype=np.int64)
    attach_np = np.zeros(n, dtype=np.int32)
    cell_off_np = np.zeros(n, dtype=np.int32)
    cell_cur_np = np.zeros(n, dtype=np.int32)
    attached_np = np.zeros(mmax, dtype=np.int32)
    sched_np = np.zeros(n, dtype=np.int32)
    cell_ul_np = np.zeros(n, dtype=np.int8)
    cell_stamp_np = np.zeros(gcells, dtype=np.int64)
    powers_np = np.empty(n)
    bb_s0_np = np.full(BB_CACHE_SLOTS, -1, dtype=np.int64)
    bb_d2d_np = np.empty(BB_CACHE_SLOTS * n)
    bb_plos_np = np.empty(BB_CACHE_SLOTS * n)
    bb_glos_np = np.empty(BB_CACHE_SLOTS * n)
    bb_gnlos_np = np.empty(BB_CACHE_SLOTS * n)

    cdef double[::1] sinr = sinr_np, sigv = sig_np, itfv = itf_np
    cdef double[::1] d2d = d2d_np, plos = plos_np
    cdef double[::1] pll = pll_np, pln = pln_np, gl = gl_np, gn = gn_np
    cdef double[::1] uex = uex_np, uey = uey_np, plserv = plserv_np
    cdef int32_t[::1] serving = serving_np, attach = attach_np
    cdef int32_t[::1] cell_off = cell_off_np, cell_cur = cell_cur_np
    cdef int32_t[::1] attached = attached_np, sched = sched_np
    cdef int8_t[::1] cell_ul = cell_ul_np
    cdef int64_t[::1] bs_stamp = bs_stamp_np, cell_stamp = cell_stamp_np
    cdef double[::1] powers = powers_np
    cdef int64_t[::1] bb_s0 = bb_s0_np
    cdef double[::1] bb_d2d = bb_d2d_np, bb_plos = bb_plos_np
    cdef double[::1] bb_glos = bb_glos_np, bb_gnlos = bb_gnlos_np

    cdef Work w
    w.d2d = &d2d[0]; w.plos_p = &plos[0]
    w.pl_los_p = &pll[0]; w.pl_nlos_p = &pln[0]
    w.g_los_p = &gl[0]; w.g_nlos_p = &gn[0]
    w.ue_x = &uex[0]; w.ue_y = &uey[0]
    w.serving = &serving[0]; w.pl_serv = &plserv[0]
    w.bs_stamp = &bs_stamp[0]; w.attach_cnt = &attach[0]
    w.cell_off = &cell_off[0]; w.cell_cur = &cell_cur[0]
    w.attached = &attached[0]; w.sched_ue = &sched[0]; w.cell_ul = &cell_ul[0]
    w.cell_stamp = &cell_stamp[0]; w.powers_dl = &powers[0]
    w.bb_s0 = &bb_s0[0]; w.bb_d2d = &bb_d2d[0]; w.bb_plos = &bb_plos[0]
    w.bb_glos = &bb_glos[0]; w.bb_gnlos = &bb_gnlos[0]
    w.bb_used = 0; w.bb_next = 0; w.mmax = mmax; w.cell_epoch = 0; w.trial_epoch = 0

    cdef int b
    cdef int64_t t
    cdef double dx, dy, d, d2, rf
    cdef double noise = rt.noise_bs_mw if ul else rt.noise_ue_mw
    with nogil:
        for b in range(n):
            dx = _wrap(fpx - rt.bs_x[b], rt.side)
            dy = _wrap(fpy - rt.bs_y[b], rt.side)
            d2 = dx * dx + dy * dy
            d = sqrt(d2)
            rf = fmax(sqrt(d2 + rt.l_km * rt.l_km), MIN_R_KM)
            w.d2d[b] = d
            if rt.model_3gpp:
                w.plos_p[b] = _p_los_bs(rf)
                w.pl_los_p[b] = BU_LA + BU_LB * log10(rf)
                w.pl_nlos_p[b] = BU_NA + BU_NB * log10(rf)
            else:
                w.plos_p[b] = 0.0
                w.pl_los_p[b] = BU_NA + BU_NB * log10(rf)
                w.pl_nlos_p[b] = w.pl_los_p[b]
            w.g_los_p[b] = rt.p_bs_mw * 10.0 ** (-w.pl_los_p[b] / 10.0)
            w.g_nlos_p[b] = rt.p_bs_mw * 10.0 ** (-w.pl_nlos_p[b] / 10.0)
        for t in range(cnt):
            _run_trial(rt, &w, pix, fpx, fpy, ul, start + t,
                       &sigv[t], &itfv[t])
            sinr[t] = sigv[t] / (itfv[t] + noise)
    return sinr_np, sig_np, itf_np
