"""Independent straight-line reimplementation of one simulation trial.

Used as the oracle for engine equivalence tests.  Deliberately primitive:
pure Python arithmetic with the math module, Python-int 64-bit mixing,
full O(UEs x BSs) loops, no spatial pruning, no caching.  Only the draw
addressing scheme is shared knowledge with the engine (it is the
documented protocol); everything else is re-derived from the model
constants.
"""

import math

MASK = (1 << 64) - 1
ABSORB = 0xD1B54A32D192ED03
INIT = 0x9E3779B97F4A7C15
TAG_TRIAL = 0x7B1A

P_UE_X, P_UE_Y = 3, 4
P_LOS_UE_BS, P_LOS_BS_BS = 5, 6
P_FADE_BS, P_FADE_UE, P_FADE_SIGNAL = 7, 8, 9
P_SCHED_RR, P_SCHED_PF, P_DIR, P_COUNT = 10, 11, 12, 13


def mix64(z):
    z &= MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def fold(h, w):
    return mix64(h ^ ((w * ABSORB) & MASK))


def u01(key, purpose, c1=0, c2=0):
    h = fold(fold(fold(key, purpose), c1), c2)
    return ((h >> 11) + 0.5) * 2.0**-53


def exp1(key, purpose, c1=0, c2=0):
    return -math.log(u01(key, purpose, c1, c2))


def wrap(delta, side):
    d = abs(delta)
    return side - d if d > 0.5 * side else d


def p_los_bs(r):
    if r <= 0.0677:
        return 1.0 - 5.0 * math.exp(-0.156 / r)
    return 5.0 * math.exp(-r / 0.03)


def pl_bs_ue(los, r):
    return 103.8 + 20.9 * math.log10(r) if los else 145.4 + 37.5 * math.log10(r)


def pl_bs_bs(los, r):
    return 101.9 + 40.0 * math.log10(r) if los else 169.36 + 40.0 * math.log10(r)


def pl_ue_ue(r):
    if r <= 0.05:
        return 98.45 + 20.0 * math.log10(r)
    return 175.78 + 40.0 * math.log10(r)


def pl_single_slope(r):
    return 145.4 + 37.5 * math.log10(r)


def ul_power_dbm(pl, full_power, ue_max):
    if full_power:
        return ue_max
    return min(-59.0 + 0.8 * pl, ue_max)


def trial_components(sc, pixel_index, trial_index, probe_xy, is_ul):
    """(signal_mw, interference_mw, noise_mw) for one trial.

    `sc` is a plain dict: side, bs (list of (x, y)), l_km, model_3gpp,
    imc, full_load, tdd, pf, ic_depth, ul_full, m_bg, p_bs_mw,
    noise_ue_mw, noise_bs_mw, ue_max_dbm, seed, cutoff (None or km).
    """
    key = fold(fold(fold(fold(INIT, sc["seed"]), TAG_TRIAL), pixel_index), trial_index)
    side = sc["side"]
    bs = sc["bs"]
    n = len(bs)
    l_km = sc["l_km"]
    cutoff = sc.get("cutoff")

    m = 0 if sc["full_load"] else sc["m_bg"]
    ue = [probe_xy] + [
        (u01(key, P_UE_X, u - 1) * side, u01(key, P_UE_Y, u - 1) * side)
        for u in range(1, m + 1)
    ]

    # association: minimum sampled path loss over every BS
    serving, serving_pl = [], []
    for u, (ux, uy) in enumerate(ue):
        best_pl, best_j = None, None
        for j, (bx, by) in enumerate(bs):
            dx, dy = wrap(ux - bx, side), wrap(uy - by, side)
            r = max(math.sqrt((dx * dx + dy * dy) + l_km * l_km), 1e-6)
            if sc["model_3gpp"]:
                los = u01(key, P_LOS_UE_BS, u, j) < p_los_bs(r)
                pl = pl_bs_ue(los, r)
            else:
                pl = pl_single_slope(r)
            if best_pl is None or pl < best_pl:
                best_pl, best_j = pl, j
        serving.append(best_j)
        serving_pl.append(best_pl)
    s0, pl0 = serving[0], serving_pl[0]

    all_active = sc["full_load"] or not sc["imc"]
    active = set(range(n)) if all_active else set(serving)

    k0 = serving.count(s0) if sc["pf"] else 1
    h_sig = -math.log(min(u01(key, P_FADE_SIGNAL, c) for c in range(k0)))

    # dynamic-TDD scheduling of the other busy cells
    sched, cell_ul = {}, {}
    if sc["tdd"] and m > 0:
        for b in set(serving):
            if b == s0:
                continue
            attached = [u for u in range(m + 1) if serving[u] == b]
            if sc["pf"]:
                v = min(attached, key=lambda u: (u01(key, P_SCHED_PF, u), u))
            else:
                idx = int(u01(key, P_SCHED_RR, b) * len(attached))
                v = attached[min(idx, len(attached) - 1)]
            sched[b] = v
            cell_ul[b] = u01(key, P_DIR, v) >= 0.5

    def is_ul_cell(b):
        return cell_ul.get(b, False)

    p_bs = sc["p_bs_mw"]
    if not is_ul:
        itf = 0.0
        for b in range(n):
            if b == s0 or b not in active or is_ul_cell(b):
                continue
            bx, by = bs[b]
            dx, dy = wrap(probe_xy[0] - bx, side), wrap(probe_xy[1] - by, side)
            d2 = dx * dx + dy * dy
            if cutoff is not None and math.sqrt(d2) > cutoff:
                continue
            r = max(math.sqrt(d2 + l_km * l_km), 1e-6)
            if sc["model_3gpp"]:
                los = u01(key, P_LOS_UE_BS, 0, b) < p_los_bs(r)
                pl = pl_bs_ue(los, r)
            else:
                pl = pl_single_slope(r)
            itf += p_bs * exp1(key, P_FADE_BS, b) * 10.0 ** (-pl / 10.0)
        for b in range(n):
            if b == s0 or not is_ul_cell(b):
                continue
            v = sched[b]
            dx = wrap(ue[v][0] - probe_xy[0], side)
            dy = wrap(ue[v][1] - probe_xy[1], side)
            d = math.sqrt(dx * dx + dy * dy)
            if cutoff is not None and d > cutoff:
                continue
            r = max(d, 1e-6)
            pl = pl_ue_ue(r) if sc["model_3gpp"] else pl_single_slope(r)
            pwr = ul_power_dbm(serving_pl[v], sc["ul_full"], sc["ue_max_dbm"])
            itf += 10.0 ** (pwr / 10.0) * exp1(key, P_FADE_UE, v) * 10.0 ** (-pl / 10.0)
        signal = p_bs * h_sig * 10.0 ** (-pl0 / 10.0)
        return signal, itf, sc["noise_ue_mw"]

    # uplink: the receiver is the probe's serving BS
    rx, ry = bs[s0]
    dl_terms = []
    for b in range(n):
        if b == s0 or b not in active or is_ul_cell(b):
            continue
        dx, dy = wrap(bs[b][0] - rx, side), wrap(bs[b][1] - ry, side)
        d = math.sqrt(dx * dx + dy * dy)
        if cutoff is not None and d > cutoff:
            continue
        r = max(d, 1e-6)
        if sc["model_3gpp"]:
            los = u01(key, P_LOS_BS_BS, b) < p_los_bs(r)
            pl = pl_bs_bs(los, r)
        else:
            pl = pl_single_slope(r)
        dl_terms.append((b, p_bs * exp1(key, P_FADE_BS, b) * 10.0 ** (-pl / 10.0)))
    removed = {b for b, _ in sorted(dl_terms, key=lambda t: (-t[1], t[0]))[:sc["ic_depth"]]}
    itf = sum(p for b, p in dl_terms if b not in removed)
    for b in range(n):
        if b == s0 or not is_ul_cell(b):
            continue
        v = sched[b]
        dx, dy = wrap(ue[v][0] - rx, side), wrap(ue[v][1] - ry, side)
        d2 = dx * dx + dy * dy
        if cutoff is not None and math.sqrt(d2) > cutoff:
            continue
        r = max(math.sqrt(d2 + l_km * l_km), 1e-6)
        if sc["model_3gpp"]:
            los = u01(key, P_LOS_UE_BS, v, s0) < p_los_bs(r)
            pl = pl_bs_ue(los, r)
        else:
            pl = pl_single_slope(r)
        pwr = ul_power_dbm(serving_pl[v], sc["ul_full"], sc["ue_max_dbm"])
        itf += 10.0 ** (pwr / 10.0) * exp1(key, P_FADE_UE, v) * 10.0 ** (-pl / 10.0)
    probe_dbm = ul_power_dbm(pl0, sc["ul_full"], sc["ue_max_dbm"])
    signal = 10.0 ** (probe_dbm / 10.0) * h_sig * 10.0 ** (-pl0 / 10.0)
    return signal, itf, sc["noise_bs_mw"]


def scenario_dict(config, deployment):
    """Flatten a ScenarioConfig + Deployment for the oracle."""
    from udnsim.channel import dbm_to_mw
    from udnsim.config import DuplexMode, SchedulerKind, UlPowerMode
    from udnsim.channel import ChannelModel

    return {
        "side": config.side_km,
        "bs": list(zip(deployment.bs_x.tolist(), deployment.bs_y.tolist())),
        "l_km": deployment.delta_h_m / 1000.0,
        "model_3gpp": config.channel_model is ChannelModel.THREE_GPP_LOS_NLOS,
        "imc": config.imc_enabled,
        "full_load": config.full_load,
        "tdd": config.duplex is DuplexMode.DYNAMIC_TDD,
        "pf": config.scheduler is SchedulerKind.PROPORTIONAL_FAIR,
        "ic_depth": config.ic_depth,
        "ul_full": config.ul_power_mode is UlPowerMode.FULL_POWER,
        "m_bg": config.n_background_ues,
        "p_bs_mw": dbm_to_mw(config.powers.bs_tx_dbm),
        "noise_ue_mw": dbm_to_mw(config.powers.noise_at_ue_dbm),
        "noise_bs_mw": dbm_to_mw(config.powers.noise_at_bs_dbm),
        "ue_max_dbm": config.powers.ue_max_tx_dbm,
        "seed": config.master_seed,
        "cutoff": config.cutoff_km,
    }
