import numpy as np
import pytest

from udnsim import rng
from udnsim.config import Direction, DuplexMode, SchedulerKind, UlPowerMode
from udnsim.mac import (
    MacError,
    assign_directions,
    pf_select,
    probe_signal_fading,
    schedule_cell,
    ul_tx_power_dbm,
)


class TestDirections:
    def test_balanced_split(self):
        key = rng.trial_key(5, 0, 0)
        dirs = assign_directions(100001, DuplexMode.DYNAMIC_TDD, Direction.DL, key)
        frac_dl = np.mean(dirs[1:] == 0)
        assert abs(frac_dl - 0.5) < 0.005

    def test_probe_override(self):
        key = rng.trial_key(5, 0, 1)
        dirs = assign_directions(10, DuplexMode.DYNAMIC_TDD, Direction.UL, key)
        assert dirs[0] == 1

    def test_downlink_only(self):
        key = rng.trial_key(5, 0, 2)
        dirs = assign_directions(50, DuplexMode.DOWNLINK_ONLY, Direction.DL, key)
        assert (dirs == 0).all()


class TestScheduler:
    def test_pf_select_argmax(self):
        assert pf_select(np.array([4, 7, 9]), np.array([0.2, 1.7, 0.9])) == 7

    def test_single_ue_under_both(self):
        key = rng.trial_key(1, 0, 0)
        for kind in SchedulerKind:
            assert schedule_cell(np.array([42]), kind, 0, key) == 42

    def test_empty_cell_rejected(self):
        with pytest.raises(MacError):
            schedule_cell(np.array([], dtype=int), SchedulerKind.ROUND_ROBIN, 0, 1)

    def test_member_of_attached(self):
        attached = np.array([3, 11, 17, 29])
        for t in range(300):
            key = rng.trial_key(7, 0, t)
            for kind in SchedulerKind:
                assert schedule_cell(attached, kind, 5, key) in attached

    def test_rr_uniform(self):
        attached = np.array([0, 1, 2, 3])
        counts = np.zeros(4)
        for t in range(40000):
            key = rng.trial_key(13, 0, t)
            counts[schedule_cell(attached, SchedulerKind.ROUND_ROBIN, 2, key)] += 1
        assert np.all(np.abs(counts / 40000 - 0.25) < 0.01)

    def test_pf_probe_fading_harmonic_mean(self):
        # max of K unit exponentials has mean H_K; for K = 4 that is 25/12
        total = 0.0
        n = 200000
        for t in range(n):
            key = rng.trial_key(3, 1, t)
            total += probe_signal_fading(SchedulerKind.PROPORTIONAL_FAIR, 4, key)
        h4 = 1 + 0.5 + 1 / 3 + 0.25
        assert abs(total / n - h4) < 0.01

    def test_probe_fading_k1_exponential(self):
        vals = []
        for t in range(100000):
            key = rng.trial_key(3, 2, t)
            vals.append(probe_signal_fading(SchedulerKind.ROUND_ROBIN, 5, key))
        vals = np.array(vals)
        assert abs(vals.mean() - 1.0) < 0.01  # RR ignores the attached count


class TestUlPower:
    def test_fractional_compensation(self):
        assert ul_tx_power_dbm(100.0, UlPowerMode.FRACTIONAL) == pytest.approx(21.0)

    def test_clipping(self):
        # -59 + 0.8 * 107.9 = 27.32 -> clipped
        assert ul_tx_power_dbm(107.9, UlPowerMode.FRACTIONAL) == 23.0

    def test_full_power(self):
        for pl in (10.0, 100.0, 180.0):
            assert ul_tx_power_dbm(pl, UlPowerMode.FULL_POWER) == 23.0

    def test_never_exceeds_max(self):
        pls = np.linspace(0, 200, 400)
        p = ul_tx_power_dbm(pls, UlPowerMode.FRACTIONAL)
        assert np.all(p <= 23.0)

    def test_piecewise_linear_slope(self):
        clip_point = (23.0 + 59.0) / 0.8
        below = np.linspace(10, clip_point - 1, 50)
        p = ul_tx_power_dbm(below, UlPowerMode.FRACTIONAL)
        slopes = np.diff(p) / np.diff(below)
        assert np.allclose(slopes, 0.8, atol=1e-12)
        assert np.all(np.diff(ul_tx_power_dbm(np.linspace(0, 200, 100),
                                              UlPowerMode.FRACTIONAL)) >= 0)
