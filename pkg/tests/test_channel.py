import math

import numpy as np
import pytest

from udnsim import rng
from udnsim.channel import (
    ChannelError,
    ChannelModel,
    LinkType,
    dbm_to_mw,
    db_to_linear,
    los_probability,
    path_loss_db,
    sample_fading,
    sample_los,
)

GPP = ChannelModel.THREE_GPP_LOS_NLOS
SS = ChannelModel.SINGLE_SLOPE_NLOS


class TestLosProbability:
    def test_near_value(self):
        # 1 - 5 exp(-0.156 / 0.01)
        assert los_probability(LinkType.BS_TO_UE, 0.01) == pytest.approx(
            1.0 - 5.0 * math.exp(-15.6), abs=1e-9)
        assert los_probability(LinkType.BS_TO_UE, 0.01) == pytest.approx(0.9999992, abs=1e-6)

    def test_far_value(self):
        # 5 exp(-0.1 / 0.03)
        assert los_probability(LinkType.BS_TO_UE, 0.1) == pytest.approx(0.17837, abs=1e-4)

    def test_ue_to_ue_window(self):
        assert los_probability(LinkType.UE_TO_UE, 0.04) == 1.0
        assert los_probability(LinkType.UE_TO_UE, 0.06) == 0.0
        assert los_probability(LinkType.UE_TO_UE, 0.05) == 1.0

    def test_zero_distance_is_certain_los(self):
        assert los_probability(LinkType.BS_TO_UE, 0.0) == 1.0

    def test_negative_rejected(self):
        with pytest.raises(ChannelError):
            los_probability(LinkType.BS_TO_UE, -0.1)

    def test_bs_links_identical(self):
        r = np.logspace(-4, 0.3, 200)
        assert np.array_equal(los_probability(LinkType.BS_TO_UE, r),
                              los_probability(LinkType.BS_TO_BS, r))

    def test_boundary_jump_values(self):
        # documented discontinuity of the piecewise formula at 0.0677 km
        left = los_probability(LinkType.BS_TO_UE, 0.0677)
        right = los_probability(LinkType.BS_TO_UE, 0.0677 + 1e-12)
        assert left == pytest.approx(1.0 - 5.0 * math.exp(-0.156 / 0.0677), rel=1e-9)
        assert right == pytest.approx(5.0 * math.exp(-0.0677 / 0.03), rel=1e-6)
        assert left == pytest.approx(0.50085, abs=1e-4)
        assert right == pytest.approx(0.52349, abs=1e-4)

    def test_nonincreasing_within_each_branch(self):
        for lo, hi in [(1e-4, 0.0677), (0.0677 + 1e-9, 2.0)]:
            r = np.linspace(lo, hi, 4000)
            p = los_probability(LinkType.BS_TO_UE, r)
            assert np.all(np.diff(p) <= 1e-15)


class TestPathLoss:
    @pytest.mark.parametrize("link,is_los,r,expected", [
        (LinkType.BS_TO_UE, True, 0.1, 103.8 - 20.9),
        (LinkType.BS_TO_UE, False, 1.0, 145.4),
        (LinkType.BS_TO_UE, True, 1.0, 103.8),
        (LinkType.BS_TO_BS, True, 0.1, 101.9 - 40.0),
        (LinkType.BS_TO_BS, False, 0.1, 169.36 - 40.0),
        (LinkType.UE_TO_UE, True, 0.1, 98.45 - 20.0),
        (LinkType.UE_TO_UE, False, 0.1, 175.78 - 40.0),
    ])
    def test_table_values(self, link, is_los, r, expected):
        assert path_loss_db(GPP, link, is_los, r) == pytest.approx(expected, rel=1e-9)

    def test_single_slope_ignores_link_and_los(self):
        for link in LinkType:
            for los in (True, False):
                assert path_loss_db(SS, link, los, 0.1) == pytest.approx(
                    145.4 - 37.5, rel=1e-9)

    def test_zero_distance_rejected(self):
        with pytest.raises(ChannelError):
            path_loss_db(GPP, LinkType.BS_TO_UE, True, 0.0)

    def test_nlos_dominates_los(self):
        r = np.logspace(math.log10(0.01), math.log10(2.0), 300)
        for link in LinkType:
            nlos = path_loss_db(GPP, link, np.zeros_like(r, dtype=bool), r)
            los = path_loss_db(GPP, link, np.ones_like(r, dtype=bool), r)
            assert np.all(nlos >= los)

    def test_strictly_increasing_in_r(self):
        r = np.logspace(-3, 0.3, 500)
        for link in LinkType:
            for los in (True, False):
                pl = path_loss_db(GPP, link, np.full(r.shape, los, dtype=bool), r)
                assert np.all(np.diff(pl) > 0)

    def test_height_gap_caps_received_power(self):
        # with an 8.5 m antenna gap the minimum path loss sits at d = 0
        d = np.linspace(0.0, 0.5, 2000)
        r = np.sqrt(d * d + 0.0085**2)
        pl = path_loss_db(GPP, LinkType.BS_TO_UE, np.ones_like(r, dtype=bool), r)
        assert pl.min() == pl[0]


class TestSampling:
    def test_sample_los_endpoints(self):
        s = rng.Stream.from_words(3)
        assert sample_los(1.0, s) is True
        assert sample_los(0.0, s) is False

    def test_sample_los_rate(self):
        s = rng.Stream.from_words(8)
        hits = sum(sample_los(0.5, s) for _ in range(100000))
        assert abs(hits / 100000 - 0.5) < 0.01

    def test_fading_moments(self):
        s = rng.Stream.from_words(11)
        draws = np.array([sample_fading(s) for _ in range(200000)])
        assert np.all(draws > 0)
        assert abs(draws.mean() - 1.0) < 0.01
        assert abs((draws > 1.0).mean() - math.exp(-1)) < 0.005


class TestConversions:
    def test_dbm(self):
        assert dbm_to_mw(24.0) == pytest.approx(251.1886, abs=1e-3)
        assert dbm_to_mw(-95.0) == pytest.approx(3.1623e-10, abs=1e-13)

    def test_db(self):
        assert db_to_linear(0.0) == 1.0
        assert db_to_linear(10.0) == pytest.approx(10.0, rel=1e-12)

    def test_roundtrip(self):
        for x in np.linspace(-120, 40, 33):
            assert 10.0 * math.log10(dbm_to_mw(float(x))) == pytest.approx(x, abs=1e-9)

    def test_linear_sum_matches_db_composition(self):
        # 1e-9 relative agreement between dB composition and linear products
        a_db, b_db = 37.2, -12.6
        lin = db_to_linear(a_db) * db_to_linear(b_db)
        assert lin == pytest.approx(db_to_linear(a_db + b_db), rel=1e-9)
