import numpy as np
import pytest

from udnsim import rng
from udnsim.association import (
    AssociationError,
    CandidateIndex,
    associate,
    derive_active_set,
)
from udnsim.channel import ChannelModel
from udnsim.geometry import Deployment, Region

GPP = ChannelModel.THREE_GPP_LOS_NLOS
SS = ChannelModel.SINGLE_SLOPE_NLOS


def make_deployment(n, seed=1, side=1.0, delta_h=0.0):
    s = rng.Stream.from_words(seed)
    x = s.u01_array(rng.P_BS_X, np.arange(n)) * side
    y = s.u01_array(rng.P_BS_Y, np.arange(n)) * side
    return Deployment(Region(side), x, y,
                      bs_antenna_height_m=delta_h, ue_antenna_height_m=0.0)


class TestAssociate:
    def test_argmin_and_tie_break(self):
        dep = Deployment(Region(1.0), np.array([0.2, 0.2]), np.array([0.5, 0.5]),
                         bs_antenna_height_m=0.0, ue_antenna_height_m=0.0)
        res = associate(np.array([[0.2, 0.5]]), dep, SS, trial_key=123)
        assert res.serving_bs[0] == 0  # exact tie goes to the lower index

    def test_single_slope_serves_nearest(self):
        dep = make_deployment(40, seed=5)
        key = rng.trial_key(9, 0, 0)
        ues = np.random.default_rng(0).uniform(0, 1, size=(100, 2))
        res = associate(ues, dep, SS, key)
        for u, (x, y) in enumerate(ues):
            dx = np.minimum(np.abs(dep.bs_x - x), 1.0 - np.abs(dep.bs_x - x))
            dy = np.minimum(np.abs(dep.bs_y - y), 1.0 - np.abs(dep.bs_y - y))
            assert res.serving_bs[u] == np.argmin(dx * dx + dy * dy)

    def test_empty_deployment_rejected(self):
        dep = Deployment(Region(1.0), np.array([]), np.array([]),
                         bs_antenna_height_m=0.0, ue_antenna_height_m=0.0)
        with pytest.raises(AssociationError):
            associate(np.array([[0.5, 0.5]]), dep, SS, 1)

    def test_far_bs_changes_nothing(self):
        # a BS strictly farther in path loss from every UE leaves assignments alone
        dep = make_deployment(12, seed=3, side=0.4)
        key = rng.trial_key(4, 1, 2)
        ues = np.random.default_rng(1).uniform(0.15, 0.25, size=(30, 2))
        base = associate(ues, dep, SS, key)
        far = Deployment(dep.region, np.append(dep.bs_x, 0.39),
                         np.append(dep.bs_y, 0.0), 0.0, 0.0)
        # place the extra BS at max torus distance from the UE cluster corner
        res = associate(ues, far, SS, key)
        changed = np.sum(res.serving_bs != base.serving_bs)
        # only UEs that are genuinely closer to the new BS may move
        for u in np.nonzero(res.serving_bs != base.serving_bs)[0]:
            assert res.serving_bs[u] == 12
            assert res.serving_pl_db[u] <= base.serving_pl_db[u]
        assert changed <= len(ues)


class TestActiveSet:
    def test_imc_on_keeps_busy_cells(self):
        serving = np.array([0, 0, 2])
        assert derive_active_set(serving, True, 4).tolist() == [0, 2]

    def test_imc_off_keeps_all(self):
        serving = np.array([0, 0, 2])
        assert derive_active_set(serving, False, 4).tolist() == [0, 1, 2, 3]

    def test_pigeonhole(self):
        dep = make_deployment(800, seed=7)
        key = rng.trial_key(11, 0, 0)
        ues = np.random.default_rng(2).uniform(0, 1, size=(60, 2))
        res = associate(ues, dep, GPP, key)
        assert len(res.active_bs) <= 60


class TestCandidateIndex:
    @pytest.mark.parametrize("model", [SS, GPP])
    @pytest.mark.parametrize("delta_h", [0.0, 8.5])
    def test_matches_full_matrix(self, model, delta_h):
        dep = make_deployment(300, seed=13, delta_h=delta_h)
        index = CandidateIndex(dep, model)
        g = np.random.default_rng(3)
        for trial in range(10):
            key = rng.trial_key(21, 5, trial)
            ues = g.uniform(0, 1, size=(50, 2))
            fast = index.associate(ues, key)
            full = associate(ues, dep, model, key)
            assert np.array_equal(fast.serving_bs, full.serving_bs)
            np.testing.assert_allclose(fast.serving_pl_db, full.serving_pl_db,
                                       rtol=1e-12)
            assert np.array_equal(fast.active_bs, full.active_bs)

    def test_sparse_deployment(self):
        dep = make_deployment(5, seed=17)
        index = CandidateIndex(dep, GPP)
        key = rng.trial_key(2, 0, 7)
        ues = np.random.default_rng(4).uniform(0, 1, size=(20, 2))
        fast = index.associate(ues, key)
        full = associate(ues, dep, GPP, key)
        assert np.array_equal(fast.serving_bs, full.serving_bs)
