import numpy as np
import pytest

from sparse_actions.bomp import StoppingRule, run_bomp
from sparse_actions.envgen import InstanceSpec, SamplingPolicy, sample_dataset, sample_instance
from sparse_actions.model import Dataset
from sparse_actions.oracle import exhaustive_support_search, topk_by_initial_score
from sparse_actions.seeding import mix_seed


def d1() -> Dataset:
    return Dataset(np.ones((4, 1)), np.array([0, 0, 1, 2]), np.array([2.0, 2.0, 0.0, 0.0]), 3)


class TestExhaustiveSearch:
    def test_d1_best_is_action_zero(self):
        res = exhaustive_support_search(d1(), 1)
        assert res.best_support.as_set() == {0}
        assert res.best_rss == pytest.approx(0.0, abs=1e-18)
        assert res.unique

    def test_true_support_wins_on_noiseless_data(self):
        inst = sample_instance(InstanceSpec(m=6, d=2, k=2, b=1.0, noise_sigma=0.0, seed=41))
        data = sample_dataset(inst, SamplingPolicy.round_robin(), 24, seed=3)
        res = exhaustive_support_search(data, 2)
        assert res.best_support.as_set() == inst.s_star.as_set()
        assert res.best_rss <= 1e-18

    def test_k_equals_m_refits_everything(self):
        inst = sample_instance(InstanceSpec(m=4, d=2, k=2, b=1.0, noise_sigma=0.2, seed=42))
        data = sample_dataset(inst, SamplingPolicy.round_robin(), 24, seed=5)
        res = exhaustive_support_search(data, 4)
        assert res.best_support.as_set() == {0, 1, 2, 3}

    def test_enumeration_guard(self):
        rng = np.random.default_rng(1)
        data = Dataset(rng.standard_normal((100, 1)), rng.integers(0, 100, 100), np.zeros(100), 100)
        with pytest.raises(ValueError):
            exhaustive_support_search(data, 50)  # C(100, 50) is astronomical

    def test_k_validated(self):
        with pytest.raises(ValueError):
            exhaustive_support_search(d1(), 0)
        with pytest.raises(ValueError):
            exhaustive_support_search(d1(), 4)


class TestTopK:
    def test_d1_k1(self):
        assert list(topk_by_initial_score(d1(), 1)) == [0]

    def test_d1_k2_tie_breaks_by_index(self):
        # actions 1 and 2 both score zero; the lower index wins the last slot
        assert list(topk_by_initial_score(d1(), 2)) == [0, 1]

    def test_matches_greedy_selection_on_random_data(self):
        for i in range(25):
            spec = InstanceSpec(m=9, d=2, k=3, b=1.0, noise_sigma=0.4, seed=mix_seed(50, i))
            inst = sample_instance(spec)
            data = sample_dataset(inst, SamplingPolicy.round_robin(), 54, seed=mix_seed(51, i))
            greedy = run_bomp(data, StoppingRule.fixed(3))
            assert list(greedy.support) == list(topk_by_initial_score(data, 3))

    def test_k_validated(self):
        with pytest.raises(ValueError):
            topk_by_initial_score(d1(), 0)
