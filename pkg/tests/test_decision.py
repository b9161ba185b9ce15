import numpy as np
import pytest

from sparse_actions.bomp import StoppingRule, run_bomp
from sparse_actions.decision import DecisionModel, param_error, plugin_action, suboptimality_gap
from sparse_actions.envgen import InstanceSpec, SamplingPolicy, sample_dataset, sample_instance
from sparse_actions.model import ParamMatrix, SupportSet


def model_from(rows, support) -> DecisionModel:
    return DecisionModel(SupportSet(tuple(support)), ParamMatrix(np.asarray(rows, dtype=float)))


class TestDecisionModel:
    def test_rejects_mass_outside_support(self):
        with pytest.raises(ValueError):
            model_from([[1.0], [1.0]], [0])

    def test_from_bomp(self):
        inst = sample_instance(InstanceSpec(m=5, d=2, k=2, b=1.0, noise_sigma=0.0, seed=3))
        data = sample_dataset(inst, SamplingPolicy.round_robin(), 20, seed=1)
        res = run_bomp(data, StoppingRule.fixed(2))
        model = DecisionModel.from_bomp(res)
        assert model.support.as_set() == res.support.as_set()


class TestPluginAction:
    def test_picks_larger_estimate(self):
        m = model_from([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]], [0, 1])
        assert plugin_action(m, [2.0, 1.0]) == 0

    def test_zero_state_ties_to_lowest_supported_index(self):
        m = model_from([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], [1, 2])
        assert plugin_action(m, [0.0, 0.0]) == 1

    def test_matches_full_argmax_when_model_is_exact(self):
        inst = sample_instance(InstanceSpec(m=7, d=3, k=3, b=1.0, noise_sigma=0.0, seed=8))
        model = DecisionModel(inst.s_star, inst.w_star)
        rng = np.random.default_rng(0)
        for z in rng.standard_normal((50, 3)):
            full = int(np.argmax(inst.w_star.rows @ z))
            best_val = (inst.w_star.rows @ z).max()
            # the plug-in argmax over the support equals the argmax over all
            # actions whenever the best action is active at this state
            if full in inst.s_star and inst.w_star.rows[full] @ z == best_val:
                assert plugin_action(model, z) == full

    def test_empty_support_rejected(self):
        m = model_from([[0.0], [0.0]], [])
        with pytest.raises(ValueError):
            plugin_action(m, [1.0])


class TestSuboptimalityGap:
    def test_exact_model_zero_gap(self):
        inst = sample_instance(InstanceSpec(m=6, d=2, k=2, b=1.0, noise_sigma=0.0, seed=5))
        model = DecisionModel(inst.s_star, inst.w_star)
        gap, bound = suboptimality_gap(inst.w_star, model, [1.0, -1.0])
        assert gap == 0.0
        assert bound == 0.0

    def test_zero_state_zero_both(self):
        inst = sample_instance(InstanceSpec(m=6, d=2, k=2, b=1.0, noise_sigma=0.0, seed=5))
        w_hat = inst.w_star.rows.copy()
        w_hat[list(inst.s_star)] *= 0.7
        model = DecisionModel(inst.s_star, ParamMatrix(w_hat))
        gap, bound = suboptimality_gap(inst.w_star, model, [0.0, 0.0])
        assert gap == 0.0 and bound == 0.0

    def test_bound_holds_on_perturbed_models(self):
        rng = np.random.default_rng(99)
        inst = sample_instance(InstanceSpec(m=10, d=4, k=4, b=1.0, noise_sigma=0.0, seed=12))
        for trial in range(30):
            w_hat = inst.w_star.rows.copy()
            idx = list(inst.s_star)
            w_hat[idx] += 0.3 * rng.standard_normal((4, 4))
            model = DecisionModel(inst.s_star, ParamMatrix(w_hat))
            for z in rng.standard_normal((20, 4)):
                gap, bound = suboptimality_gap(inst.w_star, model, z)
                assert gap >= 0.0
                assert gap <= bound + 1e-12

    def test_shape_mismatch_rejected(self):
        inst = sample_instance(InstanceSpec(m=4, d=2, k=1, b=1.0, noise_sigma=0.0, seed=1))
        model = DecisionModel(inst.s_star, inst.w_star)
        with pytest.raises(ValueError):
            suboptimality_gap(ParamMatrix(np.zeros((3, 2))), model, [1.0, 0.0])


class TestParamError:
    def test_exact_model_zero(self):
        inst = sample_instance(InstanceSpec(m=5, d=3, k=2, b=1.0, noise_sigma=0.0, seed=7))
        model = DecisionModel(inst.s_star, inst.w_star)
        pe = param_error(model, inst.w_star)
        assert pe.err == 0.0
        assert not pe.support_mismatch
        assert np.all(pe.per_row == 0.0)

    def test_noiseless_refit_error_tiny(self):
        inst = sample_instance(InstanceSpec(m=5, d=2, k=2, b=1.0, noise_sigma=0.0, seed=19))
        data = sample_dataset(inst, SamplingPolicy.round_robin(), 20, seed=2)
        res = run_bomp(data, StoppingRule.fixed(2))
        pe = param_error(DecisionModel.from_bomp(res), inst.w_star)
        assert pe.err <= 1e-10

    def test_mismatch_flag_and_union_error(self):
        true_w = ParamMatrix(np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]))
        model = model_from([[0.0, 0.0], [0.0, 1.0], [0.0, 0.0]], [1])
        pe = param_error(model, true_w)
        assert pe.support_mismatch
        # union of supports {0, 1}: misses row 0 entirely, invents row 1
        assert pe.err == pytest.approx(np.sqrt(2.0), rel=1e-15)
        assert pe.per_row.tolist() == [1.0]
