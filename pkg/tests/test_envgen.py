import numpy as np
import pytest

from sparse_actions.envgen import (
    Instance,
    InstanceSpec,
    SamplingPolicy,
    coverage_counts,
    min_coverage,
    sample_dataset,
    sample_instance,
)


def spec(**kw) -> InstanceSpec:
    base = dict(m=10, d=3, k=2, b=1.0, noise_sigma=0.0, seed=1)
    base.update(kw)
    return InstanceSpec(**base)


class TestInstanceSpec:
    def test_rejects_k_out_of_range(self):
        with pytest.raises(ValueError):
            spec(k=0)
        with pytest.raises(ValueError):
            spec(k=11)

    def test_rejects_bad_norm_and_noise(self):
        with pytest.raises(ValueError):
            spec(b=0.0)
        with pytest.raises(ValueError):
            spec(noise_sigma=-0.1)

    def test_row_norms_set_b_to_min(self):
        s = spec(k=3, b=0.0, row_norms=(2.0, 0.5, 1.0))
        assert s.b == 0.5
        assert s.active_norms() == (2.0, 0.5, 1.0)

    def test_row_norms_length_checked(self):
        with pytest.raises(ValueError):
            spec(k=2, row_norms=(1.0,))

    def test_sigma_z_must_be_symmetric_pd(self):
        with pytest.raises(ValueError):
            spec(sigma_z=np.array([[1.0, 0.5], [0.0, 1.0]]), d=2)
        with pytest.raises(ValueError):
            spec(sigma_z=np.diag([1.0, 0.0, 1.0]))
        ok = spec(sigma_z=np.diag([1.0, 2.0, 3.0]))
        assert ok.covariance()[2, 2] == 3.0

    def test_dict_roundtrip_scalar_and_list_b(self):
        s1 = spec()
        assert InstanceSpec.from_dict(s1.to_dict()) == s1
        s2 = spec(k=2, row_norms=(1.5, 2.5))
        back = InstanceSpec.from_dict(s2.to_dict())
        assert back.row_norms == (1.5, 2.5)
        assert back.b == 1.5


class TestSampleInstance:
    def test_exactly_k_active_rows_with_norm_b(self):
        inst = sample_instance(spec(m=8, k=3, b=2.0, seed=11))
        norms = np.linalg.norm(inst.w_star.rows, axis=1)
        active = np.flatnonzero(norms > 0)
        assert active.tolist() == list(inst.s_star)
        assert len(inst.s_star) == 3
        np.testing.assert_allclose(norms[active], 2.0, rtol=1e-12)

    def test_d1_style_scalar_row(self):
        # d=1 forces the single active row to be exactly +/- b
        inst = sample_instance(spec(m=3, d=1, k=1, b=2.0, seed=4))
        j = list(inst.s_star)[0]
        assert abs(inst.w_star.rows[j, 0]) == pytest.approx(2.0, rel=1e-12)

    def test_full_support(self):
        inst = sample_instance(spec(m=4, k=4, seed=2))
        assert list(inst.s_star) == [0, 1, 2, 3]

    def test_bitwise_deterministic(self):
        a = sample_instance(spec(seed=33))
        b = sample_instance(spec(seed=33))
        assert np.array_equal(a.w_star.rows, b.w_star.rows)
        assert list(a.s_star) == list(b.s_star)

    def test_instance_validates_norms(self):
        inst = sample_instance(spec(seed=5))
        with pytest.raises(ValueError):
            Instance(inst.spec, inst.w_star, inst.s_star.__class__((0, 1, 2)))

    def test_dict_roundtrip(self):
        inst = sample_instance(spec(seed=7))
        back = Instance.from_dict(inst.to_dict())
        np.testing.assert_allclose(back.w_star.rows, inst.w_star.rows, rtol=1e-15)
        assert list(back.s_star) == list(inst.s_star)


class TestSamplingPolicy:
    def test_kinds(self):
        assert SamplingPolicy.uniform().kind == "uniform"
        assert SamplingPolicy.round_robin().kind == "round-robin"
        assert SamplingPolicy.explicit([0, 1]).schedule == (0, 1)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            SamplingPolicy("adaptive")

    def test_schedule_needs_actions(self):
        with pytest.raises(ValueError):
            SamplingPolicy("schedule")
        with pytest.raises(ValueError):
            SamplingPolicy("uniform", schedule=(0,))

    def test_dict_roundtrip(self):
        p = SamplingPolicy.explicit([2, 0, 1])
        assert SamplingPolicy.from_dict(p.to_dict()) == p


class TestSampleDataset:
    def test_zero_rows_give_zero_rewards(self):
        # noiseless pulls of an inactive action pay exactly 0
        inst = sample_instance(InstanceSpec(m=3, d=2, k=1, b=1.0, noise_sigma=0.0, seed=9))
        data = sample_dataset(inst, SamplingPolicy.uniform(), 50, seed=3)
        mask = np.isin(data.actions, list(inst.s_star), invert=True)
        assert mask.any()
        assert np.all(data.rewards[mask] == 0.0)

    def test_noiseless_rewards_exact(self):
        inst = sample_instance(spec(seed=21))
        data = sample_dataset(inst, SamplingPolicy.uniform(), 40, seed=5)
        expect = np.einsum("ij,ij->i", inst.w_star.rows[data.actions], data.states)
        np.testing.assert_allclose(data.rewards, expect, rtol=1e-12)

    def test_round_robin_counts(self):
        inst = sample_instance(spec(m=5, seed=2))
        data = sample_dataset(inst, SamplingPolicy.round_robin(), 15, seed=1)
        assert coverage_counts(data).tolist() == [3, 3, 3, 3, 3]

    def test_noise_stream_isolated(self):
        # sigma=0 and sigma>0 runs at one seed share states and actions exactly
        quiet = sample_instance(spec(seed=13, noise_sigma=0.0))
        loud = sample_instance(spec(seed=13, noise_sigma=0.5))
        dq = sample_dataset(quiet, SamplingPolicy.uniform(), 30, seed=8)
        dl, eps = sample_dataset(loud, SamplingPolicy.uniform(), 30, seed=8, return_noise=True)
        assert np.array_equal(dq.states, dl.states)
        assert np.array_equal(dq.actions, dl.actions)
        np.testing.assert_allclose(dl.rewards - eps, dq.rewards, atol=1e-12)

    def test_sigma_z_shapes_states(self):
        cov = np.diag([100.0, 1.0])
        inst = sample_instance(spec(d=2, sigma_z=cov, seed=3))
        data = sample_dataset(inst, SamplingPolicy.uniform(), 2000, seed=4)
        assert data.states[:, 0].std() > 5 * data.states[:, 1].std()

    def test_schedule_length_checked(self):
        inst = sample_instance(spec(seed=1))
        with pytest.raises(ValueError):
            sample_dataset(inst, SamplingPolicy.explicit([0, 1]), 3, seed=1)

    def test_schedule_range_checked(self):
        inst = sample_instance(spec(m=4, seed=1))
        with pytest.raises(ValueError):
            sample_dataset(inst, SamplingPolicy.explicit([0, 9]), 2, seed=1)

    def test_return_noise_zero_when_noiseless(self):
        inst = sample_instance(spec(seed=6))
        _, eps = sample_dataset(inst, SamplingPolicy.uniform(), 12, seed=2, return_noise=True)
        assert np.all(eps == 0.0)


def test_coverage_counts_and_min():
    inst = sample_instance(spec(m=3, d=1, k=1, seed=1))
    data = sample_dataset(inst, SamplingPolicy.explicit([0, 0, 1, 2]), 4, seed=1)
    counts = coverage_counts(data)
    assert counts.tolist() == [2, 1, 1]
    assert min_coverage(counts, inst.s_star) >= 1
    with pytest.raises(ValueError):
        min_coverage(counts, type(inst.s_star)(()))
