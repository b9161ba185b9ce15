import numpy as np

from sparse_actions.seeding import mix_seed, rng_for, splitmix64


def test_splitmix64_stays_in_64_bits():
    for x in (0, 1, 2**63, 2**64 - 1, 0xDEADBEEF):
        assert 0 <= splitmix64(x) < 2**64


def test_splitmix64_changes_input():
    seen = {splitmix64(x) for x in range(200)}
    assert len(seen) == 200


def test_mix_seed_left_fold_composes():
    # mixing in stages must agree with mixing all parts at once
    assert mix_seed(7, 1, 2, 3) == mix_seed(mix_seed(7, 1), 2, 3)
    assert mix_seed(7, 1, 2, 3) == mix_seed(mix_seed(7, 1, 2), 3)


def test_mix_seed_order_sensitive():
    assert mix_seed(7, 1, 2) != mix_seed(7, 2, 1)


def test_mix_seed_no_parts_is_identity_ish():
    assert mix_seed(42) == mix_seed(42)
    assert mix_seed(42) != mix_seed(43)


def test_rng_for_reproducible_streams():
    a = rng_for(9, 1, 2).standard_normal(8)
    b = rng_for(9, 1, 2).standard_normal(8)
    c = rng_for(9, 1, 3).standard_normal(8)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
