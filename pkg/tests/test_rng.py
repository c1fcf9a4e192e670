import numpy as np

from magnet.rng import Rng

MASK = 0xFFFFFFFFFFFFFFFF


def reference_splitmix64(seed, index):
    """Textbook SplitMix64 of (seed + index*GAMMA), in pure Python ints."""
    z = (seed + index * 0x9E3779B97F4A7C15) & MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def test_matches_reference_stream():
    rng = Rng(12345)
    for i in range(1, 20):
        assert rng.next_u64() == reference_splitmix64(12345, i)


def test_scalar_and_vector_draws_agree():
    scalar = Rng(7)
    vector = Rng(7)
    singles = np.array([scalar.uniform(()) for _ in range(8)]).ravel()
    batch = vector.uniform((8,))
    assert np.array_equal(singles, batch)


def test_uniform_range_and_determinism():
    a = Rng(3).uniform((1000,), -2.0, 5.0)
    b = Rng(3).uniform((1000,), -2.0, 5.0)
    assert np.array_equal(a, b)
    assert a.min() >= -2.0 and a.max() < 5.0


def test_normal_moments():
    x = Rng(11).normal((20000,), 1.5, 2.0)
    assert abs(x.mean() - 1.5) < 0.05
    assert abs(x.std() - 2.0) < 0.05


def test_shuffle_deterministic_permutation():
    items1 = list(range(10))
    items2 = list(range(10))
    Rng(5).shuffle(items1)
    Rng(5).shuffle(items2)
    assert items1 == items2
    assert sorted(items1) == list(range(10))


def test_distinct_seeds_distinct_streams():
    assert Rng(1).next_u64() != Rng(2).next_u64()
