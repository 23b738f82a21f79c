"""Generator algorithm pinning: frozen vectors and distribution sanity."""

import numpy as np

from gdlayout.rng import Xoshiro256StarStar, splitmix64_stream

# First three splitmix64 outputs from seed 0: published reference values.
SPLITMIX64_SEED0 = [
    0xE220A8397B1DCDAF,
    0x6E789E6AA1B965F4,
    0x06C45D188009454F,
]

# Frozen outputs of this implementation (regression pin; the algorithm is
# documented in the module docstring).
XOSHIRO_SEED42_FIRST5 = [
    1546998764402558742,
    6990951692964543102,
    12544586762248559009,
    17057574109182124193,
    18295552978065317476,
]


def test_splitmix64_reference_vectors():
    assert splitmix64_stream(0, 3) == SPLITMIX64_SEED0


def test_xoshiro_frozen_vector():
    rng = Xoshiro256StarStar(42)
    assert [rng.next_u64() for _ in range(5)] == XOSHIRO_SEED42_FIRST5


def test_xoshiro_stream_is_seed_deterministic():
    a = Xoshiro256StarStar(12345)
    b = Xoshiro256StarStar(12345)
    assert [a.next_u64() for _ in range(100)] == [b.next_u64() for _ in range(100)]
    c = Xoshiro256StarStar(12346)
    assert [Xoshiro256StarStar(12345).next_u64() for _ in range(4)] != [
        c.next_u64() for _ in range(4)
    ]


def test_random_in_unit_interval():
    rng = Xoshiro256StarStar(7)
    vals = [rng.random() for _ in range(2000)]
    assert all(0.0 <= v < 1.0 for v in vals)
    assert 0.45 < np.mean(vals) < 0.55


def test_below_is_in_range_and_covers():
    rng = Xoshiro256StarStar(3)
    seen = {rng.below(5) for _ in range(500)}
    assert seen == {0, 1, 2, 3, 4}


def test_shuffle_is_permutation():
    rng = Xoshiro256StarStar(9)
    arr = list(range(50))
    rng.shuffle(arr)
    assert sorted(arr) == list(range(50))
    assert arr != list(range(50))


def test_gauss_moments():
    rng = Xoshiro256StarStar(11)
    vals = np.array([rng.gauss() for _ in range(20000)])
    assert abs(vals.mean()) < 0.03
    assert abs(vals.std() - 1.0) < 0.03


def test_spawn_streams_differ():
    rng = Xoshiro256StarStar(5)
    a = rng.spawn(1)
    b = rng.spawn(2)
    assert [a.next_u64() for _ in range(4)] != [b.next_u64() for _ in range(4)]
