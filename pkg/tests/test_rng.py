import numpy as np
import pytest

from fareywalk.rng import philox4x64, walk_stream


def numpy_block(counter, key):
    # numpy's Philox increments the counter before producing its first block
    prev = list(counter)
    for i in range(4):
        if prev[i] > 0:
            prev[i] -= 1
            break
        prev[i] = 2**64 - 1
    bg = np.random.Philox(counter=np.array(prev, dtype=np.uint64), key=np.array(key, dtype=np.uint64))
    return bg.random_raw(4)


@pytest.mark.parametrize(
    "counter, key",
    [
        ((1, 0, 0, 0), (0, 0)),
        ((7, 0, 0, 0), (12345, 678)),
        ((2**63 + 5, 3, 0, 9), (2**64 - 1, 2**63)),
        ((1, 2, 3, 4), (11, 22)),
    ],
)
def test_block_matches_numpy(counter, key):
    ours = philox4x64(np.array(counter, dtype=np.uint64), np.array(key, dtype=np.uint64))
    assert ours.tolist() == numpy_block(counter, key).tolist()


def test_vectorised_matches_scalar():
    keys = np.array([[5, w] for w in range(6)], dtype=np.uint64)
    ctr = np.array([3, 0, 0, 0], dtype=np.uint64)
    many = philox4x64(ctr, keys)
    for w in range(6):
        assert many[w].tolist() == philox4x64(ctr, keys[w]).tolist()


def test_walk_stream_is_batch_independent():
    full = walk_stream(42, np.arange(10), 13)
    assert full.shape == (10, 13)
    part = walk_stream(42, np.arange(4, 7), 13)
    assert np.array_equal(full[4:7], part)
    longer = walk_stream(42, np.arange(10), 20)
    assert np.array_equal(longer[:, :13], full)


def test_streams_differ_by_seed_and_walk():
    a = walk_stream(1, np.arange(3), 8)
    b = walk_stream(2, np.arange(3), 8)
    assert not np.array_equal(a, b)
    assert len({tuple(r) for r in a.tolist()}) == 3


def test_uniformity_rough():
    u = walk_stream(9, np.arange(2000), 40).astype(np.float64) / 2.0**64
    assert abs(u.mean() - 0.5) < 0.005
    hist, _ = np.histogram(u, bins=10, range=(0, 1))
    assert np.all(np.abs(hist / u.size - 0.1) < 0.005)
