import io

import pytest

from slidingbloom import INFINITE, SlidingFilter, SnapshotError, load_filter, save_filter
from slidingbloom.prng import SplitMix64

from stream_patterns import random_pool


def roundtrip(f):
    buf = io.BytesIO()
    save_filter(f, buf)
    return buf.getvalue()


@pytest.mark.parametrize("m", [10, INFINITE])
@pytest.mark.parametrize("mode", ["deamortized", "amortized"])
def test_roundtrip_bit_exact(m, mode):
    f = SlidingFilter.create(80, m, 2**-5, seed=17, mode=mode)
    for x in random_pool(1234, 300, seed=1):
        f.insert(x)
    blob = roundtrip(f)
    g = load_filter(blob)
    assert roundtrip(g) == blob
    assert g.mode == mode and g.params == f.params
    assert g.gen_pos == f.gen_pos and g.gen_label == f.gen_label


def test_behavior_preserved_after_reload():
    f = SlidingFilter.create(64, 16, 2**-6, seed=23)
    stream = random_pool(900, 200, seed=2)
    for x in stream[:600]:
        f.insert(x)
    g = load_filter(roundtrip(f))
    for x in stream[600:]:
        f.insert(x)
        g.insert(x)
        for probe in range(0, 200, 3):
            assert f.query(probe) == g.query(probe)
    assert roundtrip(f) == roundtrip(g)


def test_save_load_path(tmp_path):
    f = SlidingFilter.create(32, 8, 2**-4, seed=5)
    for x in range(100):
        f.insert(x)
    path = tmp_path / "filter.snap"
    f.save(str(path))
    g = SlidingFilter.load(str(path))
    assert roundtrip(f) == roundtrip(g)


def test_empty_filter_roundtrip():
    f = SlidingFilter.create(10, 10, 0.25, seed=0)
    g = load_filter(roundtrip(f))
    assert roundtrip(g) == roundtrip(f)
    assert not g.query(1)


def test_rejects_garbage():
    with pytest.raises(SnapshotError):
        load_filter(b"not a snapshot at all")
    f = SlidingFilter.create(10, 10, 0.25, seed=0)
    blob = roundtrip(f)
    with pytest.raises(SnapshotError):
        load_filter(blob[:-3])  # truncated
    mangled = bytearray(blob)
    mangled[9] = 0xFF  # version
    with pytest.raises(SnapshotError):
        load_filter(bytes(mangled))


def test_rng_state_travels():
    # the cuckoo walk must continue from the serialized state, not restart
    f = SlidingFilter.create(200, 200, 2**-6, seed=3)
    rng = SplitMix64(0)
    for _ in range(2000):
        f.insert(rng.below(10**9))
    g = load_filter(roundtrip(f))
    assert g.dictionary._walk.state == f.dictionary._walk.state
    for _ in range(2000):
        x = rng.below(10**9)
        f.insert(x)
        g.insert(x)
    assert roundtrip(f) == roundtrip(g)
