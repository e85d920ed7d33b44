"""Versioned binary snapshots of a filter.

Field order (all integers little-endian, fixed widths):

    magic              b"SBFSNAP1"
    version            u16   (currently 1)
    mode               u8    (0 deamortized, 1 amortized)
    flags              u8    (bit0: slack m is infinite)
    n                  u64
    m                  u64   (0 when infinite)
    epsilon            f64   (IEEE 754 bit pattern)
    u                  u128
    seed               u64
    c, g, n_prime      u64 each
    fp_range           u128
    gen_modulus        u64
    tag_bits           u8
    hash_p, hash_a     u128 each
    gen_pos, gen_label, steps, boundaries, rebuilds   u64 each
    scan_width         u64
    capacity_cells, element_capacity        u64 each
    bucket_size        u8
    offset_seed, walk_state, cursor, occupancy, tag_range   u64 each
    payload_width, tag_width                u8 each
    cells              capacity_cells records of
                       (flags u8 [bit0 occupied, bit1 side-2],
                        tag   tag_width bytes,
                        payload payload_width bytes)

The payload is the in-bucket quotient of the fingerprint; together with
the record's position and side bit it reconstructs the fingerprint
exactly, so a round trip is bit-exact and the reloaded filter continues
the stream identically (instrumentation counters start fresh).
"""

from __future__ import annotations

import io
import struct

from .dictionary import BUCKET_SIZE, Dictionary
from .filter import SlidingFilter
from .hashing import UniversalHash
from .params import INFINITE, FilterParams

MAGIC = b"SBFSNAP1"
VERSION = 1
_U128_MAX = (1 << 128) - 1


class SnapshotError(ValueError):
    """Malformed, truncated, or out-of-range snapshot data."""


def _u(value: int, width: int) -> bytes:
    return int(value).to_bytes(width, "little")


class _Reader:
    def __init__(self, data: bytes):
        self._data = data
        self._pos = 0

    def take(self, width: int) -> int:
        raw = self._data[self._pos:self._pos + width]
        if len(raw) != width:
            raise SnapshotError("truncated snapshot")
        self._pos += width
        return int.from_bytes(raw, "little")

    def take_bytes(self, width: int) -> bytes:
        raw = self._data[self._pos:self._pos + width]
        if len(raw) != width:
            raise SnapshotError("truncated snapshot")
        self._pos += width
        return raw

    def done(self) -> bool:
        return self._pos == len(self._data)


def _encode(f: SlidingFilter) -> bytes:
    p = f.params
    d = f.dictionary
    if p.u > _U128_MAX or p.fp_range > _U128_MAX or f.hash.p > _U128_MAX:
        raise SnapshotError("parameters exceed the 128-bit snapshot field width")

    tag_range = len(d._tag_counts)
    payload_width = max(1, (((p.fp_range - 1) // d.num_buckets).bit_length() + 7) // 8)
    tag_width = max(1, ((tag_range - 1).bit_length() + 7) // 8)

    out = io.BytesIO()
    out.write(MAGIC)
    out.write(_u(VERSION, 2))
    out.write(_u(0 if f.mode == "deamortized" else 1, 1))
    infinite = p.m == INFINITE
    out.write(_u(1 if infinite else 0, 1))
    out.write(_u(p.n, 8))
    out.write(_u(0 if infinite else p.m, 8))
    out.write(struct.pack("<d", p.epsilon))
    out.write(_u(p.u, 16))
    out.write(_u(f.seed, 8))
    out.write(_u(p.c, 8))
    out.write(_u(p.g, 8))
    out.write(_u(p.n_prime, 8))
    out.write(_u(p.fp_range, 16))
    out.write(_u(p.gen_modulus, 8))
    out.write(_u(p.tag_bits, 1))
    out.write(_u(f.hash.p, 16))
    out.write(_u(f.hash.a, 16))
    out.write(_u(f.gen_pos, 8))
    out.write(_u(f.gen_label, 8))
    out.write(_u(f.steps, 8))
    out.write(_u(f.boundaries, 8))
    out.write(_u(f.rebuilds, 8))
    out.write(_u(f._scan_width, 8))
    out.write(_u(d.capacity_cells, 8))
    out.write(_u(d.element_capacity, 8))
    out.write(_u(BUCKET_SIZE, 1))
    out.write(_u(d._offset_seed, 8))
    out.write(_u(d._walk.state, 8))
    out.write(_u(d._cursor, 8))
    out.write(_u(d._occupancy, 8))
    out.write(_u(tag_range, 8))
    out.write(_u(payload_width, 1))
    out.write(_u(tag_width, 1))

    occ = d._occ
    sides = d._side
    tags = d._tag
    qs = d._q
    for i in range(d.capacity_cells):
        if occ[i]:
            out.write(_u(1 | (2 if sides[i] == 2 else 0), 1))
            out.write(_u(tags[i], tag_width))
            out.write(_u(qs[i], payload_width))
        else:
            out.write(_u(0, 1))
            out.write(_u(0, tag_width))
            out.write(_u(0, payload_width))
    return out.getvalue()


def _decode(data: bytes) -> SlidingFilter:
    r = _Reader(data)
    if r.take_bytes(8) != MAGIC:
        raise SnapshotError("bad magic")
    version = r.take(2)
    if version != VERSION:
        raise SnapshotError(f"unsupported snapshot version {version}")
    mode = "deamortized" if r.take(1) == 0 else "amortized"
    infinite = r.take(1) & 1
    n = r.take(8)
    m_raw = r.take(8)
    (epsilon,) = struct.unpack("<d", r.take_bytes(8))
    u = r.take(16)
    seed = r.take(8)
    c = r.take(8)
    g = r.take(8)
    n_prime = r.take(8)
    fp_range = r.take(16)
    gen_modulus = r.take(8)
    tag_bits = r.take(1)

    params = FilterParams(
        n=n, m=INFINITE if infinite else m_raw, epsilon=epsilon, u=u,
        c=c, g=g, n_prime=n_prime, fp_range=fp_range,
        gen_modulus=gen_modulus, tag_bits=tag_bits,
    )
    params.validate()

    hash_p = r.take(16)
    hash_a = r.take(16)
    gen_pos = r.take(8)
    gen_label = r.take(8)
    steps = r.take(8)
    boundaries = r.take(8)
    rebuilds = r.take(8)
    scan_width = r.take(8)
    capacity_cells = r.take(8)
    element_capacity = r.take(8)
    bucket_size = r.take(1)
    if bucket_size != BUCKET_SIZE:
        raise SnapshotError(f"snapshot bucket size {bucket_size} != {BUCKET_SIZE}")
    offset_seed = r.take(8)
    walk_state = r.take(8)
    cursor = r.take(8)
    occupancy = r.take(8)
    tag_range = r.take(8)
    payload_width = r.take(1)
    tag_width = r.take(1)

    f = SlidingFilter(params, seed, mode=mode)
    if hash_p < max(params.u, params.fp_range) or not 1 <= hash_a < hash_p:
        raise SnapshotError("snapshot hash parameters out of range")
    f.hash = UniversalHash(p=hash_p, a=hash_a, range_size=params.fp_range)
    d = f.dictionary
    if d.capacity_cells != capacity_cells or d.element_capacity != element_capacity:
        raise SnapshotError("snapshot geometry disagrees with derived parameters")
    if len(d._tag_counts) != tag_range:
        raise SnapshotError("snapshot tag range disagrees with derived parameters")

    d._offset_seed = offset_seed
    d._init_placement()
    d._walk.state = walk_state
    d._cursor = cursor

    occ = d._occ
    sides = d._side
    tags = d._tag
    qs = d._q
    counts = [0] * tag_range
    live = 0
    for i in range(capacity_cells):
        flags = r.take(1)
        tag = r.take(tag_width)
        payload = r.take(payload_width)
        if flags & 1:
            if tag >= tag_range:
                raise SnapshotError(f"cell {i}: tag {tag} out of range")
            occ[i] = 1
            sides[i] = 2 if flags & 2 else 1
            tags[i] = tag
            qs[i] = payload
            counts[tag] += 1
            live += 1
        else:
            occ[i] = 0
            sides[i] = 0
            tags[i] = 0
            qs[i] = 0
    if not r.done():
        raise SnapshotError("trailing bytes after cell array")
    if live != occupancy:
        raise SnapshotError(f"occupancy field {occupancy} != {live} occupied cells")
    d._occupancy = live
    d._tag_counts = counts

    f.gen_pos = gen_pos
    f.gen_label = gen_label
    f.steps = steps
    f.boundaries = boundaries
    f.rebuilds = rebuilds
    if mode == "deamortized":
        if scan_width != f._scan_width:
            raise SnapshotError("snapshot scan width disagrees with derived parameters")
        flags_arr = f._stale_flags
        for t in range(params.gen_modulus):
            flags_arr[t] = 0 if (gen_label - t) % params.gen_modulus <= params.c else 1
    return f


def save_filter(f: SlidingFilter, target) -> None:
    """Write a snapshot to a binary file object or a filesystem path."""
    blob = _encode(f)
    if hasattr(target, "write"):
        target.write(blob)
    else:
        with open(target, "wb") as fh:
            fh.write(blob)


def load_filter(source) -> SlidingFilter:
    """Rebuild a filter from a snapshot file object, path, or bytes."""
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    elif hasattr(source, "read"):
        data = source.read()
    else:
        with open(source, "rb") as fh:
            data = fh.read()
    return _decode(data)
