"""Fixed-capacity bucketized cuckoo dictionary with per-entry tags.

Cells live in one flat scan order and are grouped into buckets of
BUCKET_SIZE. A fingerprint fp splits as (q, r) = divmod(fp, num_buckets)
and may occupy only two buckets, one per side:

    side s:  (A_s * r + mix_s(q)) % num_buckets      s in {1, 2}

where A_1, A_2 are seeded multipliers coprime to num_buckets (hence
invertible) and mix_1, mix_2 are seeded functions of q. A cell
therefore stores just (q, side, tag): the bucket index it sits in plus
the side invert the affine map and reconstruct fp exactly, so the
structure is lossless while storing far fewer bits per cell than the
full fingerprint. ``bits_used`` can account either way (quotient
layout or full-fingerprint layout).

The placement shape is load-bearing: fingerprints arrive from a linear
hash, so streams of consecutive elements produce arithmetic
progressions of fingerprints. Placing by r directly would funnel those
into clustered buckets, and even one shared offset per quotient class
produces ladders of parallel bucket pairs, which can disconnect the
cuckoo graph and strand insertions away from the remaining free cells.
Two independent affine maps give every fingerprint an edge of its own.

Staleness is the caller's notion: operations that may mutate take a
``stale(tag) -> bool`` predicate and free any stale occupant they
examine, so logically-dead cells never block an insert. ``member`` is
read-only: it filters stale hits out of its answer but leaves them in
place for the scanner.

Geometry and policy: BUCKET_SIZE = 4, two bucket choices, random-walk
eviction capped at MAX_KICKS = 500, cell count sized for a 0.9 load
at element capacity (rounded up to a whole number of bucket pairs).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .prng import SplitMix64, derive_seed, splitmix64

BUCKET_SIZE = 4
MAX_KICKS = 500
# load target 0.9, kept as a ratio of integers so capacity math is exact
_LOAD_NUM, _LOAD_DEN = 9, 10


class InsertOverflow(RuntimeError):
    """Random-walk insertion ran out of kicks.

    Signals an unlucky placement seed (made negligible by the load
    target); the structure may have displaced one element, so the owner
    should rebuild with a fresh seed rather than continue.
    """


def never_stale(_tag: int) -> bool:
    return False


@dataclass(frozen=True)
class DictSpaceReport:
    """Itemized notional bit layout of one dictionary."""

    accounting: str  # "quotient" or "full"
    capacity_cells: int
    cell_bits: int
    cells_total_bits: int
    cursor_bits: int
    occupancy_bits: int
    seed_bits: int
    walk_state_bits: int
    overhead_bits: int
    total_bits: int


class Dictionary:
    """Cuckoo-hashed store of fingerprint -> tag with ordered cell scanning."""

    def __init__(
        self,
        element_capacity: int,
        fp_range: int,
        tag_bits: int,
        seed: int,
        tag_range: int | None = None,
        full_fp_accounting: bool = False,
    ):
        if element_capacity < 1:
            raise ValueError("element_capacity must be >= 1")
        if fp_range < 1:
            raise ValueError("fp_range must be >= 1")
        if tag_bits < 1:
            raise ValueError("tag_bits must be >= 1")

        need = -(-element_capacity * _LOAD_DEN // _LOAD_NUM)  # ceil(cap / 0.9)
        block = 2 * BUCKET_SIZE
        self.capacity_cells = ((need + block - 1) // block) * block
        self.num_buckets = self.capacity_cells // BUCKET_SIZE
        self.element_capacity = element_capacity
        self.fp_range = fp_range
        self.tag_bits = tag_bits
        self.full_fp_accounting = full_fp_accounting

        self._occ = bytearray(self.capacity_cells)
        self._q = [0] * self.capacity_cells
        self._side = bytearray(self.capacity_cells)
        self._tag = [0] * self.capacity_cells

        self._offset_seed = derive_seed(seed, "bucket-placement")
        self._init_placement()
        self._walk = SplitMix64(derive_seed(seed, "cuckoo-walk"))

        self._cursor = 0
        self._occupancy = 0
        self._tag_counts = [0] * (tag_range if tag_range is not None else 1 << tag_bits)

        # per-operation instrumentation (cells counted bucket-granular)
        self.last_op_cells = 0
        self.last_op_kicks = 0
        self.max_kick_chain = 0

    # -- placement ---------------------------------------------------------

    def _init_placement(self) -> None:
        """Derive the two affine placement maps from the placement seed.

        Rebuilt whenever the seed changes (construction, snapshot load).
        """
        nb = self.num_buckets
        rng = SplitMix64(splitmix64(self._offset_seed))

        def draw_unit() -> int:
            while True:
                a = 1 + rng.below(nb - 1)
                if gcd(a, nb) == 1:
                    return a

        a1 = draw_unit()
        a2 = draw_unit()
        while nb >= 4 and a2 == a1:
            a2 = draw_unit()
        self._mult1 = a1
        self._mult2 = a2
        self._inv1 = pow(a1, -1, nb)
        self._inv2 = pow(a2, -1, nb)
        self._mix_cache: dict[int, tuple[int, int]] = {}

    def _mixes(self, q: int) -> tuple[int, int]:
        """Seeded per-quotient-class additive terms for the two sides."""
        pair = self._mix_cache.get(q)
        if pair is None:
            h1 = splitmix64(self._offset_seed ^ q)
            h2 = splitmix64(h1)
            pair = (h1 % self.num_buckets, h2 % self.num_buckets)
            self._mix_cache[q] = pair
        return pair

    def buckets_for(self, fp: int) -> tuple[int, int]:
        """The two candidate buckets of a fingerprint (side 1, side 2)."""
        nb = self.num_buckets
        q, r = divmod(fp, nb)
        m1, m2 = self._mixes(q)
        return (self._mult1 * r + m1) % nb, (self._mult2 * r + m2) % nb

    def _residue(self, q: int, side: int, bucket: int) -> int:
        """Invert one placement map: the r that lands (q, side) in bucket."""
        m1, m2 = self._mixes(q)
        if side == 1:
            return (bucket - m1) * self._inv1 % self.num_buckets
        return (bucket - m2) * self._inv2 % self.num_buckets

    def _decode(self, idx: int) -> int:
        """Reconstruct the fingerprint stored at an occupied cell."""
        q = self._q[idx]
        r = self._residue(q, self._side[idx], idx // BUCKET_SIZE)
        return q * self.num_buckets + r

    # -- core operations ----------------------------------------------------

    def member(self, fp: int, stale) -> int | None:
        """Tag stored for fp, or None if absent or stale. Read-only."""
        nb = self.num_buckets
        q, r = divmod(fp, nb)
        pair = self._mix_cache.get(q)
        if pair is None:
            pair = self._mixes(q)
        m1, m2 = pair
        occ = self._occ
        qs = self._q
        sides = self._side
        base = ((self._mult1 * r + m1) % nb) * BUCKET_SIZE
        for i in range(base, base + BUCKET_SIZE):
            if occ[i] and qs[i] == q and sides[i] == 1:
                self.last_op_cells = BUCKET_SIZE
                t = self._tag[i]
                return None if stale(t) else t
        base = ((self._mult2 * r + m2) % nb) * BUCKET_SIZE
        for i in range(base, base + BUCKET_SIZE):
            if occ[i] and qs[i] == q and sides[i] == 2:
                self.last_op_cells = 2 * BUCKET_SIZE
                t = self._tag[i]
                return None if stale(t) else t
        self.last_op_cells = 2 * BUCKET_SIZE
        return None

    def insert_or_update(self, fp: int, tag: int, stale) -> None:
        """Set fp's tag, inserting if needed; reclaims stale cells it examines.

        Raises InsertOverflow if the random walk exceeds MAX_KICKS.
        """
        nb = self.num_buckets
        q, r = divmod(fp, nb)
        occ = self._occ
        qs = self._q
        sides = self._side
        tags = self._tag
        counts = self._tag_counts

        pair = self._mix_cache.get(q)
        if pair is None:
            pair = self._mixes(q)
        m1, m2 = pair
        b1 = (self._mult1 * r + m1) % nb
        b2 = (self._mult2 * r + m2) % nb

        match = -1
        free_slot = -1
        free_side = 0
        for b, side in ((b1, 1), (b2, 2)):
            base = b * BUCKET_SIZE
            for i in range(base, base + BUCKET_SIZE):
                if occ[i]:
                    t = tags[i]
                    if stale(t):
                        occ[i] = 0
                        counts[t] -= 1
                        self._occupancy -= 1
                        if free_slot < 0:
                            free_slot = i
                            free_side = side
                    elif qs[i] == q and sides[i] == side:
                        match = i
                elif free_slot < 0:
                    free_slot = i
                    free_side = side

        self.last_op_kicks = 0
        if match >= 0:
            old = tags[match]
            counts[old] -= 1
            counts[tag] += 1
            tags[match] = tag
            self.last_op_cells = 2 * BUCKET_SIZE
            return

        if free_slot >= 0:
            occ[free_slot] = 1
            qs[free_slot] = q
            sides[free_slot] = free_side
            tags[free_slot] = tag
            counts[tag] += 1
            self._occupancy += 1
            self.last_op_cells = 2 * BUCKET_SIZE
            return

        # both candidate buckets full of live cells: random-walk eviction;
        # the carried element enters a bucket on a known side and swaps
        # with a random victim, which then walks to its other side
        walk = self._walk
        cur_q, cur_tag = q, tag
        if walk.next64() & 1 == 0:
            cur_b, cur_side = b1, 1
        else:
            cur_b, cur_side = b2, 2
        touched = 2 * BUCKET_SIZE
        for kick in range(1, MAX_KICKS + 1):
            base = cur_b * BUCKET_SIZE
            victim = base + (walk.next64() & 3)

            vq, vt, vside = qs[victim], tags[victim], sides[victim]
            v_r = self._residue(vq, vside, cur_b)
            vm1, vm2 = self._mixes(vq)
            if vside == 1:
                v_alt = (self._mult2 * v_r + vm2) % nb
            else:
                v_alt = (self._mult1 * v_r + vm1) % nb

            qs[victim] = cur_q
            tags[victim] = cur_tag
            sides[victim] = cur_side
            counts[vt] -= 1
            counts[cur_tag] += 1

            cur_q, cur_tag = vq, vt
            cur_b, cur_side = v_alt, 3 - vside

            base = v_alt * BUCKET_SIZE
            touched += BUCKET_SIZE
            free_slot = -1
            for i in range(base, base + BUCKET_SIZE):
                if occ[i]:
                    t = tags[i]
                    if stale(t):
                        occ[i] = 0
                        counts[t] -= 1
                        self._occupancy -= 1
                        if free_slot < 0:
                            free_slot = i
                elif free_slot < 0:
                    free_slot = i
            if free_slot >= 0:
                occ[free_slot] = 1
                qs[free_slot] = cur_q
                sides[free_slot] = cur_side
                tags[free_slot] = cur_tag
                counts[cur_tag] += 1
                self._occupancy += 1
                self.last_op_cells = touched
                self.last_op_kicks = kick
                if kick > self.max_kick_chain:
                    self.max_kick_chain = kick
                return

        self.last_op_cells = touched
        self.last_op_kicks = MAX_KICKS
        self.max_kick_chain = MAX_KICKS
        raise InsertOverflow(
            f"no placement for fingerprint {fp} after {MAX_KICKS} kicks "
            f"(occupancy {self._occupancy}/{self.capacity_cells})"
        )

    def delete(self, fp: int) -> bool:
        """Free the cell holding fp (stale or not); True if it was present."""
        occ = self._occ
        qs = self._q
        sides = self._side
        q = fp // self.num_buckets
        b1, b2 = self.buckets_for(fp)
        cells = BUCKET_SIZE
        for b, side in ((b1, 1), (b2, 2)):
            base = b * BUCKET_SIZE
            for i in range(base, base + BUCKET_SIZE):
                if occ[i] and qs[i] == q and sides[i] == side:
                    occ[i] = 0
                    self._tag_counts[self._tag[i]] -= 1
                    self._occupancy -= 1
                    self.last_op_cells = cells
                    return True
            cells = 2 * BUCKET_SIZE
        self.last_op_cells = 2 * BUCKET_SIZE
        return False

    def scan_step(self, k: int, stale) -> int:
        """Advance the scan cursor over k cells, freeing stale occupants.

        Returns the number of cells freed. Any ceil(capacity_cells/k)
        consecutive calls visit every cell at least once.
        """
        if k < 1:
            raise ValueError("scan width must be >= 1")
        occ = self._occ
        tags = self._tag
        counts = self._tag_counts
        cap = self.capacity_cells
        cur = self._cursor
        freed = 0
        for _ in range(k):
            if occ[cur]:
                t = tags[cur]
                if stale(t):
                    occ[cur] = 0
                    counts[t] -= 1
                    self._occupancy -= 1
                    freed += 1
            cur += 1
            if cur == cap:
                cur = 0
        self._cursor = cur
        self.last_op_cells = k
        return freed

    # -- accounting and introspection ----------------------------------------

    def occupancy(self) -> int:
        """Occupied cells, including stale ones not yet reclaimed."""
        return self._occupancy

    def tag_count(self, tag: int) -> int:
        """Occupied cells currently carrying this tag (stale included)."""
        return self._tag_counts[tag]

    @property
    def quotient_bits(self) -> int:
        return ((self.fp_range - 1) // self.num_buckets).bit_length()

    def bits_used(self) -> DictSpaceReport:
        """Notional packed size of the structure, itemized.

        Quotient accounting (default): occupied flag + quotient + side
        bit + tag per cell. Full accounting: occupied flag + whole
        fingerprint + tag per cell (the side is then derivable from the
        value, so no side bit).
        """
        if self.full_fp_accounting:
            accounting = "full"
            cell_bits = 1 + (self.fp_range - 1).bit_length() + self.tag_bits
        else:
            accounting = "quotient"
            cell_bits = 1 + self.quotient_bits + 1 + self.tag_bits
        cells_total = self.capacity_cells * cell_bits
        cursor_bits = max(1, (self.capacity_cells - 1).bit_length())
        occupancy_bits = max(1, self.capacity_cells.bit_length())
        seed_bits = 64
        walk_state_bits = 64
        overhead = cursor_bits + occupancy_bits + seed_bits + walk_state_bits
        return DictSpaceReport(
            accounting=accounting,
            capacity_cells=self.capacity_cells,
            cell_bits=cell_bits,
            cells_total_bits=cells_total,
            cursor_bits=cursor_bits,
            occupancy_bits=occupancy_bits,
            seed_bits=seed_bits,
            walk_state_bits=walk_state_bits,
            overhead_bits=overhead,
            total_bits=cells_total + overhead,
        )

    def entries(self):
        """Yield (cell_index, fingerprint, tag) for every occupied cell."""
        for i in range(self.capacity_cells):
            if self._occ[i]:
                yield i, self._decode(i), self._tag[i]

    def check_consistency(self) -> None:
        """Full-sweep structural audit (tests and debug use only)."""
        seen: dict[int, int] = {}
        occupied = 0
        counts = [0] * len(self._tag_counts)
        for i, fp, tag in self.entries():
            occupied += 1
            counts[tag] += 1
            if fp in seen:
                raise AssertionError(f"duplicate fingerprint {fp} in cells {seen[fp]} and {i}")
            seen[fp] = i
            b = i // BUCKET_SIZE
            if b not in self.buckets_for(fp):
                raise AssertionError(f"cell {i} outside candidate buckets of fp {fp}")
        if occupied != self._occupancy:
            raise AssertionError(f"occupancy counter {self._occupancy} != swept {occupied}")
        if counts != self._tag_counts:
            raise AssertionError("per-tag counts out of sync with cells")
