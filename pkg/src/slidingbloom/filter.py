"""The sliding-window approximate membership filter.

The stream is split into generations of g consecutive positions, each
carrying one label from a counter that cycles modulo G. Elements are
stored in the cuckoo dictionary as fingerprint -> latest generation
label; an element is reported present exactly when its stored label is
among the c+1 most recent ones. Physical reclamation of expired cells
is decoupled from that logical expiry and differs by mode:

* deamortized (default): the label counter cycles modulo G = 2c+3, so
  a label stays unused for c+2 generations after it expires. Every
  insert advances an incremental scanner over (normally) two cells,
  and every dictionary operation frees any stale cell it examines;
  together these guarantee expired cells are physically gone before
  their label is handed out again, keeping per-operation work bounded.

* amortized: the reference implementation with G = c+2 and no
  activity check on lookups; the dictionary content is kept exactly
  equal to the last c+1 generations by one full scan per generation
  boundary, which purges the label the counter will use next. Queries
  agree with the deamortized mode at every step, and the mode exists
  to make that differential check possible.

Both modes answer queries in constant dictionary work and never answer
'No' for an element inside the window.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dictionary import Dictionary, InsertOverflow, never_stale
from .hashing import UniversalHash, new_hash
from .params import FilterParams, derive
from .prng import derive_seed

DEFAULT_UNIVERSE = 1 << 64

MODES = ("deamortized", "amortized")

# tiny dictionaries (a handful of buckets) can genuinely fail to host a
# legal element set; a floor on the element capacity keeps the cuckoo
# graph out of that regime at a few hundred bits of cost
MIN_DICT_ELEMENTS = 64

# overflow recovery: rebuild with a fresh placement seed at most this
# many times per insert before giving up and surfacing the error
MAX_REBUILDS_PER_INSERT = 3


class LabelReuseViolation(AssertionError):
    """Debug hook: a generation label was reused while cells still carried it."""


@dataclass(frozen=True)
class SpaceReport:
    """Notional bit footprint of a filter, itemized."""

    dictionary_bits: int
    gen_pos_bits: int
    gen_label_bits: int
    hash_bits: int
    counters_and_hash_bits: int
    total_bits: int
    dictionary: object  # DictSpaceReport


@dataclass(frozen=True)
class CostReport:
    """Touched-cell statistics gathered since construction (or load)."""

    inserts: int
    insert_cells_max: int
    insert_cells_max_no_kicks: int
    insert_cells_mean: float
    queries: int
    query_cells_max: int
    query_cells_mean: float
    max_kick_chain: int
    scan_width: int
    rebuilds: int


class SlidingFilter:
    """Approximate membership over the last n stream elements."""

    def __init__(self, params: FilterParams, seed: int, mode: str = "deamortized",
                 debug: bool = False):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        params.validate()
        self.params = params
        self.seed = seed
        self.mode = mode
        self.debug = debug

        self.hash: UniversalHash = new_hash(
            params.u, params.fp_range, derive_seed(seed, "fingerprint")
        )
        self.rebuilds = 0
        self._dict = Dictionary(
            element_capacity=max(params.dict_capacity, MIN_DICT_ELEMENTS),
            fp_range=params.fp_range,
            tag_bits=params.tag_bits,
            seed=derive_seed(seed, "dictionary"),
            tag_range=self.gen_modulus,
        )

        self.gen_pos = 0  # position inside the current generation, in [0, g)
        self.gen_label = 0  # current generation label, in [0, gen_modulus)
        self.steps = 0

        if mode == "deamortized":
            # full scanner pass must fit inside the (c+2)*g steps a label
            # stays stale before reuse; 2 cells per step suffices except
            # for degenerate tiny geometries
            span = (params.c + 2) * params.g
            self._scan_width = max(2, -(-self._dict.capacity_cells // span))
            flags = bytearray(self.gen_modulus)
            for t in range(self.gen_modulus):
                flags[t] = 0 if (self.gen_label - t) % self.gen_modulus <= params.c else 1
            self._stale_flags = flags
            self._stale = flags.__getitem__
        else:
            self._scan_width = 0
            self._stale_flags = None
            self._stale = never_stale

        self._ins_n = 0
        self._ins_sum = 0
        self._ins_max = 0
        self._ins_max_nokick = 0
        self._q_n = 0
        self._q_sum = 0
        self._q_max = 0
        self.boundaries = 0

    @classmethod
    def create(cls, n: int, m, epsilon: float, u: int = DEFAULT_UNIVERSE,
               seed: int = 0, mode: str = "deamortized", debug: bool = False
               ) -> "SlidingFilter":
        return cls(derive(n, m, epsilon, u), seed, mode=mode, debug=debug)

    @property
    def gen_modulus(self) -> int:
        """Label modulus actually in use: 2c+3 deamortized, c+2 amortized."""
        if self.mode == "amortized":
            return self.params.c + 2
        return self.params.gen_modulus

    # -- stream interface ----------------------------------------------------

    def insert(self, x: int) -> None:
        if not 0 <= x < self.params.u:
            raise ValueError(f"element {x} outside universe [0, {self.params.u})")
        d = self._dict
        h = self.hash
        stale = self._stale
        fp = ((h.a * x) % h.p) % h.range_size
        if self.mode == "deamortized":
            scan = self._scan_width
            d.scan_step(scan, stale)
            try:
                d.insert_or_update(fp, self.gen_label, stale)
            except InsertOverflow:
                self._recover_overflow(fp)
                d = self._dict
            cells = scan + d.last_op_cells
        else:
            try:
                d.insert_or_update(fp, self.gen_label, stale)
            except InsertOverflow:
                self._recover_overflow(fp)
                d = self._dict
            cells = d.last_op_cells

        kicks = d.last_op_kicks

        self.steps += 1
        pos = self.gen_pos + 1
        if pos == self.params.g:
            self.gen_pos = 0
            cells += self._advance_label()
        else:
            self.gen_pos = pos

        self._ins_n += 1
        self._ins_sum += cells
        if cells > self._ins_max:
            self._ins_max = cells
        if kicks == 0 and cells > self._ins_max_nokick:
            self._ins_max_nokick = cells

    def _recover_overflow(self, pending_fp: int) -> None:
        """Rehash into a reseeded dictionary after a failed cuckoo walk.

        The walk may have displaced one element, so the surviving live
        cells are collected and reinserted (stale ones are dropped,
        which only helps). Deterministic: retry seeds derive from the
        master seed and the rebuild count. After MAX_REBUILDS_PER_INSERT
        consecutive failures the overflow propagates to the caller.
        """
        stale = self._stale
        for _ in range(MAX_REBUILDS_PER_INSERT):
            survivors = [(fp, tag) for _idx, fp, tag in self._dict.entries()
                         if not stale(tag)]
            self.rebuilds += 1
            fresh = Dictionary(
                element_capacity=self._dict.element_capacity,
                fp_range=self.params.fp_range,
                tag_bits=self.params.tag_bits,
                seed=derive_seed(self.seed, f"dictionary-rebuild-{self.rebuilds}"),
                tag_range=self.gen_modulus,
            )
            try:
                for fp, tag in survivors:
                    fresh.insert_or_update(fp, tag, never_stale)
                fresh.insert_or_update(pending_fp, self.gen_label, never_stale)
            except InsertOverflow:
                continue
            self._dict = fresh
            return
        raise InsertOverflow(
            f"insert still failing after {MAX_REBUILDS_PER_INSERT} "
            f"reseeded rebuilds (element capacity {self._dict.element_capacity})"
        )

    def _advance_label(self) -> int:
        g_mod = self.gen_modulus
        label = (self.gen_label + 1) % g_mod
        self.gen_label = label
        self.boundaries += 1
        extra_cells = 0
        if self.mode == "deamortized":
            flags = self._stale_flags
            flags[label] = 0
            flags[(label - self.params.c - 1) % g_mod] = 1
        if self.debug and self._dict.tag_count(label):
            raise LabelReuseViolation(
                f"label {label} reused with {self._dict.tag_count(label)} cells still tagged"
            )
        if self.mode == "amortized":
            # purge one generation ahead of the counter: the cells that
            # fall out of the active window now, whose label is reused next
            target = (label + 1) % g_mod
            self._dict.scan_step(self._dict.capacity_cells, lambda t: t == target)
            extra_cells = self._dict.capacity_cells
        if self.debug and self.boundaries % 97 == 1:
            active = self.active_count()
            limit = (self.params.c + 1) * self.params.g
            if active > limit:
                raise AssertionError(f"active count {active} exceeds {limit}")
        return extra_cells

    def query(self, x: int) -> bool:
        """True iff x is reported in the window. Never false for window elements."""
        if not 0 <= x < self.params.u:
            raise ValueError(f"element {x} outside universe [0, {self.params.u})")
        h = self.hash
        fp = ((h.a * x) % h.p) % h.range_size
        tag = self._dict.member(fp, self._stale)
        cells = self._dict.last_op_cells
        self._q_n += 1
        self._q_sum += cells
        if cells > self._q_max:
            self._q_max = cells
        return tag is not None

    # -- introspection ---------------------------------------------------------

    def is_active_tag(self, tag: int) -> bool:
        if self.mode == "amortized":
            return True
        return (self.gen_label - tag) % self.gen_modulus <= self.params.c

    def active_count(self) -> int:
        """Stored fingerprints whose tag is currently active."""
        d = self._dict
        return sum(d.tag_count(t) for t in range(self.gen_modulus)
                   if self.is_active_tag(t))

    def active_fingerprints(self):
        """Yield every stored fingerprint with an active tag (debug/census)."""
        for _idx, fp, tag in self._dict.entries():
            if self.is_active_tag(tag):
                yield fp

    def bits_used(self) -> SpaceReport:
        dict_report = self._dict.bits_used()
        gen_pos_bits = max(1, (self.params.g - 1).bit_length())
        gen_label_bits = max(1, (self.gen_modulus - 1).bit_length())
        hash_bits = 2 * self.hash.p.bit_length()
        aux = gen_pos_bits + gen_label_bits + hash_bits
        return SpaceReport(
            dictionary_bits=dict_report.total_bits,
            gen_pos_bits=gen_pos_bits,
            gen_label_bits=gen_label_bits,
            hash_bits=hash_bits,
            counters_and_hash_bits=aux,
            total_bits=dict_report.total_bits + aux,
            dictionary=dict_report,
        )

    def step_cost_stats(self) -> CostReport:
        return CostReport(
            inserts=self._ins_n,
            insert_cells_max=self._ins_max,
            insert_cells_max_no_kicks=self._ins_max_nokick,
            insert_cells_mean=(self._ins_sum / self._ins_n) if self._ins_n else 0.0,
            queries=self._q_n,
            query_cells_max=self._q_max,
            query_cells_mean=(self._q_sum / self._q_n) if self._q_n else 0.0,
            max_kick_chain=self._dict.max_kick_chain,
            scan_width=self._scan_width,
            rebuilds=self.rebuilds,
        )

    @property
    def dictionary(self) -> Dictionary:
        return self._dict

    # -- persistence (implemented in snapshot.py) -------------------------------

    def save(self, target) -> None:
        from .snapshot import save_filter

        save_filter(self, target)

    @classmethod
    def load(cls, source) -> "SlidingFilter":
        from .snapshot import load_filter

        return load_filter(source)
