"""Counter-mode resampling table.

Every random bit in the package is ``bit(seed, edge, index)``: a pure function
built from the SplitMix64 finaliser. Index ``i`` of edge ``e`` is bit ``i % 64``
of the word hashed from ``(seed, e, i // 64)``. The compiled kernels in
:mod:`sinkfree.kernels` reimplement the same function on uint64 and must agree
bit for bit.
"""

from __future__ import annotations

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
EDGE_MUL = 0xD1B54A32D192ED03
BLOCK_MUL = 0x8CB92BA72F3D8DD7

# purpose tags for derived seeds
TAG_PRS = 1
TAG_VERTEX = 2
TAG_EDGE = 3
TAG_FAST = 4
TAG_FPRAS = 5
TAG_GRAPH = 6
TAG_PROFILE = 7
TAG_COUPLING = 8

DEFAULT_SEED = 20240229


def mix64(z: int) -> int:
    z &= MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def table_key(seed: int) -> int:
    return mix64((seed & MASK) ^ GOLDEN)


def block_word(key: int, e: int, block: int) -> int:
    h = mix64(key + (e + 1) * EDGE_MUL)
    return mix64(h + (block + 1) * BLOCK_MUL)


def derive_seed(seed: int, *parts: int) -> int:
    """Seed for a sub-run, keyed by a purpose tag and counters."""
    h = table_key(seed)
    for p in parts:
        h = mix64(h + (p + 1) * EDGE_MUL)
    return h


def prf_bit(seed: int, e: int, i: int) -> int:
    return (block_word(table_key(seed), e, i >> 6) >> (i & 63)) & 1


class ResamplingTable:
    """Per-edge infinite streams of fair bits with consumption counters.

    ``bit(e, i)`` peeks without consuming; ``draw(e)`` returns the next
    unconsumed entry of edge ``e`` and advances its counter.
    """

    def __init__(self, seed: int = DEFAULT_SEED):
        self.seed = int(seed) & MASK
        self._key = table_key(self.seed)
        self.next_index: dict[int, int] = {}
        self._cache: dict[int, tuple[int, int]] = {}
        self.bits_consumed = 0

    def bit(self, e: int, i: int) -> int:
        blk = i >> 6
        hit = self._cache.get(e)
        if hit is None or hit[0] != blk:
            hit = (blk, block_word(self._key, e, blk))
            self._cache[e] = hit
        return (hit[1] >> (i & 63)) & 1

    def draw(self, e: int) -> int:
        i = self.next_index.get(e, 0)
        self.next_index[e] = i + 1
        self.bits_consumed += 1
        return self.bit(e, i)

    def fresh(self) -> "ResamplingTable":
        """Same stream, counters rewound to zero."""
        return ResamplingTable(self.seed)

    def __repr__(self):
        return f"ResamplingTable(seed={self.seed}, consumed={self.bits_consumed})"
