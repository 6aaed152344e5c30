"""Circular bit arrays: the JP-Table and every ring derived from it.

A ring of ``L`` bits is stored as a Python int whose bit ``i`` is ring
position ``i``; position 0 is the start point.  This makes rotation two
shifts, XOR a single operator, and add-with-carry ordinary addition.
"""

import struct
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .errors import (BadLength, BadMagic, BadSize, InsufficientUniqueValues,
                     SizeMismatch, TrailingBits)
from .lcg import Lcg64

MIN_TABLE_SIZE = 4
MAX_TABLE_SIZE = 1 << 24
MAGIC = b"JPT1"
HEADER = struct.Struct("<4sQ")


def is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def check_table_size(size: int) -> int:
    if not is_power_of_two(size) or not MIN_TABLE_SIZE <= size <= MAX_TABLE_SIZE:
        raise BadSize(f"table size must be a power of two in [{MIN_TABLE_SIZE}, {MAX_TABLE_SIZE}], got {size}")
    return size


@dataclass(frozen=True)
class RingTable:
    """Immutable ring of ``size`` bits."""

    value: int
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise BadSize("a ring needs at least one bit")
        if not 0 <= self.value < (1 << self.size):
            raise ValueError("ring value does not fit in its size")

    @classmethod
    def from_string(cls, text: str) -> "RingTable":
        """Parse ``"011010"``; the first character is position 0."""
        text = "".join(text.split())
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a bit string: {text!r}")
        return cls(int(text[::-1], 2), len(text))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "RingTable":
        return cls.from_string("".join("1" if b else "0" for b in bits))

    @classmethod
    def zeros(cls, size: int) -> "RingTable":
        return cls(0, size)

    def __str__(self):
        return format(self.value, f"0{self.size}b")[::-1]

    def __len__(self):
        return self.size

    def __getitem__(self, i: int) -> int:
        return (self.value >> (i % self.size)) & 1

    @property
    def mask(self) -> int:
        return (1 << self.size) - 1

    @property
    def chunk_width(self) -> int:
        """Tumbler width ``log2(L)``; only defined for power-of-two rings."""
        if not is_power_of_two(self.size) or self.size < 2:
            raise BadSize(f"chunk width needs a power-of-two ring, got {self.size} bits")
        return self.size.bit_length() - 1

    def popcount(self) -> int:
        return self.value.bit_count()

    def to_array(self) -> np.ndarray:
        """Bits as a uint8 array, index = ring position."""
        raw = self.value.to_bytes((self.size + 7) // 8, "little")
        return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[: self.size]


def generate_table(size: int, generator_seed: int) -> RingTable:
    """Balanced table: L/2 ones, Fisher-Yates shuffled by the built-in LCG."""
    check_table_size(size)
    bits = [1] * (size // 2) + [0] * (size - size // 2)
    rng = Lcg64(generator_seed)
    for i in range(size - 1, 0, -1):
        j = rng.next() % (i + 1)
        bits[i], bits[j] = bits[j], bits[i]
    return RingTable.from_bits(bits)


def _rotate_value(value: int, t: int, size: int, mask: int) -> int:
    if t == 0:
        return value
    return (value >> t) | ((value << (size - t)) & mask)


def rotate(table: RingTable, t: int) -> RingTable:
    """``out[i] = in[(i + t) % L]``; ``t`` must already lie in ``[0, L)``."""
    if not 0 <= t < table.size:
        raise ValueError(f"rotation {t} outside [0, {table.size})")
    return RingTable(_rotate_value(table.value, t, table.size, table.mask), table.size)


def _common_size(tables: Sequence[RingTable]) -> int:
    if not tables:
        raise ValueError("need at least one table")
    size = tables[0].size
    for t in tables:
        if t.size != size:
            raise SizeMismatch(f"ring sizes differ: {size} vs {t.size}")
    return size


def xor_reduce(tables: Sequence[RingTable]) -> RingTable:
    """Flat left fold of positionwise XOR."""
    size = _common_size(tables)
    return RingTable(reduce(lambda a, b: a ^ b, (t.value for t in tables)), size)


def xor_reduce_pairwise(tables: Sequence[RingTable]) -> RingTable:
    """XOR adjacent pairs, giving ceil(n/2) tables, until one remains."""
    size = _common_size(tables)
    level = [t.value for t in tables]
    while len(level) > 1:
        nxt = [level[i] ^ level[i + 1] for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return RingTable(level[0], size)


def adc(a: int, b: int, size: int) -> int:
    """Add two ``size``-bit values with end-around carry."""
    s = a + b
    if s >> size:
        s = (s & ((1 << size) - 1)) + 1
    return s


def adc_reduce(tables: Sequence[RingTable]) -> RingTable:
    """Sequential left fold, in list order, of end-around-carry addition."""
    size = _common_size(tables)
    acc = tables[0].value
    for t in tables[1:]:
        acc = adc(acc, t.value, size)
    return RingTable(acc, size)


def read_chunk(table: RingTable, start_bit: int, width: int) -> int:
    """``width`` bits from ``start_bit`` (wrapping); lower position = lower weight."""
    L = table.size
    start_bit %= L
    end = start_bit + width
    if end <= L:
        return (table.value >> start_bit) & ((1 << width) - 1)
    low = table.value >> start_bit
    high = table.value & ((1 << (end - L)) - 1)
    return low | (high << (L - start_bit))


def read_tumblers(table: RingTable, start_bit: int, count: int,
                  filter_repeats: bool = True) -> Tuple[int, ...]:
    """Read ``count`` consecutive w-bit chunks around the ring.

    With ``filter_repeats`` a chunk equal to an already accepted value is
    skipped and reading moves on.  At most ``2 * L // w`` chunks are
    scanned before giving up.
    """
    L = table.size
    w = table.chunk_width
    if not 0 <= start_bit < L:
        raise ValueError(f"start bit {start_bit} outside [0, {L})")
    if count < 1:
        raise ValueError("count must be at least 1")
    budget = max(2 * L // w, count)
    out: List[int] = []
    seen = set()
    pos = start_bit
    for _ in range(budget):
        v = read_chunk(table, pos, w)
        pos += w
        if filter_repeats and v in seen:
            continue
        out.append(v)
        seen.add(v)
        if len(out) == count:
            return tuple(out)
    raise InsufficientUniqueValues(
        f"only {len(out)} unique tumblers in {budget} chunks, wanted {count}")


def serialize(table: RingTable) -> bytes:
    return HEADER.pack(MAGIC, table.size) + table.value.to_bytes((table.size + 7) // 8, "little")


def deserialize(data: bytes) -> RingTable:
    if len(data) < HEADER.size:
        raise BadLength(f"{len(data)} bytes is shorter than the {HEADER.size}-byte header")
    magic, size = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagic(f"expected {MAGIC!r}, got {magic!r}")
    if not 1 <= size <= MAX_TABLE_SIZE:
        raise BadLength(f"table size {size} out of range")
    payload = data[HEADER.size:]
    if len(payload) != (size + 7) // 8:
        raise BadLength(f"{size}-bit table needs {(size + 7) // 8} payload bytes, got {len(payload)}")
    value = int.from_bytes(payload, "little")
    if value >> size:
        raise TrailingBits("padding bits past the table end are not zero")
    return RingTable(value, size)


def load(path) -> RingTable:
    with open(path, "rb") as f:
        return deserialize(f.read())


def save(table: RingTable, path) -> None:
    with open(path, "wb") as f:
        f.write(serialize(table))
