"""Seed-to-keystream state machine.

One loop iteration: (optionally) mix oscillator offsets into the Tumblers,
salt them with the IV, churn the current ring into the Intermediate Block,
churn that by its own leading Tumblers into the Final Block, emit the first
half of the Final Block and read the next Tumblers from the second half.
"""

import enum
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .combinadic import decompose, min_tumbler_count
from .errors import (BadInitVector, CountTooSmall, DuplicateTumbler, EmptyResult,
                     GenerationAborted, TumblerError)
from .lcg import Lcg64, MASK64
from .ring import (RingTable, adc_reduce, check_table_size, read_tumblers, rotate,
                   xor_reduce_pairwise)

Tumblers = Tuple[int, ...]


class ReduceOp(str, enum.Enum):
    XOR = "xor"
    ADC = "adc"


@dataclass(frozen=True)
class InitVector:
    """``length`` bits packed into ``value`` (bit i = IV bit i)."""

    value: int = 0
    length: int = 0

    def __post_init__(self):
        if self.length < 0 or not 0 <= self.value < (1 << self.length):
            raise BadInitVector("IV value does not fit its length")

    @classmethod
    def empty(cls) -> "InitVector":
        return cls(0, 0)

    @classmethod
    def from_bytes(cls, data: bytes) -> "InitVector":
        return cls(int.from_bytes(data, "little"), 8 * len(data))

    @classmethod
    def from_hex(cls, text: str) -> "InitVector":
        text = text.strip()
        if text.lower().startswith("0x"):
            text = text[2:]
        if len(text) % 2:
            raise BadInitVector("IV hex must be a whole number of bytes")
        return cls.from_bytes(bytes.fromhex(text))

    @classmethod
    def from_chunks(cls, chunks: Sequence[int], width: int) -> "InitVector":
        value = 0
        for i, c in enumerate(chunks):
            if not 0 <= c < (1 << width):
                raise BadInitVector(f"chunk {c} does not fit in {width} bits")
            value |= c << (i * width)
        return cls(value, width * len(chunks))

    def chunks(self, width: int) -> List[int]:
        if self.length % width:
            raise BadInitVector(f"IV length {self.length} is not a multiple of {width}")
        m = (1 << width) - 1
        return [(self.value >> (i * width)) & m for i in range(self.length // width)]


@dataclass(frozen=True)
class EngineConfig:
    table_size: int
    expanded_count: int
    extra_final_churn: bool = False
    reduce_op: ReduceOp = ReduceOp.XOR
    oscillator_enabled: bool = False
    oscillator_seed: int = 0

    def __post_init__(self):
        check_table_size(self.table_size)
        object.__setattr__(self, "reduce_op", ReduceOp(self.reduce_op))
        w = self.chunk_width
        # reads wrap around the ring, so the cap is the read_tumblers scan budget
        cap = 2 * self.table_size // w
        if not 2 <= self.expanded_count <= cap:
            raise CountTooSmall(
                f"expanded tumbler count must lie in [2, {cap}] for L={self.table_size}, "
                f"got {self.expanded_count}")

    @property
    def chunk_width(self) -> int:
        return self.table_size.bit_length() - 1


@dataclass(frozen=True)
class GeneratorState:
    ring: RingTable
    tumblers: Tumblers
    oscillator_state: int = 0
    bits_emitted: int = 0


def _reduce(tables: Sequence[RingTable], op: ReduceOp) -> RingTable:
    if op is ReduceOp.XOR:
        return xor_reduce_pairwise(tables)
    return adc_reduce(tables)


def churn(master: RingTable, tumblers: Sequence[int], reduce_op=ReduceOp.XOR,
          allow_repeats: bool = False) -> RingTable:
    """Reduce the rotations of ``master`` by every Tumbler in ``tumblers``."""
    if not tumblers:
        raise ValueError("churn needs at least one tumbler")
    if not allow_repeats and len(set(tumblers)) != len(tumblers):
        raise DuplicateTumbler(f"repeated tumbler in {list(tumblers)}")
    return _reduce([rotate(master, t) for t in tumblers], ReduceOp(reduce_op))


def _dedupe(values: Iterable[int]) -> Tumblers:
    return tuple(dict.fromkeys(values))


def salt_tumblers(tumblers: Sequence[int], iv: InitVector, width: int) -> Tumblers:
    """XOR IV chunks into the Tumblers, dropping any that collide.

    A dropped Tumbler does not consume its IV chunk.  Once the IV is
    exhausted the rest are copied, under the same collision rule.
    """
    chunks = iv.chunks(width)
    out: List[int] = []
    seen = set()
    c = 0
    for t in tumblers:
        candidate = t ^ chunks[c] if c < len(chunks) else t
        if candidate in seen:
            continue
        out.append(candidate)
        seen.add(candidate)
        if c < len(chunks):
            c += 1
    if not out:
        raise EmptyResult("salting dropped every tumbler")
    return tuple(out)


def offset_tumblers(tumblers: Sequence[int], offsets: Sequence[int], table_size: int) -> Tumblers:
    mixed = _dedupe((t + o) % table_size for t, o in zip(tumblers, offsets))
    if not mixed:
        raise EmptyResult("oscillator mixing left no tumblers")
    return mixed


def mix_oscillator(state: int, tumblers: Sequence[int], table_size: int) -> Tuple[int, Tumblers]:
    """Shift each Tumbler by one LCG draw (mod L); returns the new LCG state."""
    rng = Lcg64(state)
    offsets = [rng.next() % table_size for _ in tumblers]
    return rng.state, offset_tumblers(tumblers, offsets, table_size)


def constant_bit_mask(jp: RingTable, seed: int, config: EngineConfig) -> Tuple[RingTable, Tumblers]:
    """Churn the JP-Table by the seed's decomposition, then read M' Tumblers."""
    L = config.table_size
    if jp.size != L:
        raise ValueError(f"JP-Table has {jp.size} bits, config expects {L}")
    m = min_tumbler_count(L, seed)
    if config.expanded_count < m:
        raise CountTooSmall(f"seed needs {m} tumblers but M' = {config.expanded_count}")
    initial = decompose(seed, m, L).terms
    mask = churn(jp, initial, config.reduce_op)
    expanded = read_tumblers(mask, 0, config.expanded_count, filter_repeats=True)
    return mask, expanded


def initial_state(jp: RingTable, seed: int, config: EngineConfig) -> GeneratorState:
    try:
        mask, expanded = constant_bit_mask(jp, seed, config)
    except TumblerError as exc:
        raise GenerationAborted(0, exc) from exc
    return GeneratorState(mask, expanded, config.oscillator_seed & MASK64, 0)


def step(state: GeneratorState, iv: InitVector, config: EngineConfig) -> Tuple[int, GeneratorState]:
    """Run one loop iteration; returns (half-block as int, next state)."""
    L = config.table_size
    op = config.reduce_op
    tumblers = state.tumblers
    osc = state.oscillator_state
    if config.oscillator_enabled:
        osc, tumblers = mix_oscillator(osc, tumblers, L)
    salted = salt_tumblers(tumblers, iv, config.chunk_width)
    intermediate = churn(state.ring, salted, op)
    final_tumblers = read_tumblers(intermediate, 0, config.expanded_count, filter_repeats=True)
    final = churn(intermediate, final_tumblers, op)
    if config.extra_final_churn:
        again = read_tumblers(final, 0, config.expanded_count, filter_repeats=False)
        final = churn(final, again, op, allow_repeats=True)
    half = final.value & ((1 << (L // 2)) - 1)
    nxt = read_tumblers(final, L // 2, config.expanded_count, filter_repeats=True)
    return half, GeneratorState(final, nxt, osc, state.bits_emitted + L // 2)


def run_blocks(jp: RingTable, seed: int, iv: InitVector, config: EngineConfig, n_blocks: int):
    """Yield ``n_blocks`` half-blocks, each an int of L/2 bits."""
    iv.chunks(config.chunk_width)  # BadInitVector before any work
    state = initial_state(jp, seed, config)
    for k in range(1, n_blocks + 1):
        try:
            half, state = step(state, iv, config)
        except TumblerError as exc:
            raise GenerationAborted(k, exc) from exc
        yield half


def generate(jp: RingTable, seed: int, iv: InitVector, config: EngineConfig, n_bits: int) -> np.ndarray:
    """Exactly ``n_bits`` keystream bits as a uint8 array of 0/1."""
    if n_bits < 1:
        raise ValueError("n_bits must be at least 1")
    half_bits = config.table_size // 2
    n_blocks = -(-n_bits // half_bits)
    nbytes = (half_bits + 7) // 8
    parts = [
        np.unpackbits(np.frombuffer(h.to_bytes(nbytes, "little"), dtype=np.uint8),
                      bitorder="little")[:half_bits]
        for h in run_blocks(jp, seed, iv, config, n_blocks)
    ]
    return np.concatenate(parts)[:n_bits]


def pack_bits(bits) -> bytes:
    """Stream bit i goes to ``byte[i // 8] >> (i % 8)``."""
    return np.packbits(np.asarray(bits, dtype=np.uint8), bitorder="little").tobytes()


def unpack_bits(data: bytes, n_bits=None) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")
    return bits if n_bits is None else bits[:n_bits]
