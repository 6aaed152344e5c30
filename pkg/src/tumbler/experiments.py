"""Limit-cycle measurement and basic keystream statistics."""

import csv
import hashlib
import io
import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
from scipy import stats as sps

from .combinadic import binomial
from .engine import EngineConfig, GeneratorState, InitVector, ReduceOp, initial_state, step
from .errors import GenerationAborted, NoCycleFound, TooShort, TumblerError
from .lcg import MASK64, Lcg64
from .ring import RingTable, generate_table, serialize

log = logging.getLogger(__name__)

CSV_HEADER = ("table_size", "tumbler_count", "trial_seed", "tail", "cycle", "bits_before_repeat")
Z_CRITICAL = 3.29
ALPHA = 0.001
_SEED_SALT = 0x9E3779B97F4A7C15


@dataclass(frozen=True)
class CycleReport:
    table_size: int
    tumbler_count: int
    trial_seed: int
    tail: int
    cycle: int

    @property
    def bits_before_repeat(self) -> int:
        return (self.tail + self.cycle) * (self.table_size // 2)

    def row(self):
        return (self.table_size, self.tumbler_count, self.trial_seed,
                self.tail, self.cycle, self.bits_before_repeat)


def fingerprint(state: GeneratorState) -> bytes:
    h = hashlib.blake2b(digest_size=16)
    h.update(serialize(state.ring))
    h.update(b"".join(t.to_bytes(4, "little") for t in state.tumblers))
    return h.digest()


def _same(a: GeneratorState, b: GeneratorState) -> bool:
    return a.ring == b.ring and a.tumblers == b.tumblers


def replay(jp: RingTable, seed: int, config: EngineConfig, iterations: int) -> GeneratorState:
    """State at the top of loop iteration ``iterations`` (0 = Constant Bit Mask)."""
    iv = InitVector.empty()
    state = initial_state(jp, seed, config)
    for k in range(1, iterations + 1):
        try:
            _, state = step(state, iv, config)
        except TumblerError as exc:
            raise GenerationAborted(k, exc) from exc
    return state


def cycle_scan(jp: RingTable, seed: int, config: EngineConfig, max_iterations: int,
               trial_seed: int = 0) -> CycleReport:
    """Run the unsalted machine until a loop-top state recurs.

    States are fingerprinted; a fingerprint hit is only reported once a
    fresh replay shows ``state(tail) == state(tail + cycle)`` in full.
    """
    if config.oscillator_enabled:
        raise ValueError("cycle scans need the oscillator disabled")
    iv = InitVector.empty()
    state = initial_state(jp, seed, config)
    seen: Dict[bytes, int] = {}
    for k in range(max_iterations):
        fp = fingerprint(state)
        if fp in seen:
            tail, cycle = seen[fp], k - seen[fp]
            first = replay(jp, seed, config, tail)
            second = replay(jp, seed, config, tail + cycle)
            if _same(first, second):
                return CycleReport(config.table_size, config.expanded_count, trial_seed, tail, cycle)
            log.warning("fingerprint collision at iterations %d and %d", tail, k)
        seen[fp] = k
        try:
            _, state = step(state, iv, config)
        except TumblerError as exc:
            raise GenerationAborted(k + 1, exc) from exc
    raise NoCycleFound(f"no repeat within {max_iterations} iterations", max_iterations)


def trial_inputs(table_size: int, tumbler_count: int, trial_seed: int):
    """JP-Table and seed for one trial; the seed is uniform below C(L, M')."""
    jp = generate_table(table_size, trial_seed)
    seed = Lcg64((trial_seed ^ _SEED_SALT) & MASK64).below(binomial(table_size, tumbler_count))
    return jp, seed


def run_trial(table_size: int, tumbler_count: int, trial_seed: int,
              reduce_op=ReduceOp.ADC, max_iterations: int = 100_000) -> CycleReport:
    config = EngineConfig(table_size, tumbler_count, reduce_op=reduce_op)
    jp, seed = trial_inputs(table_size, tumbler_count, trial_seed)
    return cycle_scan(jp, seed, config, max_iterations, trial_seed=trial_seed)


def cycle_reports(table_size: int, tumbler_count: int, trials: int, base_seed: int = 0,
                  reduce_op=ReduceOp.ADC, max_iterations: int = 100_000,
                  max_attempts: Optional[int] = None) -> List[CycleReport]:
    """``trials`` reports from consecutive trial seeds starting at ``base_seed``.

    A trial whose machine halts (an engine error before any repeat) has no
    cycle; its seed is skipped and the next one tried.  Gives up after
    ``max_attempts`` seeds (default ``50 * trials + 100``).
    """
    if max_attempts is None:
        max_attempts = 50 * trials + 100
    reports: List[CycleReport] = []
    halted = 0
    trial_seed = base_seed
    while len(reports) < trials:
        if trial_seed - base_seed >= max_attempts:
            raise NoCycleFound(
                f"L={table_size} M'={tumbler_count}: only {len(reports)} of {trials} trials "
                f"cycled in {max_attempts} attempts ({halted} machines halted)", max_iterations)
        try:
            reports.append(run_trial(table_size, tumbler_count, trial_seed, reduce_op, max_iterations))
        except GenerationAborted as exc:
            halted += 1
            log.debug("trial seed %d halted: %s", trial_seed, exc)
        trial_seed += 1
    if halted:
        log.info("L=%d M'=%d: skipped %d halted machines", table_size, tumbler_count, halted)
    return reports


def cycle_histogram(sizes: Sequence[int], counts: Sequence[int], trials: int, out=None,
                    base_seed: int = 0, reduce_op=ReduceOp.ADC, max_iterations: int = 100_000,
                    allow_large: bool = False) -> str:
    """CSV of cycle reports for every (size, count) pair; also written to ``out`` if given."""
    for L in sizes:
        if L > 4096 and not allow_large:
            raise ValueError(f"table size {L} exceeds 4096; pass allow_large to override")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for L in sizes:
        for m in counts:
            for report in cycle_reports(L, m, trials, base_seed, reduce_op, max_iterations):
                writer.writerow(report.row())
    text = buf.getvalue()
    if out is not None:
        if hasattr(out, "write"):
            out.write(text)
        else:
            with open(out, "w", newline="") as f:
                f.write(text)
    return text


@dataclass(frozen=True)
class TestResult:
    name: str
    statistic: float
    threshold: float
    passed: bool

    __test__ = False  # not a pytest class


@dataclass(frozen=True)
class StatsReport:
    n_bits: int
    tests: List[TestResult]

    @property
    def passed(self) -> bool:
        return all(t.passed for t in self.tests)

    def __getitem__(self, name: str) -> TestResult:
        for t in self.tests:
            if t.name == name:
                return t
        raise KeyError(name)


def _z_result(name, z):
    return TestResult(name, z, Z_CRITICAL, bool(abs(z) < Z_CRITICAL))


def keystream_stats(bits, chunk_width: int = 8) -> StatsReport:
    """Monobit, runs, chunk chi-square and lag-1 correlation on a 0/1 array.

    Degenerate inputs (no variance) give an infinite statistic, which fails.
    """
    x = np.asarray(bits, dtype=np.int64)
    n = x.size
    if n < 1024:
        raise TooShort(f"need at least 1024 bits, got {n}")
    ones = int(x.sum())
    zeros = n - ones

    monobit = (2 * ones - n) / math.sqrt(n)

    runs = 1 + int(np.count_nonzero(x[1:] != x[:-1]))
    mu = 2.0 * ones * zeros / n + 1
    var = (mu - 1) * (mu - 2) / (n - 1)
    runs_z = (runs - mu) / math.sqrt(var) if var > 0 else math.inf

    k = 1 << chunk_width
    n_chunks = n // chunk_width
    weights = 1 << np.arange(chunk_width, dtype=np.int64)
    values = x[: n_chunks * chunk_width].reshape(n_chunks, chunk_width) @ weights
    observed = np.bincount(values, minlength=k)
    expected = n_chunks / k
    chi2 = float(((observed - expected) ** 2).sum() / expected)
    chi2_crit = float(sps.chi2.ppf(1 - ALPHA, k - 1))

    d = x - ones / n
    denom = float((d * d).sum())
    corr_z = float((d[:-1] * d[1:]).sum()) / denom * math.sqrt(n) if denom > 0 else math.inf

    return StatsReport(n, [
        _z_result("monobit", monobit),
        _z_result("runs", runs_z),
        TestResult("chunk_chi_square", chi2, chi2_crit, chi2 < chi2_crit),
        _z_result("serial_correlation", corr_z),
    ])
