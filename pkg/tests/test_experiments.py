import csv
import io
import statistics

import numpy as np
import pytest

from tumbler.engine import EngineConfig, InitVector, ReduceOp, generate, initial_state, step
from tumbler.errors import BadInitVector, GenerationAborted, NoCycleFound, TooShort
from tumbler.experiments import (CSV_HEADER, cycle_histogram, cycle_reports, cycle_scan,
                                 keystream_stats, replay, run_trial, trial_inputs)
from tumbler.ring import generate_table


def first_repeat(jp, seed, config, limit):
    """Linear search over stored full states; no hashing involved."""
    states = [initial_state(jp, seed, config)]
    for _ in range(limit):
        _, nxt = step(states[-1], InitVector.empty(), config)
        for j, s in enumerate(states):
            if s.ring == nxt.ring and s.tumblers == nxt.tumblers:
                return j, len(states) - j
        states.append(nxt)
    return None


@pytest.mark.parametrize("L, m", [(16, 3), (32, 3), (64, 3), (32, 2)])
def test_scan_matches_brute_force_first_repeat(L, m):
    checked = 0
    for report in cycle_reports(L, m, 10, base_seed=500):
        jp, seed = trial_inputs(L, m, report.trial_seed)
        config = EngineConfig(L, m, reduce_op=ReduceOp.ADC)
        assert first_repeat(jp, seed, config, report.tail + report.cycle) == (report.tail, report.cycle)
        checked += 1
    assert checked == 10


def test_reports_pass_full_state_replay():
    for report in cycle_reports(16, 2, 50, base_seed=7):
        jp, seed = trial_inputs(16, 2, report.trial_seed)
        config = EngineConfig(16, 2, reduce_op=ReduceOp.ADC)
        a = replay(jp, seed, config, report.tail)
        b = replay(jp, seed, config, report.tail + report.cycle)
        assert (a.ring, a.tumblers) == (b.ring, b.tumblers)
        assert report.cycle >= 1 and report.tail >= 0
        assert report.bits_before_repeat == (report.tail + report.cycle) * 8


def test_max_iterations_zero():
    jp, seed = trial_inputs(16, 3, 1)
    with pytest.raises(NoCycleFound):
        cycle_scan(jp, seed, EngineConfig(16, 3, reduce_op="adc"), 0)


def test_scan_rejects_oscillator():
    jp, seed = trial_inputs(16, 3, 1)
    with pytest.raises(ValueError):
        cycle_scan(jp, seed, EngineConfig(16, 3, oscillator_enabled=True), 10)


def test_halting_machine_propagates():
    # XOR with two tumblers always collapses to the zero ring
    with pytest.raises(GenerationAborted):
        run_trial(32, 2, 0, reduce_op=ReduceOp.XOR)
    with pytest.raises(NoCycleFound):
        cycle_reports(32, 2, 1, reduce_op=ReduceOp.XOR, max_attempts=5)


def test_histogram_rows_and_determinism():
    text = cycle_histogram([8, 16], [2, 3], 3)
    assert text == cycle_histogram([8, 16], [2, 3], 3)
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_HEADER
    assert len(rows) == 13
    assert text.endswith("\n")
    for r in rows[1:]:
        assert all(field.isdigit() for field in r)
        L, m, _, tail, cycle, bits = map(int, r)
        assert bits == (tail + cycle) * L // 2


def test_histogram_writes_file(tmp_path):
    path = tmp_path / "cycles.csv"
    text = cycle_histogram([8], [3], 2, out=path)
    assert path.read_text() == text


def test_histogram_size_envelope():
    with pytest.raises(ValueError):
        cycle_histogram([8192], [3], 1)


def test_median_cycle_at_64():
    for m in (2, 3):
        cycles = [r.cycle for r in cycle_reports(64, m, 20)]
        med = statistics.median(cycles)
        assert 0 < med < float("inf")


def test_wrong_iv_length_fails_before_generation():
    jp = generate_table(4096, 5)
    with pytest.raises(BadInitVector):
        generate(jp, 1, InitVector.from_bytes(bytes(26)), EngineConfig(4096, 13), 10)


def test_stats_all_zero_fails_monobit():
    report = keystream_stats(np.zeros(4096, dtype=np.uint8))
    assert not report["monobit"].passed
    assert not report.passed


def test_stats_alternating():
    bits = np.tile([0, 1], 4096)
    report = keystream_stats(bits)
    assert report["monobit"].passed
    assert not report["runs"].passed
    assert not report["serial_correlation"].passed


def test_stats_too_short():
    with pytest.raises(TooShort):
        keystream_stats(np.zeros(1023, dtype=np.uint8))


def test_stats_numpy_random_passes():
    bits = np.random.default_rng(0).integers(0, 2, size=1 << 18)
    assert keystream_stats(bits).passed


def test_stats_generated_keystream():
    jp = generate_table(4096, 5)
    cfg = EngineConfig(4096, 13)
    bits = generate(jp, 0xDEADBEEF, InitVector.from_chunks([17 * i for i in range(13)], 12), cfg, 1 << 17)
    report = keystream_stats(bits)
    assert report.passed, report
