"""Seeded bitstring generation from rotations of a circular bit table."""

from .combinadic import Decomposition, binomial, compose, decompose, decompose_linear, min_tumbler_count
from .engine import (EngineConfig, GeneratorState, InitVector, ReduceOp, churn, constant_bit_mask,
                     generate, mix_oscillator, salt_tumblers)
from .ring import RingTable, adc_reduce, generate_table, read_tumblers, rotate, xor_reduce

__version__ = "0.1.0"
