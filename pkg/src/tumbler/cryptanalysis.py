"""Meet-in-the-middle Tumbler recovery and the attack cost model.

Given a master ring and a churn output made from ``T`` distinct Tumblers,
split the unknown set into two halves of ``T/2``.  Every half-set is
enumerated once; one list is keyed by "what the other half would have to
be" and the other by its own reduction, and equal keys are matched after
sorting both lists.
"""

import math
from dataclasses import dataclass
from itertools import combinations
from typing import List, Tuple

from .combinadic import binomial
from .engine import ReduceOp, churn
from .errors import NoSolution, TooLarge
from .ring import RingTable, rotate

MAX_ENTRIES = 1 << 26


@dataclass(frozen=True)
class AttackInstance:
    master: RingTable
    target: RingTable
    tumbler_count: int
    reduce_op: ReduceOp = ReduceOp.XOR

    def __post_init__(self):
        object.__setattr__(self, "reduce_op", ReduceOp(self.reduce_op))
        if self.tumbler_count < 2 or self.tumbler_count % 2:
            raise ValueError(f"tumbler count must be even and >= 2, got {self.tumbler_count}")
        if self.master.size != self.target.size:
            raise ValueError("master and target sizes differ")


def _half_reductions(master: RingTable, half: int, op: ReduceOp):
    L = master.size
    rotations = [rotate(master, t).value for t in range(L)]
    modulus = (1 << L) - 1
    for subset in combinations(range(L), half):
        if op is ReduceOp.XOR:
            acc = 0
            for t in subset:
                acc ^= rotations[t]
            yield subset, acc
        else:
            # end-around-carry sums are ones'-complement sums: only the residue
            # mod 2^L - 1 matters (all-ones and zero share residue 0)
            yield subset, sum(rotations[t] for t in subset) % modulus


def mitm_attack(instance: AttackInstance) -> List[Tuple[int, ...]]:
    """All Tumbler sets of the instance's size that churn master to target.

    Returned as ascending tuples, sorted.  Every candidate is re-churned
    and checked against the target before it is returned.
    """
    master, target, T, op = instance.master, instance.target, instance.tumbler_count, instance.reduce_op
    L = master.size
    half = T // 2
    entries = binomial(L, half)
    if entries > MAX_ENTRIES:
        raise TooLarge(f"C({L}, {half}) = {entries} half-sets exceeds the {MAX_ENTRIES} guard")

    modulus = (1 << L) - 1
    if op is ReduceOp.XOR:
        goal = target.value
        need = lambda v: v ^ goal
    else:
        goal = target.value % modulus
        need = lambda v: (goal - v) % modulus

    own = sorted(_half_reductions(master, half, op), key=lambda e: e[1])
    wanted = sorted(((s, need(v)) for s, v in own), key=lambda e: e[1])

    found = set()
    i = j = 0
    while i < len(wanted) and j < len(own):
        a, b = wanted[i][1], own[j][1]
        if a < b:
            i += 1
        elif a > b:
            j += 1
        else:
            i_end = i
            while i_end < len(wanted) and wanted[i_end][1] == a:
                i_end += 1
            j_end = j
            while j_end < len(own) and own[j_end][1] == a:
                j_end += 1
            for left, _ in wanted[i:i_end]:
                for right, _ in own[j:j_end]:
                    if set(left).isdisjoint(right):
                        found.add(tuple(sorted(left + right)))
            i, j = i_end, j_end

    verified = sorted(c for c in found if churn(master, c, op) == target)
    if not verified:
        raise NoSolution(f"no set of {T} distinct tumblers reproduces the target")
    return verified


@dataclass(frozen=True)
class CostModel:
    table_size: int
    tumbler_count: int
    log2_list_size: float
    log2_lower_bound: float


def log2_exact(n: int) -> float:
    """log2 of a positive big int, correct to double precision."""
    if n <= 0:
        raise ValueError("log2 of a non-positive number")
    shift = max(n.bit_length() - 64, 0)
    return shift + math.log2(n >> shift)


def attack_cost(table_size: int, tumbler_count: int) -> CostModel:
    """Enumeration size C(L, T/2) and the lower bound C(L, T/2) / C(T, T/2)."""
    T = tumbler_count
    if T < 2 or T % 2 or T > table_size:
        raise ValueError(f"tumbler count must be even in [2, {table_size}], got {T}")
    list_size = log2_exact(binomial(table_size, T // 2))
    return CostModel(table_size, T, list_size, list_size - log2_exact(binomial(T, T // 2)))


def min_secure_expanded_count(table_size: int, initial_count: int) -> int:
    """Smallest even T whose attack bound reaches half of all initial sets.

    The test ``log2 C(L,T/2) - log2 C(T,T/2) >= log2 C(L,M) - 1`` is done as
    ``2 C(L,T/2) >= C(L,M) C(T,T/2)`` in exact integers.
    """
    if initial_count < 1:
        raise ValueError("initial count must be at least 1")
    baseline = binomial(table_size, initial_count)
    for T in range(2, table_size + 1, 2):
        if 2 * binomial(table_size, T // 2) >= baseline * binomial(T, T // 2):
            return T
    raise ValueError(f"no even T <= {table_size} outweighs C({table_size}, {initial_count})")
