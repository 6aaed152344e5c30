"""Combinatorial decomposition of a seed integer into descending Tumblers.

A seed ``P`` is written as ``C(m_0, M) + C(m_1, M-1) + ... + C(m_{M-1}, 1)``
with ``m_0 > m_1 > ... > m_{M-1} >= 0``.  The representation is unique
(it is the combinatorial number system), so ``compose`` inverts
``decompose`` exactly.  All arithmetic is on Python ints.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

from .errors import CountTooSmall, InvalidDecomposition, NoRepresentation, SeedTooLarge


def binomial(n: int, k: int) -> int:
    """Exact ``C(n, k)``; zero when ``k > n``.

    Multiplicative formula with the division interleaved, so each partial
    product is itself a binomial coefficient and stays an exact integer.
    """
    if n < 0 or k < 0:
        raise ValueError("binomial arguments must be non-negative")
    if k > n:
        return 0
    k = min(k, n - k)
    result = 1
    for i in range(1, k + 1):
        result = result * (n - k + i) // i
    return result


@dataclass(frozen=True)
class Decomposition:
    terms: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(int(t) for t in self.terms))
        if not self.terms:
            raise InvalidDecomposition("a decomposition needs at least one term")
        for i, t in enumerate(self.terms):
            if t < self.order - 1 - i:
                raise InvalidDecomposition(
                    f"term {i} = {t} leaves no room for {self.order - 1 - i} lesser terms")
        for a, b in zip(self.terms, self.terms[1:]):
            if a <= b:
                raise InvalidDecomposition(f"terms not strictly descending: {a}, {b}")

    @property
    def order(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return seed


def min_tumbler_count(table_size: int, seed: int) -> int:
    """Smallest ``M >= 1`` with ``C(table_size, M) > seed``."""
    seed = _check_seed(seed)
    c = 1
    for m in range(1, table_size + 1):
        c = c * (table_size - m + 1) // m
        if c > seed:
            return m
    raise NoRepresentation(
        f"seed needs more than {table_size} tumblers in a table of {table_size} bits")


def _validate(seed: int, count: int, table_size: int) -> int:
    seed = _check_seed(seed)
    if count < 1:
        raise CountTooSmall("tumbler count must be at least 1")
    if count > table_size:
        raise SeedTooLarge(f"C({table_size}, {count}) = 0; no seed is representable")
    if seed < binomial(table_size, count):
        return seed
    # Only distinguish the two failures once the fast check has failed.
    try:
        minimum = min_tumbler_count(table_size, seed)
    except NoRepresentation:
        minimum = None
    if minimum is not None and count < minimum:
        raise CountTooSmall(f"seed needs at least {minimum} tumblers, got {count}")
    raise SeedTooLarge(f"seed >= C({table_size}, {count})")


def decompose(seed: int, count: int, table_size: int) -> Decomposition:
    """Greedy decomposition, each term located by binary search.

    Term ``i`` is searched on ``[count-1-i, prev-1]`` where ``prev`` is the
    previous term (``table_size`` for the first).
    """
    remaining = _validate(seed, count, table_size)
    terms = []
    prev = table_size
    for i in range(count):
        k = count - i
        lo, hi = k - 1, prev - 1
        # invariant: C(lo, k) <= remaining; C(k-1, k) = 0 makes it hold initially
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if binomial(mid, k) <= remaining:
                lo = mid
            else:
                hi = mid - 1
        terms.append(lo)
        remaining -= binomial(lo, k)
        prev = lo
    assert remaining == 0
    return Decomposition(tuple(terms))


def decompose_linear(seed: int, count: int, table_size: int) -> Decomposition:
    """Ascending brute-force scan; kept as the oracle for ``decompose``."""
    remaining = _validate(seed, count, table_size)
    terms = []
    prev = table_size
    for i in range(count):
        k = count - i
        m = k - 1
        c_next = 1  # C(k, k)
        # step up while C(m+1, k) still fits
        while m + 1 <= prev - 1 and c_next <= remaining:
            m += 1
            c_next = c_next * (m + 1) // (m + 1 - k)
        terms.append(m)
        remaining -= binomial(m, k)
        prev = m
    if remaining != 0:
        raise AssertionError("linear scan left a remainder")
    return Decomposition(tuple(terms))


def compose(decomposition) -> int:
    """Sum of ``C(terms[i], M - i)``.  Accepts a Decomposition or a sequence."""
    if not isinstance(decomposition, Decomposition):
        decomposition = Decomposition(tuple(decomposition))
    m = decomposition.order
    return sum(binomial(t, m - i) for i, t in enumerate(decomposition.terms))
