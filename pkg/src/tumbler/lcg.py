"""The built-in 64-bit linear congruential generator.

Every deterministic draw in the package (table shuffles, oscillator offsets,
experiment seeds) comes from this generator so that outputs are
bit-reproducible without any third-party RNG.
"""

MULTIPLIER = 6364136223846793005
INCREMENT = 1442695040888963407
MASK64 = (1 << 64) - 1


class Lcg64:
    __slots__ = ("state",)

    def __init__(self, seed=0):
        self.state = seed & MASK64

    def next(self):
        """Advance once and return the high 32 bits of the new state."""
        self.state = (self.state * MULTIPLIER + INCREMENT) & MASK64
        return self.state >> 32

    def below(self, bound):
        """Draw an integer in ``[0, bound)`` by modulo reduction.

        Enough 32-bit outputs are concatenated to cover ``bound`` with 32
        spare bits, so arbitrary-precision bounds work too.
        """
        if bound <= 0:
            raise ValueError("bound must be positive")
        words = (bound.bit_length() + 31) // 32 + 1
        acc = 0
        for _ in range(words):
            acc = (acc << 32) | self.next()
        return acc % bound
