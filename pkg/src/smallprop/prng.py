"""splitmix64 generator, the normative randomness source for reproducible runs."""

from __future__ import annotations

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def prng_next(state: int) -> tuple[int, int]:
    """One splitmix64 step: returns (value, next_state)."""
    state = (state + _GOLDEN) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    z ^= z >> 31
    return z, state


def stream_seed(base: int, *keys: int) -> int:
    """Derive an independent stream seed from a base seed and integer keys."""
    s = base & MASK64
    for k in keys:
        s, _ = prng_next(s ^ (int(k) & MASK64))
    return s


class SplitMix64:
    """Stateful convenience wrapper around prng_next."""

    def __init__(self, seed: int) -> None:
        self.state = seed & MASK64

    def next_u64(self) -> int:
        value, self.state = prng_next(self.state)
        return value

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * 2.0**-53

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], both ends inclusive."""
        if hi < lo:
            raise ValueError("empty range")
        return lo + self.next_u64() % (hi - lo + 1)

    def uniform(self, lo: float, hi: float) -> float:
        return lo + self.random() * (hi - lo)
