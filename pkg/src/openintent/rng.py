"""Deterministic random streams for sampling, shuffling, and repair.

All randomness in the harness flows through SplitMix64 so that splits,
prompt orders, and repaired assignments reproduce bit-for-bit across
platforms and Python versions. Independent sampling sites fork their own
stream from the base seed plus a site label, so adding a new site never
shifts the draws of an existing one.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _fnv1a(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


class SplitMix64:
    """SplitMix64 stream with labeled forking.

    ``fork(label)`` derives a child stream from the *original* seed and the
    label only; it does not consume or depend on the parent's position.
    """

    def __init__(self, seed: int):
        self._seed = seed & _MASK64
        self._state = seed & _MASK64

    @property
    def seed(self) -> int:
        return self._seed

    def fork(self, label: str) -> "SplitMix64":
        return SplitMix64(_mix(self._seed ^ _fnv1a(label.encode("utf-8"))))

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return _mix(self._state)

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n), bias-free via rejection sampling."""
        if n <= 0:
            raise ValueError(f"randrange bound must be positive, got {n}")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def randint(self, low: int, high: int) -> int:
        """Uniform integer in [low, high] inclusive."""
        if high < low:
            raise ValueError(f"empty range [{low}, {high}]")
        return low + self.randrange(high - low + 1)

    def uniform(self) -> float:
        """Float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) / float(1 << 53)

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample(self, population, k: int) -> list:
        """k distinct elements drawn without replacement, order randomized."""
        pool = list(population)
        if k > len(pool):
            raise ValueError(f"cannot sample {k} from population of {len(pool)}")
        for i in range(k):
            j = i + self.randrange(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def choice(self, population):
        pool = list(population)
        if not pool:
            raise ValueError("cannot choose from an empty population")
        return pool[self.randrange(len(pool))]
