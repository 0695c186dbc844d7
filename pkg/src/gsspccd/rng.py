"""Random sources.

Every randomized operation takes an ``rng`` argument: any object with a
``getrandbits(k)`` method (``random.Random``, ``secrets.SystemRandom`` and
:class:`HashStream` all qualify).
"""

import hashlib
import secrets


class HashStream:
    """Deterministic SHA-256 counter stream, identical on every platform."""

    def __init__(self, seed: bytes):
        self._seed = bytes(seed)
        self._counter = 0
        self._pool = b""

    def _take(self, nbytes: int) -> bytes:
        while len(self._pool) < nbytes:
            block = hashlib.sha256(
                b"GSSPCCD-v1-rng" + self._seed + self._counter.to_bytes(8, "big")
            ).digest()
            self._pool += block
            self._counter += 1
        out, self._pool = self._pool[:nbytes], self._pool[nbytes:]
        return out

    def getrandbits(self, k: int) -> int:
        if k < 0:
            raise ValueError("number of bits must be non-negative")
        if k == 0:
            return 0
        value = int.from_bytes(self._take((k + 7) // 8), "big")
        return value >> (-k % 8)


def system_rng():
    return secrets.SystemRandom()


def randbelow(rng, bound: int) -> int:
    """Uniform integer in [0, bound) by rejection on ``bound.bit_length()`` bits."""
    if bound <= 0:
        raise ValueError("bound must be positive")
    k = bound.bit_length()
    while True:
        v = rng.getrandbits(k)
        if v < bound:
            return v


def randrange(rng, lo: int, hi: int) -> int:
    """Uniform integer in [lo, hi)."""
    return lo + randbelow(rng, hi - lo)
