"""Counter-based SplitMix64 streams.

Every replicate owns a 64-bit key derived from ``(seed, stream)``; draw ``i``
of that replicate is ``mix64(key + (i + 1) * GOLDEN)``. Because a draw depends
only on the key and its index, batches can be advanced in lock-step with numpy
and the compiled kernels reproduce exactly the same doubles.
"""

from dataclasses import dataclass

import numpy as np

ALGORITHM = "splitmix64-counter/v1"

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_SEED_SALT = 0x243F6A8885A308D3
_STREAM_MUL = 0xD1B54A32D192ED03
_INV_2_53 = 1.0 / (1 << 53)


@dataclass(frozen=True)
class SeedSpec:
    """Base seed plus a stream (replicate) index, both unsigned 64-bit."""

    seed: int = 0
    stream: int = 0

    def __post_init__(self):
        for name in ("seed", "stream"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or not 0 <= v <= MASK:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    def key(self) -> int:
        return stream_key(self.seed, self.stream)

    def offset(self, k: int) -> "SeedSpec":
        return SeedSpec(self.seed, (self.stream + k) & MASK)


def mix64(z: int) -> int:
    z &= MASK
    z = ((z ^ (z >> 30)) * _M1) & MASK
    z = ((z ^ (z >> 27)) * _M2) & MASK
    return z ^ (z >> 31)


def stream_key(seed: int, stream: int) -> int:
    base = mix64(seed + _SEED_SALT)
    return mix64(base ^ (((stream + 1) * _STREAM_MUL) & MASK))


def stream_keys(seed: int, first_stream: int, count: int) -> np.ndarray:
    """Keys for streams ``first_stream .. first_stream + count - 1``."""
    base = mix64(seed + _SEED_SALT)
    streams = (np.arange(count, dtype=np.uint64) + np.uint64(first_stream & MASK))
    with np.errstate(over="ignore"):
        z = (streams + np.uint64(1)) * np.uint64(_STREAM_MUL)
        return mix64_array(z ^ np.uint64(base))


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    with np.errstate(over="ignore"):
        z ^= z >> np.uint64(30)
        z *= np.uint64(_M1)
        z ^= z >> np.uint64(27)
        z *= np.uint64(_M2)
        z ^= z >> np.uint64(31)
    return z


def to_unit(z):
    """Top 53 bits of a 64-bit word as a double in [0, 1)."""
    if isinstance(z, np.ndarray):
        return (z >> np.uint64(11)).astype(np.float64) * _INV_2_53
    return (z >> 11) * _INV_2_53


class StreamRNG:
    """Sequential uniform draws from one ``(seed, stream)`` pair."""

    __slots__ = ("key", "counter")

    def __init__(self, key: int):
        self.key = key & MASK
        self.counter = 0

    @classmethod
    def from_seed(cls, seed: SeedSpec) -> "StreamRNG":
        return cls(seed.key())

    def random(self) -> float:
        self.counter += 1
        return to_unit(mix64(self.key + self.counter * GOLDEN))
