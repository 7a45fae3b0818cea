"""Counter-based pseudo-random generator used for all stochastic draws.

The generator is the classic SplitMix64 construction: a 64-bit counter
advances by a fixed odd increment (``GAMMA``), and each output is the
counter passed through a fixed avalanche mixer (:func:`mix64`).  Because
output ``i`` of a stream seeded with ``s`` is simply
``mix64(s + i * GAMMA)``, any block of the stream can be produced in one
vectorized shot without stepping through predecessors — which is what
makes bulk multi-replica simulation cheap — while the scalar
:meth:`SplitMix64.random` walk produces the identical sequence one value
at a time.

Substreams for replica ``r`` of a run seeded with ``seed`` are derived
as ``mix64(mix64(seed) + (r + 1) * GAMMA)``: the outer mix decorrelates
the derived seeds so per-replica streams are statistically independent
for all practical purposes.  The derivation is pure arithmetic on
``(seed, r)``, so replicas can be generated in any order, split across
workers, or regenerated individually, always with the same result.

Uniform doubles are formed from the top 53 bits of the mixed output
(``(z >> 11) * 2**-53``), giving values in ``[0, 1)``.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1

#: Stream increment: 2**64 divided by the golden ratio, forced odd.
GAMMA = 0x9E3779B97F4A7C15

_MIX_MULT_1 = 0xBF58476D1CE4E5B9
_MIX_MULT_2 = 0x94D049BB133111EB

_TO_UNIT = 2.0**-53


def mix64(z: int) -> int:
    """Avalanche a 64-bit integer (SplitMix64 finalizer).

    The mixer is bijective on 64-bit words: xor-shift by 30, multiply,
    xor-shift by 27, multiply, xor-shift by 31.
    """
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX_MULT_1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX_MULT_2) & _MASK64
    return z ^ (z >> 31)


def _mix64_inplace(z: np.ndarray) -> np.ndarray:
    """Vectorized :func:`mix64`, mutating a freshly built uint64 array
    (relies on the wrapping semantics of uint64 multiplication)."""
    with np.errstate(over="ignore"):
        z ^= z >> np.uint64(30)
        z *= np.uint64(_MIX_MULT_1)
        z ^= z >> np.uint64(27)
        z *= np.uint64(_MIX_MULT_2)
        z ^= z >> np.uint64(31)
    return z


def substream_seed(seed: int, index: int) -> int:
    """Derive the seed of substream ``index`` (0-based) of ``seed``.

    Defined as ``mix64(mix64(seed) + (index + 1) * GAMMA)``; distinct
    indices always yield distinct seeds because the mixer is bijective.
    """
    if index < 0:
        raise ValueError(f"substream index must be >= 0, got {index}")
    root = mix64(seed)
    return mix64((root + (index + 1) * GAMMA) & _MASK64)


def substream_seeds(seed: int, count: int) -> np.ndarray:
    """Vectorized :func:`substream_seed` for indices ``0 .. count-1``."""
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    z = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z *= np.uint64(GAMMA)
        z += np.uint64(mix64(seed))
    return _mix64_inplace(z)


def uniform_block(seeds: np.ndarray, n: int, offset: int = 0) -> np.ndarray:
    """Uniforms ``offset+1 .. offset+n`` of each stream in ``seeds``.

    Returns a ``(len(seeds), n)`` float64 array whose row ``r`` equals
    the values a scalar ``SplitMix64(seeds[r])`` would produce on draws
    ``offset+1`` through ``offset+n``.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    seeds = np.asarray(seeds, dtype=np.uint64)
    idx = np.arange(offset + 1, offset + n + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        idx *= np.uint64(GAMMA)
        z = seeds[:, None] + idx[None, :]
    _mix64_inplace(z)
    z >>= np.uint64(11)
    return z * _TO_UNIT


class SplitMix64:
    """Sequential view of one SplitMix64 stream.

    ``random()`` yields one float in ``[0, 1)``; ``random(n)`` yields an
    ``(n,)`` array equal to ``n`` successive scalar draws.
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def random(self, size: int | None = None):
        if size is None:
            self._state = (self._state + GAMMA) & _MASK64
            return (mix64(self._state) >> 11) * _TO_UNIT
        if size < 0:
            raise ValueError(f"size must be >= 0, got {size}")
        out = uniform_block(np.array([self._state], dtype=np.uint64), size)[0]
        self._state = (self._state + size * GAMMA) & _MASK64
        return out

    def spawn(self, index: int) -> "SplitMix64":
        """Stream for substream ``index`` of this stream's current state."""
        return SplitMix64(substream_seed(self._state, index))
