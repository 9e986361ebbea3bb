"""Seed-controlled random streams.

A :class:`RandomSource` is a Philox4x64 counter-based generator keyed by a
BLAKE2b digest of ``(master_seed, stream_id)``.  The key schedule and the
counter arithmetic are fully specified, so a given pair yields the same
values on every platform.  Substreams are derived by hashing labels into a
new ``stream_id``; they share no state with their parent.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

__all__ = ["RandomSource", "uniform_stream", "stream_key", "DEFAULT_SEED"]

DEFAULT_SEED = 20250407
_U64 = 1 << 64
_INV_2_52 = 2.0 ** -52


def _check_u64(name: str, value) -> int:
    if isinstance(value, bool) or int(value) != value or not 0 <= value < _U64:
        raise ValueError(f"{name} must be an unsigned 64-bit integer, got {value!r}")
    return int(value)


def stream_key(*labels) -> int:
    """Hash arbitrary JSON-able labels into a 64-bit stream id.

    Floats are encoded with ``repr`` so that ``0.1`` and ``0.10000000000000002``
    map to different streams.
    """
    text = json.dumps(labels, sort_keys=True, separators=(",", ":"), default=repr)
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


class RandomSource:
    """Deterministic uniform stream identified by ``(master_seed, stream_id)``.

    The instance is stateful: every draw advances its counter.  Use
    :meth:`clone` to replay from the current position and :meth:`spawn` to
    obtain an independent child stream.  Do not share one instance across
    threads.
    """

    def __init__(self, master_seed: int = DEFAULT_SEED, stream_id: int = 0):
        self.master_seed = _check_u64("master_seed", master_seed)
        self.stream_id = _check_u64("stream_id", stream_id)
        payload = self.master_seed.to_bytes(8, "little") + self.stream_id.to_bytes(8, "little")
        key = int.from_bytes(hashlib.blake2b(payload, digest_size=16).digest(), "little")
        self._bitgen = np.random.Philox(key=key)

    def __repr__(self) -> str:
        return f"RandomSource(master_seed={self.master_seed}, stream_id={self.stream_id})"

    def spawn(self, *labels) -> "RandomSource":
        """Child stream keyed by this stream's identity plus ``labels``."""
        return RandomSource(self.master_seed, stream_key(self.stream_id, *labels))

    def clone(self) -> "RandomSource":
        twin = RandomSource.__new__(RandomSource)
        twin.master_seed = self.master_seed
        twin.stream_id = self.stream_id
        twin._bitgen = np.random.Philox()
        twin._bitgen.state = self._bitgen.state
        return twin

    def raw(self, count: int) -> np.ndarray:
        return self._bitgen.random_raw(int(count))

    def uniforms(self, count: int) -> np.ndarray:
        """``count`` doubles in the open interval (0, 1).

        The top 52 bits of each 64-bit word select a cell of width 2**-52 and
        the value is the cell midpoint.  Every midpoint is exactly
        representable, so 0 and 1 cannot occur.
        """
        if count < 0:
            raise ValueError("count must be nonnegative")
        if count == 0:
            return np.empty(0, dtype=float)
        words = self.raw(count) >> np.uint64(12)
        return (words.astype(np.float64) + 0.5) * _INV_2_52

    def uniform(self) -> float:
        return float(self.uniforms(1)[0])


def uniform_stream(src: RandomSource, count: int) -> np.ndarray:
    """Draw ``count`` values in (0, 1) from ``src``."""
    return src.uniforms(count)
