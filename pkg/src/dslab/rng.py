"""Counter-based random words keyed by (seed, stream, index).

Each sample gets its own Philox4x64-10 key, so samples can be generated in
any order or in parallel and always come out the same.
"""
from __future__ import annotations

import numpy as np

ALGORITHM = "philox4x64-10/numpy-key(seed,stream<<48|index)"
STREAM_POINTS = 0
STREAM_CENTRES = 1


def words(seed: int, index: int, n: int, stream: int = STREAM_POINTS) -> np.ndarray:
    """n uint64 words; word 0 carries the most significant bits."""
    if not 0 <= seed < 2**64:
        raise ValueError("seed must fit in 64 bits")
    if not 0 <= index < 2**48:
        raise ValueError("index out of range")
    bg = np.random.Philox(key=np.array([seed, (stream << 48) | index], dtype=np.uint64))
    return bg.random_raw(n).astype(np.uint64)


def point_words(seed: int, samples: int, nwords: int, start: int = 0) -> np.ndarray:
    """Matrix (samples, nwords) of the binary digits of the sample points."""
    out = np.empty((samples, nwords), np.uint64)
    for s in range(samples):
        out[s] = words(seed, start + s, nwords)
    return out


def point_value(row: np.ndarray, P: int):
    """The sample point X / 2**P as an exact Fraction, using the first P bits of row."""
    from fractions import Fraction
    nw = -(-P // 64)
    X = 0
    for w in row[:nw]:
        X = (X << 64) | int(w)
    X >>= nw * 64 - P
    return Fraction(X, 1 << P)
