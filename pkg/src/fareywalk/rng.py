"""Counter-based random streams: Philox4x64-10 evaluated for many keys at once.

Walk ``w`` under seed ``s`` uses key ``(s, w)``; its ``j``-th block of four
64-bit words is the Philox bijection of counter ``(j, 0, 0, 0)``.  Output is
therefore a pure function of (seed, walk, step) and does not depend on how
walks are batched.  The bijection is the same one behind
``numpy.random.Philox``, which the test suite uses as a reference.
"""
from __future__ import annotations

import numpy as np

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)
_LO32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)

ROUNDS = 10


def _mulhilo(a: np.uint64, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """High and low 64-bit halves of the 128-bit product ``a * b``."""
    a_lo, a_hi = a & _LO32, a >> _S32
    b_lo, b_hi = b & _LO32, b >> _S32
    ll = a_lo * b_lo
    lh = a_lo * b_hi
    hl = a_hi * b_lo
    hh = a_hi * b_hi
    mid = (ll >> _S32) + (lh & _LO32) + (hl & _LO32)
    hi = hh + (lh >> _S32) + (hl >> _S32) + (mid >> _S32)
    lo = a * b  # wraps mod 2**64
    return hi, lo


def philox4x64(counter, key) -> np.ndarray:
    """Philox4x64-10 block function.

    ``counter`` has shape (..., 4) and ``key`` shape (..., 2), both uint64 and
    broadcastable; returns shape (..., 4).
    """
    counter = np.asarray(counter, dtype=np.uint64)
    key = np.asarray(key, dtype=np.uint64)
    shape = np.broadcast_shapes(counter.shape[:-1], key.shape[:-1])
    c0, c1, c2, c3 = (np.broadcast_to(counter[..., i], shape).copy() for i in range(4))
    k0 = np.broadcast_to(key[..., 0], shape).copy()
    k1 = np.broadcast_to(key[..., 1], shape).copy()
    with np.errstate(over="ignore"):
        for r in range(ROUNDS):
            hi0, lo0 = _mulhilo(_M0, c0)
            hi1, lo1 = _mulhilo(_M1, c2)
            c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
            if r < ROUNDS - 1:
                k0 = k0 + _W0
                k1 = k1 + _W1
    return np.stack([c0, c1, c2, c3], axis=-1)


def walk_stream(seed: int, walks: np.ndarray, steps: int) -> np.ndarray:
    """Raw uint64 draws of shape ``(len(walks), steps)`` for the given walk indices."""
    walks = np.asarray(walks, dtype=np.uint64)
    blocks = -(-steps // 4)
    key = np.empty((walks.size, 1, 2), dtype=np.uint64)
    key[..., 0] = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    key[..., 1] = walks[:, None]
    counter = np.zeros((1, blocks, 4), dtype=np.uint64)
    counter[0, :, 0] = np.arange(blocks, dtype=np.uint64)
    out = philox4x64(counter, key)  # (W, blocks, 4)
    return out.reshape(walks.size, blocks * 4)[:, :steps]
