"""Pure-Python / numpy implementations of the hot kernels.

Reference implementations for the compiled module in _speedups.pyx.
Both backends must produce identical output: the hashing kernel is
integer-exact, and the float kernels keep the same per-element
operation order (the extension is compiled with -ffp-contract=off so
neither side fuses multiply-adds).
"""

from __future__ import annotations

import math

import numpy as np

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF
_SEP = b"\x1f"


def _fnv_update(h: int, data: bytes) -> int:
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _MASK64
    return h


def hash_ngrams(tokens: list[str], hash_dim: int) -> np.ndarray:
    """Bucket ids for all unigrams then all bigrams of a token sequence.

    Each feature string is hashed with 64-bit FNV-1a over its UTF-8
    bytes (bigrams as first token, 0x1f separator, second token) and
    reduced mod hash_dim.  Returns int64 bucket ids, one per feature
    occurrence, duplicates included.
    """
    enc = [t.encode("utf-8") for t in tokens]
    n = len(enc)
    out = np.empty(n + (n - 1 if n > 1 else 0), dtype=np.int64)
    heads = []
    for i, tb in enumerate(enc):
        h = _fnv_update(_FNV_OFFSET, tb)
        heads.append(h)
        out[i] = h % hash_dim
    for i in range(n - 1):
        h = _fnv_update(_fnv_update(heads[i], _SEP), enc[i + 1])
        out[n + i] = h % hash_dim
    return out


def adamw_step(
    param: np.ndarray,
    grad: np.ndarray,
    m: np.ndarray,
    v: np.ndarray,
    lr: float,
    beta1: float,
    beta2: float,
    eps: float,
    weight_decay: float,
    bias_c1: float,
    bias_c2: float,
) -> None:
    """One decoupled-weight-decay Adam update, in place on 1-D float64 views.

    bias_c1/bias_c2 are the step-dependent corrections 1 - beta^t,
    precomputed by the caller.
    """
    omb1 = 1.0 - beta1
    omb2 = 1.0 - beta2
    m[:] = beta1 * m + omb1 * grad
    v[:] = beta2 * v + omb2 * (grad * grad)
    param -= lr * ((m / bias_c1) / (np.sqrt(v / bias_c2) + eps)
                   + weight_decay * param)


def add_outer(out: np.ndarray, idx: np.ndarray, vals: np.ndarray,
              vec: np.ndarray) -> None:
    """out[idx[i], :] += vals[i] * vec for each i, in place.

    idx entries must be unique (feature buckets are deduplicated
    upstream); the numpy fancy-index update silently drops duplicates.
    """
    out[idx] += vals[:, None] * vec


def _self_test() -> bool:
    got = hash_ngrams(["a", "b"], 1 << 16)
    exp_a = _fnv_update(_FNV_OFFSET, b"a") % (1 << 16)
    exp_ab = _fnv_update(_FNV_OFFSET, b"a\x1fb") % (1 << 16)
    return got[0] == exp_a and got[2] == exp_ab and math.isfinite(1.0)
