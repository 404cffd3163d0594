"""Decoupled-weight-decay Adam over named parameter arrays.

Parameters are updated in place; moment buffers live in the optimizer.
The per-element update runs through the kernel backend (fused loop
when the extension is compiled).
"""

from __future__ import annotations

import numpy as np

from . import kernels


class AdamW:
    def __init__(self, params: dict[str, np.ndarray], lr: float,
                 beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8, weight_decay: float = 0.01):
        for name, arr in params.items():
            if arr.dtype != np.float64 or not arr.flags["C_CONTIGUOUS"]:
                raise ValueError(f"parameter {name!r} must be contiguous float64")
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.weight_decay = weight_decay
        self.m = {k: np.zeros_like(p) for k, p in params.items()}
        self.v = {k: np.zeros_like(p) for k, p in params.items()}
        self.t = 0

    def step(self, grads: dict[str, np.ndarray]) -> None:
        """Apply one update from the given gradients (same keys as params)."""
        self.t += 1
        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t
        for name, p in self.params.items():
            kernels.adamw_step(
                p.ravel(), np.ascontiguousarray(grads[name]).ravel(),
                self.m[name].ravel(), self.v[name].ravel(),
                self.lr, self.beta1, self.beta2, self.eps,
                self.weight_decay, bc1, bc2)
