"""Tensor primitives for the CPU forward pass.

All operations take and return float32 arrays shaped (batch, channels,
height, width).  Convolutions carry no bias and batch normalization uses
current-batch statistics only, so the whole pipeline is positively
homogeneous: scaling an input batch by a power of two scales every
linear-layer output exactly, bit for bit.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

__all__ = [
    "ShapeMismatch",
    "conv2d",
    "batchnorm_batchstats",
    "avg_pool2d",
    "global_avg_pool",
    "linear",
    "relu",
]


class ShapeMismatch(ValueError):
    """Raised when operand shapes are incompatible."""


def conv2d(x: np.ndarray, weights: np.ndarray, stride: int = 1, padding: int = 0) -> np.ndarray:
    """Cross-correlate a batch with a (C_out, C_in, k, k) kernel, no bias.

    Kernels are 1x1 or 3x3.  With the usual same-padding choices
    (padding 1 for 3x3, 0 for 1x1) the output spatial size is
    ceil(H / stride) x ceil(W / stride).
    """
    if x.ndim != 4 or weights.ndim != 4:
        raise ShapeMismatch(f"need 4-d input and weights, got {x.shape} and {weights.shape}")
    n, c_in, _, _ = x.shape
    c_out, c_in_w, kh, kw = weights.shape
    if c_in_w != c_in:
        raise ShapeMismatch(f"input has {c_in} channels, kernel expects {c_in_w}")
    if kh != kw or kh not in (1, 3):
        raise ShapeMismatch(f"kernel must be 1x1 or 3x3, got {kh}x{kw}")
    if padding:
        x = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    windows = sliding_window_view(x, (kh, kw), axis=(2, 3))[:, :, ::stride, ::stride]
    _, _, oh, ow, _, _ = windows.shape
    cols = windows.transpose(0, 2, 3, 1, 4, 5).reshape(n * oh * ow, c_in * kh * kw)
    out = cols @ weights.reshape(c_out, -1).T
    return out.reshape(n, oh, ow, c_out).transpose(0, 3, 1, 2)


def batchnorm_batchstats(x: np.ndarray, epsilon: float) -> np.ndarray:
    """Standardize each channel by its own mini-batch statistics.

    y = (x - mean) / sqrt(var + epsilon) with the mean and biased
    variance taken over (batch, height, width); scale and shift are
    fixed at 1 and 0 (the network is never trained).  Statistics are
    accumulated in float64 so that reordering the batch perturbs them
    only at the 1e-16 level.  epsilon == 0 is allowed: channels with
    exactly zero variance then map to exactly zero output.
    """
    if x.shape[0] < 2:
        raise ShapeMismatch("batch statistics need at least 2 inputs")
    mean = x.mean(axis=(0, 2, 3), dtype=np.float64)
    centered = x - mean[None, :, None, None]
    var = np.mean(centered * centered, axis=(0, 2, 3))
    denom = np.sqrt(var + epsilon)
    # A zero denominator implies every deviation in the channel is zero.
    safe = np.where(denom == 0.0, 1.0, denom)
    return (centered / safe[None, :, None, None]).astype(np.float32)


def avg_pool2d(x: np.ndarray, kernel: int, stride: int = 1, padding: int = 0) -> np.ndarray:
    """Average pooling over kernel x kernel windows.

    Zero padding counts toward the average (the divisor is always
    kernel**2), which keeps the operator linear in its input.
    """
    if x.ndim != 4:
        raise ShapeMismatch(f"need a 4-d input, got {x.shape}")
    if padding:
        x = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    windows = sliding_window_view(x, (kernel, kernel), axis=(2, 3))[:, :, ::stride, ::stride]
    return windows.mean(axis=(4, 5))


def global_avg_pool(x: np.ndarray) -> np.ndarray:
    """Collapse the spatial dimensions to one mean per channel: (N, C)."""
    return x.mean(axis=(2, 3))


def linear(x: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Fully connected map of (N, F) features by (out, F) weights, no bias."""
    if x.shape[1] != weights.shape[1]:
        raise ShapeMismatch(f"{x.shape[1]} features vs weight fan-in {weights.shape[1]}")
    return x @ weights.T


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)
