"""Finite-level quantizer and the zooming-in difference encoder/decoder.

Each node transmits only the quantized, scaled innovation of its state. The
receiver integrates the same symbols, so in the ideal (noise-free,
zero-initialized) configuration every neighbor's reconstruction equals the
sender's own one-step predictor bit for bit.

A damped variant with initialization errors and additive round-off noise
models imperfect digital hardware.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "QuantizerSpec",
    "EncoderState",
    "DecoderState",
    "NoiseModel",
    "quantize",
    "quantize_vec",
    "encode_step",
    "decode_step",
    "damped_encode_step",
    "damped_decode_step",
]


@dataclass(frozen=True)
class QuantizerSpec:
    """Symmetric uniform quantizer with alphabet {-K, ..., 0, ..., K}."""

    K: int

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be at least 1")

    @property
    def bits_per_coord(self) -> int:
        return max(1, math.ceil(math.log2(2 * self.K)))


def quantize(zval: float, K: int) -> int:
    """Uniform quantizer: nearest integer in [-K, K], ties toward zero.

    Level 0 covers [-1/2, 1/2]; level i covers ((2i-1)/2, (2i+1)/2] for
    i = 1..K; inputs beyond (2K+1)/2 saturate to K. Negative inputs map by
    odd symmetry.
    """
    if not np.isfinite(zval):
        raise ValueError("quantizer input must be finite")
    if K < 1:
        raise ValueError("K must be at least 1")
    if zval < 0:
        return -quantize(-zval, K)
    i = math.ceil(zval - 0.5)
    return min(i, K)


def quantize_vec(v: np.ndarray, K: int) -> tuple:
    """Componentwise quantizer. Returns (levels, saturated_flag)."""
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("quantizer input must be finite")
    if K < 1:
        raise ValueError("K must be at least 1")
    mag = np.ceil(np.abs(v) - 0.5)
    saturated = bool((mag > K).any())
    q = np.sign(v) * np.minimum(np.maximum(mag, 0.0), K)
    return q.astype(np.int64), saturated


@dataclass(frozen=True)
class EncoderState:
    """Per-node transmitter state: one-step predictor plus telemetry."""

    b: np.ndarray
    round: int = 0
    saturation_events: int = 0
    max_abs_input: float = 0.0

    @staticmethod
    def initial(m: int) -> "EncoderState":
        return EncoderState(b=np.zeros(m))


@dataclass(frozen=True)
class DecoderState:
    """Per-edge receiver state: reconstruction of the sender's predictor."""

    xhat: np.ndarray
    round: int = 0

    @staticmethod
    def initial(m: int) -> "DecoderState":
        return DecoderState(xhat=np.zeros(m))


@dataclass(frozen=True)
class NoiseModel:
    """Damping and noise configuration for the robust codec variant.

    ``damping = 1`` with both noise sources disabled reproduces the ideal
    codec exactly.
    """

    damping: float = 1.0
    init_error_range: tuple = (0.0, 0.0)
    roundoff_amp: float = 0.0
    seed: int = 0
    init_errors_enabled: bool = False
    roundoff_enabled: bool = False

    def __post_init__(self):
        if not (0.0 < self.damping <= 1.0):
            raise ValueError("damping must be in (0, 1]")
        if self.roundoff_amp < 0.0:
            raise ValueError("roundoff_amp must be nonnegative")

    def is_ideal(self) -> bool:
        return (self.damping == 1.0 and not self.init_errors_enabled
                and not self.roundoff_enabled)


def encode_step(st: EncoderState, x: np.ndarray, s_prev: float,
                K: int) -> tuple:
    """One transmitter round: quantize the scaled innovation, advance b.

    Returns ``(q, new_state)`` where q is the integer symbol vector.
    """
    if s_prev <= 0.0:
        raise ValueError("scale must be positive")
    arg = (np.asarray(x, dtype=float) - st.b) / s_prev
    q, saturated = quantize_vec(arg, K)
    peak = float(np.abs(arg).max()) if arg.size else 0.0
    new = EncoderState(
        b=s_prev * q + st.b,
        round=st.round + 1,
        saturation_events=st.saturation_events + (1 if saturated else 0),
        max_abs_input=max(st.max_abs_input, peak),
    )
    return q, new


def decode_step(st: DecoderState, q: np.ndarray, s_prev: float) -> DecoderState:
    """One receiver round: integrate the symbol at the shared scale."""
    if s_prev <= 0.0:
        raise ValueError("scale must be positive")
    return DecoderState(xhat=s_prev * np.asarray(q) + st.xhat,
                        round=st.round + 1)


def damped_encode_step(st: EncoderState, x: np.ndarray, s_prev: float, K: int,
                       damping: float, noise: np.ndarray | float = 0.0) -> tuple:
    """Transmitter round with predictor damping and additive round-off noise.

    With ``damping = 1`` and zero noise this is bitwise identical to
    :func:`encode_step`.
    """
    if s_prev <= 0.0:
        raise ValueError("scale must be positive")
    arg = (np.asarray(x, dtype=float) - st.b) / s_prev
    q, saturated = quantize_vec(arg, K)
    peak = float(np.abs(arg).max()) if arg.size else 0.0
    if damping == 1.0 and np.all(np.asarray(noise) == 0.0):
        b_new = s_prev * q + st.b
    else:
        b_new = s_prev * q + damping * st.b + noise
    new = EncoderState(
        b=b_new,
        round=st.round + 1,
        saturation_events=st.saturation_events + (1 if saturated else 0),
        max_abs_input=max(st.max_abs_input, peak),
    )
    return q, new


def damped_decode_step(st: DecoderState, q: np.ndarray, s_prev: float,
                       damping: float,
                       noise: np.ndarray | float = 0.0) -> DecoderState:
    """Receiver round with the same damping/noise structure as the sender."""
    if s_prev <= 0.0:
        raise ValueError("scale must be positive")
    if damping == 1.0 and np.all(np.asarray(noise) == 0.0):
        xh = s_prev * np.asarray(q) + st.xhat
    else:
        xh = s_prev * np.asarray(q) + damping * st.xhat + noise
    return DecoderState(xhat=xh, round=st.round + 1)
