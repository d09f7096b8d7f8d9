"""BPSK / AWGN channel model and reproducible per-frame noise streams."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class LlrFrame:
    """Channel LLRs for one received frame (natural-log domain)."""

    values: np.ndarray
    sigma2: float | None = None


def ebn0_to_sigma2(ebn0_db: float, rate: float) -> float:
    """Noise variance for BPSK at a given Eb/N0; rate excludes CRC overhead."""
    if not 0.0 < rate <= 1.0:
        raise ValueError("rate must be in (0, 1]")
    return 1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0))


def frame_rng(master_seed: int, frame_index: int) -> np.random.Generator:
    """Independent stream for one frame; no worker-scheduling dependence."""
    seq = np.random.SeedSequence(entropy=(master_seed, frame_index))
    return np.random.Generator(np.random.Philox(seq))


def transmit(codeword, sigma2: float, rng) -> LlrFrame:
    """BPSK-modulate, add white Gaussian noise and scale to channel LLRs."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    x = np.asarray(codeword, dtype=np.float64)
    y = (1.0 - 2.0 * x) + rng.standard_normal(x.size) * math.sqrt(sigma2)
    return LlrFrame(2.0 * y / sigma2, sigma2)
