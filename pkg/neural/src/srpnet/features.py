"""Input features: log-magnitude and phase spectrograms of channel pairs.

Framing matches the localizer's analysis contract: periodic Hann
window of 512 samples, hop 256, transform size 512, kept bins 1..256.
"""

from __future__ import annotations

import math

import numpy as np

WINDOW = 512
HOP = 256
NFFT = 512
NUM_FREQS = NFFT // 2
LOG_EPS = 1e-8


def omega_axis(sample_rate: int = 16000) -> np.ndarray:
    f = np.arange(1, NUM_FREQS + 1, dtype=np.float64)
    return 2.0 * math.pi * f * sample_rate / NFFT


def num_output_frames(num_samples: int, pool: int = 12) -> int:
    n = (num_samples - WINDOW) // HOP + 1
    return n // pool


def stft_multichannel(signal: np.ndarray) -> np.ndarray:
    """(M, L) -> (M, N, F) complex, frames [n*hop, n*hop+window)."""
    x = np.atleast_2d(np.asarray(signal, dtype=np.float64))
    n_frames = (x.shape[1] - WINDOW) // HOP + 1
    if n_frames < 1:
        raise ValueError("signal shorter than one analysis window")
    taper = 0.5 - 0.5 * np.cos(2.0 * math.pi * np.arange(WINDOW) / WINDOW)
    idx = np.arange(WINDOW)[None, :] + HOP * np.arange(n_frames)[:, None]
    spec = np.fft.rfft(x[:, idx] * taper[None, None, :], n=NFFT, axis=-1)
    return spec[:, :, 1 : NUM_FREQS + 1]


def pair_planes(spec: np.ndarray, m: int, m_prime: int) -> np.ndarray:
    """(4, N, F) float32 stack [logmag m, logmag m', phase m, phase m']."""
    pair = spec[[m, m_prime]]
    logmag = np.log(np.abs(pair) + LOG_EPS)
    phase = np.angle(pair)
    return np.concatenate([logmag, phase], axis=0).astype(np.float32)
