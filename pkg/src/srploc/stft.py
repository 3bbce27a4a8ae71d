"""Short-time Fourier analysis and the dual-channel input feature stack."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import ConfigError

LOG_EPS = 1e-8


@dataclass(frozen=True)
class StftConfig:
    """Framing parameters. Defaults: 32 ms Hann window, 16 ms hop at 16 kHz.

    Frequency bins 1..F of the transform are kept (DC dropped, Nyquist
    kept), so F = fft_size // 2 = 256 under defaults.
    """

    sample_rate: int = 16000
    window_length: int = 512
    hop: int = 256
    fft_size: int = 512
    window: str = "hann"

    def __post_init__(self):
        if not (0 < self.hop <= self.window_length <= self.fft_size):
            raise ConfigError(
                f"need hop <= window_length <= fft_size, got "
                f"{self.hop}/{self.window_length}/{self.fft_size}"
            )
        if self.window not in ("hann", "rect"):
            raise ConfigError(f"unknown window {self.window!r}")

    @property
    def num_freqs(self) -> int:
        return self.fft_size // 2

    def omega_axis(self) -> np.ndarray:
        """Angular frequencies (rad/s) of the kept bins 1..F."""
        f = np.arange(1, self.num_freqs + 1, dtype=np.float64)
        return 2.0 * math.pi * f * self.sample_rate / self.fft_size

    def num_frames(self, num_samples: int) -> int:
        if num_samples < self.window_length:
            return 0
        return (num_samples - self.window_length) // self.hop + 1

    def frame_center_times(self, num_frames: int) -> np.ndarray:
        """Center time (s) of each analysis frame."""
        n = np.arange(num_frames, dtype=np.float64)
        return (n * self.hop + 0.5 * self.window_length) / self.sample_rate

    def taper(self) -> np.ndarray:
        if self.window == "rect":
            return np.ones(self.window_length)
        # periodic Hann
        return 0.5 - 0.5 * np.cos(
            2.0 * math.pi * np.arange(self.window_length) / self.window_length
        )


def stft(signal, cfg: StftConfig = StftConfig()) -> np.ndarray:
    """Complex STFT of a (M, L) or (L,) signal -> (M, N, F).

    Frame n covers samples [n*hop, n*hop + window_length); the last
    partial frame is dropped. Kept bins are 1..fft_size//2.
    """
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2:
        raise ValueError(f"signal must be 1-D or 2-D, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("signal contains non-finite samples")
    n_frames = cfg.num_frames(x.shape[1])
    if n_frames == 0:
        raise ValueError(
            f"signal too short: {x.shape[1]} samples < window {cfg.window_length}"
        )
    idx = np.arange(cfg.window_length)[None, :] + cfg.hop * np.arange(n_frames)[:, None]
    frames = x[:, idx] * cfg.taper()[None, None, :]
    spec = np.fft.rfft(frames, n=cfg.fft_size, axis=-1)
    return spec[:, :, 1 : cfg.num_freqs + 1]


def input_features(x: np.ndarray) -> np.ndarray:
    """Stack log-magnitude and phase planes of a dual-channel STFT.

    Input (2, N, F) complex; output (4, N, F) float64 ordered
    [logmag ch0, logmag ch1, phase ch0, phase ch1].
    """
    x = np.asarray(x)
    if x.ndim != 3 or x.shape[0] != 2:
        raise ValueError(f"expected (2, N, F) dual-channel tensor, got {x.shape}")
    logmag = np.log(np.abs(x) + LOG_EPS)
    phase = np.angle(x)
    return np.concatenate([logmag, phase], axis=0)
