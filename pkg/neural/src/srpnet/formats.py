"""File-format twins of the localizer's external interfaces.

This package talks to the localizer exclusively through files, so the
formats are implemented here from their documented layout: the binary
feature file ("SRPF"), the ground-truth sidecar text, and the geometry
config text.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np
from scipy.io import wavfile

FEATURE_MAGIC = b"SRPF"
FEATURE_VERSION = 1
_HEADER = struct.Struct("<4sHHHHIf")


def nonredundant_pairs(num_mics: int) -> np.ndarray:
    return np.array(
        [(i, j) for i in range(num_mics) for j in range(i + 1, num_mics)],
        dtype=np.int64,
    )


@dataclass
class FeatureFile:
    features: np.ndarray  # (N', P, 2F) float32
    num_mics: int
    num_freqs: int
    frame_rate: float


def write_feature_file(path, features, num_mics: int, frame_rate: float) -> None:
    feats = np.asarray(features, dtype=np.float32)
    n_frames, n_pairs, two_f = feats.shape
    if n_pairs != num_mics * (num_mics - 1) // 2:
        raise ValueError(f"{n_pairs} pairs inconsistent with M={num_mics}")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(FEATURE_MAGIC, FEATURE_VERSION, num_mics, two_f // 2,
                              n_pairs, n_frames, float(frame_rate)))
        fh.write(nonredundant_pairs(num_mics).astype("<u2").tobytes())
        fh.write(feats.astype("<f4").tobytes())


def read_feature_file(path) -> FeatureFile:
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, version, n_mics, n_freqs, n_pairs, n_frames, rate = _HEADER.unpack_from(raw)
    if magic != FEATURE_MAGIC or version != FEATURE_VERSION:
        raise ValueError("not a supported feature file")
    off = _HEADER.size + 4 * n_pairs
    count = n_frames * n_pairs * 2 * n_freqs
    if len(raw) != off + 4 * count:
        raise ValueError("feature file truncated")
    feats = np.frombuffer(raw, dtype="<f4", count=count, offset=off)
    return FeatureFile(feats.reshape(n_frames, n_pairs, 2 * n_freqs).copy(),
                       n_mics, n_freqs, float(rate))


@dataclass
class Sidecar:
    azimuths: np.ndarray  # (K, N') radians
    elevations: np.ndarray  # (K, N') radians
    betas: np.ndarray  # (K, N')


def read_sidecar(path) -> Sidecar:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    header = dict(ln.split() for ln in lines[:2])
    n_frames = int(header["num_frames"])
    n_sources = int(header["num_sources"])
    az = np.zeros((n_sources, n_frames))
    el = np.zeros((n_sources, n_frames))
    beta = np.zeros((n_sources, n_frames))
    for ln in lines[3:]:
        n, k, a, e, b = ln.split()
        az[int(k), int(n)] = np.radians(float(a))
        el[int(k), int(n)] = np.radians(float(e))
        beta[int(k), int(n)] = float(b)
    return Sidecar(az, el, beta)


def read_geometry(path) -> tuple[np.ndarray, float]:
    """Geometry config -> ((M, 3) positions sorted by index, speed of sound)."""
    mics = {}
    c = 343.0
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "mic":
                idx = int(parts[1])
                if idx in mics:
                    raise ValueError(f"duplicate mic index {idx}")
                mics[idx] = [float(v) for v in parts[2:5]]
            elif parts[0] == "speed_of_sound":
                c = float(parts[1])
    return np.array([mics[i] for i in sorted(mics)]), c


def read_wav(path) -> tuple[int, np.ndarray]:
    fs, data = wavfile.read(path)
    if data.dtype == np.int16:
        data = data.astype(np.float64) / 32768.0
    else:
        data = data.astype(np.float64)
    if data.ndim == 1:
        data = data[:, None]
    return fs, data.T.copy()
