"""File formats: WAV, binary feature files, ground-truth sidecars, CSVs.

Feature file layout (all little-endian):
  magic   4 bytes  b"SRPF"
  version u16      currently 1
  M       u16      microphone count
  F       u16      frequency count (vectors are 2F long)
  P       u16      pair count, must equal M*(M-1)/2
  N'      u32      frame count
  rate    f32      output frames per second
  pairs   P * (u16, u16)   nonredundant pair table, lexicographic
  payload N' * P * 2F f32  C-order [frame][pair][2F]
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass

import numpy as np
from scipy.io import wavfile

from .geometry import ArrayGeometry, Doa
from .detect import Detection
from .sim import OutputTruth

FEATURE_MAGIC = b"SRPF"
FEATURE_VERSION = 1
_HEADER = struct.Struct("<4sHHHHIf")


def read_wav(path) -> tuple[int, np.ndarray]:
    """Multichannel WAV -> (fs, (M, L) float64); PCM16 scaled to [-1, 1)."""
    fs, data = wavfile.read(path)
    if data.dtype == np.int16:
        data = data.astype(np.float64) / 32768.0
    elif data.dtype == np.int32:
        data = data.astype(np.float64) / 2147483648.0
    elif data.dtype in (np.float32, np.float64):
        data = data.astype(np.float64)
    else:
        raise ValueError(f"unsupported WAV sample format {data.dtype}")
    if data.ndim == 1:
        data = data[:, None]
    return fs, data.T.copy()


def write_wav(path, fs: int, signal: np.ndarray, dtype: str = "float32") -> None:
    """Write (M, L) float data as float32 (default) or PCM16."""
    sig = np.asarray(signal)
    if sig.ndim != 2:
        raise ValueError(f"signal must be (M, L), got {sig.shape}")
    data = sig.T
    if dtype == "float32":
        wavfile.write(path, fs, data.astype(np.float32))
    elif dtype == "pcm16":
        peak = np.max(np.abs(data))
        if peak > 1.0:
            data = data / peak
        q = np.clip(np.round(data * 32768.0), -32768, 32767)
        wavfile.write(path, fs, q.astype(np.int16))
    else:
        raise ValueError(f"unsupported dtype {dtype!r}")


@dataclass
class FeatureData:
    """In-memory image of a feature file."""

    features: np.ndarray  # (N', P, 2F) float32
    pairs: np.ndarray  # (P, 2) int
    num_mics: int
    num_freqs: int
    frame_rate: float


def write_feature_file(path, features: np.ndarray, geom: ArrayGeometry, frame_rate: float) -> None:
    feats = np.asarray(features, dtype=np.float32)
    if feats.ndim != 3:
        raise ValueError(f"features must be (N', P, 2F), got {feats.shape}")
    n_frames, n_pairs, two_f = feats.shape
    if n_pairs != geom.num_pairs:
        raise ValueError(f"{n_pairs} pair rows vs geometry's {geom.num_pairs}")
    if two_f % 2:
        raise ValueError("last axis must have even length (interleaved cos/sin)")
    pair_idx = geom.pair_index_array()
    with open(path, "wb") as fh:
        fh.write(
            _HEADER.pack(
                FEATURE_MAGIC, FEATURE_VERSION, geom.num_mics, two_f // 2,
                n_pairs, n_frames, float(frame_rate),
            )
        )
        fh.write(pair_idx.astype("<u2").tobytes())
        fh.write(feats.astype("<f4").tobytes())


def read_feature_file(path) -> FeatureData:
    """Read and validate a feature file; raises ValueError on any
    malformed header, pair table, or truncated payload."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise ValueError("feature file too short for its header")
    magic, version, n_mics, n_freqs, n_pairs, n_frames, rate = _HEADER.unpack_from(raw)
    if magic != FEATURE_MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    if version != FEATURE_VERSION:
        raise ValueError(f"unsupported feature file version {version}")
    if n_pairs != n_mics * (n_mics - 1) // 2:
        raise ValueError(f"pair count {n_pairs} != M(M-1)/2 for M={n_mics}")
    if not (rate > 0 and np.isfinite(rate)):
        raise ValueError(f"invalid frame rate {rate}")
    off = _HEADER.size
    table_bytes = 4 * n_pairs
    payload_count = n_frames * n_pairs * 2 * n_freqs
    expected = off + table_bytes + 4 * payload_count
    if len(raw) != expected:
        raise ValueError(f"file length {len(raw)} != expected {expected}")
    pairs = np.frombuffer(raw, dtype="<u2", count=2 * n_pairs, offset=off)
    pairs = pairs.reshape(n_pairs, 2).astype(np.int64)
    want = np.array(
        [(i, j) for i in range(n_mics) for j in range(i + 1, n_mics)], dtype=np.int64
    )
    if not np.array_equal(pairs, want):
        raise ValueError("pair table is not the nonredundant lexicographic enumeration")
    feats = np.frombuffer(raw, dtype="<f4", count=payload_count, offset=off + table_bytes)
    feats = feats.reshape(n_frames, n_pairs, 2 * n_freqs).copy()
    if not np.all(np.isfinite(feats)):
        raise ValueError("feature payload contains non-finite values")
    return FeatureData(feats, pairs, n_mics, n_freqs, float(rate))


def write_sidecar(path, truth: OutputTruth) -> None:
    """Ground-truth sidecar: header counts then one line per
    (frame, source): azimuth and elevation in degrees plus the
    activity weight."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"num_frames {truth.num_frames}\n")
        fh.write(f"num_sources {truth.num_sources}\n")
        fh.write("frame source azimuth_deg elevation_deg beta\n")
        for n in range(truth.num_frames):
            for k in range(truth.num_sources):
                fh.write(
                    f"{n} {k} {np.degrees(truth.azimuths[k, n]):.6f} "
                    f"{np.degrees(truth.elevations[k, n]):.6f} "
                    f"{truth.betas[k, n]:.6f}\n"
                )


def read_sidecar(path) -> OutputTruth:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    header = dict(ln.split() for ln in lines[:2])
    n_frames = int(header["num_frames"])
    n_sources = int(header["num_sources"])
    els = np.zeros((n_sources, n_frames))
    azs = np.zeros((n_sources, n_frames))
    betas = np.zeros((n_sources, n_frames))
    for ln in lines[3:]:
        n, k, az, el, beta = ln.split()
        n, k = int(n), int(k)
        azs[k, n] = np.radians(float(az))
        els[k, n] = np.radians(float(el))
        betas[k, n] = float(beta)
    return OutputTruth(elevations=els, azimuths=azs, betas=betas)


def write_estimates_csv(path, detections_per_frame: list[list[Detection]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["frame", "azimuth_deg", "elevation_deg", "weight"])
        for n, dets in enumerate(detections_per_frame):
            for d in dets:
                w.writerow(
                    [n, f"{np.degrees(d.doa.azimuth):.6f}",
                     f"{np.degrees(d.doa.elevation):.6f}", f"{d.weight:.6f}"]
                )


def read_estimates_csv(path, num_frames: int | None = None) -> list[list[tuple[Doa, float]]]:
    """Estimates grouped by frame; list length is num_frames (or the
    highest frame index + 1)."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            rows.append(
                (
                    int(rec["frame"]),
                    Doa(np.radians(float(rec["elevation_deg"])),
                        np.radians(float(rec["azimuth_deg"]))),
                    float(rec["weight"]),
                )
            )
    n = num_frames if num_frames is not None else (max((r[0] for r in rows), default=-1) + 1)
    out: list[list[tuple[Doa, float]]] = [[] for _ in range(n)]
    for frame, doa, weight in rows:
        if frame >= n:
            raise ValueError(f"estimate frame {frame} exceeds expected count {n}")
        out[frame].append((doa, weight))
    return out


def write_spectrum_csv(path, grid, values: np.ndarray) -> None:
    vals = np.asarray(values)
    if vals.shape != (len(grid),):
        raise ValueError(f"values shape {vals.shape} != grid size {len(grid)}")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["azimuth_deg", "elevation_deg", "value"])
        for i in range(len(grid)):
            w.writerow(
                [f"{np.degrees(grid.azimuths[i]):.4f}",
                 f"{np.degrees(grid.elevations[i]):.4f}", f"{vals[i]:.8f}"]
            )
