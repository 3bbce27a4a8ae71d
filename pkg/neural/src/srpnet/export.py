"""Inference: run every microphone pair through the model and write the
predictions as a feature file the localizer accepts."""

from __future__ import annotations

import numpy as np
import torch

from .features import HOP, pair_planes, stft_multichannel
from .formats import nonredundant_pairs, read_wav, write_feature_file
from .model import CausalCrnn


def predict_features(model: CausalCrnn, signal: np.ndarray, batch: int = 11) -> np.ndarray:
    """(M, L) signal -> (N', P, 2F) predicted feature sequence."""
    model.eval()
    spec = stft_multichannel(signal)
    pairs = nonredundant_pairs(spec.shape[0])
    planes = np.stack([pair_planes(spec, int(m), int(mp)) for m, mp in pairs])
    outs = []
    with torch.no_grad():
        for lo in range(0, planes.shape[0], batch):
            out = model(torch.from_numpy(planes[lo : lo + batch]))
            outs.append(out.numpy())
    stacked = np.concatenate(outs, axis=0)  # (P, N', 2F)
    return np.transpose(stacked, (1, 0, 2)).astype(np.float32)


def export_features(model: CausalCrnn, wav_path, out_path, sample_rate: int = 16000) -> np.ndarray:
    fs, signal = read_wav(wav_path)
    if fs != sample_rate:
        raise ValueError(f"WAV rate {fs} != expected {sample_rate}")
    feats = predict_features(model, signal)
    frame_rate = fs / HOP / model.spec.time_compression
    write_feature_file(out_path, feats, signal.shape[0], frame_rate)
    return feats
