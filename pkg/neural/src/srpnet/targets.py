"""Training targets: activity-weighted sums of ideal direct-path
phase-difference vectors, built from a ground-truth sidecar and the
array geometry."""

from __future__ import annotations

import numpy as np

from .features import omega_axis
from .formats import Sidecar, nonredundant_pairs


def unit_vectors(elevations, azimuths) -> np.ndarray:
    el = np.asarray(elevations, dtype=np.float64)
    az = np.asarray(azimuths, dtype=np.float64)
    return np.stack(
        [np.sin(el) * np.cos(az), np.sin(el) * np.sin(az), np.cos(el)], axis=-1
    )


def target_sequence(
    sidecar: Sidecar,
    mic_positions: np.ndarray,
    speed_of_sound: float = 343.0,
    sample_rate: int = 16000,
) -> np.ndarray:
    """(N', P, 2F) weighted-sum targets for every nonredundant pair."""
    omegas = omega_axis(sample_rate)
    pairs = nonredundant_pairs(mic_positions.shape[0])
    baselines = mic_positions[pairs[:, 0]] - mic_positions[pairs[:, 1]]  # (P, 3)
    K, n_frames = sidecar.betas.shape
    out = np.zeros((n_frames, pairs.shape[0], 2 * omegas.shape[0]))
    for k in range(K):
        u = unit_vectors(sidecar.elevations[k], sidecar.azimuths[k])  # (N', 3)
        tau = (baselines @ u.T) / speed_of_sound  # (P, N')
        phases = tau[:, :, None] * omegas[None, None, :]  # (P, N', F)
        vec = np.empty(phases.shape[:-1] + (2 * omegas.shape[0],))
        vec[..., 0::2] = np.cos(phases)
        vec[..., 1::2] = np.sin(phases)
        out += sidecar.betas[k][:, None, None] * np.transpose(vec, (1, 0, 2))
    return out
