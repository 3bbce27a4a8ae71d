"""Steered-response-power spectra from phase-difference features.

Everything here works on interleaved per-pair feature vectors of
length 2F: [cos(w1 t), sin(w1 t), ..., cos(wF t), sin(wF t)] for ideal
direct-path features, or [Re(psi_1), Im(psi_1), ...] for measured PHAT
cross-spectra. The inner product of such a vector with the ideal
vector of a candidate direction, averaged over pairs and frequencies,
is the spatial spectrum value at that direction.
"""

from __future__ import annotations

import numpy as np

from .geometry import (
    ArrayGeometry,
    CandidateGrid,
    Doa,
    MicPair,
    pair_tdoas,
    unit_vector,
    unit_vectors,
)


def _interleave(phases: np.ndarray, out=None) -> np.ndarray:
    """cos/sin interleaving along the last axis: (..., F) -> (..., 2F)."""
    shape = phases.shape[:-1] + (2 * phases.shape[-1],)
    if out is None:
        out = np.empty(shape, dtype=np.float64)
    out[..., 0::2] = np.cos(phases)
    out[..., 1::2] = np.sin(phases)
    return out


def _interleave_complex(z: np.ndarray) -> np.ndarray:
    """Re/Im interleaving along the last axis: (..., F) complex -> (..., 2F)."""
    out = np.empty(z.shape[:-1] + (2 * z.shape[-1],), dtype=np.float64)
    out[..., 0::2] = z.real
    out[..., 1::2] = z.imag
    return out


def phat_cross_spectrum(x_m: np.ndarray, x_mp: np.ndarray) -> np.ndarray:
    """Phase-transform cross-power spectrum of two TF planes.

    Returns exp(j*angle(X_m * conj(X_m'))), with bins where the product
    is exactly zero set to 0 so they contribute nothing downstream.
    """
    x_m = np.asarray(x_m)
    x_mp = np.asarray(x_mp)
    if x_m.shape != x_mp.shape:
        raise ValueError(f"shape mismatch {x_m.shape} vs {x_mp.shape}")
    prod = x_m * np.conj(x_mp)
    mag = np.abs(prod)
    psi = np.zeros_like(prod)
    nz = mag > 0
    psi[nz] = prod[nz] / mag[nz]
    return psi


def phat_feature_seq(x: np.ndarray, geom: ArrayGeometry, pool: int | None = 12) -> np.ndarray:
    """Interleaved PHAT features per pair, optionally block-averaged in time.

    Input (M, N, F) complex STFT tensor; output (N', P, 2F) where
    N' = N // pool (or N when pool is None). Block-averaging the
    cross-spectrum components equals averaging the per-frame spectra.
    """
    x = np.asarray(x)
    if x.ndim != 3:
        raise ValueError(f"expected (M, N, F) tensor, got {x.shape}")
    if x.shape[0] != geom.num_mics:
        raise ValueError(f"channel count {x.shape[0]} != M={geom.num_mics}")
    pairs = geom.pair_index_array()
    psi = phat_cross_spectrum(x[pairs[:, 0]], x[pairs[:, 1]])  # (P, N, F)
    if pool is not None:
        if pool < 1:
            raise ValueError("pool must be >= 1")
        n_out = psi.shape[1] // pool
        psi = psi[:, : n_out * pool].reshape(psi.shape[0], n_out, pool, -1).mean(axis=2)
    return np.transpose(_interleave_complex(psi), (1, 0, 2))


def dp_ipd_vector(geom: ArrayGeometry, pair: MicPair, doa: Doa, omegas: np.ndarray) -> np.ndarray:
    """Ideal direct-path phase-difference vector (2F,) for one pair."""
    baseline = geom.mic_positions[pair.m] - geom.mic_positions[pair.m_prime]
    tau = float(baseline @ unit_vector(doa)) / geom.speed_of_sound
    return _interleave(np.asarray(omegas, dtype=np.float64) * tau)


def dp_ipd_matrix(geom: ArrayGeometry, doa: Doa, omegas: np.ndarray) -> np.ndarray:
    """(P, 2F) ideal vectors of one direction for all nonredundant pairs."""
    tau = pair_tdoas(geom, unit_vector(doa)[None, :])[:, 0]  # (P,)
    return _interleave(tau[:, None] * np.asarray(omegas, dtype=np.float64)[None, :])


def target_vector(doas, betas, geom: ArrayGeometry, pair: MicPair, omegas) -> np.ndarray:
    """Activity-weighted sum of per-source ideal vectors for one pair."""
    if len(doas) != len(betas):
        raise ValueError(f"{len(doas)} directions vs {len(betas)} weights")
    out = np.zeros(2 * len(omegas))
    for doa, beta in zip(doas, betas):
        out += beta * dp_ipd_vector(geom, pair, doa, omegas)
    return out


def oracle_feature_seq(elevations, azimuths, betas, geom: ArrayGeometry, omegas) -> np.ndarray:
    """Exact weighted-sum feature sequence from ground truth.

    elevations/azimuths/betas are (K, N') arrays; returns (N', P, 2F).
    """
    el = np.atleast_2d(np.asarray(elevations, dtype=np.float64))
    az = np.atleast_2d(np.asarray(azimuths, dtype=np.float64))
    b = np.atleast_2d(np.asarray(betas, dtype=np.float64))
    if not (el.shape == az.shape == b.shape):
        raise ValueError("elevations, azimuths, betas must share shape (K, N')")
    omegas = np.asarray(omegas, dtype=np.float64)
    n_out = el.shape[1]
    out = np.zeros((n_out, geom.num_pairs, 2 * omegas.shape[0]))
    for k in range(el.shape[0]):
        tau = pair_tdoas(geom, unit_vectors(el[k], az[k]))  # (P, N')
        vecs = _interleave(tau[:, :, None] * omegas[None, None, :])  # (P, N', 2F)
        out += b[k][:, None, None] * np.transpose(vecs, (1, 0, 2))
    return out


def gcc_phat_frame(psi_frame: np.ndarray, geom: ArrayGeometry, pair: MicPair, doa: Doa, omegas) -> float:
    """Frame-wise correlation of a PHAT cross-spectrum with one direction.

    (1/F) sum_f Re{psi_f * exp(-j w_f tau)}; lies in [-1, 1].
    """
    psi = np.asarray(psi_frame)
    omegas = np.asarray(omegas, dtype=np.float64)
    if psi.shape != omegas.shape:
        raise ValueError(f"psi shape {psi.shape} != freq axis {omegas.shape}")
    baseline = geom.mic_positions[pair.m] - geom.mic_positions[pair.m_prime]
    tau = float(baseline @ unit_vector(doa)) / geom.speed_of_sound
    return float(np.mean(np.real(psi * np.exp(-1j * omegas * tau))))


class SteeringTable:
    """Precomputed ideal vectors for every (pair, candidate direction).

    The dominant localization cost is this table; it is built once and
    reused across frames. ``dtype`` float32 halves memory for the
    full-sphere 12-mic case with no visible accuracy cost; pass float64
    for tight-tolerance small cases.
    """

    def __init__(self, geom: ArrayGeometry, grid: CandidateGrid, omegas, dtype=np.float32):
        self.geom = geom
        self.grid = grid
        self.omegas = np.asarray(omegas, dtype=np.float64)
        n_freq = self.omegas.shape[0]
        tau = pair_tdoas(geom, grid.unit())  # (P, D)
        n_pairs, n_dirs = tau.shape
        self.values = np.empty((n_dirs, n_pairs, 2 * n_freq), dtype=dtype)
        for p in range(n_pairs):
            phases = tau[p][:, None] * self.omegas[None, :]
            self.values[:, p, :] = _interleave(phases)
        self._matrix = self.values.reshape(n_dirs, n_pairs * 2 * n_freq)
        self.scale = 2.0 / (geom.num_mics * (geom.num_mics - 1) * n_freq)

    @property
    def num_freqs(self):
        return self.omegas.shape[0]

    def ipd(self, direction_index: int) -> np.ndarray:
        """(P, 2F) float64 ideal vectors of one candidate direction."""
        return self.values[direction_index].astype(np.float64)

    def spectrum(self, features: np.ndarray) -> np.ndarray:
        """Spatial spectrum of feature frames: (..., P, 2F) -> (..., D)."""
        feats = np.asarray(features)
        n_pairs, two_f = self.values.shape[1], self.values.shape[2]
        if feats.shape[-2:] != (n_pairs, two_f):
            raise ValueError(
                f"features {feats.shape} incompatible with table "
                f"(P={n_pairs}, 2F={two_f})"
            )
        flat = feats.reshape(feats.shape[:-2] + (-1,)).astype(self.values.dtype, copy=False)
        return self.scale * (flat @ self._matrix.T)


def srp_phat_spectrum(
    x: np.ndarray,
    geom: ArrayGeometry,
    grid: CandidateGrid,
    omegas,
    table: SteeringTable | None = None,
    pool: int | None = None,
) -> np.ndarray:
    """Classical phase-transform steered response power, (N, D) per frame.

    Values lie in [-1, 1]. With ``pool`` set, frames are block-averaged
    to the output frame rate first (mean of the constituent frames'
    spectra).
    """
    if geom.num_mics < 2:
        raise ValueError("need at least 2 microphones")
    if table is None:
        table = SteeringTable(geom, grid, omegas)
    feats = phat_feature_seq(x, geom, pool=pool)
    return table.spectrum(feats)


def srp_feature_spectrum(
    features: np.ndarray,
    geom: ArrayGeometry,
    grid: CandidateGrid,
    omegas,
    table: SteeringTable | None = None,
) -> np.ndarray:
    """Spatial spectrum from summed per-pair feature vectors, (N', D).

    For exact single-source features with unit weight the value at the
    source direction is 1; in general values are bounded by the sum of
    source weights.
    """
    if table is None:
        table = SteeringTable(geom, grid, omegas)
    return table.spectrum(features)


def dp_spatial_spectrum_single(doa_k: Doa, geom: ArrayGeometry, omegas, directions) -> np.ndarray:
    """Pair-averaged ideal spectrum of a unit-weight source at ``doa_k``.

    ``directions`` is a CandidateGrid or a sequence of Doa. Computed
    straight from the cosine of per-frequency phase mismatches, so it
    is an independent check on the inner-product route.
    """
    omegas = np.asarray(omegas, dtype=np.float64)
    if isinstance(directions, CandidateGrid):
        u = directions.unit()
    else:
        u = unit_vectors([d.elevation for d in directions], [d.azimuth for d in directions])
    tau = pair_tdoas(geom, u)  # (P, D)
    tau_k = pair_tdoas(geom, unit_vector(doa_k)[None, :])  # (P, 1)
    dphase = (tau_k - tau)[:, :, None] * omegas[None, None, :]  # (P, D, F)
    return np.cos(dphase).mean(axis=(0, 2))
