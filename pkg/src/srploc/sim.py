"""Shoebox image-method simulation of moving sources at desk scale.

Renders multichannel microphone signals for sources following
continuous trajectories inside a reverberant rectangular room, plus
per-frame ground truth (direction relative to the array center and a
voice-activity flag). Source material is speech-shaped noise so no
corpus is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import butter, fftconvolve, sosfilt

from .geometry import ArrayGeometry, ConfigError, SPEED_OF_SOUND, wrap_azimuth
from .stft import StftConfig

ACTIVITY_FLOOR_DB = 40.0  # frame counts as active within this of the max frame energy


@dataclass(frozen=True)
class Room:
    """Rectangular room: dimensions (3,) meters, broadband RT60 seconds."""

    dimensions: tuple[float, float, float]
    rt60: float
    reflection_order: int = 6

    def __post_init__(self):
        dims = tuple(float(d) for d in self.dimensions)
        if len(dims) != 3 or any(d <= 0 for d in dims):
            raise ConfigError(f"room dimensions must be 3 positive values, got {dims}")
        if self.rt60 < 0:
            raise ConfigError("rt60 must be >= 0")
        if self.reflection_order < 0:
            raise ConfigError("reflection_order must be >= 0")
        object.__setattr__(self, "dimensions", dims)

    @property
    def volume(self) -> float:
        a, b, c = self.dimensions
        return a * b * c

    @property
    def surface(self) -> float:
        a, b, c = self.dimensions
        return 2.0 * (a * b + b * c + a * c)


def reflection_coefficient(room: Room) -> float:
    """Uniform wall amplitude reflection coefficient from RT60 (Eyring)."""
    if room.rt60 == 0.0:
        return 0.0
    absorption_exponent = 0.161 * room.volume / (room.surface * room.rt60)
    return math.exp(-0.5 * absorption_exponent)


class _ImageSet:
    """Mirror-image lattice for one room and reflection-order cap.

    Enumerates integer indices (r, p) with total reflection count
    sum(|r - p| + |r|) <= order; image position for a source s is
    (1 - 2p) * s + 2 * r * L and the amplitude is beta ** reflections.
    """

    def __init__(self, room: Room, order: int):
        half = order // 2 + 1
        rng = np.arange(-half, half + 1)
        r = np.stack(np.meshgrid(rng, rng, rng, indexing="ij"), axis=-1).reshape(-1, 3)
        p = np.stack(np.meshgrid([0, 1], [0, 1], [0, 1], indexing="ij"), axis=-1).reshape(-1, 3)
        r = np.repeat(r, p.shape[0], axis=0)
        p = np.tile(p, (rng.shape[0] ** 3, 1))
        refl = np.abs(r - p).sum(axis=1) + np.abs(r).sum(axis=1)
        keep = refl <= order
        self.r = r[keep]
        self.p = p[keep]
        self.reflections = refl[keep]
        beta = reflection_coefficient(room)
        self.amplitudes = np.power(beta, self.reflections.astype(np.float64))
        self.room = room

    def positions(self, source_pos: np.ndarray) -> np.ndarray:
        s = np.asarray(source_pos, dtype=np.float64)
        dims = np.asarray(self.room.dimensions)
        return (1 - 2 * self.p) * s[None, :] + 2 * self.r * dims[None, :]


def _sinc_pulse_scatter(h, distances, amplitudes, fs, c, halfwidth, cutoff_ratio):
    """Accumulate windowed-sinc fractional-delay pulses into h (M, npts).

    distances/amplitudes are (n_img, M) and (n_img,) arrays.
    """
    npts = h.shape[1]
    delay = distances * (fs / c)  # samples, (n_img, M)
    base = np.round(delay).astype(np.int64)
    offs = np.arange(-halfwidth, halfwidth + 1)
    idx = base[:, :, None] + offs[None, None, :]  # (n_img, M, W)
    t = (idx - delay[:, :, None]) / fs
    tw = 2.0 * halfwidth / fs
    window = np.where(np.abs(t) <= tw / 2, 0.5 * (1.0 + np.cos(2.0 * math.pi * t / tw)), 0.0)
    fc = cutoff_ratio * fs / 2.0
    # 2*fc/fs normalizes the sampled sinc to unit passband gain
    pulses = window * np.sinc(2.0 * fc * t) * (2.0 * fc / fs)
    gains = amplitudes[:, None] / (4.0 * math.pi * distances)
    vals = pulses * gains[:, :, None]
    mic_idx = np.broadcast_to(np.arange(h.shape[0])[None, :, None], idx.shape)
    valid = (idx >= 0) & (idx < npts)
    flat = mic_idx[valid] * npts + idx[valid]
    np.add.at(h.reshape(-1), flat, vals[valid])


def image_method_rir(
    room: Room,
    source_pos,
    mic_positions,
    order: int | None = None,
    fs: int = 16000,
    rir_seconds: float | None = None,
    speed_of_sound: float = SPEED_OF_SOUND,
    interp_halfwidth: int = 32,
    cutoff_ratio: float = 0.9,
    _image_set: _ImageSet | None = None,
) -> np.ndarray:
    """Image-method room impulse responses, (M, npts).

    Mirror images up to the reflection-order cap, 1/(4*pi*d) spreading,
    uniform Eyring wall coefficients, and windowed-sinc fractional
    delays. ``rir_seconds`` defaults to just long enough for the
    farthest enumerated image.
    """
    source = np.asarray(source_pos, dtype=np.float64).reshape(3)
    mics = np.atleast_2d(np.asarray(mic_positions, dtype=np.float64))
    if mics.shape[1] != 3:
        raise ConfigError(f"mic positions must be (M, 3), got {mics.shape}")
    dims = np.asarray(room.dimensions)
    if np.any(source <= 0) or np.any(source >= dims):
        raise ValueError(f"source {source.tolist()} not strictly inside room {dims.tolist()}")
    if np.any(mics <= 0) or np.any(mics >= dims[None, :]):
        raise ValueError("microphones must be strictly inside the room")
    if np.any(np.linalg.norm(mics - source[None, :], axis=1) < 1e-6):
        raise ValueError("source coincides with a microphone")
    order = room.reflection_order if order is None else order
    images = _image_set if _image_set is not None else _ImageSet(room, order)
    pos = images.positions(source)  # (n_img, 3)
    dists = np.linalg.norm(pos[:, None, :] - mics[None, :, :], axis=2)  # (n_img, M)
    if rir_seconds is None:
        npts = int(math.ceil(dists.max() * fs / speed_of_sound)) + interp_halfwidth + 2
    else:
        npts = int(round(rir_seconds * fs))
    h = np.zeros((mics.shape[0], npts))
    reach = (npts - 1 + interp_halfwidth) * speed_of_sound / fs
    keep = dists.min(axis=1) <= reach
    _sinc_pulse_scatter(
        h, dists[keep], images.amplitudes[keep], fs, speed_of_sound,
        interp_halfwidth, cutoff_ratio,
    )
    return h


def schroeder_rt60(rir: np.ndarray, fs: int, fit_db=(-5.0, -25.0)) -> float:
    """RT60 from the Schroeder backward-integrated energy decay curve.

    Fits a line to the decay between ``fit_db`` levels and extrapolates
    to -60 dB.
    """
    e = np.asarray(rir, dtype=np.float64).ravel() ** 2
    edc = np.cumsum(e[::-1])[::-1]
    if edc[0] <= 0:
        raise ValueError("empty impulse response")
    db = 10.0 * np.log10(edc / edc[0] + 1e-300)
    hi = int(np.argmax(db <= fit_db[0]))
    lo = int(np.argmax(db <= fit_db[1]))
    if lo <= hi:
        raise ValueError("decay range never reached; RIR too short for the fit")
    t = np.arange(hi, lo) / fs
    slope, _ = np.polyfit(t, db[hi:lo], 1)
    if slope >= 0:
        raise ValueError("energy decay curve is not decreasing")
    return -60.0 / slope


@dataclass(frozen=True)
class Trajectory:
    """Source path sampled at control times; linear interpolation between."""

    times: np.ndarray
    positions: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=np.float64)
        p = np.asarray(self.positions, dtype=np.float64)
        if t.ndim != 1 or p.shape != (t.shape[0], 3):
            raise ConfigError(f"trajectory shapes {t.shape} / {p.shape} inconsistent")
        if t.shape[0] < 1 or np.any(np.diff(t) <= 0):
            raise ConfigError("control times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "positions", p)

    @property
    def duration(self) -> float:
        return float(self.times[-1])

    def at(self, t) -> np.ndarray:
        """Positions at times t (scalar or (T,)), clamped to the ends."""
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        out = np.stack(
            [np.interp(t, self.times, self.positions[:, i]) for i in range(3)], axis=-1
        )
        return out

    @classmethod
    def static(cls, position, duration: float) -> "Trajectory":
        pos = np.asarray(position, dtype=np.float64).reshape(3)
        return cls(np.array([0.0, duration]), np.stack([pos, pos]))

    @classmethod
    def sinusoidal(
        cls, start, end, amplitude: float, cycles: float, duration: float, dt: float = 0.016
    ) -> "Trajectory":
        """Straight path from start to end with a horizontal sinusoidal sway."""
        start = np.asarray(start, dtype=np.float64)
        end = np.asarray(end, dtype=np.float64)
        n = max(2, int(round(duration / dt)) + 1)
        t = np.linspace(0.0, duration, n)
        frac = t / duration if duration > 0 else np.zeros_like(t)
        base = start[None, :] + frac[:, None] * (end - start)[None, :]
        heading = end[:2] - start[:2]
        norm = np.linalg.norm(heading)
        heading = heading / norm if norm > 1e-9 else np.array([1.0, 0.0])
        perp = np.array([-heading[1], heading[0], 0.0])
        sway = amplitude * np.sin(2.0 * math.pi * cycles * frac)
        return cls(t, base + sway[:, None] * perp[None, :])


@dataclass(frozen=True)
class SourceSpec:
    """One source's dry-signal recipe."""

    seed: int
    gated: bool = True
    kind: str = "speech_shaped"


@dataclass(frozen=True)
class MixSpec:
    """Scene mixing recipe: sources, noise level, duration."""

    sources: tuple[SourceSpec, ...]
    snr_db: float
    duration: float
    seed: int = 0

    def __post_init__(self):
        if len(self.sources) < 1:
            raise ConfigError("need at least one source")
        if self.duration <= 0:
            raise ConfigError("duration must be positive")
        object.__setattr__(self, "sources", tuple(self.sources))


def speech_shaped_noise(
    num_samples: int, fs: int, rng: np.random.Generator, gated: bool = True
) -> np.ndarray:
    """Gaussian noise with a speech-like spectral tilt and optional
    on/off amplitude gating (pauses between bursts, 10 ms ramps)."""
    white = rng.standard_normal(num_samples)
    sos = butter(2, [100.0, 4000.0], btype="band", fs=fs, output="sos")
    tilt = butter(1, 700.0, btype="low", fs=fs, output="sos")
    x = sosfilt(np.vstack([sos, tilt]), white)
    if gated:
        env = np.zeros(num_samples)
        ramp = int(0.010 * fs)
        pos = 0
        active = True
        while pos < num_samples:
            seg = rng.uniform(0.4, 1.2) if active else rng.uniform(0.15, 0.5)
            seg_len = int(seg * fs)
            if active:
                end = min(pos + seg_len, num_samples)
                env[pos:end] = 1.0
                n = min(ramp, end - pos)
                env[pos : pos + n] *= np.linspace(0.0, 1.0, n)
                if end < num_samples:
                    env[end - n : end] *= np.linspace(1.0, 0.0, n)
            pos += seg_len
            active = not active
        x = x * env
    rms = np.sqrt(np.mean(x**2))
    if rms > 0:
        x = x / rms
    return x


@dataclass
class SceneTruth:
    """Ground truth per input frame: direction and activity per source."""

    elevations: np.ndarray  # (K, N)
    azimuths: np.ndarray  # (K, N)
    active: np.ndarray  # (K, N) bool
    frame_times: np.ndarray  # (N,)

    @property
    def num_sources(self):
        return self.elevations.shape[0]

    @property
    def num_frames(self):
        return self.elevations.shape[1]

    def output_frames(self, pool: int = 12) -> "OutputTruth":
        """Aggregate to the output frame rate: activity weight = fraction
        of the block's input frames where the source is active;
        direction = the block's center frame value."""
        n_out = self.num_frames // pool
        sl = slice(0, n_out * pool)
        act = self.active[:, sl].reshape(self.num_sources, n_out, pool)
        betas = act.mean(axis=2)
        center = pool * np.arange(n_out) + pool // 2
        return OutputTruth(
            elevations=self.elevations[:, center].copy(),
            azimuths=self.azimuths[:, center].copy(),
            betas=betas,
        )


@dataclass
class OutputTruth:
    """Ground truth at the output frame rate."""

    elevations: np.ndarray  # (K, N')
    azimuths: np.ndarray  # (K, N')
    betas: np.ndarray  # (K, N')

    @property
    def num_sources(self):
        return self.elevations.shape[0]

    @property
    def num_frames(self):
        return self.elevations.shape[1]


def _frame_energies(signal: np.ndarray, cfg: StftConfig) -> np.ndarray:
    n = cfg.num_frames(signal.shape[0])
    idx = np.arange(cfg.window_length)[None, :] + cfg.hop * np.arange(n)[:, None]
    return (signal[idx] ** 2).sum(axis=1)


def synthesize(
    geom: ArrayGeometry,
    room: Room,
    trajectories: list[Trajectory],
    mix: MixSpec,
    array_center,
    fs: int = 16000,
    stft_cfg: StftConfig | None = None,
    block: int = 256,
    rir_seconds: float | None = None,
) -> tuple[np.ndarray, SceneTruth]:
    """Render the scene: (M, L) microphone signal plus ground truth.

    Moving sources are rendered block-wise (one RIR per ``block``
    samples at the block-center position, linear cross-fade between
    consecutive blocks). Gaussian noise is scaled to the requested SNR
    against the summed reverberant source images.
    """
    cfg = stft_cfg if stft_cfg is not None else StftConfig(sample_rate=fs)
    if len(trajectories) != len(mix.sources):
        raise ValueError(f"{len(trajectories)} trajectories vs {len(mix.sources)} sources")
    center = np.asarray(array_center, dtype=np.float64).reshape(3)
    mics_abs = geom.mic_positions + center[None, :]
    dims = np.asarray(room.dimensions)
    if np.any(mics_abs <= 0) or np.any(mics_abs >= dims[None, :]):
        raise ValueError("array placement puts microphones outside the room")
    num_samples = int(round(mix.duration * fs))
    for traj in trajectories:
        if traj.duration < (num_samples - 1) / fs - 1e-9:
            raise ValueError("trajectory shorter than the requested signal")
        # rendering interpolates linearly, so in-room control points
        # keep the whole path inside the (convex) room
        if np.any(traj.positions <= 0) or np.any(traj.positions >= dims[None, :]):
            raise ValueError("trajectory exits the room")

    images = _ImageSet(room, room.reflection_order)
    rng = np.random.default_rng(mix.seed)
    mixture = np.zeros((geom.num_mics, num_samples))
    dry = []
    for spec, traj in zip(mix.sources, trajectories):
        if spec.kind != "speech_shaped":
            raise ConfigError(f"unknown source kind {spec.kind!r}")
        s = speech_shaped_noise(num_samples, fs, np.random.default_rng(spec.seed), spec.gated)
        dry.append(s)
        mixture += _render_source(
            s, traj, mics_abs, room, images, fs, geom.speed_of_sound, block, rir_seconds
        )

    sig_power = float(np.mean(mixture**2))
    noise = rng.standard_normal(mixture.shape)
    if sig_power > 0:
        scale = math.sqrt(sig_power / np.mean(noise**2) / 10 ** (mix.snr_db / 10.0))
        mixture = mixture + scale * noise

    n_frames = cfg.num_frames(num_samples)
    times = cfg.frame_center_times(n_frames)
    K = len(mix.sources)
    els = np.zeros((K, n_frames))
    azs = np.zeros((K, n_frames))
    act = np.zeros((K, n_frames), dtype=bool)
    for k, (traj, s) in enumerate(zip(trajectories, dry)):
        rel = traj.at(times) - center[None, :]
        d = np.linalg.norm(rel, axis=1)
        els[k] = np.arccos(np.clip(rel[:, 2] / np.maximum(d, 1e-12), -1.0, 1.0))
        azs[k] = wrap_azimuth(np.arctan2(rel[:, 1], rel[:, 0]))
        energies = _frame_energies(s, cfg)
        floor = energies.max() * 10 ** (-ACTIVITY_FLOOR_DB / 10.0)
        act[k] = energies > floor
    return mixture, SceneTruth(els, azs, act, times)


def _render_source(
    signal, traj: Trajectory, mics_abs, room, images, fs, c, block, rir_seconds
):
    num_samples = signal.shape[0]
    n_blocks = (num_samples + block - 1) // block
    centers = (np.arange(n_blocks) + 0.5) * block / fs
    positions = traj.at(centers)
    static = np.allclose(positions, positions[0], atol=1e-12)
    if static:
        rir = image_method_rir(
            room, positions[0], mics_abs, fs=fs, rir_seconds=rir_seconds,
            speed_of_sound=c, _image_set=images,
        )
        out = fftconvolve(signal[None, :], rir, axes=1)
        return out[:, :num_samples]

    out = np.zeros((mics_abs.shape[0], num_samples))
    # hat-function cross-fade between consecutive block centers; the
    # first/last hats extend flat to the signal edges so weights sum to 1
    center_idx = np.round(centers * fs).astype(np.int64)
    for b in range(n_blocks):
        lo = 0 if b == 0 else center_idx[b - 1]
        hi = num_samples if b == n_blocks - 1 else min(center_idx[b + 1], num_samples)
        n = np.arange(lo, hi)
        w = np.ones(hi - lo)
        if b > 0:
            rise = n <= center_idx[b]
            w[rise] = (n[rise] - center_idx[b - 1]) / (center_idx[b] - center_idx[b - 1])
        if b < n_blocks - 1:
            fall = n > center_idx[b]
            w[fall] = 1.0 - (n[fall] - center_idx[b]) / (center_idx[b + 1] - center_idx[b])
        rir = image_method_rir(
            room, positions[b], mics_abs, fs=fs, rir_seconds=rir_seconds,
            speed_of_sound=c, _image_set=images,
        )
        seg = fftconvolve((signal[lo:hi] * w)[None, :], rir, axes=1)
        end = min(num_samples, lo + seg.shape[1])
        out[:, lo:end] += seg[:, : end - lo]
    return out


@dataclass(frozen=True)
class ScenarioConfig:
    """Sampling ranges for random scene generation."""

    room_dim_min: tuple[float, float, float] = (3.0, 3.0, 2.5)
    room_dim_max: tuple[float, float, float] = (10.0, 8.0, 6.0)
    rt60_range: tuple[float, float] = (0.2, 1.3)
    snr_range: tuple[float, float] = (5.0, 30.0)
    num_sources: int = 1
    duration: float = 4.0
    reflection_order: int = 6
    moving: bool = True
    gated: bool = True
    array_margin: float = 0.5
    source_margin: float = 0.3
    wall_margin: float = 0.3
    sin_amplitude_range: tuple[float, float] = (0.5, 2.0)
    sin_cycles_per_20s: tuple[float, float] = (1.0, 3.0)


@dataclass(frozen=True)
class Scenario:
    room: Room
    array_center: np.ndarray
    trajectories: tuple[Trajectory, ...]
    mix: MixSpec
    seed: int


def sample_scenario(seed: int, config: ScenarioConfig = ScenarioConfig()) -> Scenario:
    """Draw a reproducible random scene within the configured ranges."""
    cfg = config
    rng = np.random.default_rng(seed)
    lo = np.asarray(cfg.room_dim_min)
    hi = np.asarray(cfg.room_dim_max)
    if np.any(lo > hi):
        raise ConfigError("room_dim_min exceeds room_dim_max")
    if np.any(lo <= 2 * cfg.array_margin):
        raise ConfigError("array_margin too large for the smallest room")
    dims = rng.uniform(lo, hi)
    rt60 = rng.uniform(*cfg.rt60_range)
    room = Room(tuple(dims), float(rt60), cfg.reflection_order)
    center = rng.uniform(cfg.array_margin, dims - cfg.array_margin)

    box_lo = np.full(3, cfg.wall_margin)
    box_hi = dims - cfg.wall_margin
    if np.any(box_lo >= box_hi):
        raise ConfigError("wall_margin too large for the sampled room")
    trajectories = []
    sources = []
    for k in range(cfg.num_sources):
        traj = None
        for _ in range(200):
            if cfg.moving:
                start = rng.uniform(box_lo, box_hi)
                end = rng.uniform(box_lo, box_hi)
                amp = rng.uniform(*cfg.sin_amplitude_range)
                cycles = rng.uniform(*cfg.sin_cycles_per_20s) * cfg.duration / 20.0
                cand = Trajectory.sinusoidal(start, end, amp, cycles, cfg.duration)
                pos = np.clip(cand.positions, box_lo, box_hi)
                cand = Trajectory(cand.times, pos)
            else:
                cand = Trajectory.static(rng.uniform(box_lo, box_hi), cfg.duration)
            if np.linalg.norm(cand.positions - center[None, :], axis=1).min() > cfg.source_margin:
                traj = cand
                break
        if traj is None:
            raise ConfigError("could not place a source satisfying the margins")
        trajectories.append(traj)
        sources.append(SourceSpec(seed=int(rng.integers(0, 2**31)), gated=cfg.gated))

    mix = MixSpec(
        sources=tuple(sources),
        snr_db=float(rng.uniform(*cfg.snr_range)),
        duration=cfg.duration,
        seed=int(rng.integers(0, 2**31)),
    )
    return Scenario(room, center, tuple(trajectories), mix, seed)
