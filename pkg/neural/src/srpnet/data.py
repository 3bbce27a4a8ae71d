"""Training data: scenario folders produced by the localizer CLI.

Each scenario folder holds scene.wav (12 channels), scene_truth.txt and
scene_oracle.srpf (the exact weighted direct-path vectors, which are
the training targets). Scenes are generated by invoking the installed
``srploc`` CLI as a subprocess, one deterministic seed per folder.
"""

from __future__ import annotations

import subprocess
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .features import pair_planes, stft_multichannel
from .formats import nonredundant_pairs, read_feature_file, read_wav


def generate_scenarios(
    root,
    seeds,
    duration: float = 1.0,
    rt60: float | None = 0.25,
    snr: float | None = 20.0,
    order: int = 4,
    static: bool = True,
    continuous: bool = True,
    num_sources: int = 1,
    room_min=(3.5, 3.0, 2.5),
    room_max=(5.0, 4.5, 3.0),
) -> list[Path]:
    """Run the localizer CLI once per seed; returns the scenario dirs."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    dirs = []
    for seed in seeds:
        out = root / f"scene_{seed:05d}"
        dirs.append(out)
        if (out / "scene_oracle.srpf").exists():
            continue
        cmd = [
            sys.executable, "-m", "srploc", "simulate",
            "--out-dir", str(out), "--seed", str(seed),
            "--duration", str(duration), "--num-sources", str(num_sources),
            "--order", str(order), "--save-oracle-features",
            "--room-min", *[str(v) for v in room_min],
            "--room-max", *[str(v) for v in room_max],
        ]
        if rt60 is not None:
            cmd += ["--rt60", str(rt60)]
        if snr is not None:
            cmd += ["--snr", str(snr)]
        if static:
            cmd.append("--static")
        if continuous:
            cmd.append("--continuous-activity")
        subprocess.run(cmd, check=True, capture_output=True, text=True)
    return dirs


@dataclass
class PairSampleSet:
    """Lazy (scenario, pair) sample store with per-scenario caching."""

    scenario_dirs: list[Path]
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.scenario_dirs = [Path(d) for d in self.scenario_dirs]
        first = self._load(0)
        self.num_mics = first["num_mics"]
        self.pairs = nonredundant_pairs(self.num_mics)

    def _load(self, scenario_idx: int) -> dict:
        if scenario_idx not in self._cache:
            d = self.scenario_dirs[scenario_idx]
            fs, signal = read_wav(d / "scene.wav")
            spec = stft_multichannel(signal)
            feats = read_feature_file(d / "scene_oracle.srpf")
            n_out = feats.features.shape[0]
            self._cache[scenario_idx] = {
                "spec": spec,
                "targets": feats.features,  # (N', P, 2F)
                "num_mics": feats.num_mics,
                "n_out": n_out,
            }
        return self._cache[scenario_idx]

    def __len__(self) -> int:
        return len(self.scenario_dirs) * len(self.pairs)

    def sample(self, index: int) -> tuple[np.ndarray, np.ndarray]:
        """-> input (4, T, F) float32, target (N', 2F) float32."""
        scen_idx, pair_idx = divmod(index, len(self.pairs))
        entry = self._load(scen_idx)
        m, mp = self.pairs[pair_idx]
        planes = pair_planes(entry["spec"], int(m), int(mp))
        target = entry["targets"][:, pair_idx, :]
        return planes, target.astype(np.float32)

    def batches(self, batch_size: int, steps: int, rng: np.random.Generator):
        """Yield ``steps`` random batches as stacked arrays."""
        for _ in range(steps):
            idx = rng.integers(0, len(self), size=batch_size)
            planes, targets = zip(*(self.sample(int(i)) for i in idx))
            yield np.stack(planes), np.stack(targets)
