"""Held-out evaluation: exported features through the localizer CLI."""

from __future__ import annotations

import math
import subprocess
import sys
from pathlib import Path

import numpy as np

from .export import export_features
from .formats import read_sidecar
from .model import CausalCrnn


def localize_with_primary(feature_path, est_path, known_k: int = 1) -> None:
    subprocess.run(
        [sys.executable, "-m", "srploc", "localize",
         "--feature-source", "file", "--features", str(feature_path),
         "--known-k", str(known_k), "--out", str(est_path)],
        check=True, capture_output=True, text=True,
    )


def azimuth_success_rate(model: CausalCrnn, scene_dirs, work_dir,
                         gate_deg: float = 30.0) -> dict:
    """Fraction of voice-active frames whose azimuth estimate falls
    within the gate, pooled over scenes. Single-source scenes, known K."""
    work_dir = Path(work_dir)
    work_dir.mkdir(parents=True, exist_ok=True)
    ok = total = 0
    errors = []
    for d in scene_dirs:
        d = Path(d)
        feat_path = work_dir / f"{d.name}.srpf"
        est_path = work_dir / f"{d.name}_est.csv"
        export_features(model, d / "scene.wav", feat_path)
        localize_with_primary(feat_path, est_path)
        truth = read_sidecar(d / "scene_truth.txt")
        est_az = {}
        with open(est_path) as fh:
            next(fh)
            for line in fh:
                frame, az_deg, _el, _w = line.strip().split(",")
                est_az[int(frame)] = math.radians(float(az_deg))
        for n in range(truth.betas.shape[1]):
            if truth.betas[0, n] < 0.5:
                continue
            total += 1
            if n not in est_az:
                continue
            d_az = abs(est_az[n] - truth.azimuths[0, n]) % (2 * math.pi)
            err = min(d_az, 2 * math.pi - d_az)
            errors.append(math.degrees(err))
            ok += err <= math.radians(gate_deg)
    return {
        "active_frames": int(total),
        "success_frames": int(ok),
        "success_rate": float(ok / total) if total else None,
        "median_error_deg": float(np.median(errors)) if errors else None,
    }
