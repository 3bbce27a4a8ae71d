"""Quick self-contained consistency checks for the CLI selftest command."""

from __future__ import annotations

import math
import tempfile
from pathlib import Path

import numpy as np

from . import io, srp
from .geometry import ArrayGeometry, Doa, MicPair, builtin_array, make_grid, unit_vector
from .sim import Room, image_method_rir
from .stft import StftConfig


def _check(name: str, ok: bool, detail: str = "") -> bool:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f" ({detail})" if detail else ""))
    return ok


def run() -> int:
    ok = True
    cfg = StftConfig()
    omegas = cfg.omega_axis()

    v = unit_vector(Doa(math.pi / 2, 0.0))
    ok &= _check("unit vector +x", np.allclose(v, [1, 0, 0], atol=1e-12))

    geom = ArrayGeometry([[0.05, 0, 0], [-0.05, 0, 0]])
    pair = MicPair(0, 1)
    doa = Doa(math.pi / 2, 0.3)
    tau = float((geom.mic_positions[0] - geom.mic_positions[1]) @ unit_vector(doa)) / geom.speed_of_sound
    psi = np.exp(1j * omegas * tau)
    g = srp.gcc_phat_frame(psi, geom, pair, doa, omegas)
    ok &= _check("ideal cross-spectrum correlates to 1 at its own direction",
                 abs(g - 1.0) < 1e-9, f"value {g:.12f}")

    rng = np.random.default_rng(7)
    head = builtin_array()
    doas = [Doa(rng.uniform(0.3, 2.8), rng.uniform(-math.pi, math.pi)) for _ in range(2)]
    betas = [0.8, 0.5]
    small_omegas = omegas[:16]
    for p in head.pairs()[:3]:
        direct = srp.target_vector(doas, betas, head, p, small_omegas)
        probe = Doa(1.1, -0.4)
        lhs = float(direct @ srp.dp_ipd_vector(head, p, probe, small_omegas))
        rhs = sum(
            b * 16.0 * float(np.mean(np.cos(small_omegas * (
                (head.mic_positions[p.m] - head.mic_positions[p.m_prime])
                @ (unit_vector(d) - unit_vector(probe)) / head.speed_of_sound))))
            for d, b in zip(doas, betas)
        )
        ok &= _check(f"inner-product identity pair {p.m}-{p.m_prime}",
                     abs(lhs - rhs) < 1e-9, f"diff {abs(lhs - rhs):.2e}")

    room = Room((5.0, 4.0, 3.0), rt60=0.0, reflection_order=0)
    rir = image_method_rir(room, [2.0, 2.0, 1.5], [[3.0, 2.0, 1.5]], fs=16000)
    d = 1.0
    peak_idx = int(np.argmax(np.abs(rir[0])))
    want_idx = round(16000 * d / 343.0)
    ok &= _check("direct path arrival sample", abs(peak_idx - want_idx) <= 1,
                 f"{peak_idx} vs {want_idx}")
    ok &= _check("direct path gain", abs(rir[0].sum() * 4 * math.pi * d - 1.0) < 0.05,
                 f"sum gain {rir[0].sum() * 4 * math.pi * d:.4f}")

    with tempfile.TemporaryDirectory() as td:
        path = Path(td) / "probe.srpf"
        feats = rng.standard_normal((3, head.num_pairs, 2 * 16)).astype(np.float32)
        io.write_feature_file(path, feats, head, 5.2083)
        back = io.read_feature_file(path)
        ok &= _check("feature file round trip", np.array_equal(back.features, feats))

    grid = make_grid()
    ok &= _check("full-sphere 5-degree grid size", len(grid) == 2522, f"{len(grid)}")
    return 0 if ok else 1
