"""Training loop: MSE on weighted direct-path vector sequences, Adam."""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch

from .data import PairSampleSet
from .model import CausalCrnn, save_checkpoint


@dataclass(frozen=True)
class TrainConfig:
    steps: int = 2000
    batch_size: int = 66
    learning_rate: float = 1e-3
    seed: int = 0
    log_every: int = 50


def train(
    model: CausalCrnn,
    samples: PairSampleSet,
    cfg: TrainConfig = TrainConfig(),
) -> list[float]:
    """Optimize in place; returns the per-step loss history.

    Aborts with RuntimeError if the loss turns non-finite.
    """
    torch.manual_seed(cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    opt = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)
    loss_fn = torch.nn.MSELoss()
    history: list[float] = []
    model.train()
    t0 = time.perf_counter()
    for step, (planes, targets) in enumerate(
        samples.batches(cfg.batch_size, cfg.steps, rng), start=1
    ):
        x = torch.from_numpy(planes)
        y = torch.from_numpy(targets)
        opt.zero_grad()
        out = model(x)
        if out.shape != y.shape:
            raise RuntimeError(f"model output {tuple(out.shape)} vs target {tuple(y.shape)}")
        loss = loss_fn(out, y)
        if not torch.isfinite(loss):
            raise RuntimeError(f"training diverged at step {step}: loss {loss.item()}")
        loss.backward()
        opt.step()
        history.append(float(loss.item()))
        if cfg.log_every and step % cfg.log_every == 0:
            rate = step / (time.perf_counter() - t0)
            recent = float(np.mean(history[-cfg.log_every:]))
            print(f"step {step}/{cfg.steps}  loss {recent:.4f}  ({rate:.1f} steps/s)",
                  flush=True)
    model.eval()
    return history


def save_run(out_dir, model: CausalCrnn, cfg: TrainConfig, history, data_manifest: dict):
    """Checkpoint plus a small manifest recording seeds and config."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_checkpoint(out / "model.pt", model, extra={"train_config": asdict(cfg)})
    manifest = {
        "train_config": asdict(cfg),
        "model_spec": model.spec.__dict__,
        "data": data_manifest,
        "loss_first": history[0] if history else None,
        "loss_last_mean50": float(np.mean(history[-50:])) if history else None,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, default=str))
    np.savetxt(out / "loss.txt", np.asarray(history))
    return out / "model.pt"
