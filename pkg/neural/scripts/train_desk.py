#!/usr/bin/env python3
"""Desk-scale training run: small static single-source rooms, a few
thousand steps, then held-out evaluation through the localizer CLI.

Artifacts (checkpoint, manifest, loss curve, metrics) land in --out-dir.
"""

import argparse
import json
from pathlib import Path

import torch

from srpnet.data import PairSampleSet, generate_scenarios
from srpnet.heldout import azimuth_success_rate
from srpnet.model import CausalCrnn, CrnnSpec
from srpnet.train import TrainConfig, save_run, train


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out-dir", default="desk_run")
    ap.add_argument("--data-dir", default="desk_data")
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--batch-size", type=int, default=16)
    ap.add_argument("--channels", type=int, default=16)
    ap.add_argument("--train-scenes", type=int, default=64)
    ap.add_argument("--heldout-scenes", type=int, default=10)
    ap.add_argument("--duration", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    torch.set_num_threads(2)
    train_seeds = [1000 + i for i in range(args.train_scenes)]
    held_seeds = [2000 + i for i in range(args.heldout_scenes)]
    print(f"generating {len(train_seeds)} train + {len(held_seeds)} held-out scenes")
    train_dirs = generate_scenarios(Path(args.data_dir) / "train", train_seeds,
                                    duration=args.duration)
    held_dirs = generate_scenarios(Path(args.data_dir) / "heldout", held_seeds,
                                   duration=args.duration)

    samples = PairSampleSet(train_dirs)
    model = CausalCrnn(CrnnSpec(conv_channels=args.channels))
    cfg = TrainConfig(steps=args.steps, batch_size=args.batch_size, seed=args.seed)
    history = train(model, samples, cfg)
    ckpt = save_run(
        args.out_dir, model, cfg, history,
        data_manifest={"train_seeds": train_seeds, "heldout_seeds": held_seeds,
                       "duration": args.duration},
    )
    metrics = azimuth_success_rate(model, held_dirs, Path(args.out_dir) / "heldout")
    (Path(args.out_dir) / "heldout_metrics.json").write_text(json.dumps(metrics, indent=2))
    print(f"checkpoint: {ckpt}")
    print(f"held-out: {metrics}")


if __name__ == "__main__":
    main()
