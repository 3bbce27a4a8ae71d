#!/usr/bin/env python3
"""Pre-generate scenario folders (WAV + sidecar + exact feature targets)
by invoking the localizer CLI once per seed."""

import argparse
from pathlib import Path

from srpnet.data import generate_scenarios


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out-dir", required=True)
    ap.add_argument("--seeds", type=int, nargs=2, metavar=("FIRST", "COUNT"),
                    default=(1000, 16))
    ap.add_argument("--duration", type=float, default=1.0)
    ap.add_argument("--rt60", type=float, default=0.25)
    ap.add_argument("--snr", type=float, default=20.0)
    ap.add_argument("--moving", action="store_true")
    ap.add_argument("--gated", action="store_true",
                    help="on/off source gating instead of continuous activity")
    args = ap.parse_args()

    first, count = args.seeds
    dirs = generate_scenarios(
        args.out_dir, [first + i for i in range(count)],
        duration=args.duration, rt60=args.rt60, snr=args.snr,
        static=not args.moving, continuous=not args.gated,
    )
    print(f"{len(dirs)} scenario folders under {Path(args.out_dir)}")


if __name__ == "__main__":
    main()
