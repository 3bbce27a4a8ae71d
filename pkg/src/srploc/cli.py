"""Command-line interface: simulate, localize, evaluate, spectrum, selftest."""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import detect, io, metrics, sim, srp
from .config import RunConfig
from .geometry import ConfigError, Doa
from .stft import stft as compute_stft


def _run_config(args) -> RunConfig:
    keys = (
        "geometry", "az_res_deg", "el_res_deg", "feature_source", "pool",
        "method", "k_max", "beta_th", "known_k", "min_separation_deg",
        "active_beta", "max_azimuth_error_deg", "seed",
    )
    overrides = {k: getattr(args, k, None) for k in keys}
    return RunConfig.load(getattr(args, "config", None), overrides)


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override it")
    p.add_argument("--geometry", help="geometry file path or builtin:head12")
    p.add_argument("--az-res-deg", type=float, dest="az_res_deg")
    p.add_argument("--el-res-deg", type=float, dest="el_res_deg")
    p.add_argument("--seed", type=int)


def cmd_simulate(args) -> int:
    cfg = _run_config(args)
    geom = cfg.array_geometry()
    ranges = {}
    if args.duration is not None:
        ranges["duration"] = args.duration
    if args.num_sources is not None:
        ranges["num_sources"] = args.num_sources
    if args.rt60 is not None:
        ranges["rt60_range"] = (args.rt60, args.rt60)
    if args.snr is not None:
        ranges["snr_range"] = (args.snr, args.snr)
    if args.order is not None:
        ranges["reflection_order"] = args.order
    if args.static:
        ranges["moving"] = False
    if args.continuous_activity:
        ranges["gated"] = False
    if args.room_min is not None:
        ranges["room_dim_min"] = tuple(args.room_min)
    if args.room_max is not None:
        ranges["room_dim_max"] = tuple(args.room_max)
    scfg = sim.ScenarioConfig(**ranges)
    scenario = sim.sample_scenario(cfg.seed, scfg)
    stft_cfg = cfg.stft_config()
    signal, truth = sim.synthesize(
        geom, scenario.room, list(scenario.trajectories), scenario.mix,
        scenario.array_center, fs=stft_cfg.sample_rate, stft_cfg=stft_cfg,
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    io.write_wav(out_dir / "scene.wav", stft_cfg.sample_rate, signal)
    out_truth = truth.output_frames(cfg.pool)
    io.write_sidecar(out_dir / "scene_truth.txt", out_truth)
    if args.save_oracle_features:
        feats = srp.oracle_feature_seq(
            out_truth.elevations, out_truth.azimuths, out_truth.betas,
            geom, stft_cfg.omega_axis(),
        )
        rate = stft_cfg.sample_rate / stft_cfg.hop / cfg.pool
        io.write_feature_file(out_dir / "scene_oracle.srpf", feats, geom, rate)
    dims = scenario.room.dimensions
    print(
        f"scene: room {dims[0]:.2f}x{dims[1]:.2f}x{dims[2]:.2f} m, "
        f"rt60 {scenario.room.rt60:.2f} s, snr {scenario.mix.snr_db:.1f} dB, "
        f"{len(scenario.mix.sources)} source(s), {truth.num_frames} input frames, "
        f"{out_truth.num_frames} output frames -> {out_dir}"
    )
    return 0


def _load_features(args, cfg: RunConfig, geom, stft_cfg):
    """Feature sequence (N', P, 2F) per the configured source."""
    if cfg.feature_source == "file":
        if not args.features:
            raise ConfigError("feature_source 'file' requires --features")
        data = io.read_feature_file(args.features)
        if data.num_mics != geom.num_mics:
            raise ValueError(
                f"feature file M={data.num_mics} != geometry M={geom.num_mics}"
            )
        if data.num_freqs != stft_cfg.num_freqs:
            raise ValueError(
                f"feature file F={data.num_freqs} != configured F={stft_cfg.num_freqs}"
            )
        return data.features.astype(np.float64)
    if cfg.feature_source == "oracle":
        if not args.sidecar:
            raise ConfigError("feature_source 'oracle' requires --sidecar")
        truth = io.read_sidecar(args.sidecar)
        return srp.oracle_feature_seq(
            truth.elevations, truth.azimuths, truth.betas, geom, stft_cfg.omega_axis()
        )
    # phat
    if not args.wav:
        raise ConfigError("feature_source 'phat' requires --wav")
    fs, signal = io.read_wav(args.wav)
    if fs != stft_cfg.sample_rate:
        raise ValueError(f"WAV rate {fs} != configured {stft_cfg.sample_rate}")
    if signal.shape[0] != geom.num_mics:
        raise ValueError(f"WAV has {signal.shape[0]} channels, geometry {geom.num_mics} mics")
    x = compute_stft(signal, stft_cfg)
    return srp.phat_feature_seq(x, geom, pool=cfg.pool)


def cmd_localize(args) -> int:
    cfg = _run_config(args)
    geom = cfg.array_geometry()
    stft_cfg = cfg.stft_config()
    grid = cfg.grid()
    feats = _load_features(args, cfg, geom, stft_cfg)
    table = srp.SteeringTable(geom, grid, stft_cfg.omega_axis())
    min_sep = (
        math.radians(cfg.min_separation_deg)
        if cfg.min_separation_deg is not None else None
    )
    results = detect.localize_frames(
        feats, table, method=cfg.method, beta_th=cfg.beta_th, k_max=cfg.k_max,
        known_k=cfg.known_k, min_separation=min_sep,
    )
    io.write_estimates_csv(args.out, results)
    if args.save_features:
        rate = stft_cfg.sample_rate / stft_cfg.hop / cfg.pool
        io.write_feature_file(args.save_features, feats, geom, rate)
    n_det = sum(len(r) for r in results)
    print(f"localized {len(results)} frames, {n_det} detections -> {args.out}")
    return 0


def cmd_evaluate(args) -> int:
    cfg = _run_config(args)
    truth = io.read_sidecar(args.truth)
    estimates = io.read_estimates_csv(args.estimates, num_frames=truth.num_frames)
    est_frames: list[list[Doa]] = [[d for d, _w in frame] for frame in estimates]
    truth_frames: list[list[Doa]] = []
    for n in range(truth.num_frames):
        active = [
            Doa(truth.elevations[k, n], truth.azimuths[k, n])
            for k in range(truth.num_sources)
            if truth.betas[k, n] >= cfg.active_beta
        ]
        truth_frames.append(active)
    report = metrics.score(
        est_frames, truth_frames,
        max_azimuth_error=math.radians(cfg.max_azimuth_error_deg),
    )
    if args.out:
        _write_match_csv(args.out, est_frames, truth_frames, cfg)
    print(report.summary())
    return 0


def _write_match_csv(path, est_frames, truth_frames, cfg: RunConfig) -> None:
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["frame", "truth_azimuths_deg", "est_azimuths_deg", "matches",
             "num_missed", "num_false"]
        )
        for n, (ests, trus) in enumerate(zip(est_frames, truth_frames)):
            res = metrics.match_frame(
                ests, trus, math.radians(cfg.max_azimuth_error_deg)
            )
            w.writerow(
                [
                    n,
                    ";".join(f"{math.degrees(t.azimuth):.2f}" for t in trus),
                    ";".join(f"{math.degrees(e.azimuth):.2f}" for e in ests),
                    ";".join(f"{i}-{j}" for i, j in res.pairs),
                    len(res.unmatched_truths),
                    len(res.unmatched_estimates),
                ]
            )


def cmd_spectrum(args) -> int:
    cfg = _run_config(args)
    geom = cfg.array_geometry()
    stft_cfg = cfg.stft_config()
    grid = cfg.grid()
    feats = _load_features(args, cfg, geom, stft_cfg)
    if not (0 <= args.frame < feats.shape[0]):
        raise ValueError(f"frame {args.frame} out of range [0, {feats.shape[0]})")
    table = srp.SteeringTable(geom, grid, stft_cfg.omega_axis())
    values = table.spectrum(feats[args.frame])
    io.write_spectrum_csv(args.out, grid, values)
    print(f"frame {args.frame}: {len(grid)} grid values -> {args.out}")
    return 0


def cmd_selftest(args) -> int:
    from . import selftest

    return selftest.run()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="srploc",
        description="multi-source DOA estimation from steered-response-power spectra",
    )
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("simulate", help="render a random scene to WAV + ground truth")
    _add_run_flags(ps)
    ps.add_argument("--out-dir", required=True)
    ps.add_argument("--duration", type=float, help="seconds")
    ps.add_argument("--num-sources", type=int, dest="num_sources")
    ps.add_argument("--rt60", type=float, help="fix RT60 instead of sampling")
    ps.add_argument("--snr", type=float, help="fix SNR (dB) instead of sampling")
    ps.add_argument("--order", type=int, help="image-method reflection order")
    ps.add_argument("--static", action="store_true", help="static sources")
    ps.add_argument(
        "--continuous-activity", action="store_true",
        help="sources always on (no pause gating)",
    )
    ps.add_argument("--room-min", type=float, nargs=3, metavar=("X", "Y", "Z"))
    ps.add_argument("--room-max", type=float, nargs=3, metavar=("X", "Y", "Z"))
    ps.add_argument(
        "--save-oracle-features", action="store_true",
        help="also write the exact feature file scene_oracle.srpf",
    )
    ps.set_defaults(func=cmd_simulate)

    pl = sub.add_parser("localize", help="estimate per-frame DOAs")
    _add_run_flags(pl)
    pl.add_argument("--wav")
    pl.add_argument("--features", help="feature file for feature_source=file")
    pl.add_argument("--sidecar", help="ground-truth sidecar for feature_source=oracle")
    pl.add_argument("--feature-source", dest="feature_source",
                    choices=("phat", "oracle", "file"))
    pl.add_argument("--method", choices=("iterative", "peaks"))
    pl.add_argument("--k-max", type=int, dest="k_max")
    pl.add_argument("--beta-th", type=float, dest="beta_th")
    pl.add_argument("--known-k", type=int, dest="known_k")
    pl.add_argument("--min-separation-deg", type=float, dest="min_separation_deg")
    pl.add_argument("--pool", type=int)
    pl.add_argument("--out", required=True, help="estimates CSV path")
    pl.add_argument("--save-features", dest="save_features",
                    help="also write the used features as a feature file")
    pl.set_defaults(func=cmd_localize)

    pe = sub.add_parser("evaluate", help="score estimates against ground truth")
    _add_run_flags(pe)
    pe.add_argument("--estimates", required=True)
    pe.add_argument("--truth", required=True, help="ground-truth sidecar")
    pe.add_argument("--out", help="per-frame match CSV path")
    pe.add_argument("--active-beta", type=float, dest="active_beta")
    pe.add_argument("--max-az-error-deg", type=float, dest="max_azimuth_error_deg")
    pe.set_defaults(func=cmd_evaluate)

    pp = sub.add_parser("spectrum", help="dump one frame's spatial spectrum as CSV")
    _add_run_flags(pp)
    pp.add_argument("--wav")
    pp.add_argument("--features")
    pp.add_argument("--sidecar")
    pp.add_argument("--feature-source", dest="feature_source",
                    choices=("phat", "oracle", "file"))
    pp.add_argument("--pool", type=int)
    pp.add_argument("--frame", type=int, required=True)
    pp.add_argument("--out", required=True)
    pp.set_defaults(func=cmd_spectrum)

    pt = sub.add_parser("selftest", help="run quick internal consistency checks")
    pt.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
