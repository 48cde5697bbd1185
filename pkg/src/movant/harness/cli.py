"""Command line entry point: ``movant`` or ``python -m movant``."""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from ..errors import ConfigError, MovantError
from ..patterns import make_pattern
from .config import BUILTIN, load_config, parse_config
from .experiments import run_experiment, run_phase_center, summarize


def _log(msg):
    print(msg, file=sys.stderr, flush=True)


def cmd_validate(args):
    cfg = load_config(args.config).with_overrides(args.seed, args.out)
    print(f"{cfg.source}: ok ({cfg.experiment})")
    if cfg.experiment == "sumrate_sweep":
        n = len(cfg.schemes) * len(cfg.snr_db) * len(cfg.seeds)
        print(f"  {len(cfg.schemes)} schemes x {len(cfg.snr_db)} SNR points x {len(cfg.seeds)} seeds = {n} rows")
        print(f"  reference SNR {cfg.reference_snr_db:g} dB, budget {cfg.optimizer.budget} per stage")
    print(f"  config sha256 {cfg.digest()}")
    return 0


def cmd_run(args):
    cfg = load_config(args.config).with_overrides(args.seed, args.out)
    out = run_experiment(cfg, threads=args.threads, log=None if args.quiet else _log)
    if cfg.experiment == "sumrate_sweep":
        s = out["summary"]["omni_global_vs_fpa"]
        if "mean_ratio_to_fpa" in s:
            print(f"omni global / fpa at {out['summary']['reference_snr_db']:g} dB: "
                  f"{s['mean_ratio_to_fpa']:.3f} ({s['gain_percent']:+.1f}%)")
        print(f"results: {out['results']}")
    else:
        print(json.dumps(out, indent=1, default=float))
    return 0


def cmd_summarize(args):
    out_dir = args.out
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    s = summarize(args.results, out_dir=out_dir)
    print(f"{'scheme':<22}{'snr_db':>8}{'n':>4}{'mean':>10}{'stderr':>10}{'vs fpa':>9}")
    for t in s["table"]:
        name = f"{t['scheme']}-{t['pattern']}" + ("-rot" if t["rotation"] == "true" else "")
        ratio = "" if t["ratio_to_fpa"] is None else f"{t['ratio_to_fpa']:.3f}"
        print(f"{name:<22}{t['snr_db']:>8g}{t['n']:>4}{t['mean']:>10.4f}{t['stderr']:>10.4f}{ratio:>9}")
    return 0


def cmd_pattern(args):
    kw = {"path": args.table} if args.name == "tabulated" else {}
    p = make_pattern(args.name, **kw)
    if args.cut == "azimuth":
        phi = np.arange(-180.0 + args.step, 180.0 + 1e-9, args.step)
        theta = np.full_like(phi, 90.0)
        angle = phi
    else:
        theta = np.arange(0.0, 180.0 + 1e-9, args.step)
        phi = np.zeros_like(theta)
        angle = theta
    g = 10 * np.log10(np.maximum(p.gain(theta, phi), 1e-30))
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["phi_deg" if args.cut == "azimuth" else "theta_deg", "gain_dBi"])
        for a, v in zip(angle, g):
            w.writerow([f"{a:.9g}", f"{v:.9g}"])
    finally:
        if args.out:
            fh.close()
    return 0


def cmd_phasecenter(args):
    cfg = load_config(args.config) if args.config else parse_config(
        {"experiment": "phase_center_study", "output": "results/phase_center"}, "<phasecenter>")
    cfg = cfg.with_overrides(None, args.out)
    if cfg.experiment != "phase_center_study":
        raise ConfigError(f"{cfg.source}: experiment: expected phase_center_study, got {cfg.experiment}")
    out = run_phase_center(cfg, log=_log)
    for s in out["setups"]:
        print(f"d_pc {s['d_pc_target']:g}: achieved {s['d_pc_achieved']:.5f}, mode ratio {s['mode_ratio']:+.4f}, "
              f"rms {s['rms_db']:.3f} dB, corr {s['correlation']:.4f}, "
              f"{'ok' if s['meets_thresholds'] else 'below threshold'}")
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS lets the flags go before or after the subcommand
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="run a single seed instead of the config's list")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="worker processes for independent cells")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory (overrides the config)")

    ap = argparse.ArgumentParser(prog="movant", parents=[common],
                                 description="Movable-antenna layout experiments.")
    sub = ap.add_subparsers(dest="command", required=True)
    cfg_help = f"YAML config path or a shipped name ({', '.join(BUILTIN)})"

    p = sub.add_parser("validate", parents=[common], help="check a config file")
    p.add_argument("config", help=cfg_help)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", parents=[common], help="run an experiment")
    p.add_argument("config", help=cfg_help)
    p.add_argument("-q", "--quiet", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("summarize", parents=[common], help="aggregate a results CSV")
    p.add_argument("results")
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("pattern", parents=[common], help="dump an element pattern cut as CSV")
    p.add_argument("name", choices=["omni", "dir38901", "tabulated"])
    p.add_argument("--cut", choices=["azimuth", "elevation"], default="azimuth")
    p.add_argument("--step", type=float, default=1.0, help="angle step in degrees")
    p.add_argument("--table", help="CSV table for the tabulated pattern")
    p.set_defaults(func=cmd_pattern)

    p = sub.add_parser("phasecenter", parents=[common], help="run the dual-mode phase-center study")
    p.add_argument("config", nargs="?", help="optional phase_center_study config")
    p.set_defaults(func=cmd_phasecenter)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    for name, default in (("seed", None), ("threads", 1), ("out", None)):
        if not hasattr(args, name):
            setattr(args, name, default)
    if args.threads < 1:
        ap.error("--threads must be >= 1")
    if args.command == "pattern":
        if args.name == "tabulated" and not args.table:
            ap.error("pattern tabulated needs --table")
        if args.step <= 0:
            ap.error("--step must be positive")
    try:
        return args.func(args)
    except ConfigError as exc:
        _log(f"config error: {exc}")
        return 2
    except (MovantError, OSError, ValueError) as exc:
        _log(f"error: {exc}")
        return 1
