"""Experiment runners and result files.

A sweep is split into one cell per seed. Inside a cell the schemes are
solved in dependency order so the warm starts nest: the local run starts
from the fixed array, the global run from the fixed array and the local
optimum, and a rotating scheme reuses its move-only optimum and then
searches the orientations with positions frozen (identity orientations as
the warm start). Cells are independent and may run in worker processes;
rows are always written in canonical (scheme, snr, seed) order.
"""
from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .. import __version__
from ..channel import build_channel, generate_scenario
from ..errors import RankDeficient
from ..geometry import (Box, ElementGlobal, ElementLocal, FixedArray, planar_offsets,
                        quantize_positions, validate)
from ..optimizer import OptResult, bo_run, concat_results, random_search, sum_rate_objective
from ..patterns import make_pattern
from ..phasecenter import FarFieldCut, displacement_curve, equivalence, window
from ..precoding import db_to_linear, sum_rate
from .config import ExperimentConfig, Scheme

RESULT_COLUMNS = ["scheme", "pattern", "rotation", "snr_db", "seed", "sum_rate_bps_hz", "evaluations", "wall_ms"]
SUMMARY_COLUMNS = ["scheme", "pattern", "rotation", "snr_db", "n", "mean_bps_hz", "stderr_bps_hz", "ratio_to_fpa"]
REFERENCE_GAIN_PERCENT = 220.0


def fmt(x) -> str:
    return f"{x:.9g}"


# ---------------------------------------------------------------- setup

def make_specs(cfg: ExperimentConfig):
    """Fixed array plus the move-only and move+rotate element architectures."""
    a, lam = cfg.array, cfg.scenario.wavelength
    region = Box.centered(np.asarray(a.region_wavelengths) * lam)
    fpa = FixedArray(planar_offsets(a.fpa_rows, a.fpa_cols, a.fpa_spacing_wavelengths * lam), lam)
    specs = {"fpa": fpa}
    for rot in (False, True):
        specs[("global", rot)] = ElementGlobal(a.n_elements, region, lam, rotation_enabled=rot)
        specs[("local", rot)] = ElementLocal(a.n_elements, region, lam, grid=a.local_grid, rotation_enabled=rot)
    return specs


@dataclass
class Solution:
    layout: object
    params: np.ndarray
    result: Optional[OptResult]
    evaluations: int
    wall: float


def best_feasible(spec, result: OptResult):
    """Highest-scoring evaluated point whose layout is feasible (earliest on ties)."""
    order = np.argsort(-np.nan_to_num(result.scores, nan=-np.inf, neginf=-np.inf), kind="stable")
    for i in order:
        layout = spec.decode(result.params[i])
        if validate(layout).ok:
            return layout, result.params[i]
    raise RuntimeError("no feasible evaluation; warm starts should have been feasible")


def rate_or_zero(H, snr_linear) -> float:
    try:
        return sum_rate(H, snr_linear).sum_rate
    except RankDeficient:
        return 0.0


class SeedCell:
    """All schemes of one seed, with memoised move-only solutions."""

    def __init__(self, cfg: ExperimentConfig, seed: int):
        self.cfg, self.seed = cfg, seed
        self.scenario = generate_scenario(cfg.scenario, seed)
        self.specs = make_specs(cfg)
        self.snr_ref = float(db_to_linear(cfg.reference_snr_db))
        self._cache = {}

    def _optimize(self, obj, warm):
        o = self.cfg.optimizer
        if o.method == "random":
            res = random_search(obj, o.budget, self.seed)
            # warm starts still bound the result from below
            return concat_results(_evaluate_points(obj, warm), res, lambda p: p, lambda p: p)
        return bo_run(obj, o.budget, seed=self.seed, warm_start=warm, n_init=o.init_points, xi=o.xi)

    def solve(self, scheme: Scheme) -> Solution:
        key = scheme.key
        if key in self._cache:
            return self._cache[key]
        arch, pname, rot = key
        pattern = make_pattern(pname)
        if arch == "fpa":
            t0 = time.perf_counter()
            layout = self.specs["fpa"].decode([])
            sol = Solution(layout, np.zeros(0), None, 0, time.perf_counter() - t0)
        elif not rot:
            spec = self.specs[(arch, False)]
            warm = [spec.encode(self.solve(Scheme("fpa", pname)).layout)]
            if arch == "global":
                warm.append(spec.encode(self.solve(Scheme("local", pname)).layout))
            obj = sum_rate_objective(spec, self.scenario, self.snr_ref, pattern)
            res = self._optimize(obj, warm)
            layout, params = best_feasible(spec, res)
            sol = Solution(layout, params, res, res.evaluations, res.wall_time)
        else:
            base = self.solve(Scheme(arch, pname, False))
            spec = self.specs[(arch, True)]
            x0 = spec.encode(base.layout)                    # positions + identity angles
            d = len(base.params)
            obj = sum_rate_objective(spec, self.scenario, self.snr_ref, pattern)
            sub = obj.restricted(np.arange(d, spec.dimension), x0)
            res2 = self._optimize(sub, [x0[d:]])
            res = concat_results(
                base.result, res2,
                lambda p: np.hstack([p, np.zeros((len(p), spec.dimension - d))]),
                lambda p: np.hstack([np.tile(x0[:d], (len(p), 1)), p]),
            )
            layout, params = best_feasible(spec, res)
            sol = Solution(layout, params, res, res.evaluations, res.wall_time)
        self._cache[key] = sol
        return sol

    def rows(self, schemes):
        out, extras = [], []
        for sc in schemes:
            sol = self.solve(sc)
            H = build_channel(sol.layout.with_pattern(make_pattern(sc.pattern)), self.scenario)
            for snr in self.cfg.snr_db:
                out.append((sc, float(snr), self.seed, rate_or_zero(H, float(db_to_linear(snr))),
                            sol.evaluations, sol.wall * 1e3))
            extras.append((sc, sol))
        return out, extras


def _evaluate_points(obj, points):
    t0 = time.perf_counter()
    X = np.array([np.clip(p, obj.lower, obj.upper) for p in points], dtype=float).reshape(len(points), obj.dims)
    y = np.array([obj(x) for x in X])
    i = int(np.argmax(y))
    return OptResult(X[i], float(y[i]), np.maximum.accumulate(y), y, X, len(y), None,
                     time.perf_counter() - t0, "warm")


# ---------------------------------------------------------------- files

class RunDir:
    """Output directory with a manifest that tracks completed cells."""

    def __init__(self, cfg: ExperimentConfig, cells):
        self.cfg = cfg
        self.root = cfg.output
        os.makedirs(self.root, exist_ok=True)
        self.manifest = {
            "experiment": cfg.experiment,
            "config_sha256": cfg.digest(),
            "config_source": cfg.source,
            "version": __version__,
            "seeds": list(cfg.seeds) if cfg.experiment != "phase_center_study" else [],
            "status": "running",
            "cells": {c: "pending" for c in cells},
        }
        self.save()

    def path(self, *parts):
        p = os.path.join(self.root, *parts)
        os.makedirs(os.path.dirname(p), exist_ok=True)
        return p

    def mark(self, cell, state="complete"):
        self.manifest["cells"][cell] = state
        self.save()

    def finish(self, status="complete"):
        self.manifest["status"] = status
        self.save()

    def save(self):
        tmp = os.path.join(self.root, "manifest.json.tmp")
        with open(tmp, "w") as fh:
            json.dump(self.manifest, fh, indent=1)
        os.replace(tmp, os.path.join(self.root, "manifest.json"))


def write_results(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for sc, snr, seed, rate, evals, wall_ms in rows:
            w.writerow([sc.architecture, sc.pattern, str(sc.rotation).lower(), fmt(snr), seed,
                        fmt(rate), evals, f"{wall_ms:.3f}"])


def _layout_record(sc, seed, sol, spec):
    return {"scheme": sc.label, "seed": seed, "kind": getattr(spec, "kind", "fixed"),
            "params": [float(v) for v in sol.params],
            "positions": sol.layout.positions.tolist(),
            "angles_rad": [o.as_array().tolist() for o in sol.layout.orientations]}


def _cell_worker(cfg, seed):
    cell = SeedCell(cfg, seed)
    rows, extras = cell.rows(cfg.schemes)
    return seed, rows, extras, cell.scenario, cell.specs


def _pool_map(fn, cfg, items, threads):
    if threads and threads > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            futs = [ex.submit(fn, cfg, it) for it in items]
            for f in futs:
                yield f.result()
    else:
        for it in items:
            yield fn(cfg, it)


def _spec_for(specs, sc):
    return specs["fpa"] if sc.architecture == "fpa" else specs[(sc.architecture, sc.rotation)]


def run_sweep(cfg: ExperimentConfig, threads: int = 1, log=None) -> dict:
    """Optimise every scheme per seed and sweep the fixed layouts over the SNR grid."""
    run = RunDir(cfg, [f"seed {s}" for s in cfg.seeds])
    by_seed = {}
    try:
        for seed, rows, extras, scenario, specs in _pool_map(_cell_worker, cfg, list(cfg.seeds), threads):
            scenario.dump(run.path("scenarios", f"seed_{seed:03d}.json"))
            for sc, sol in extras:
                tag = f"{sc.label}_seed_{seed:03d}"
                if sol.result is not None:
                    sol.result.to_csv(run.path("traces", tag + ".csv"))
                with open(run.path("layouts", tag + ".json"), "w") as fh:
                    json.dump(_layout_record(sc, seed, sol, _spec_for(specs, sc)), fh, indent=1)
            by_seed[seed] = rows
            run.mark(f"seed {seed}")
            if log:
                log(f"seed {seed} done")
    except BaseException:
        run.finish("failed")
        raise
    order = {sc: i for i, sc in enumerate(cfg.schemes)}
    snr_idx = {float(s): i for i, s in enumerate(cfg.snr_db)}
    seed_idx = {s: i for i, s in enumerate(cfg.seeds)}
    rows = sorted((r for rs in by_seed.values() for r in rs),
                  key=lambda r: (order[r[0]], snr_idx[r[1]], seed_idx[r[2]]))
    results = run.path("results.csv")
    write_results(results, rows)
    summary = summarize(results, out_dir=cfg.output)
    run.finish()
    return {"results": results, "summary": summary, "manifest": run.manifest}


# ---------------------------------------------------------------- summary

def read_results(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != RESULT_COLUMNS:
            raise ValueError(f"{path}: columns {reader.fieldnames} do not match {RESULT_COLUMNS}")
        rows = list(reader)
    for r in rows:
        r["snr_db"] = float(r["snr_db"])
        r["seed"] = int(r["seed"])
        r["sum_rate_bps_hz"] = float(r["sum_rate_bps_hz"])
        if r["rotation"] not in ("true", "false"):
            raise ValueError(f"{path}: rotation must be true or false")
    return rows


def summarize(results_csv, out_dir=None) -> dict:
    """Per (scheme, pattern, rotation, snr) mean and standard error over seeds.

    ``ratio_to_fpa`` divides each mean by the fixed-array mean with the same
    pattern and SNR. Writes ``summary.csv`` and ``summary.json`` next to the
    results (or into ``out_dir``) and returns the JSON payload.
    """
    rows = read_results(results_csv)
    groups = {}
    for r in rows:
        groups.setdefault((r["scheme"], r["pattern"], r["rotation"], r["snr_db"]), []).append(r["sum_rate_bps_hz"])
    table = []
    for key, vals in groups.items():           # first-appearance order = canonical order
        v = np.array(vals)
        se = float(v.std(ddof=1) / np.sqrt(len(v))) if len(v) > 1 else 0.0
        table.append({"scheme": key[0], "pattern": key[1], "rotation": key[2], "snr_db": key[3],
                      "n": len(v), "mean": float(v.mean()), "stderr": se})
    fpa = {(t["pattern"], t["snr_db"]): t["mean"] for t in table if t["scheme"] == "fpa"}
    for t in table:
        base = fpa.get((t["pattern"], t["snr_db"]))
        t["ratio_to_fpa"] = t["mean"] / base if base else None

    snrs = sorted({r["snr_db"] for r in rows})
    ref = snrs[(len(snrs) - 1) // 2]
    headline = {}
    for t in table:
        if t["snr_db"] == ref and t["scheme"] != "fpa" and t["ratio_to_fpa"] is not None:
            name = f"{t['scheme']}-{t['pattern']}" + ("-rot" if t["rotation"] == "true" else "")
            headline[name] = {"mean_ratio_to_fpa": t["ratio_to_fpa"],
                              "gain_percent": 100.0 * (t["ratio_to_fpa"] - 1.0)}
    per_seed = _per_seed_ratio(rows, ref, "global", "omni")
    payload = {
        "reference_snr_db": ref,
        "schemes_vs_fpa": headline,
        "omni_global_vs_fpa": {
            **headline.get("global-omni", {}),
            "per_seed_min_ratio": min(per_seed) if per_seed else None,
            "seeds_above_fpa": int(sum(r > 1.0 for r in per_seed)),
            "seeds": len(per_seed),
            "reference_gain_percent": REFERENCE_GAIN_PERCENT,
            "note": ("Reference figure is a 220% higher sum rate for global movement over fixed antennas. "
                     "Its channel draws and optimiser budget are not available, so only the ordering "
                     "(movable above fixed on every seed) is expected to carry over, not the magnitude."),
        },
    }
    out_dir = out_dir or os.path.dirname(os.path.abspath(results_csv))
    with open(os.path.join(out_dir, "summary.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for t in table:
            w.writerow([t["scheme"], t["pattern"], t["rotation"], fmt(t["snr_db"]), t["n"], fmt(t["mean"]),
                        fmt(t["stderr"]), "" if t["ratio_to_fpa"] is None else fmt(t["ratio_to_fpa"])])
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(payload, fh, indent=1)
    payload["table"] = table
    return payload


def _per_seed_ratio(rows, snr, arch, pattern):
    base = {r["seed"]: r["sum_rate_bps_hz"] for r in rows
            if r["scheme"] == "fpa" and r["pattern"] == pattern and r["snr_db"] == snr}
    out = []
    for r in rows:
        if (r["scheme"] == arch and r["pattern"] == pattern and r["rotation"] == "false"
                and r["snr_db"] == snr and r["seed"] in base and base[r["seed"]] > 0):
            out.append(r["sum_rate_bps_hz"] / base[r["seed"]])
    return out


# ---------------------------------------------------------------- quantization

def _quant_worker(cfg, seed):
    cell = SeedCell(cfg, seed)
    sc = Scheme("global", "omni")
    spec = cell.specs[("global", False)]
    src = cfg.quantization.layouts_from
    path = os.path.join(src, "layouts", f"{sc.label}_seed_{seed:03d}.json") if src else None
    if path and os.path.exists(path):
        with open(path) as fh:
            layout = spec.decode(json.load(fh)["params"])
        evals = 0
    else:
        sol = cell.solve(sc)
        layout, evals = sol.layout, sol.evaluations
    pitch = cfg.scenario.wavelength / cfg.quantization.pitch_divisor
    q = quantize_positions(layout, pitch)
    cont = rate_or_zero(build_channel(layout, cell.scenario), cell.snr_ref)
    quant = rate_or_zero(build_channel(q, cell.scenario, check=False), cell.snr_ref)
    return seed, cont, quant, evals, float(np.max(np.abs(q.positions - layout.positions)))


def run_quantization(cfg: ExperimentConfig, threads: int = 1, log=None) -> dict:
    """Re-evaluate optimised omni global layouts after snapping to a fine grid."""
    run = RunDir(cfg, [f"seed {s}" for s in cfg.seeds])
    out = {}
    try:
        for seed, cont, quant, evals, shift in _pool_map(_quant_worker, cfg, list(cfg.seeds), threads):
            out[seed] = (cont, quant, evals, shift)
            run.mark(f"seed {seed}")
            if log:
                log(f"seed {seed} done")
    except BaseException:
        run.finish("failed")
        raise
    ratios = []
    with open(run.path("quantization.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["seed", "continuous_bps_hz", "quantized_bps_hz", "ratio", "max_shift_m", "evaluations"])
        for seed in cfg.seeds:
            cont, quant, evals, shift = out[seed]
            ratio = quant / cont if cont > 0 else float("nan")
            ratios.append(ratio)
            w.writerow([seed, fmt(cont), fmt(quant), fmt(ratio), fmt(shift), evals])
    payload = {"pitch_m": cfg.scenario.wavelength / cfg.quantization.pitch_divisor,
               "pitch_divisor": cfg.quantization.pitch_divisor,
               "reference_snr_db": cfg.reference_snr_db,
               "mean_continuous_bps_hz": float(np.mean([out[s][0] for s in cfg.seeds])),
               "mean_quantized_bps_hz": float(np.mean([out[s][1] for s in cfg.seeds])),
               "mean_ratio": float(np.nanmean(ratios)), "min_ratio": float(np.nanmin(ratios)),
               "seeds": len(ratios)}
    with open(run.path("quantization.json"), "w") as fh:
        json.dump(payload, fh, indent=1)
    run.finish()
    return payload


# ---------------------------------------------------------------- phase center

def run_phase_center(cfg: ExperimentConfig, log=None) -> dict:
    """Calibrate dual-mode pairs for each target spacing and compare with plain arrays."""
    p = cfg.phase_center
    run = RunDir(cfg, [f"d_pc {t:g}" for t in p.targets_wavelengths])
    reports = []
    try:
        for t in p.targets_wavelengths:
            rep = equivalence(t, p.radius_wavelengths, p.spacing_wavelengths, p.window_deg, p.samples)
            rep.pair.to_csv(run.path("cuts", f"dual_mode_dpc_{t:g}.csv"))
            rep.ideal.to_csv(run.path("cuts", f"ideal_dpc_{t:g}.csv"))
            reports.append(rep.to_dict())
            run.mark(f"d_pc {t:g}")
            if log:
                log(f"d_pc {t:g}: rms {rep.rms_db:.3f} dB, corr {rep.correlation:.4f}")
        ratios, offsets = displacement_curve(p.radius_wavelengths, window(p.window_deg, p.samples), n=46)
        with open(run.path("displacement_curve.csv"), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["mode_ratio", "offset_wavelengths"])
            for r, o in zip(ratios, offsets):
                w.writerow([fmt(r), fmt(o)])
    except BaseException:
        run.finish("failed")
        raise
    payload = {"radius_wavelengths": p.radius_wavelengths, "spacing_wavelengths": p.spacing_wavelengths,
               "window_deg": p.window_deg, "thresholds": {"correlation_min": 0.98, "rms_db_max": 1.5},
               "setups": [dict(r, meets_thresholds=bool(r["correlation"] >= 0.98 and r["rms_db"] <= 1.5))
                          for r in reports]}
    with open(run.path("similarity.json"), "w") as fh:
        json.dump(payload, fh, indent=1, default=float)
    run.finish()
    return payload


def run_experiment(cfg: ExperimentConfig, threads: int = 1, log=None) -> dict:
    if cfg.experiment == "sumrate_sweep":
        return run_sweep(cfg, threads, log)
    if cfg.experiment == "quantization_study":
        return run_quantization(cfg, threads, log)
    return run_phase_center(cfg, log)


def load_cut(path, wavelength=1.0) -> FarFieldCut:
    return FarFieldCut.from_csv(path, wavelength)
