"""Experiment configuration: YAML loading and validation.

Every validation failure raises :class:`~movant.errors.ConfigError` with a
message that starts with the file name and the dotted field path, e.g.
``default.yaml: schemes[2].pattern: unknown pattern 'cardioid'``.
"""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from typing import Optional

import yaml

from ..channel import ScenarioConfig
from ..errors import ConfigError

EXPERIMENTS = ("sumrate_sweep", "quantization_study", "phase_center_study")
ARCHITECTURES = ("fpa", "local", "global")
PATTERNS = ("omni", "dir38901")
METHODS = ("bo", "random")
BUILTIN = ("default", "quantization", "phase_center")


@dataclass(frozen=True)
class Scheme:
    architecture: str
    pattern: str = "omni"
    rotation: bool = False

    @property
    def key(self):
        return (self.architecture, self.pattern, self.rotation)

    @property
    def label(self):
        return f"{self.architecture}-{self.pattern}" + ("-rot" if self.rotation else "")


@dataclass(frozen=True)
class ArrayConfig:
    n_elements: int = 4
    region_wavelengths: tuple = (4.0, 4.0, 2.0)
    local_grid: Optional[tuple] = (1, 2, 2)
    fpa_rows: int = 2
    fpa_cols: int = 2
    fpa_spacing_wavelengths: float = 0.5


@dataclass(frozen=True)
class OptimizerConfig:
    method: str = "bo"
    budget: int = 150          # evaluations per optimisation stage
    xi: float = 0.01
    init_points: Optional[int] = None


@dataclass(frozen=True)
class QuantizationConfig:
    pitch_divisor: int = 6     # pitch = wavelength / pitch_divisor
    layouts_from: Optional[str] = None


@dataclass(frozen=True)
class PhaseCenterConfig:
    targets_wavelengths: tuple = (0.8, 1.2)
    spacing_wavelengths: float = 1.0
    radius_wavelengths: float = 0.15
    window_deg: float = 60.0
    samples: int = 241


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    schemes: tuple = ()
    snr_db: tuple = (-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0)
    seeds: tuple = tuple(range(20))
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    array: ArrayConfig = field(default_factory=ArrayConfig)
    quantization: QuantizationConfig = field(default_factory=QuantizationConfig)
    phase_center: PhaseCenterConfig = field(default_factory=PhaseCenterConfig)
    output: str = "results"
    source: str = "<memory>"

    @property
    def reference_snr_db(self) -> float:
        """Middle entry of the SNR grid (lower middle for even lengths)."""
        return float(self.snr_db[(len(self.snr_db) - 1) // 2])

    def to_dict(self):
        d = asdict(self)
        d.pop("source")
        return d

    def digest(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True, default=list)
        return hashlib.sha256(text.encode()).hexdigest()

    def with_overrides(self, seed=None, out=None) -> "ExperimentConfig":
        cfg = self
        if seed is not None:
            cfg = replace(cfg, seeds=(int(seed),))
        if out is not None:
            cfg = replace(cfg, output=str(out))
        return cfg


class _Reader:
    """Pulls typed fields out of a mapping while tracking the field path."""

    def __init__(self, source, data, path=""):
        self.source, self.path = source, path
        if data is None:
            data = {}
        if not isinstance(data, dict):
            self.fail("expected a mapping")
        self.data = dict(data)
        self.seen = set()

    def where(self, key):
        return f"{self.path}.{key}" if self.path else str(key)

    def fail(self, msg, key=None):
        loc = self.where(key) if key is not None else (self.path or "<root>")
        raise ConfigError(f"{self.source}: {loc}: {msg}")

    def has(self, key):
        return key in self.data

    def raw(self, key, default=None):
        self.seen.add(key)
        return self.data.get(key, default)

    def sub(self, key):
        return _Reader(self.source, self.raw(key), self.where(key))

    def number(self, key, default, kind=float, lo=None, hi=None, strict_lo=False):
        v = self.raw(key, default)
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.fail(f"expected a number, got {v!r}", key)
        if kind is int and int(v) != v:
            self.fail(f"expected an integer, got {v!r}", key)
        v = kind(v)
        if lo is not None and (v <= lo if strict_lo else v < lo):
            self.fail(f"must be {'>' if strict_lo else '>='} {lo}, got {v}", key)
        if hi is not None and v > hi:
            self.fail(f"must be <= {hi}, got {v}", key)
        return v

    def choice(self, key, default, options):
        v = self.raw(key, default)
        if v not in options:
            self.fail(f"unknown value {v!r}; expected one of {', '.join(options)}", key)
        return v

    def flag(self, key, default=False):
        v = self.raw(key, default)
        if not isinstance(v, bool):
            self.fail(f"expected true or false, got {v!r}", key)
        return v

    def numbers(self, key, default, length=None, kind=float):
        v = self.raw(key, default)
        if not isinstance(v, (list, tuple)) or not v:
            self.fail("expected a non-empty list of numbers", key)
        if length is not None and len(v) != length:
            self.fail(f"expected {length} entries, got {len(v)}", key)
        out = []
        for i, x in enumerate(v):
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                self.fail(f"entry {i} is not a number: {x!r}", key)
            if kind is int and int(x) != x:
                self.fail(f"entry {i} is not an integer: {x!r}", key)
            out.append(kind(x))
        return tuple(out)

    def done(self):
        extra = sorted(set(self.data) - self.seen)
        if extra:
            self.fail("unknown field", extra[0])


def _seeds(r: _Reader):
    v = r.raw("seeds", {"start": 0, "count": 20})
    if isinstance(v, dict):
        s = _Reader(r.source, v, r.where("seeds"))
        start = s.number("start", 0, int, lo=0)
        count = s.number("count", 20, int, lo=1)
        s.done()
        return tuple(range(start, start + count))
    seeds = r.numbers("seeds", v, kind=int)
    if len(set(seeds)) != len(seeds):
        r.fail("seeds must be distinct", "seeds")
    if min(seeds) < 0:
        r.fail("seeds must be non-negative", "seeds")
    return seeds


def _scheme(r: _Reader, i, item):
    s = _Reader(r.source, item, f"schemes[{i}]")
    arch = s.choice("architecture", None, ARCHITECTURES)
    pattern = s.choice("pattern", "omni", PATTERNS)
    rotation = s.flag("rotation", False)
    s.done()
    if arch == "fpa" and rotation:
        s.fail("fixed arrays cannot rotate", "rotation")
    return Scheme(arch, pattern, rotation)


def parse_config(data, source="<memory>") -> ExperimentConfig:
    """Validate a decoded YAML tree and build an :class:`ExperimentConfig`."""
    r = _Reader(source, data)
    kind = r.choice("experiment", None, EXPERIMENTS)
    output = r.raw("output", "results")
    if not isinstance(output, str) or not output:
        r.fail("expected a non-empty path", "output")

    schemes = ()
    if kind == "sumrate_sweep" or r.has("schemes"):
        items = r.raw("schemes")
        if not isinstance(items, list) or not items:
            r.fail("expected a non-empty list of schemes", "schemes")
        schemes = tuple(_scheme(r, i, it) for i, it in enumerate(items))
        if len(set(schemes)) != len(schemes):
            r.fail("duplicate scheme", "schemes")

    snr = r.numbers("snr_db", [-10, -5, 0, 5, 10, 15, 20])
    if list(snr) != sorted(set(snr)):
        r.fail("must be strictly increasing", "snr_db")
    seeds = _seeds(r)

    o = r.sub("optimizer")
    method = o.choice("method", "bo", METHODS)
    budget = o.number("budget", 150, int, lo=1)
    xi = o.number("xi", 0.01, lo=0.0)
    init = o.raw("init_points", None)
    if init is not None:
        init = o.number("init_points", None, int, lo=1)
        if init > budget:
            o.fail(f"larger than budget {budget}", "init_points")
    o.done()

    s = r.sub("scenario")
    az = s.numbers("azimuth_deg", [-180, 180], 2)
    el = s.numbers("elevation_deg", [-60, 60], 2)
    if az[0] >= az[1]:
        s.fail("lower bound must be below upper bound", "azimuth_deg")
    if not (-90 <= el[0] < el[1] <= 90):
        s.fail("need -90 <= lower < upper <= 90", "elevation_deg")
    scen = ScenarioConfig(
        n_users=s.number("n_users", 4, int, lo=1),
        n_paths=s.number("n_paths", 5, int, lo=1),
        wavelength=s.number("wavelength", 0.1, lo=0.0, strict_lo=True),
        noise_power=s.number("noise_power", 1.0, lo=0.0, strict_lo=True),
        azimuth_range=az,
        elevation_range=el,
    )
    s.done()

    a = r.sub("array")
    n = a.number("n_elements", 4, int, lo=1)
    region = a.numbers("region_wavelengths", [4, 4, 2], 3)
    if min(region) <= 0:
        a.fail("extents must be positive", "region_wavelengths")
    grid = a.raw("local_grid", None)
    if grid is not None:
        grid = a.numbers("local_grid", grid, 3, int)
        if min(grid) < 1 or grid[0] * grid[1] * grid[2] != n:
            a.fail(f"cell counts must multiply to n_elements = {n}", "local_grid")
    f = a.sub("fpa")
    rows = f.number("rows", 2, int, lo=1)
    cols = f.number("cols", 2, int, lo=1)
    pitch = f.number("spacing_wavelengths", 0.5, lo=0.5)
    f.done()
    if rows * cols != n:
        f.fail(f"rows x cols must equal n_elements = {n}")
    if (cols - 1) * pitch > region[1] or (rows - 1) * pitch > region[2]:
        f.fail("fixed array does not fit inside the region")
    a.done()
    if scen.n_users > n:
        r.fail(f"{scen.n_users} users exceed {n} antennas", "scenario.n_users")

    q = r.sub("quantization")
    qc = QuantizationConfig(q.number("pitch_divisor", 6, int, lo=1), q.raw("layouts_from", None))
    if qc.layouts_from is not None and not isinstance(qc.layouts_from, str):
        q.fail("expected a directory path", "layouts_from")
    q.done()

    p = r.sub("phase_center")
    pc = PhaseCenterConfig(
        targets_wavelengths=p.numbers("targets_wavelengths", [0.8, 1.2]),
        spacing_wavelengths=p.number("spacing_wavelengths", 1.0, lo=0.0, strict_lo=True),
        radius_wavelengths=p.number("radius_wavelengths", 0.15, lo=0.0, strict_lo=True),
        window_deg=p.number("window_deg", 60.0, lo=0.0, hi=90.0, strict_lo=True),
        samples=p.number("samples", 241, int, lo=21),
    )
    if min(pc.targets_wavelengths) <= 0:
        p.fail("targets must be positive", "targets_wavelengths")
    p.done()
    r.done()

    return ExperimentConfig(
        experiment=kind, schemes=schemes, snr_db=snr, seeds=seeds,
        optimizer=OptimizerConfig(method, budget, xi, init), scenario=scen,
        array=ArrayConfig(n, region, grid, rows, cols, pitch), quantization=qc,
        phase_center=pc, output=output, source=source,
    )


def resolve_path(name) -> str:
    """A file path, or the name of a shipped config (``default``, ...)."""
    if os.path.exists(name):
        return name
    if name in BUILTIN:
        return str(resources.files("movant.harness") / "configs" / f"{name}.yaml")
    raise ConfigError(f"{name}: no such file (shipped configs: {', '.join(BUILTIN)})")


def load_config(name) -> ExperimentConfig:
    path = resolve_path(name)
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML: {exc}") from None
    return parse_config(data, os.path.basename(path))
