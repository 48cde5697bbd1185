"""Multipath scenarios and the layout-dependent downlink channel.

Far-field plane-wave model: every path ``l`` of user ``k`` leaves the base
station along a unit direction ``u`` with complex gain ``beta``. Element
``n`` at position ``p_n`` contributes

    sqrt(g_n(u)) * exp(1j * 2*pi/lambda * <u, p_n>)

so position only moves the phase and orientation only changes the gain.

Random draws use a counter-based Philox generator keyed by the seed, so a
scenario is a pure function of ``(config, seed)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError, InfeasibleLayout
from .geometry import AntennaLayout, validate
from .patterns import OMNI, local_angles, local_angles_from_vectors
from .rng import rng_for

PATH_LOSS_EXPONENT = 2.8
REFERENCE_DISTANCE = 100.0


def direction(azimuth_deg, elevation_deg):
    az = np.radians(azimuth_deg)
    el = np.radians(elevation_deg)
    return np.stack([np.cos(el) * np.cos(az), np.cos(el) * np.sin(az), np.sin(el)], axis=-1)


@dataclass(frozen=True)
class PathComponent:
    """One departure path; the direction is derived from the stored angles."""

    azimuth_deg: float
    elevation_deg: float
    gain: complex

    @property
    def direction(self):
        return direction(self.azimuth_deg, self.elevation_deg)


@dataclass(frozen=True)
class ScenarioConfig:
    n_users: int = 4
    n_paths: int = 5
    wavelength: float = 0.1
    noise_power: float = 1.0
    azimuth_range: tuple = (-180.0, 180.0)
    elevation_range: tuple = (-60.0, 60.0)
    user_distance: float = REFERENCE_DISTANCE

    def check(self):
        if self.n_users < 1:
            raise ConfigError("n_users must be >= 1")
        if self.n_paths < 1:
            raise ConfigError("n_paths must be >= 1")
        if self.noise_power <= 0:
            raise ConfigError("noise_power must be > 0")
        if self.wavelength <= 0:
            raise ConfigError("wavelength must be > 0")


@dataclass(frozen=True)
class Scenario:
    """Per-user path lists plus the carrier wavelength and noise power."""

    wavelength: float
    users: tuple
    noise_power: float = 1.0
    user_distances: Optional[tuple] = None
    seed: int = 0

    def __post_init__(self):
        if any(len(p) < 1 for p in self.users):
            raise ConfigError("every user needs at least one path")
        if self.noise_power <= 0:
            raise ConfigError("noise_power must be > 0")
        if self.user_distances is None:
            object.__setattr__(self, "user_distances", (REFERENCE_DISTANCE,) * len(self.users))

    @property
    def n_users(self):
        return len(self.users)

    def to_dict(self):
        return {
            "wavelength": self.wavelength,
            "noise_power": self.noise_power,
            "seed": self.seed,
            "user_distances": list(self.user_distances),
            "users": [
                [{"azimuth_deg": p.azimuth_deg, "elevation_deg": p.elevation_deg,
                  "gain": [p.gain.real, p.gain.imag]} for p in paths]
                for paths in self.users
            ],
        }

    @classmethod
    def from_dict(cls, d):
        users = tuple(
            tuple(PathComponent(float(p["azimuth_deg"]), float(p["elevation_deg"]),
                                complex(p["gain"][0], p["gain"][1])) for p in paths)
            for paths in d["users"]
        )
        return cls(float(d["wavelength"]), users, float(d["noise_power"]),
                   tuple(float(x) for x in d["user_distances"]), int(d["seed"]))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def loads(cls, text):
        return cls.from_dict(json.loads(text))

    def dump(self, path):
        with open(path, "w") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.loads(fh.read())


def generate_scenario(cfg: ScenarioConfig, seed: int) -> Scenario:
    """Draw ``n_paths`` paths per user for ``cfg`` from the seeded generator.

    Directions are uniform over the spherical sector (uniform azimuth,
    uniform sine of elevation) and gains are CN(0, 1/L) per path.
    """
    cfg.check()
    rng = rng_for(seed)
    K, L = cfg.n_users, cfg.n_paths
    az = rng.uniform(*cfg.azimuth_range, size=(K, L))
    s_lo, s_hi = np.sin(np.radians(cfg.elevation_range))
    el = np.degrees(np.arcsin(rng.uniform(s_lo, s_hi, size=(K, L))))
    g = (rng.standard_normal((K, L)) + 1j * rng.standard_normal((K, L))) * np.sqrt(0.5 / L)
    users = tuple(
        tuple(PathComponent(float(az[k, l]), float(el[k, l]), complex(g[k, l])) for l in range(L))
        for k in range(K)
    )
    return Scenario(cfg.wavelength, users, cfg.noise_power, (float(cfg.user_distance),) * K, int(seed))


def field_response(layout: AntennaLayout, path: PathComponent, n: int, wavelength=None) -> complex:
    """Complex response of element ``n`` to a single path."""
    lam = layout.wavelength if wavelength is None else wavelength
    u = path.direction
    theta, phi = local_angles(layout.rotations[n], u)
    g = (layout.pattern or OMNI).gain(theta, phi)
    return complex(np.sqrt(g) * np.exp(1j * 2 * np.pi / lam * float(u @ layout.positions[n])))


def _path_arrays(scenario):
    az = [[p.azimuth_deg for p in paths] for paths in scenario.users]
    el = [[p.elevation_deg for p in paths] for paths in scenario.users]
    gains = [[p.gain for p in paths] for paths in scenario.users]
    return az, el, gains


def large_scale_gains(layout: AntennaLayout, scenario: Scenario) -> np.ndarray:
    """Per-user amplitude factor from platform displacement (1 without a platform).

    User ``k`` is placed at ``user_distances[k]`` along its first path
    direction; the amplitude follows ``(d/d_ref)^(-alpha/2)``.
    """
    K = scenario.n_users
    if layout.platform is None:
        return np.ones(K)
    out = np.empty(K)
    for k, paths in enumerate(scenario.users):
        user = scenario.user_distances[k] * paths[0].direction
        d = max(float(np.linalg.norm(user - layout.platform)), 1e-3)
        out[k] = (d / REFERENCE_DISTANCE) ** (-PATH_LOSS_EXPONENT / 2)
    return out


def build_channel(layout: AntennaLayout, scenario: Scenario, check: bool = True) -> np.ndarray:
    """K x N channel matrix, row ``k`` for user ``k`` and column ``n`` for element ``n``.

    Inactive elements contribute zero columns. ``check=False`` skips the
    feasibility test (used where spacing rules do not apply, e.g. switched
    dense arrays).
    """
    if check:
        report = validate(layout)
        if not report.ok:
            raise InfeasibleLayout("; ".join(map(str, report.violations)), report.violations)
    lam = scenario.wavelength
    pattern = layout.pattern or OMNI
    K = scenario.n_users
    N = len(layout)
    H = np.zeros((K, N), dtype=complex)
    pos = layout.positions
    rot = layout.rotations
    for k, paths in enumerate(scenario.users):
        az = np.array([p.azimuth_deg for p in paths])
        el = np.array([p.elevation_deg for p in paths])
        beta = np.array([p.gain for p in paths])
        u = direction(az, el)                                   # (L, 3)
        phase = np.exp(1j * 2 * np.pi / lam * (u @ pos.T))       # (L, N)
        if pattern is OMNI:
            amp = 1.0
        else:
            local = np.einsum("nji,lj->lni", rot, u)            # R_n^T u
            theta, phi = local_angles_from_vectors(local)
            amp = np.sqrt(pattern.gain(theta, phi))
        H[k] = beta @ (amp * phase)
    H[:, ~layout.active] = 0.0
    return H * large_scale_gains(layout, scenario)[:, None]
