"""Element radiation patterns.

Angles follow the usual antenna convention in the element's own frame:
zenith ``theta`` in [0, 180] degrees measured from local +z, azimuth ``phi``
in (-180, 180] degrees measured from local +x. Local boresight (+x) is
therefore ``(theta, phi) = (90, 0)``. At the poles ``phi`` is reported as 0.

Gains are linear power ratios; the channel applies them as ``sqrt(gain)``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import RangeError
from .geometry import rotation_matrix


def _wrap_deg(phi):
    # onto (-180, 180]
    phi = np.mod(np.asarray(phi, dtype=float) + 180.0, 360.0) - 180.0
    return np.where(phi <= -180.0, phi + 360.0, phi)


def local_angles_from_vectors(v):
    """Spherical angles (degrees) of local-frame direction vectors ``v[..., 3]``."""
    v = np.asarray(v, dtype=float)
    rho = np.hypot(v[..., 0], v[..., 1])
    theta = np.degrees(np.arctan2(rho, v[..., 2]))
    phi = np.where(rho > 1e-15, np.degrees(np.arctan2(v[..., 1], v[..., 0])), 0.0)
    return theta, _wrap_deg(phi)


def local_angles(o, u_global):
    """``(theta, phi)`` in degrees of global direction ``u_global`` seen by an element.

    ``o`` is an :class:`~movant.geometry.Orientation`, a yaw/pitch/roll
    triple or a 3x3 rotation matrix.
    """
    u = np.asarray(u_global, dtype=float)
    if abs(np.linalg.norm(u) - 1.0) > 1e-9:
        raise ValueError("u_global must be a unit vector")
    R = np.asarray(o, dtype=float) if np.shape(o) == (3, 3) else rotation_matrix(o)
    theta, phi = local_angles_from_vectors(R.T @ u)
    return float(theta), float(phi)


def _check_range(theta, phi):
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if np.any((theta < 0) | (theta > 180)) or np.any((phi <= -180) | (phi > 180)):
        raise RangeError("angles outside theta in [0, 180], phi in (-180, 180]")
    return theta, phi


class PatternModel:
    kind = "base"

    def gain_db(self, theta, phi):
        raise NotImplementedError

    def gain(self, theta, phi):
        theta, phi = _check_range(theta, phi)
        return 10.0 ** (self.gain_db(theta, phi) / 10.0)


class Omni(PatternModel):
    """Isotropic element: unit gain everywhere."""

    kind = "omni"

    def gain_db(self, theta, phi):
        return np.zeros(np.broadcast(np.asarray(theta), np.asarray(phi)).shape)

    def gain(self, theta, phi):
        theta, phi = _check_range(theta, phi)
        return np.ones(np.broadcast(theta, phi).shape)

    def __repr__(self):
        return "Omni()"


OMNI = Omni()


@dataclass(frozen=True)
class Directional38901(PatternModel):
    """Single-element pattern of 3GPP TR 38.901 Table 7.3-1.

    Vertical cut ``A_V = -min(12 ((theta - 90)/theta_3db)^2, sla_v)``,
    horizontal cut ``A_H = -min(12 (phi/phi_3db)^2, a_max)``, combined as
    ``-min(-(A_V + A_H), a_max)`` and offset by the peak gain ``g_max``.
    All quantities in degrees and dB.
    """

    theta_3db: float = 65.0
    phi_3db: float = 65.0
    sla_v: float = 30.0
    a_max: float = 30.0
    g_max: float = 8.0

    kind = "dir38901"

    def __post_init__(self):
        if self.theta_3db <= 0 or self.phi_3db <= 0:
            raise ValueError("beamwidths must be positive")
        if self.sla_v < 0 or self.a_max < 0:
            raise ValueError("side-lobe level and attenuation cap must be non-negative")

    def gain_db(self, theta, phi):
        a_v = -np.minimum(12.0 * ((np.asarray(theta) - 90.0) / self.theta_3db) ** 2, self.sla_v)
        a_h = -np.minimum(12.0 * (np.asarray(phi) / self.phi_3db) ** 2, self.a_max)
        return self.g_max - np.minimum(-(a_v + a_h), self.a_max)


class Tabulated(PatternModel):
    """Gain sampled on a rectangular (theta, phi) grid, bilinear in dB.

    ``phi`` is treated as periodic so the grid only needs to cover
    (-180, 180].
    """

    kind = "tabulated"

    def __init__(self, theta_deg, phi_deg, gain_dbi):
        theta = np.asarray(theta_deg, dtype=float)
        phi = np.asarray(phi_deg, dtype=float)
        g = np.asarray(gain_dbi, dtype=float).reshape(len(theta), len(phi))
        if theta[0] > 0 or theta[-1] < 180:
            raise ValueError("theta grid must span [0, 180]")
        if np.any(np.diff(theta) <= 0) or np.any(np.diff(phi) <= 0):
            raise ValueError("grid axes must be strictly increasing")
        if phi[0] <= -180 or phi[-1] > 180:
            raise ValueError("phi grid must lie in (-180, 180]")
        self.theta, self.phi, self.table = theta, phi, g
        # periodic extension on both sides of the phi axis
        phi_ext = np.concatenate([[phi[-1] - 360.0], phi, [phi[0] + 360.0]])
        g_ext = np.concatenate([g[:, -1:], g, g[:, :1]], axis=1)
        self._interp = RegularGridInterpolator((theta, phi_ext), g_ext)

    def gain_db(self, theta, phi):
        theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
        pts = np.stack([theta.ravel(), phi.ravel()], axis=-1)
        return self._interp(pts).reshape(theta.shape)

    @classmethod
    def from_csv(cls, path):
        """Read ``theta_deg, phi_deg, gain_dBi`` rows (header first)."""
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            next(reader)
            rows = np.array([[float(x) for x in r] for r in reader if r])
        theta = np.unique(rows[:, 0])
        phi = np.unique(rows[:, 1])
        if len(rows) != len(theta) * len(phi):
            raise ValueError(f"{path}: grid is not complete and rectangular")
        table = np.full((len(theta), len(phi)), np.nan)
        table[np.searchsorted(theta, rows[:, 0]), np.searchsorted(phi, rows[:, 1])] = rows[:, 2]
        if np.isnan(table).any():
            raise ValueError(f"{path}: duplicate grid points")
        return cls(theta, phi, table)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["theta_deg", "phi_deg", "gain_dBi"])
            for i, t in enumerate(self.theta):
                for j, p in enumerate(self.phi):
                    w.writerow([repr(float(t)), repr(float(p)), repr(float(self.table[i, j]))])


def gain(p: Optional[PatternModel], theta, phi):
    """Linear power gain of pattern ``p`` (``None`` means omni)."""
    return (p or OMNI).gain(theta, phi)


def make_pattern(name: str, **kw) -> PatternModel:
    if name == "omni":
        return OMNI
    if name == "dir38901":
        return Directional38901(**kw)
    if name == "tabulated":
        return Tabulated.from_csv(kw["path"])
    raise ValueError(f"unknown pattern {name!r}")
