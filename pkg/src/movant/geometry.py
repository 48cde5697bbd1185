"""Antenna positions, orientations and movable-array architectures.

Every architecture is a frozen dataclass with three things: ``dimension``,
``bounds()`` and ``decode(params)``. Decoding turns a real parameter vector
into an :class:`AntennaLayout`. The module-level :func:`decode` and
:func:`param_bounds` just dispatch to those methods.

Conventions
-----------
* Orientations are (yaw, pitch, roll) in radians, composed intrinsically as
  ``R = Rz(yaw) @ Ry(pitch) @ Rx(roll)``.
* The local boresight of an element is its body +x axis.
* Regions are closed sets.
* The default anti-collision spacing is half a wavelength.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, QuantizationCollision

# relative slack for the closed-set and spacing comparisons
_TOL = 1e-9


# ---------------------------------------------------------------------------
# rotations

@dataclass(frozen=True)
class Orientation:
    yaw: float = 0.0
    pitch: float = 0.0
    roll: float = 0.0

    def as_array(self):
        return np.array([self.yaw, self.pitch, self.roll], dtype=float)


IDENTITY = Orientation()


def rotation_matrix(o) -> np.ndarray:
    """Rotation matrix of a yaw/pitch/roll orientation.

    ``o`` may be an :class:`Orientation` or any length-3 sequence
    ``(yaw, pitch, roll)``. The result is ``Rz(yaw) @ Ry(pitch) @ Rx(roll)``.
    """
    if isinstance(o, Orientation):
        angles = o.as_array()
    else:
        angles = np.asarray(o, dtype=float)
    return rotation_matrices(angles[None, :])[0]


def rotation_matrices(angles) -> np.ndarray:
    """Vectorised :func:`rotation_matrix` for an ``(N, 3)`` array of angles."""
    angles = np.atleast_2d(np.asarray(angles, dtype=float))
    cy, sy = np.cos(angles[:, 0]), np.sin(angles[:, 0])
    cp, sp = np.cos(angles[:, 1]), np.sin(angles[:, 1])
    cr, sr = np.cos(angles[:, 2]), np.sin(angles[:, 2])
    R = np.empty((angles.shape[0], 3, 3))
    R[:, 0, 0] = cy * cp
    R[:, 0, 1] = cy * sp * sr - sy * cr
    R[:, 0, 2] = cy * sp * cr + sy * sr
    R[:, 1, 0] = sy * cp
    R[:, 1, 1] = sy * sp * sr + cy * cr
    R[:, 1, 2] = sy * sp * cr - cy * sr
    R[:, 2, 0] = -sp
    R[:, 2, 1] = cp * sr
    R[:, 2, 2] = cp * cr
    return R


def _wrap_pi(a):
    # map onto (-pi, pi]
    a = np.mod(np.asarray(a, dtype=float) + np.pi, 2 * np.pi) - np.pi
    return np.where(a <= -np.pi, a + 2 * np.pi, a)


def orientation_from_matrix(R) -> Orientation:
    """Inverse of :func:`rotation_matrix`.

    At gimbal lock (pitch = +-pi/2) the roll is set to zero.
    """
    R = np.asarray(R, dtype=float)
    pitch = float(np.arcsin(np.clip(-R[2, 0], -1.0, 1.0)))
    if np.hypot(R[0, 0], R[1, 0]) < 1e-12:
        yaw = float(np.arctan2(-R[0, 1], R[1, 1]))
        roll = 0.0
    else:
        yaw = float(np.arctan2(R[1, 0], R[0, 0]))
        roll = float(np.arctan2(R[2, 1], R[2, 2]))
    return Orientation(float(_wrap_pi(yaw)), pitch, float(_wrap_pi(roll)))


def axis_angle_matrix(axis, angle: float) -> np.ndarray:
    """Rodrigues rotation about a unit ``axis`` through the origin."""
    k = np.asarray(axis, dtype=float)
    k = k / np.linalg.norm(k)
    K = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + np.sin(angle) * K + (1.0 - np.cos(angle)) * (K @ K)


# ---------------------------------------------------------------------------
# regions

@dataclass(frozen=True, eq=False)
class Box:
    """Closed axis-aligned box."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float).reshape(3)
        hi = np.asarray(self.upper, dtype=float).reshape(3)
        if np.any(hi < lo):
            raise ValueError(f"box has negative extent: {lo} .. {hi}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    kind = "box"

    @classmethod
    def centered(cls, extents, center=(0.0, 0.0, 0.0)):
        c = np.asarray(center, dtype=float)
        half = np.asarray(extents, dtype=float) / 2
        return cls(c - half, c + half)

    @property
    def extents(self):
        return self.upper - self.lower

    @property
    def anchor(self):
        return self.lower

    def contains(self, p, tol=None) -> bool:
        if tol is None:
            tol = _TOL * max(1.0, float(np.max(np.abs(self.extents))))
        p = np.asarray(p, dtype=float)
        return bool(np.all(p >= self.lower - tol) and np.all(p <= self.upper + tol))

    def clip(self, p):
        return np.clip(p, self.lower, self.upper)

    def translated(self, t) -> "Box":
        return Box(self.lower + t, self.upper + t)

    def split(self, grid) -> list:
        """Tile the box into ``prod(grid)`` equal cells, x index slowest."""
        grid = tuple(int(g) for g in grid)
        step = self.extents / np.asarray(grid)
        cells = []
        for idx in itertools.product(*(range(g) for g in grid)):
            i = np.asarray(idx)
            lo = self.lower + step * i
            hi = np.where(i + 1 == np.asarray(grid), self.upper, self.lower + step * (i + 1))
            cells.append(Box(lo, hi))
        return cells


@dataclass(frozen=True, eq=False)
class Polyline:
    """Piecewise-linear curve parameterised by arc length.

    A straight segment is a polyline with two knots (see :func:`segment`).
    """

    knots: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.knots, dtype=float).reshape(-1, 3)
        if len(k) < 2:
            raise ValueError("polyline needs at least two knots")
        object.__setattr__(self, "knots", k)

    @property
    def kind(self):
        return "segment" if len(self.knots) == 2 else "curve"

    @property
    def anchor(self):
        return self.knots.min(axis=0)

    @property
    def _cumlen(self):
        seg = np.linalg.norm(np.diff(self.knots, axis=0), axis=1)
        return np.concatenate([[0.0], np.cumsum(seg)])

    @property
    def length(self) -> float:
        return float(self._cumlen[-1])

    def point_at(self, s: float) -> np.ndarray:
        cum = self._cumlen
        s = float(np.clip(s, 0.0, cum[-1]))
        i = int(np.searchsorted(cum, s, side="right") - 1)
        i = min(max(i, 0), len(self.knots) - 2)
        span = cum[i + 1] - cum[i]
        t = 0.0 if span == 0 else (s - cum[i]) / span
        return self.knots[i] + t * (self.knots[i + 1] - self.knots[i])

    def distance(self, p) -> float:
        p = np.asarray(p, dtype=float)
        best = np.inf
        for a, b in zip(self.knots[:-1], self.knots[1:]):
            ab = b - a
            denom = float(ab @ ab)
            t = 0.0 if denom == 0 else np.clip((p - a) @ ab / denom, 0.0, 1.0)
            best = min(best, float(np.linalg.norm(p - (a + t * ab))))
        return best

    def contains(self, p, tol=None) -> bool:
        if tol is None:
            tol = _TOL * max(1.0, self.length)
        return self.distance(p) <= tol

    def clip(self, p):
        return np.asarray(p, dtype=float)

    def translated(self, t) -> "Polyline":
        return Polyline(self.knots + t)


def segment(start, end) -> Polyline:
    return Polyline(np.vstack([start, end]))


# ---------------------------------------------------------------------------
# layouts

@dataclass(frozen=True, eq=False)
class AntennaLayout:
    """Positions and orientations of every antenna element.

    Parameters
    ----------
    positions : (N, 3) array, meters
    rotations : (N, 3, 3) array
        Body-to-global rotation of each element.
    wavelength : float, meters
    active : (N,) bool array, optional
    regions : sequence of Box/Polyline/None, optional
        Region each element must stay in; ``None`` means unconstrained.
    d_min : float, optional
        Minimum spacing between active elements, defaults to ``wavelength/2``.
    pattern : PatternModel, optional
        Element radiation pattern; ``None`` is treated as omni-directional.
    platform : (3,) array, optional
        Platform offset for dual-scale layouts.
    """

    positions: np.ndarray
    rotations: np.ndarray
    wavelength: float
    active: Optional[np.ndarray] = None
    regions: Optional[tuple] = None
    d_min: Optional[float] = None
    pattern: object = None
    platform: Optional[np.ndarray] = None

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float).reshape(-1, 3)
        n = len(pos)
        rot = np.array(self.rotations, dtype=float).reshape(n, 3, 3)
        act = np.ones(n, bool) if self.active is None else np.array(self.active, bool).reshape(n)
        regions = (None,) * n if self.regions is None else tuple(self.regions)
        if len(regions) != n:
            raise DimensionMismatch(f"{len(regions)} regions for {n} elements")
        for a in (pos, rot, act):
            a.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "rotations", rot)
        object.__setattr__(self, "active", act)
        object.__setattr__(self, "regions", regions)
        if self.d_min is None:
            object.__setattr__(self, "d_min", self.wavelength / 2)
        if self.platform is not None:
            plat = np.array(self.platform, dtype=float).reshape(3)
            plat.setflags(write=False)
            object.__setattr__(self, "platform", plat)

    @classmethod
    def from_euler(cls, positions, angles=None, wavelength=1.0, **kw):
        positions = np.asarray(positions, dtype=float).reshape(-1, 3)
        if angles is None:
            rot = np.broadcast_to(np.eye(3), (len(positions), 3, 3))
        else:
            rot = rotation_matrices(np.asarray(angles, dtype=float).reshape(-1, 3))
        return cls(positions, rot, wavelength, **kw)

    def __len__(self):
        return len(self.positions)

    @property
    def orientations(self) -> list:
        return [orientation_from_matrix(R) for R in self.rotations]

    @property
    def elements(self) -> list:
        return list(zip(self.positions, self.orientations, self.active))

    def with_positions(self, positions) -> "AntennaLayout":
        return replace(self, positions=positions)

    def with_pattern(self, pattern) -> "AntennaLayout":
        return replace(self, pattern=pattern)


@dataclass
class Violation:
    kind: str          # "spacing" or "region"
    indices: tuple
    detail: float      # spacing deficit or distance outside, meters

    def __str__(self):
        if self.kind == "spacing":
            return f"elements {self.indices} closer than d_min by {self.detail:.3g} m"
        return f"element {self.indices[0]} outside its region"


@dataclass
class FeasibilityReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def spacing_depth(self, wavelength) -> float:
        return sum(v.detail for v in self.violations if v.kind == "spacing") / wavelength


def validate(layout: AntennaLayout) -> FeasibilityReport:
    """Report every spacing and region violation of ``layout``."""
    out = []
    idx = np.flatnonzero(layout.active)
    pos = layout.positions
    for a, b in itertools.combinations(idx, 2):
        d = float(np.linalg.norm(pos[a] - pos[b]))
        if d < layout.d_min * (1 - _TOL):
            out.append(Violation("spacing", (int(a), int(b)), layout.d_min - d))
    for i, region in enumerate(layout.regions):
        if region is not None and not region.contains(pos[i]):
            out.append(Violation("region", (i,), float("nan")))
    return FeasibilityReport(out)


def repair_spacing(layout: AntennaLayout, max_sweeps: int = 200) -> AntennaLayout:
    """Push apart element pairs closer than ``d_min``.

    Each violating pair is separated symmetrically along the line joining
    them, then every element is clipped back into its box region. Sweeps
    repeat in fixed pair order until feasible or ``max_sweeps`` is reached,
    so the result is deterministic. Coincident pairs are split along +x.
    """
    pos = np.array(layout.positions)
    idx = np.flatnonzero(layout.active)
    target = layout.d_min * (1 + 1e-9)
    for _ in range(max_sweeps):
        moved = False
        for a, b in itertools.combinations(idx, 2):
            diff = pos[b] - pos[a]
            d = float(np.linalg.norm(diff))
            if d >= layout.d_min * (1 - _TOL):
                continue
            u = diff / d if d > 0 else np.array([1.0, 0.0, 0.0])
            push = (target - d) / 2
            pos[a] -= push * u
            pos[b] += push * u
            moved = True
        for i, region in enumerate(layout.regions):
            if region is not None:
                pos[i] = region.clip(pos[i])
        if not moved:
            break
    return layout.with_positions(pos)


def quantize_positions(layout: AntennaLayout, pitch: float) -> AntennaLayout:
    """Snap every coordinate to the nearest multiple of ``pitch``.

    The grid is anchored at each element's region min corner (the origin for
    unconstrained elements). Orientations are untouched.
    """
    if pitch <= 0:
        raise ValueError("pitch must be positive")
    pos = np.array(layout.positions)
    for i, region in enumerate(layout.regions):
        anchor = np.zeros(3) if region is None else region.anchor
        pos[i] = anchor + np.round((pos[i] - anchor) / pitch) * pitch
    active = np.flatnonzero(layout.active)
    for a, b in itertools.combinations(active, 2):
        if np.allclose(pos[a], pos[b], rtol=0, atol=1e-9 * pitch):
            raise QuantizationCollision(f"elements {a} and {b} snap to the same grid point")
    return layout.with_positions(pos)


# ---------------------------------------------------------------------------
# architectures

def _check_len(params, n):
    params = np.asarray(params, dtype=float).reshape(-1)
    if len(params) != n:
        raise DimensionMismatch(f"expected {n} parameters, got {len(params)}")
    return params


# default rotation ranges (yaw, pitch, roll)
FULL_ROTATION = ((-np.pi, np.pi), (-np.pi / 2, np.pi / 2), (-np.pi, np.pi))


@dataclass(frozen=True, eq=False)
class FixedArray:
    """Fixed-position array: zero free parameters."""

    positions: np.ndarray
    wavelength: float
    angles: Optional[np.ndarray] = None

    kind = "fpa"
    dimension = 0

    def bounds(self):
        return []

    def decode(self, params=()):
        _check_len(params, 0)
        return AntennaLayout.from_euler(self.positions, self.angles, self.wavelength)


def _element_bounds(regions, rotation_enabled, rotation_bounds):
    b = []
    for r in regions:
        b.extend(zip(r.lower, r.upper))
    if rotation_enabled:
        b.extend(list(rotation_bounds) * len(regions))
    return [(float(lo), float(hi)) for lo, hi in b]


def _element_decode(params, regions, rotation_enabled, wavelength):
    n = len(regions)
    pos = params[: 3 * n].reshape(n, 3)
    angles = params[3 * n:].reshape(n, 3) if rotation_enabled else None
    return AntennaLayout.from_euler(pos, angles, wavelength, regions=tuple(regions))


def _element_encode(layout, regions, rotation_enabled):
    p = [np.asarray(layout.positions).reshape(-1)]
    if rotation_enabled:
        p.append(np.concatenate([o.as_array() for o in layout.orientations]))
    return np.concatenate(p)


@dataclass(frozen=True, eq=False)
class ElementGlobal:
    """Every element moves anywhere inside one shared region.

    Parameters are all positions (element-major x, y, z) followed, when
    rotation is enabled, by all (yaw, pitch, roll) triples.
    """

    n_elements: int
    region: Box
    wavelength: float
    rotation_enabled: bool = False
    rotation_bounds: tuple = FULL_ROTATION

    kind = "element_global"

    @property
    def regions(self):
        return [self.region] * self.n_elements

    @property
    def dimension(self):
        return self.n_elements * (6 if self.rotation_enabled else 3)

    def bounds(self):
        return _element_bounds(self.regions, self.rotation_enabled, self.rotation_bounds)

    def decode(self, params):
        params = _check_len(params, self.dimension)
        return _element_decode(params, self.regions, self.rotation_enabled, self.wavelength)

    def encode(self, layout):
        return _element_encode(layout, self.regions, self.rotation_enabled)


def default_grid(n: int, extents) -> tuple:
    """Cell counts per axis for ``n`` equal cells, splitting the longest cell side first."""
    grid = [1, 1, 1]
    ext = np.asarray(extents, dtype=float)
    rest = n
    factors = []
    f = 2
    while rest > 1:
        while rest % f == 0:
            factors.append(f)
            rest //= f
        f += 1
    for f in sorted(factors, reverse=True):
        ax = int(np.argmax(ext / np.asarray(grid)))
        grid[ax] *= f
    return tuple(grid)


@dataclass(frozen=True, eq=False)
class ElementLocal:
    """Each element moves only inside its own cell of a tiled region.

    Element ``i`` is confined to cell ``i`` of ``region.split(grid)``.
    """

    n_elements: int
    region: Box
    wavelength: float
    grid: Optional[tuple] = None
    rotation_enabled: bool = False
    rotation_bounds: tuple = FULL_ROTATION

    kind = "element_local"

    def __post_init__(self):
        grid = self.grid or default_grid(self.n_elements, self.region.extents)
        if int(np.prod(grid)) != self.n_elements:
            raise ValueError(f"grid {grid} does not give {self.n_elements} cells")
        object.__setattr__(self, "grid", tuple(grid))

    @property
    def regions(self):
        return self.region.split(self.grid)

    @property
    def dimension(self):
        return self.n_elements * (6 if self.rotation_enabled else 3)

    def bounds(self):
        return _element_bounds(self.regions, self.rotation_enabled, self.rotation_bounds)

    def decode(self, params):
        params = _check_len(params, self.dimension)
        return _element_decode(params, self.regions, self.rotation_enabled, self.wavelength)

    def encode(self, layout):
        return _element_encode(layout, self.regions, self.rotation_enabled)


@dataclass(frozen=True, eq=False)
class SubArray:
    """Rigid element template: ``offsets`` (M, 3) in the sub-array frame."""

    offsets: np.ndarray
    center: np.ndarray = field(default_factory=lambda: np.zeros(3))
    angles: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "offsets", np.asarray(self.offsets, dtype=float).reshape(-1, 3))
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float).reshape(3))

    def __len__(self):
        return len(self.offsets)


def planar_offsets(rows: int, cols: int, spacing: float) -> np.ndarray:
    """Centered ``rows`` x ``cols`` grid in the local y-z plane.

    Columns run along y (horizontal) and rows along z (vertical), so the
    grid faces the local +x boresight. Ordering is column-major in y.
    """
    ys = (np.arange(cols) - (cols - 1) / 2) * spacing
    zs = (np.arange(rows) - (rows - 1) / 2) * spacing
    return np.array([[0.0, y, z] for y in ys for z in zs])


def _assemble(parts, wavelength, active=None, regions=None):
    pos = np.concatenate([p for p, _ in parts])
    rot = np.concatenate([r for _, r in parts])
    return AntennaLayout(pos, rot, wavelength, active=active, regions=regions)


@dataclass(frozen=True, eq=False)
class SlidingArray:
    """Sub-arrays that slide along tracks, one arc-length parameter each.

    Sub-array ``i``'s reference point sits at ``tracks[i].point_at(s_i)``;
    its elements keep their template offsets and orientation.
    """

    subarrays: tuple
    tracks: tuple
    wavelength: float

    kind = "sliding"

    @property
    def dimension(self):
        return len(self.subarrays)

    def bounds(self):
        return [(0.0, t.length) for t in self.tracks]

    def decode(self, params):
        params = _check_len(params, self.dimension)
        parts = []
        for sub, track, s in zip(self.subarrays, self.tracks, params):
            R = rotation_matrix(sub.angles)
            parts.append((track.point_at(s) + sub.offsets @ R.T, np.broadcast_to(R, (len(sub), 3, 3))))
        return _assemble(parts, self.wavelength)


@dataclass(frozen=True, eq=False)
class RotatableArray:
    """One array rotating about its own boresight by a roll angle.

    With a horizontal template (roll = 0, "mode H") a roll of pi/2 gives the
    vertical arrangement ("mode V").
    """

    subarray: SubArray
    wavelength: float
    roll_bounds: tuple = (-np.pi / 2, np.pi / 2)

    kind = "rotatable"
    dimension = 1

    def bounds(self):
        return [tuple(float(b) for b in self.roll_bounds)]

    def decode(self, params):
        (roll,) = _check_len(params, 1)
        yaw, pitch, _ = self.subarray.angles
        R = rotation_matrix((yaw, pitch, roll))
        sub = self.subarray
        return _assemble([(sub.center + sub.offsets @ R.T, np.broadcast_to(R, (len(sub), 3, 3)))],
                         self.wavelength)


@dataclass(frozen=True, eq=False)
class TurnableArray:
    """Sub-arrays each turned in yaw and pitch about their centers; roll stays 0."""

    subarrays: tuple
    wavelength: float
    yaw_bounds: tuple = (-np.pi / 3, np.pi / 3)
    pitch_bounds: tuple = (-np.pi / 4, np.pi / 4)

    kind = "turnable"

    @property
    def dimension(self):
        return 2 * len(self.subarrays)

    def bounds(self):
        return [tuple(map(float, self.yaw_bounds)), tuple(map(float, self.pitch_bounds))] * len(self.subarrays)

    def decode(self, params):
        params = _check_len(params, self.dimension).reshape(-1, 2)
        parts = []
        for sub, (yaw, pitch) in zip(self.subarrays, params):
            R = rotation_matrix((yaw, pitch, 0.0))
            parts.append((sub.center + sub.offsets @ R.T, np.broadcast_to(R, (len(sub), 3, 3))))
        return _assemble(parts, self.wavelength)


@dataclass(frozen=True, eq=False)
class Hinge:
    point: np.ndarray
    axis: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float).reshape(3))
        a = np.asarray(self.axis, dtype=float).reshape(3)
        object.__setattr__(self, "axis", a / np.linalg.norm(a))


@dataclass(frozen=True, eq=False)
class FoldableArray:
    """Panels folding rigidly about hinge lines, one fold angle per panel.

    ``panels[i]`` holds the unfolded element template (global coordinates at
    fold angle 0) and ``hinges[i]`` its hinge line. ``fixed`` is an optional
    central panel that never moves. With ``deactivate_folded`` set, panels
    folded all the way to the upper bound are switched off.
    """

    panels: tuple
    hinges: tuple
    wavelength: float
    fixed: Optional[SubArray] = None
    fold_bounds: tuple = (0.0, np.pi / 2)
    deactivate_folded: bool = False

    kind = "foldable"

    @property
    def dimension(self):
        return len(self.panels)

    def bounds(self):
        return [tuple(map(float, self.fold_bounds))] * len(self.panels)

    def decode(self, params):
        params = _check_len(params, self.dimension)
        parts, active = [], []
        if self.fixed is not None:
            R = rotation_matrix(self.fixed.angles)
            parts.append((self.fixed.center + self.fixed.offsets @ R.T, np.broadcast_to(R, (len(self.fixed), 3, 3))))
            active.extend([True] * len(self.fixed))
        for panel, hinge, angle in zip(self.panels, self.hinges, params):
            F = axis_angle_matrix(hinge.axis, angle)
            base = rotation_matrix(panel.angles)
            pos = panel.center + panel.offsets @ base.T
            pos = hinge.point + (pos - hinge.point) @ F.T
            parts.append((pos, np.broadcast_to(F @ base, (len(panel), 3, 3))))
            folded = self.deactivate_folded and angle >= self.fold_bounds[1] - 1e-12
            active.extend([not folded] * len(panel))
        return _assemble(parts, self.wavelength, active=np.array(active))


@dataclass(frozen=True, eq=False)
class DualScale:
    """Any architecture mounted on a movable platform.

    The first three parameters are the platform offset inside
    ``platform_region``; the rest go to ``inner``.
    """

    inner: object
    platform_region: Box = field(default_factory=lambda: Box.centered((100.0, 100.0, 100.0)))

    kind = "dual_scale"

    @property
    def wavelength(self):
        return self.inner.wavelength

    @property
    def dimension(self):
        return 3 + self.inner.dimension

    def bounds(self):
        return [(float(lo), float(hi)) for lo, hi in zip(self.platform_region.lower, self.platform_region.upper)] \
            + list(self.inner.bounds())

    def decode(self, params):
        params = _check_len(params, self.dimension)
        t = params[:3]
        lay = self.inner.decode(params[3:])
        regions = tuple(None if r is None else r.translated(t) for r in lay.regions)
        return replace(lay, positions=lay.positions + t, regions=regions, platform=t)


ARCHITECTURES = {
    cls.kind: cls
    for cls in (FixedArray, ElementGlobal, ElementLocal, SlidingArray, RotatableArray,
                TurnableArray, FoldableArray, DualScale)
}


def param_bounds(spec) -> list:
    """``(lower, upper)`` per parameter, in decode order."""
    return list(spec.bounds())


def decode(spec, params) -> AntennaLayout:
    return spec.decode(params)
