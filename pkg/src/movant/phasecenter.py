"""Dual-mode circular patches and far-field phase-center estimation.

Mode patterns
-------------
Cavity model of a circular microstrip patch (Balanis, *Antenna Theory*,
circular patch radiation fields), evaluated in the principal E-plane cut with
a signed angle ``theta`` measured from broadside. For azimuthal order ``n``
the co-polar far field is proportional to

    f_n(x) = J_{n-1}(x) - J_{n+1}(x),    x = k a sin(theta)

with ``a`` the patch radius. The constant ``j**n`` prefactor is dropped, so
the relative mode phase lives entirely in the excitation coefficients.
``f_1`` (TM11) is even in ``theta`` and peaks at broadside; ``f_2`` (TM21) is
odd with an exact broadside null. Mixing the two with a 90 degree relative
phase tilts the phase front and moves the apparent origin of radiation off
the physical patch center.

The default radius ``0.15`` wavelengths is close to the resonant TM11 radius
on a substrate with relative permittivity near 3.8.

Phase center
------------
For a candidate offset ``x`` the residual phase is
``psi = angle(E) - k x sin(theta)``. The fit minimises the weighted wrapped
residual ``sum w * wrap(psi - c)**2`` with ``w = |E|**2``, where ``c`` is the
weighted circular mean refined by one Newton step. No unwrapping is needed.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import jv

from .errors import DimensionMismatch, LowSignal, RangeError

TM11, TM21 = "TM11", "TM21"
_ORDER = {TM11: 1, TM21: 2}

DEFAULT_RADIUS = 0.15       # wavelengths
DEFAULT_SPACING = 1.0       # physical center spacing, wavelengths
SCAN_HALF_WIDTH = 2.0       # wavelengths
SCAN_STEPS_PER_WAVELENGTH = 400
DB_FLOOR = -40.0
MIN_SAMPLES = 21


@dataclass(frozen=True)
class FarFieldCut:
    """Complex far field sampled along one cut.

    Angles are in degrees from broadside and must be strictly increasing
    inside [-90, 90].
    """

    theta_deg: np.ndarray
    field: np.ndarray
    wavelength: float = 1.0

    def __post_init__(self):
        th = np.asarray(self.theta_deg, dtype=float).reshape(-1)
        E = np.asarray(self.field, dtype=complex).reshape(-1)
        if th.shape != E.shape:
            raise DimensionMismatch(f"{len(th)} angles but {len(E)} field samples")
        if len(th) < MIN_SAMPLES:
            raise ValueError(f"a cut needs at least {MIN_SAMPLES} samples, got {len(th)}")
        if np.any(np.diff(th) <= 0):
            raise ValueError("angles must be strictly increasing")
        if th[0] < -90 or th[-1] > 90:
            raise ValueError("angles must lie within [-90, 90] degrees")
        if self.wavelength <= 0:
            raise ValueError("wavelength must be positive")
        th.flags.writeable = False
        E.flags.writeable = False
        object.__setattr__(self, "theta_deg", th)
        object.__setattr__(self, "field", E)

    @property
    def theta(self):
        return np.radians(self.theta_deg)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["theta_deg", "re", "im"])
            for t, e in zip(self.theta_deg, self.field):
                w.writerow([repr(float(t)), repr(float(e.real)), repr(float(e.imag))])

    @classmethod
    def from_csv(cls, path, wavelength=1.0):
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if [h.strip() for h in header] != ["theta_deg", "re", "im"]:
                raise ValueError(f"{path}: expected header theta_deg,re,im")
            rows = np.array([[float(x) for x in r] for r in reader if r])
        return cls(rows[:, 0], rows[:, 1] + 1j * rows[:, 2], wavelength)


@dataclass(frozen=True)
class ModeExcitation:
    """TM11/TM21 coefficients, normalised to unit total power."""

    a11: complex
    a21: complex

    def __post_init__(self):
        p = abs(self.a11) ** 2 + abs(self.a21) ** 2
        if p == 0:
            raise ValueError("excitation cannot be zero")
        s = np.sqrt(p)
        object.__setattr__(self, "a11", complex(self.a11) / s)
        object.__setattr__(self, "a21", complex(self.a21) / s)

    @classmethod
    def from_ratio(cls, ratio: float):
        """Quadrature mix ``a21 / a11 = j * ratio``."""
        return cls(1.0, 1j * ratio)

    @property
    def ratio(self) -> float:
        return float((self.a21 / self.a11).imag) if self.a11 != 0 else np.inf


@dataclass(frozen=True)
class DualModeElement:
    position: float                  # along the array axis, wavelengths
    excitation: ModeExcitation = ModeExcitation(1.0, 0.0)
    radius: float = DEFAULT_RADIUS   # wavelengths

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")


def mode_pattern(mode: str, theta_deg, radius: float = DEFAULT_RADIUS, wavelength: float = 1.0):
    """Complex cavity-model field of ``mode`` along a signed E-plane cut.

    ``radius`` is in the same length unit as ``wavelength``.
    """
    if mode not in _ORDER:
        raise ValueError(f"unknown mode {mode!r}")
    if radius <= 0:
        raise ValueError("radius must be positive")
    n = _ORDER[mode]
    x = 2 * np.pi * radius / wavelength * np.sin(np.radians(np.asarray(theta_deg, dtype=float)))
    return (jv(n - 1, x) - jv(n + 1, x)).astype(complex)


def element_field(e: DualModeElement, theta_deg, wavelength: float = 1.0):
    """Mode mix of ``e`` times the position phase ``exp(j k x sin(theta))``.

    ``position`` and ``radius`` are in wavelength units.
    """
    th = np.asarray(theta_deg, dtype=float)
    E = (e.excitation.a11 * mode_pattern(TM11, th, e.radius)
         + e.excitation.a21 * mode_pattern(TM21, th, e.radius))
    return E * np.exp(1j * 2 * np.pi * e.position * np.sin(np.radians(th)))


def array_field(elements, theta_deg):
    return sum(element_field(e, theta_deg) for e in elements)


@dataclass(frozen=True)
class PhaseCenterFit:
    offset: float       # wavelengths
    residual: float     # weighted RMS wrapped phase error, radians


def _cost(x, phase, s, w):
    """Weighted wrapped-residual cost for each candidate offset in ``x``.

    ``c`` per candidate is the weighted circular mean of the residual
    phase, refined by one Newton step.
    """
    q = np.exp(1j * (phase - 2 * np.pi * np.multiply.outer(x, s)))
    m = q @ w
    r = np.angle(q * np.conj(m / np.maximum(np.abs(m), 1e-300))[:, None])
    r = r - ((r @ w) / w.sum())[:, None]
    r -= 2 * np.pi * np.round(r / (2 * np.pi))
    return (r * r) @ w


def estimate_phase_center(cut: FarFieldCut) -> PhaseCenterFit:
    """Offset (wavelengths) of the apparent radiation origin along the cut axis.

    Scans ``+-2`` wavelengths at ``1/400`` wavelength steps, keeps the lowest
    cost (lowest index on ties) and refines it with a parabola through the
    neighbouring samples.

    Raises
    ------
    LowSignal
        If fewer than 70% of the samples exceed ``1e-6`` of the peak
        magnitude.
    """
    mag = np.abs(cut.field)
    peak = mag.max()
    if peak == 0 or np.mean(mag > 1e-6 * peak) < 0.7:
        raise LowSignal("field too weak over the cut to fit a phase center")
    w = (mag / peak) ** 2
    s = np.sin(cut.theta)
    phase = np.angle(cut.field)
    m = int(round(SCAN_HALF_WIDTH * SCAN_STEPS_PER_WAVELENGTH))
    h = 1.0 / SCAN_STEPS_PER_WAVELENGTH
    xs = np.arange(-m, m + 1) * h
    cost = _cost(xs, phase, s, w)
    i = int(np.argmin(cost))
    x = xs[i]
    if 0 < i < len(xs) - 1:
        a, b, c = cost[i - 1], cost[i], cost[i + 1]
        den = a - 2 * b + c
        if den > 0:
            x += float(np.clip(0.5 * (a - c) / den, -1.0, 1.0)) * h
    res = float(np.sqrt(_cost(np.array([x]), phase, s, w)[0] / w.sum()))
    return PhaseCenterFit(float(x), res)


def window(half_width_deg: float = 60.0, n: int = 241):
    return np.linspace(-half_width_deg, half_width_deg, n)


def _offset_at(mix_angle, radius, theta):
    e = DualModeElement(0.0, ModeExcitation(np.cos(mix_angle), 1j * np.sin(mix_angle)), radius)
    return estimate_phase_center(FarFieldCut(theta, element_field(e, theta))).offset


def displacement_curve(radius: float = DEFAULT_RADIUS, theta_deg=None, n: int = 181):
    """Phase-center offset of one element versus mode mixing.

    Returns ``(ratios, offsets)`` over ratios in ``[0, inf)``, sampled
    uniformly in the mixing angle ``atan(ratio)``. Negative ratios mirror
    the offset.
    """
    theta = window() if theta_deg is None else np.asarray(theta_deg, dtype=float)
    t = np.linspace(0.0, np.pi / 2, n)
    offsets = np.array([_offset_at(a, radius, theta) for a in t])
    ratios = np.tan(t)
    ratios[-1] = np.inf                      # pure TM21
    return ratios, offsets


@dataclass(frozen=True)
class Calibration:
    left: DualModeElement
    right: DualModeElement
    ratio: float
    achieved: float          # d_pc, wavelengths
    target: float
    interval: tuple          # achievable d_pc range

    @property
    def elements(self):
        return (self.left, self.right)


def _branch(radius, theta, n=46):
    # monotone increasing part of the displacement curve starting at zero mixing
    t = np.linspace(0.0, np.pi / 2, n)
    off = []
    for a in t:
        try:
            off.append(_offset_at(a, radius, theta))
        except LowSignal:
            break
        if len(off) > 1 and off[-1] <= off[-2]:
            off.pop()
            break
    return t[:len(off)], np.array(off)


def calibrate_excitation(target: float, radius: float = DEFAULT_RADIUS, spacing: float = DEFAULT_SPACING,
                         theta_deg=None, tol: float = 1e-4) -> Calibration:
    """Mirrored excitations placing two phase centers ``target`` wavelengths apart.

    The elements sit at ``-spacing/2`` and ``+spacing/2``; the left one uses
    ratio ``r`` and the right one ``-r``, so their phase centers move
    symmetrically. ``r`` is found by root bracketing in the mixing angle on
    the monotone branch of the displacement curve.

    Raises
    ------
    RangeError
        If ``target`` lies outside the achievable interval, which is
        attached as ``interval``.
    """
    theta = window() if theta_deg is None else np.asarray(theta_deg, dtype=float)
    t, off = _branch(radius, theta)
    reach = float(off[-1]) if len(off) else 0.0
    interval = (spacing - 2 * reach, spacing + 2 * reach)
    if not (interval[0] - 1e-12 <= target <= interval[1] + 1e-12):
        raise RangeError(f"d_pc {target} outside achievable [{interval[0]:.4f}, {interval[1]:.4f}]", interval)
    shift = (spacing - target) / 2           # required move of the left element
    want = abs(shift)
    if want == 0:
        a = 0.0
    elif want >= reach:
        a = float(t[-1])
    else:
        j = int(np.searchsorted(off, want))
        a = brentq(lambda x: _offset_at(x, radius, theta) - want, t[j - 1], t[j], xtol=1e-12)
    ratio = float(np.tan(a)) * np.sign(shift)
    left = DualModeElement(-spacing / 2, ModeExcitation.from_ratio(ratio), radius)
    right = DualModeElement(spacing / 2, ModeExcitation.from_ratio(-ratio), radius)
    xl = estimate_phase_center(FarFieldCut(theta, element_field(left, theta))).offset
    xr = estimate_phase_center(FarFieldCut(theta, element_field(right, theta))).offset
    achieved = xr - xl
    if abs(achieved - target) > max(tol, 1e-3):
        raise RangeError(f"calibration reached {achieved:.5f}, target {target}", interval)
    return Calibration(left, right, ratio, achieved, float(target), interval)


def ideal_array_field(spacing: float, theta_deg, radius: float = DEFAULT_RADIUS):
    """Two pure-TM11 elements at ``+-spacing/2``."""
    return array_field([DualModeElement(-spacing / 2, radius=radius),
                        DualModeElement(spacing / 2, radius=radius)], theta_deg)


def _db(E):
    m = np.abs(np.asarray(E))
    peak = m.max()
    if peak == 0:
        return np.full(m.shape, DB_FLOOR)
    with np.errstate(divide="ignore"):
        return np.maximum(20 * np.log10(m / peak), DB_FLOOR)


def pattern_similarity(a: FarFieldCut, b: FarFieldCut):
    """``(rms_db, correlation)`` of peak-normalised dB magnitudes floored at -40 dB."""
    if a.theta_deg.shape != b.theta_deg.shape or not np.allclose(a.theta_deg, b.theta_deg, rtol=0, atol=1e-9):
        raise DimensionMismatch("cuts must share the same angle grid")
    da, dbb = _db(a.field), _db(b.field)
    rms = float(np.sqrt(np.mean((da - dbb) ** 2)))
    sa, sb = da.std(), dbb.std()
    if sa == 0 or sb == 0:
        corr = 1.0 if np.array_equal(da, dbb) else 0.0
    else:
        corr = float(np.clip(np.corrcoef(da, dbb)[0, 1], -1.0, 1.0))
    return rms, corr


@dataclass(frozen=True)
class EquivalenceReport:
    target: float
    achieved: float
    ratio: float
    rms_db: float
    correlation: float
    pair: FarFieldCut
    ideal: FarFieldCut

    def to_dict(self):
        return {"d_pc_target": self.target, "d_pc_achieved": self.achieved, "mode_ratio": self.ratio,
                "rms_db": self.rms_db, "correlation": self.correlation}


def equivalence(target: float, radius: float = DEFAULT_RADIUS, spacing: float = DEFAULT_SPACING,
                half_width_deg: float = 60.0, n: int = 241) -> EquivalenceReport:
    """Calibrate a dual-mode pair to ``target`` and compare it with a plain array at that spacing."""
    theta = window(half_width_deg, n)
    cal = calibrate_excitation(target, radius, spacing, theta)
    pair = FarFieldCut(theta, array_field(cal.elements, theta))
    ideal = FarFieldCut(theta, ideal_array_field(target, theta, radius))
    rms, corr = pattern_similarity(pair, ideal)
    return EquivalenceReport(target, cal.achieved, cal.ratio, rms, corr, pair, ideal)
