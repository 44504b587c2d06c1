"""Phasematching of cross-polarized spontaneous four-wave mixing.

The pump propagates on one axis (by convention the fast axis profile is used
for all three waves' chromatic wavevectors) and the daughter photons on the
orthogonal axis; the polarization walk-off enters through a single signed
birefringence term 2 dn w_p / c in the phase mismatch

    dk = 2 k(w_p) + (2/3) gamma P + 2 dn w_p / c - k(w_s) - k(w_i),

with energy conservation w_i = 2 w_p - w_s enforced exactly.  The factor 2/3
reflects the reduced cross-polarized self-phase-modulation contribution of
the pump at peak power P.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .constants import C_LIGHT
from .dispersion import (
    Axis,
    axis_profile,
    birefringence,
    inverse_group_velocity,
    wavevector,
)
from .errors import (
    ConfigError,
    DomainError,
    NoGroupVelocityMatchError,
    NoPhasematchError,
)
from .material_optics import FiberSpec

__all__ = [
    "PumpSpec",
    "PhasematchPoint",
    "resolve_peak_power",
    "delta_k",
    "solve_phasematch",
    "phasematch_curve",
    "gvm_pump_wavelength",
]

# Peak power of a transform-shaped Gaussian pulse: P_peak = E_pulse /
# (FWHM * sqrt(pi / (4 ln 2))).
GAUSSIAN_PULSE_SHAPE_FACTOR = float(np.sqrt(np.pi / (4.0 * np.log(2.0))))

# Guard band keeping the solver away from the degenerate point [rad/s].
DEGENERACY_GUARD = 2.0 * np.pi * 2.0e12


@dataclass(frozen=True)
class PumpSpec:
    """Pulsed pump description.

    All wavelength-like quantities in meters, powers in watts, times in
    seconds.  Either give peak_power directly, or give the full
    (average_power, repetition_rate, pulse_fwhm) triple, or neither (peak
    power then defaults to zero).  filter_width is the full width of a
    rectangular spectral filter applied after the pump laser; None means
    unfiltered.
    """

    center_wavelength: float
    gaussian_fwhm: float  # intensity FWHM of the pump spectrum [m]
    filter_width: float | None = None
    average_power: float | None = None
    repetition_rate: float | None = None
    pulse_fwhm: float | None = None
    peak_power: float | None = None

    def __post_init__(self):
        if self.center_wavelength <= 0 or self.gaussian_fwhm <= 0:
            raise ConfigError("pump center wavelength and FWHM must be positive")
        if self.filter_width is not None and self.filter_width <= 0:
            raise ConfigError("filter_width must be positive when given")
        triple = (self.average_power, self.repetition_rate, self.pulse_fwhm)
        given = [x is not None for x in triple]
        if any(given) and not all(given):
            raise ConfigError(
                "average_power, repetition_rate and pulse_fwhm must be given together"
            )
        if all(given) and self.peak_power is not None:
            raise ConfigError(
                "give either peak_power or the average-power triple, not both"
            )
        for name in ("average_power", "repetition_rate", "pulse_fwhm", "peak_power"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ConfigError(f"{name} must be positive when given")

    @property
    def center_omega(self):
        return 2.0 * np.pi * C_LIGHT / self.center_wavelength


@dataclass(frozen=True)
class PhasematchPoint:
    """One phasematched (pump, signal, idler) wavelength triple [m]."""

    pump_wavelength: float
    signal_wavelength: float
    idler_wavelength: float

    def __post_init__(self):
        op = 2.0 * np.pi * C_LIGHT / self.pump_wavelength
        os_ = 2.0 * np.pi * C_LIGHT / self.signal_wavelength
        oi = 2.0 * np.pi * C_LIGHT / self.idler_wavelength
        if abs(os_ + oi - 2.0 * op) > 1e-9 * op:
            raise ValueError("energy conservation violated: w_s + w_i != 2 w_p")
        if not self.signal_wavelength < self.pump_wavelength < self.idler_wavelength:
            raise ValueError("expected signal < pump < idler in wavelength")


def resolve_peak_power(pump: PumpSpec):
    """Pump peak power [W].

    Uses peak_power when given; otherwise converts the average-power triple
    assuming Gaussian pulses, P_peak = P_avg / (f_rep * t_fwhm * sqrt(pi/(4 ln 2)));
    otherwise 0.
    """
    if pump.peak_power is not None:
        return pump.peak_power
    if pump.average_power is not None:
        return pump.average_power / (
            pump.repetition_rate * pump.pulse_fwhm * GAUSSIAN_PULSE_SHAPE_FACTOR
        )
    return 0.0


def delta_k(
    omega_p,
    omega_s,
    omega_i,
    fiber: FiberSpec,
    peak_power=0.0,
    profile=None,
    birefringence_value=None,
):
    """Phase mismatch dk [rad/m]; accepts scalars or broadcastable arrays.

    The chromatic wavevectors of all three waves are evaluated on the fast
    axis profile.  gamma is converted from 1/(W km) to 1/(W m).  The
    birefringence is treated as frequency independent: unless an explicit
    birefringence_value is passed it is evaluated once, at the wavelength of
    the mean pump frequency.
    """
    if profile is None:
        profile = axis_profile(fiber, Axis.FAST)
    if birefringence_value is None:
        lam_p = 2.0 * np.pi * C_LIGHT / float(np.mean(omega_p))
        birefringence_value = birefringence(lam_p, fiber)
    gamma_per_m = fiber.gamma * 1e-3
    dk = (
        2.0 * wavevector(omega_p, profile)
        + (2.0 / 3.0) * gamma_per_m * peak_power
        + 2.0 * birefringence_value * np.asarray(omega_p, dtype=float) / C_LIGHT
        - wavevector(omega_s, profile)
        - wavevector(omega_i, profile)
    )
    return float(dk) if np.ndim(dk) == 0 else dk


def solve_phasematch(
    pump_wavelength, fiber: FiberSpec, peak_power=0.0, scan_points=2000, profile=None
):
    """Phasematched signal/idler pair for one pump wavelength.

    Scans dk over signal frequencies from just above the degeneracy guard
    (+2 THz) to the top of the profile band (capped so the idler stays in
    band), brackets the sign change nearest degeneracy, and bisects the root
    to better than 1e-4 nm.  Raises NoPhasematchError when no sign change
    exists; the returned point satisfies |dk| < 1e-3 rad/m.  An explicit
    profile overrides the default full-resolution fast-axis profile.
    """
    if profile is None:
        profile = axis_profile(fiber, Axis.FAST)
    omega_p = 2.0 * np.pi * C_LIGHT / pump_wavelength
    dn = birefringence(pump_wavelength, fiber)

    def mismatch(omega_s):
        return delta_k(
            omega_p,
            omega_s,
            2.0 * omega_p - omega_s,
            fiber,
            peak_power,
            profile=profile,
            birefringence_value=dn,
        )

    lo = omega_p + DEGENERACY_GUARD
    hi = min(profile.omegas[-6], 2.0 * omega_p - profile.omegas[5])
    if hi <= lo:
        raise NoPhasematchError(
            f"empty signal search window for pump {pump_wavelength * 1e9:.2f} nm"
        )
    omegas = np.linspace(lo, hi, scan_points)
    values = mismatch(omegas)
    sign = np.sign(values)
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    if len(flips) == 0:
        raise NoPhasematchError(
            f"no phasematched sideband for pump {pump_wavelength * 1e9:.2f} nm "
            f"(dk range {values.min():.3g}..{values.max():.3g} rad/m)"
        )
    i = flips[0]  # branch nearest degeneracy
    # 1e-4 nm at 720 nm corresponds to ~3.6e8 rad/s; bisect well past that.
    omega_s = brentq(mismatch, omegas[i], omegas[i + 1], xtol=1e5, rtol=8.9e-16)
    omega_i = 2.0 * omega_p - omega_s
    residual = mismatch(omega_s)
    if abs(residual) >= 1e-3:
        raise NoPhasematchError(
            f"phasematch root did not converge: |dk| = {abs(residual):.3g} rad/m"
        )
    return PhasematchPoint(
        pump_wavelength=pump_wavelength,
        signal_wavelength=2.0 * np.pi * C_LIGHT / omega_s,
        idler_wavelength=2.0 * np.pi * C_LIGHT / omega_i,
    )


def phasematch_curve(pump_range, n_points, fiber: FiberSpec, peak_power=0.0):
    """Phasematched points over a pump wavelength range (both ends inclusive).

    Pump wavelengths without a solution are omitted from the returned list;
    a single warning summarizes how many were skipped.
    """
    lam_lo, lam_hi = pump_range
    points = []
    skipped = []
    for lam_p in np.linspace(lam_lo, lam_hi, n_points):
        try:
            points.append(solve_phasematch(float(lam_p), fiber, peak_power))
        except (NoPhasematchError, DomainError):
            skipped.append(lam_p)
    if skipped:
        warnings.warn(
            f"no phasematch for {len(skipped)} of {n_points} pump wavelengths "
            f"(first skipped: {skipped[0] * 1e9:.2f} nm)",
            stacklevel=2,
        )
    return points


def _gvm_mismatch_from_profile(profile, dn, pump_wavelength, fiber, peak_power):
    """Group-velocity mismatch function whose root is the design pump.

    Stationarity of the idler wavelength against pump tuning requires the
    signal group slowness to match the pump's *including* the walk-off term:
    g = 1/vg(w_s) - 1/vg(w_p) - dn/c.  (With dn = 0 this reduces to plain
    group-velocity matching.)
    """
    point = solve_phasematch(pump_wavelength, fiber, peak_power)
    omega_p = 2.0 * np.pi * C_LIGHT / pump_wavelength
    omega_s = 2.0 * np.pi * C_LIGHT / point.signal_wavelength
    return (
        inverse_group_velocity(omega_s, profile)
        - inverse_group_velocity(omega_p, profile)
        - dn / C_LIGHT
    )


def gvm_pump_wavelength(
    fiber: FiberSpec, search_range=(770e-9, 800e-9), peak_power=0.0
):
    """Pump wavelength [m] where the idler becomes stationary under pump tuning.

    Bisects the signal/pump group-slowness mismatch (walk-off corrected) over
    the search range to better than 0.01 nm.  Raises
    NoGroupVelocityMatchError when the mismatch does not change sign.
    """
    profile = axis_profile(fiber, Axis.FAST)
    lam_lo, lam_hi = search_range
    dn = birefringence(0.5 * (lam_lo + lam_hi), fiber)

    def g(lam_p):
        return _gvm_mismatch_from_profile(profile, dn, lam_p, fiber, peak_power)

    grid = np.linspace(lam_lo, lam_hi, 16)
    values = []
    for lam in grid:
        try:
            values.append(g(float(lam)))
        except NoPhasematchError:
            values.append(np.nan)
    values = np.asarray(values)
    sign = np.sign(values)
    finite = np.isfinite(values)
    flips = np.nonzero((sign[:-1] * sign[1:] < 0) & finite[:-1] & finite[1:])[0]
    if len(flips) == 0:
        raise NoGroupVelocityMatchError(
            f"no group-velocity-matched pump in "
            f"({lam_lo * 1e9:.1f}, {lam_hi * 1e9:.1f}) nm"
        )
    i = flips[0]
    root = brentq(g, grid[i], grid[i + 1], xtol=1e-12, rtol=8.9e-16)
    return float(root)
