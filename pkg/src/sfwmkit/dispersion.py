"""Wavevector, group velocity, GVD, zero-GVD finding and birefringence per fiber axis.

All derivatives are taken by high-order centered finite differences on a smooth
spline interpolant of the sampled effective index, so the mode solvers in
material_optics stay black boxes.  Chromatic-dispersion profiles default to the
calibrated vector model (HE11 core mode over the unit-cell space-filling-mode
cladding); the axis birefringence uses the scalar LP01 model, which tracks the
measured fast/slow index difference much better than the vector model does.
"""

import enum
import functools
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import make_interp_spline
from scipy.optimize import brentq

from .constants import C_LIGHT
from .errors import DomainError
from .material_optics import (
    FiberSpec,
    he11_effective_index_grid,
    lp01_effective_index,
    lp01_effective_index_grid,
)

__all__ = [
    "Axis",
    "DispersionProfile",
    "wavevector",
    "inverse_group_velocity",
    "gvd",
    "zero_gvd_wavelengths",
    "birefringence",
    "axis_profile",
]

# 8th-order centered first-derivative stencil, offsets -4..+4.
_D1_COEFFS = np.array(
    [1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280]
)
# 8th-order centered second-derivative stencil, offsets -4..+4.
_D2_COEFFS = np.array(
    [-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560]
)
_OFFSETS = np.arange(-4, 5)

DEFAULT_WAVELENGTH_BAND = (550e-9, 1250e-9)
DEFAULT_GRID_POINTS = 2048


class Axis(str, enum.Enum):
    FAST = "fast"
    SLOW = "slow"


@dataclass(frozen=True, eq=False)
class DispersionProfile:
    """n_eff(omega) samples for one axis plus a smooth interpolant."""

    axis: Axis
    omegas: np.ndarray  # strictly increasing angular frequencies [rad/s]
    n_eff: np.ndarray
    order: int = 5
    _spline: object = field(default=None, repr=False)

    def __post_init__(self):
        omegas = np.asarray(self.omegas, dtype=float)
        n_eff = np.asarray(self.n_eff, dtype=float)
        if omegas.ndim != 1 or len(omegas) < 32:
            raise ValueError("profile grid needs >= 32 increasing frequency samples")
        if np.any(np.diff(omegas) <= 0):
            raise ValueError("profile grid must be strictly increasing")
        object.__setattr__(self, "omegas", omegas)
        object.__setattr__(self, "n_eff", n_eff)
        if self._spline is None:
            spline = make_interp_spline(omegas, n_eff, k=self.order)
            object.__setattr__(self, "_spline", spline)

    @classmethod
    def from_geometry(
        cls,
        geometry,
        axis=Axis.FAST,
        wavelength_band=DEFAULT_WAVELENGTH_BAND,
        n_points=DEFAULT_GRID_POINTS,
        order=5,
        solver="vector",
    ):
        """Sample the mode solver over the band and wrap it in a profile.

        solver="vector" (default) uses the exact HE11/space-filling-mode
        model; solver="scalar" uses the weakly-guiding LP01 model with a
        volume-averaged cladding.
        """
        lam_lo, lam_hi = wavelength_band
        omegas = np.linspace(
            2 * np.pi * C_LIGHT / lam_hi, 2 * np.pi * C_LIGHT / lam_lo, n_points
        )
        wavelengths = 2 * np.pi * C_LIGHT / omegas
        if solver == "vector":
            n_eff = he11_effective_index_grid(wavelengths, geometry)
        elif solver == "scalar":
            n_eff = lp01_effective_index_grid(wavelengths, geometry)
        else:
            raise ValueError(f"unknown solver {solver!r}; use 'vector' or 'scalar'")
        return cls(axis=Axis(axis), omegas=omegas, n_eff=n_eff, order=order)

    @classmethod
    def from_fiber(cls, fiber: FiberSpec, axis=Axis.FAST, **kwargs):
        return cls.from_geometry(fiber.axis_geometry(axis), axis=axis, **kwargs)

    @property
    def spacing(self):
        return float(self.omegas[1] - self.omegas[0])

    def index_at(self, omega):
        return self._spline(omega)

    def contains(self, omega):
        return (np.min(omega) >= self.omegas[0]) and (np.max(omega) <= self.omegas[-1])


def _check_in_span(omega, profile, margin_points=0):
    lo = profile.omegas[margin_points]
    hi = profile.omegas[len(profile.omegas) - 1 - margin_points]
    if np.any(np.asarray(omega) < lo) or np.any(np.asarray(omega) > hi):
        raise DomainError(
            f"frequency outside profile span "
            f"[{lo:.6e}, {hi:.6e}] rad/s (margin {margin_points} points)"
        )


def wavevector(omega, profile):
    """Propagation constant k = n_eff(omega) * omega / c [rad/m]."""
    _check_in_span(omega, profile)
    k = profile.index_at(omega) * np.asarray(omega, dtype=float) / C_LIGHT
    return float(k) if np.ndim(omega) == 0 else k


def _stencil(omega, profile, coeffs, h):
    om = np.asarray(omega, dtype=float)
    samples = profile.index_at(om[..., None] + _OFFSETS * h) * (
        om[..., None] + _OFFSETS * h
    ) / C_LIGHT
    return samples @ coeffs


def inverse_group_velocity(omega, profile):
    """dk/domega [s/m] by an 8th-order centered stencil on the interpolant."""
    _check_in_span(omega, profile, margin_points=5)
    h = profile.spacing
    out = _stencil(omega, profile, _D1_COEFFS, h) / h
    return float(out) if np.ndim(omega) == 0 else out


def gvd(omega, profile):
    """d^2k/domega^2 [s^2/m] by an 8th-order centered stencil on the interpolant."""
    _check_in_span(omega, profile, margin_points=5)
    h = 1.25 * profile.spacing
    out = _stencil(omega, profile, _D2_COEFFS, h) / h**2
    return float(out) if np.ndim(omega) == 0 else out


def zero_gvd_wavelengths(profile, wavelength_band, scan_points=4000):
    """All zero-GVD wavelengths [m] in the band, bisected to solver precision.

    Returns wavelengths sorted in increasing order; empty list if no sign
    change of the GVD exists in the band.
    """
    lam_lo, lam_hi = wavelength_band
    om_lo = 2 * np.pi * C_LIGHT / lam_hi
    om_hi = 2 * np.pi * C_LIGHT / lam_lo
    # Clip to the span where the derivative stencil is defined.
    om_lo = max(om_lo, profile.omegas[5])
    om_hi = min(om_hi, profile.omegas[-6])
    if om_hi <= om_lo:
        return []
    omegas = np.linspace(om_lo, om_hi, scan_points)
    values = gvd(omegas, profile)
    roots = []
    sign = np.sign(values)
    for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        root = brentq(
            lambda om: gvd(om, profile),
            omegas[i],
            omegas[i + 1],
            xtol=1e-3,  # rad/s; far below 0.01 nm in wavelength
            rtol=8.9e-16,
        )
        roots.append(2 * np.pi * C_LIGHT / root)
    return sorted(roots)


def birefringence(wavelength, fiber: FiberSpec):
    """Signed birefringence n_eff(slow) - n_eff(fast).

    When the fiber carries an explicit birefringence_override, that value is
    returned unchanged (wavelength-independent); otherwise the difference of
    the scalar LP01 effective indices of the two axes is computed.
    """
    if fiber.birefringence_override is not None:
        return fiber.birefringence_override
    return lp01_effective_index(wavelength, fiber.slow_axis) - lp01_effective_index(
        wavelength, fiber.fast_axis
    )


@functools.lru_cache(maxsize=32)
def _cached_profile(geometry, axis, wavelength_band, n_points, order, solver):
    return DispersionProfile.from_geometry(
        geometry,
        axis=axis,
        wavelength_band=wavelength_band,
        n_points=n_points,
        order=order,
        solver=solver,
    )


def axis_profile(
    fiber: FiberSpec,
    axis=Axis.FAST,
    wavelength_band=DEFAULT_WAVELENGTH_BAND,
    n_points=DEFAULT_GRID_POINTS,
    order=5,
    solver="vector",
):
    """Memoized dispersion profile for one axis of a fiber.

    Profiles are expensive to build (a mode solve per grid point), and all
    downstream routines key off the same handful of geometries, so results
    are cached on the (hashable) geometry and grid parameters.
    """
    return _cached_profile(
        fiber.axis_geometry(axis), Axis(axis), tuple(wavelength_band), n_points, order, solver
    )
