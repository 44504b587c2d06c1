"""Recover fiber geometry from measured sideband wavelengths.

Synthesizes noisy phasematch measurements for a known core diameter and
air-filling fraction, then fits the geometry back from the sideband
wavelengths alone.  This mirrors the workflow of calibrating a model
against a spectrometer scan of a real source.
"""

import numpy as np

from sfwmkit import (
    FiberAxisGeometry,
    FiberSpec,
    PhasematchMeasurement,
    fit_geometry,
    solve_phasematch,
)

TRUTH = FiberAxisGeometry(core_diameter=1.7507e-6, air_filling_fraction=0.511)
DN = -1.7e-5

fiber = FiberSpec(TRUTH, TRUTH, gamma=0.0, length=1.0, birefringence_override=DN)
rng = np.random.default_rng(1)

rows = []
for lam_p in np.linspace(772e-9, 794e-9, 6):
    point = solve_phasematch(float(lam_p), fiber)
    rows.append(
        PhasematchMeasurement(
            pump_wavelength=float(lam_p),
            signal_wavelength=point.signal_wavelength + rng.normal(0.0, 0.05e-9),
            idler_wavelength=point.idler_wavelength + rng.normal(0.0, 0.05e-9),
            sigma=0.05e-9,
        )
    )

print("synthetic measurements (0.05 nm noise):")
for r in rows:
    print(
        f"  pump {r.pump_wavelength * 1e9:.2f} nm -> "
        f"signal {r.signal_wavelength * 1e9:.3f} nm, "
        f"idler {r.idler_wavelength * 1e9:.3f} nm"
    )

result = fit_geometry(rows, birefringence=DN)
print(
    f"\nfitted core diameter: {result.geometry.core_diameter * 1e6:.5f} "
    f"+/- {result.core_diameter_sigma * 1e6:.5f} um "
    f"(truth {TRUTH.core_diameter * 1e6:.5f})"
)
print(
    f"fitted filling fraction: {result.geometry.air_filling_fraction:.5f} "
    f"+/- {result.filling_fraction_sigma:.5f} (truth {TRUTH.air_filling_fraction})"
)
print(f"residual rms: {result.residual_rms:.3f} sigma units")
