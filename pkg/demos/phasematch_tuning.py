"""Four-wave-mixing sideband wavelengths versus pump wavelength.

Shows the flat-idler regime near the group-velocity-matched pump: tuning
the pump across 30 nm moves the signal tens of nanometers while the idler
barely shifts.
"""

import numpy as np

from sfwmkit import (
    FiberAxisGeometry,
    FiberSpec,
    gvm_pump_wavelength,
    phasematch_curve,
)

fiber = FiberSpec(
    fast_axis=FiberAxisGeometry(core_diameter=1.7507e-6, air_filling_fraction=0.511),
    slow_axis=FiberAxisGeometry(core_diameter=1.7488e-6, air_filling_fraction=0.505),
    gamma=99.0,
    length=0.4,
    birefringence_override=-1.7e-5,
)

lam_gvm = gvm_pump_wavelength(fiber)
print(f"group-velocity-matched pump: {lam_gvm * 1e9:.3f} nm\n")

points = phasematch_curve((765e-9, 795e-9), 16, fiber)
print(f"{'pump (nm)':>10} {'signal (nm)':>12} {'idler (nm)':>11}")
for p in points:
    print(
        f"{p.pump_wavelength * 1e9:>10.2f} "
        f"{p.signal_wavelength * 1e9:>12.3f} "
        f"{p.idler_wavelength * 1e9:>11.3f}"
    )

idlers = np.array([p.idler_wavelength for p in points])
signals = np.array([p.signal_wavelength for p in points])
print(f"\nsignal excursion: {(signals.max() - signals.min()) * 1e9:.2f} nm")
print(f"idler  excursion: {(idlers.max() - idlers.min()) * 1e9:.2f} nm")
