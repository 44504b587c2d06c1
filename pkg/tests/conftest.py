import numpy as np
import pytest

from sfwmkit import FiberAxisGeometry, FiberSpec, PumpSpec

FAST_GEOMETRY = FiberAxisGeometry(core_diameter=1.7507e-6, air_filling_fraction=0.511)
SLOW_GEOMETRY = FiberAxisGeometry(core_diameter=1.7488e-6, air_filling_fraction=0.505)


@pytest.fixture(scope="session")
def fast_geometry():
    return FAST_GEOMETRY


@pytest.fixture(scope="session")
def slow_geometry():
    return SLOW_GEOMETRY


@pytest.fixture(scope="session")
def fiber_40cm():
    return FiberSpec(
        fast_axis=FAST_GEOMETRY,
        slow_axis=SLOW_GEOMETRY,
        gamma=99.0,
        length=0.4,
        birefringence_override=-1.7e-5,
    )


@pytest.fixture(scope="session")
def fiber_1m(fiber_40cm):
    import dataclasses

    return dataclasses.replace(fiber_40cm, length=1.0)


@pytest.fixture(scope="session")
def pump_40cm():
    return PumpSpec(center_wavelength=783e-9, gaussian_fwhm=20e-9, filter_width=8e-9)


@pytest.fixture(scope="session")
def pump_1m():
    return PumpSpec(center_wavelength=786e-9, gaussian_fwhm=20e-9, filter_width=6e-9)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260823)
