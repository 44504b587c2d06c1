import dataclasses

import numpy as np
import pytest

from sfwmkit import phasematch as pm
from sfwmkit.constants import C_LIGHT
from sfwmkit.errors import ConfigError, NoGroupVelocityMatchError, NoPhasematchError
from sfwmkit.material_optics import FiberSpec


class TestPumpSpec:
    def test_partial_power_triple_rejected(self):
        with pytest.raises(ConfigError):
            pm.PumpSpec(783e-9, 20e-9, average_power=1e-3)

    def test_peak_and_triple_conflict(self):
        with pytest.raises(ConfigError):
            pm.PumpSpec(
                783e-9,
                20e-9,
                average_power=1e-3,
                repetition_rate=76e6,
                pulse_fwhm=1e-13,
                peak_power=100.0,
            )

    def test_negative_filter_rejected(self):
        with pytest.raises(ConfigError):
            pm.PumpSpec(783e-9, 20e-9, filter_width=-1e-9)


class TestResolvePeakPower:
    def test_default_zero(self):
        assert pm.resolve_peak_power(pm.PumpSpec(783e-9, 20e-9)) == 0.0

    def test_explicit_peak_passthrough(self):
        pump = pm.PumpSpec(783e-9, 20e-9, peak_power=12.5)
        assert pm.resolve_peak_power(pump) == 12.5

    def test_triple_arithmetic(self):
        # 1.4 mW at 76 MHz with 100 fs pulses:
        # P = 1.4e-3 / (76e6 * 1e-13 * sqrt(pi / (4 ln 2))) = 173.054 W.
        pump = pm.PumpSpec(
            783e-9,
            20e-9,
            average_power=1.4e-3,
            repetition_rate=76e6,
            pulse_fwhm=1e-13,
        )
        assert pm.resolve_peak_power(pump) == pytest.approx(173.0542355, rel=1e-8)

    def test_shape_factor(self):
        assert pm.GAUSSIAN_PULSE_SHAPE_FACTOR == pytest.approx(1.0644670194, rel=1e-9)


class TestDeltaK:
    def test_degenerate_zero_without_birefringence(self, fast_geometry):
        fiber = FiberSpec(fast_geometry, fast_geometry, 99.0, 0.4, 0.0)
        om_p = 2 * np.pi * C_LIGHT / 785e-9
        assert pm.delta_k(om_p, om_p, om_p, fiber) == 0.0

    def test_degenerate_reduces_to_walkoff_term(self, fiber_40cm):
        om_p = 2 * np.pi * C_LIGHT / 785e-9
        expected = 2 * (-1.7e-5) * om_p / C_LIGHT
        # Tolerance reflects cancellation against ~1e7 rad/m wavevectors.
        assert pm.delta_k(om_p, om_p, om_p, fiber_40cm) == pytest.approx(
            expected, rel=1e-9
        )

    def test_peak_power_additivity_exact(self, fiber_40cm):
        om_p = 2 * np.pi * C_LIGHT / 785e-9
        om_s = 2 * np.pi * C_LIGHT / 726e-9
        om_i = 2 * om_p - om_s
        d0 = pm.delta_k(om_p, om_s, om_i, fiber_40cm, peak_power=0.0)
        d1 = pm.delta_k(om_p, om_s, om_i, fiber_40cm, peak_power=150.0)
        gamma_per_m = fiber_40cm.gamma * 1e-3
        assert d1 - d0 == pytest.approx((2.0 / 3.0) * gamma_per_m * 150.0, rel=1e-9)

    def test_array_broadcast(self, fiber_40cm):
        om_p = 2 * np.pi * C_LIGHT / 785e-9
        om_s = 2 * np.pi * C_LIGHT / np.array([720e-9, 726e-9, 730e-9])
        values = pm.delta_k(om_p, om_s, 2 * om_p - om_s, fiber_40cm)
        assert values.shape == (3,)
        for k, os_ in enumerate(om_s):
            assert values[k] == pm.delta_k(om_p, os_, 2 * om_p - os_, fiber_40cm)


class TestSolvePhasematch:
    def test_paper_operating_point(self, fiber_40cm):
        point = pm.solve_phasematch(785e-9, fiber_40cm)
        assert point.signal_wavelength == pytest.approx(720e-9, abs=15e-9)
        assert point.idler_wavelength == pytest.approx(860e-9, abs=15e-9)

    def test_residual_below_tolerance(self, fiber_40cm):
        point = pm.solve_phasematch(785e-9, fiber_40cm)
        om_p = 2 * np.pi * C_LIGHT / point.pump_wavelength
        om_s = 2 * np.pi * C_LIGHT / point.signal_wavelength
        om_i = 2 * np.pi * C_LIGHT / point.idler_wavelength
        assert abs(pm.delta_k(om_p, om_s, om_i, fiber_40cm)) < 1e-3

    def test_energy_conservation(self, fiber_40cm):
        point = pm.solve_phasematch(785e-9, fiber_40cm)
        om_p = 2 * np.pi * C_LIGHT / point.pump_wavelength
        om_s = 2 * np.pi * C_LIGHT / point.signal_wavelength
        om_i = 2 * np.pi * C_LIGHT / point.idler_wavelength
        assert om_s + om_i == pytest.approx(2 * om_p, rel=1e-12)

    def test_sidebands_outside_guard_band(self, fiber_40cm):
        point = pm.solve_phasematch(785e-9, fiber_40cm)
        om_p = 2 * np.pi * C_LIGHT / point.pump_wavelength
        om_s = 2 * np.pi * C_LIGHT / point.signal_wavelength
        assert om_s - om_p > 2 * np.pi * 2e12

    def test_matches_brute_force_scan(self, fiber_40cm):
        # Independent coarse search for the |dk| minimum near the solution.
        point = pm.solve_phasematch(785e-9, fiber_40cm)
        om_p = 2 * np.pi * C_LIGHT / 785e-9
        om_s = np.linspace(om_p + 2 * np.pi * 3e12, om_p + 2 * np.pi * 130e12, 40001)
        values = np.abs(pm.delta_k(om_p, om_s, 2 * om_p - om_s, fiber_40cm))
        best = om_s[np.argmin(values)]
        assert 2 * np.pi * C_LIGHT / best == pytest.approx(
            point.signal_wavelength, abs=0.01e-9
        )

    def test_no_solution_raises(self, fiber_40cm):
        # Blue of the phasematched region no sideband pair exists.
        with pytest.raises(NoPhasematchError):
            pm.solve_phasematch(650e-9, fiber_40cm)


class TestPhasematchCurve:
    def test_paper_window(self, fiber_40cm):
        points = pm.phasematch_curve((765e-9, 795e-9), 31, fiber_40cm)
        assert len(points) == 31
        pumps = [p.pump_wavelength for p in points]
        assert pumps[0] == pytest.approx(765e-9, rel=1e-12)
        assert pumps[-1] == pytest.approx(795e-9, rel=1e-12)

    def test_flat_idler(self, fiber_40cm):
        points = pm.phasematch_curve((765e-9, 795e-9), 31, fiber_40cm)
        idlers = np.array([p.idler_wavelength for p in points])
        assert (idlers.max() - idlers.min()) < 10e-9

    def test_failures_warn_and_omit(self, fiber_40cm):
        with pytest.warns(UserWarning, match="no phasematch"):
            points = pm.phasematch_curve((640e-9, 760e-9), 5, fiber_40cm)
        assert len(points) < 5


class TestGvmPumpWavelength:
    def test_paper_value(self, fiber_40cm):
        lam = pm.gvm_pump_wavelength(fiber_40cm)
        assert lam == pytest.approx(783e-9, abs=3e-9)

    def test_idler_stationary_at_root(self, fiber_40cm):
        # The defining property: d(lambda_i)/d(lambda_p) ~ 0 at the matched pump.
        lam0 = pm.gvm_pump_wavelength(fiber_40cm)
        h = 0.5e-9
        up = pm.solve_phasematch(lam0 + h, fiber_40cm).idler_wavelength
        down = pm.solve_phasematch(lam0 - h, fiber_40cm).idler_wavelength
        slope = (up - down) / (2 * h)
        assert abs(slope) < 0.05

    def test_empty_range_raises(self, fiber_40cm):
        with pytest.raises(NoGroupVelocityMatchError):
            pm.gvm_pump_wavelength(fiber_40cm, search_range=(795e-9, 799e-9))

    def test_peak_power_shifts_root(self, fiber_40cm):
        base = pm.gvm_pump_wavelength(fiber_40cm)
        shifted = pm.gvm_pump_wavelength(fiber_40cm, peak_power=500.0)
        assert shifted != base


class TestPhasematchPoint:
    def test_energy_violation_rejected(self):
        with pytest.raises(ValueError):
            pm.PhasematchPoint(785e-9, 726e-9, 900e-9)

    def test_ordering_enforced(self):
        om_p = 2 * np.pi * C_LIGHT / 785e-9
        om_s = 2 * np.pi * C_LIGHT / 790e-9  # signal redder than pump: invalid
        om_i = 2 * om_p - om_s
        with pytest.raises(ValueError):
            pm.PhasematchPoint(
                785e-9, 2 * np.pi * C_LIGHT / om_s, 2 * np.pi * C_LIGHT / om_i
            )
