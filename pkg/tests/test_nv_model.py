import numpy as np
import pytest
from hypothesis import given, strategies as st

from cavmag.cavity import MirrorSet
from cavmag.constants import DENSITY_PER_PPM, DIAMOND_CARBON_DENSITY_PER_M3, HC
from cavmag.nv_model import (
    PumpNvParams,
    SaturationModel,
    absorbance,
    nv_density,
    nv_density_ppm,
    pump_rate,
    sat_intensity_singlet,
    sat_intensity_triplet,
    saturation_discrepancy_ratio,
    single_pass_transmission,
    singlet_population,
    transmission_vs_pump,
)

PARAMS = PumpNvParams()
MODEL = SaturationModel(0.022, 0.88, 0.9965)
MIRRORS = MirrorSet(0.985)


class TestRates:
    def test_pump_rate_formula(self):
        intensity = 1e10
        expected = 3e-21 * intensity / (HC / 532e-9)
        assert pump_rate(intensity, PARAMS) == pytest.approx(expected, rel=1e-12)
        assert pump_rate(intensity, PARAMS) == pytest.approx(8.0337e7, rel=1e-4)

    def test_triplet_saturation_intensity(self):
        # Pump rate equals the triplet decay rate at this intensity.
        value = sat_intensity_triplet(PARAMS)
        assert value == pytest.approx(1.037200217809591e10, rel=1e-9)
        assert pump_rate(value, PARAMS) == pytest.approx(
            PARAMS.triplet_decay_per_s, rel=1e-12
        )

    def test_singlet_saturation_intensity(self):
        # Slower singlet decay pulls the knee down by the lifetime ratio.
        value = sat_intensity_singlet(PARAMS)
        assert value == pytest.approx(6.223201306857545e8, rel=1e-9)
        ratio = PARAMS.singlet_decay_per_s / PARAMS.triplet_decay_per_s
        assert value == pytest.approx(sat_intensity_triplet(PARAMS) * ratio, rel=1e-12)

    def test_discrepancy_ratio_near_nine(self):
        observed = 2 * 0.88 / (np.pi * 9e-5**2)
        assert saturation_discrepancy_ratio(observed, PARAMS) == pytest.approx(9.0, rel=0.02)


class TestSingletPopulation:
    def test_half_at_saturation(self):
        assert singlet_population(600e6, 600e6) == pytest.approx(0.5, rel=1e-12)

    def test_low_intensity_linear(self):
        assert singlet_population(70e6, 600e6) == pytest.approx(70 / 670, rel=1e-12)
        assert singlet_population(70e6, 600e6) == pytest.approx(0.10448, rel=1e-4)

    def test_zero_intensity(self):
        assert singlet_population(0.0, 600e6) == 0.0

    @given(intensity=st.floats(0.0, 1e12), knee=st.floats(1e3, 1e12))
    def test_bounded_and_monotone(self, intensity, knee):
        value = singlet_population(intensity, knee)
        assert 0.0 <= value < 1.0
        assert singlet_population(intensity * 2, knee) >= value


class TestAbsorbance:
    def test_composition(self):
        value = absorbance(3e-22, 3.67e23, 2e-4, 0.10448)
        assert value == pytest.approx(3e-22 * 3.67e23 * 2e-4 * 0.10448, rel=1e-12)
        assert value == pytest.approx(0.0023, rel=0.03)


class TestSaturationCurve:
    def test_zero_power_is_baseline(self):
        assert single_pass_transmission(0.0, MODEL) == pytest.approx(0.9965, rel=0)

    def test_knee_power(self):
        # Half of the full absorbance step has appeared at P = Psat.
        value = single_pass_transmission(0.88, MODEL)
        assert value == pytest.approx(0.9965 - 0.022 / 2, rel=1e-12)

    def test_high_power_limit(self):
        value = single_pass_transmission(1e6, MODEL)
        assert value == pytest.approx(0.9965 - 0.022, rel=1e-6)

    def test_normalized_cavity_transmission_at_knee(self):
        value = transmission_vs_pump(0.88, MODEL, MIRRORS)
        assert value == pytest.approx(0.3924985527282254, rel=1e-9)

    def test_normalized_cavity_transmission_at_zero(self):
        assert transmission_vs_pump(0.0, MODEL, MIRRORS) == pytest.approx(1.0, rel=1e-12)

    def test_normalized_cavity_transmission_at_two_watts(self):
        value = transmission_vs_pump(2.0, MODEL, MIRRORS)
        assert value == pytest.approx(0.29866, rel=1e-4)

    @given(power=st.floats(0.0, 100.0))
    def test_monotone_decreasing(self, power):
        lower = transmission_vs_pump(power + 0.1, MODEL, MIRRORS)
        upper = transmission_vs_pump(power, MODEL, MIRRORS)
        assert lower <= upper * (1 + 1e-12)

    def test_model_validation(self):
        with pytest.raises(ValueError):
            SaturationModel(-0.01, 0.88, 0.9965)
        with pytest.raises(ValueError):
            SaturationModel(0.022, 0.0, 0.9965)
        with pytest.raises(ValueError):
            SaturationModel(0.022, 0.88, 1.5)
        with pytest.raises(ValueError):
            SaturationModel(0.9965, 0.88, 0.022)


class TestDensityInversion:
    def test_oracle_value(self):
        value = nv_density(0.022, 3e-22, 2e-4)
        assert value == pytest.approx(0.022 / (3e-22 * 2e-4), rel=1e-12)
        assert value == pytest.approx(3.6666666666666665e23, rel=1e-12)

    def test_ppm_conversion(self):
        density = nv_density(0.022, 3e-22, 2e-4)
        assert nv_density_ppm(density) == pytest.approx(2.0833333333333335, rel=1e-12)
        assert DENSITY_PER_PPM == pytest.approx(DIAMOND_CARBON_DENSITY_PER_M3 * 1e-6, rel=0)

    @given(
        amplitude=st.floats(1e-4, 0.5),
        cross_section=st.floats(1e-23, 1e-20),
        thickness=st.floats(1e-5, 1e-3),
    )
    def test_density_absorbance_round_trip(self, amplitude, cross_section, thickness):
        density = nv_density(amplitude, cross_section, thickness)
        # Full saturation (p_s -> 1) reproduces the fitted amplitude.
        assert absorbance(cross_section, density, thickness, 1.0) == pytest.approx(
            amplitude, rel=1e-12
        )
