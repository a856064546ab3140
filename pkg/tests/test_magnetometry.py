import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cavmag.magnetometry import (
    OdmrSpectrum,
    SpinParams,
    dephasing_time_s,
    field_from_splitting,
    odmr_spectrum,
    odmr_transmission,
    projection_noise_sensitivity,
    resonance_frequencies,
    shot_noise_sensitivity,
    temperature_cross_sensitivity,
    zeeman_shift,
)

SPIN = SpinParams()


class TestZeeman:
    def test_shift_at_bias(self):
        value = zeeman_shift(1, 2.99e-3, SPIN)
        expected = 2.80e10 * 2.99e-3 * math.cos(math.radians(54.7))
        assert value == pytest.approx(expected, rel=1e-12)
        assert value == pytest.approx(4.8378240e7, rel=1e-6)

    def test_ms_zero_unshifted(self):
        assert zeeman_shift(0, 2.99e-3, SPIN) == 0.0

    def test_opposite_branches_symmetric(self):
        up = zeeman_shift(1, 2.99e-3, SPIN)
        down = zeeman_shift(-1, 2.99e-3, SPIN)
        assert up == pytest.approx(-down, rel=1e-12)

    def test_invalid_ms_rejected(self):
        with pytest.raises(ValueError):
            zeeman_shift(2, 1e-3, SPIN)

    def test_resonance_pair(self):
        lower, upper = resonance_frequencies(2.99e-3, SPIN)
        shift = zeeman_shift(1, 2.99e-3, SPIN)
        assert lower == pytest.approx(2.87e9 - shift, rel=1e-12)
        assert upper == pytest.approx(2.87e9 + shift, rel=1e-12)

    def test_splitting_inversion(self):
        lower, upper = resonance_frequencies(2.99e-3, SPIN)
        assert field_from_splitting(upper, lower, SPIN) == pytest.approx(
            2.99e-3, rel=1e-12
        )

    def test_published_splitting_maps_to_bias(self):
        # 96.7 MHz between the two resonances at the magic-angle bias.
        value = field_from_splitting(2.87e9 + 48.35e6, 2.87e9 - 48.35e6, SPIN)
        assert value == pytest.approx(2.99e-3, rel=5e-3)

    @given(field=st.floats(1e-6, 0.019))
    def test_round_trip_property(self, field):
        lower, upper = resonance_frequencies(field, SPIN)
        assert field_from_splitting(upper, lower, SPIN) == pytest.approx(
            field, rel=1e-10
        )

    def test_large_field_warns(self):
        with pytest.warns(UserWarning):
            resonance_frequencies(0.05, SPIN)

    def test_excessive_field_rejected(self):
        with pytest.raises(ValueError):
            resonance_frequencies(0.5, SPIN)

    def test_perpendicular_geometry_rejected_for_inversion(self):
        sideways = SpinParams(field_angle_rad=math.pi / 2)
        with pytest.raises(ValueError):
            field_from_splitting(2.9e9, 2.8e9, sideways)


class TestOdmrShape:
    def test_far_from_resonance_is_unity(self):
        value = odmr_transmission(1.0e9, 2.99e-3, SPIN)
        assert value == pytest.approx(1.0, abs=1e-4)

    def test_dip_depth_on_resonance(self):
        lower, _ = resonance_frequencies(2.99e-3, SPIN)
        value = odmr_transmission(lower, 2.99e-3, SPIN)
        # Full contrast at the line center, small wing from the partner dip.
        assert value == pytest.approx(1 - SPIN.contrast, abs=2e-4)

    def test_half_depth_at_half_width(self):
        lower, _ = resonance_frequencies(0.01, SPIN)
        center = odmr_transmission(lower, 0.01, SPIN)
        off = odmr_transmission(lower + SPIN.resonance_fwhm_hz / 2, 0.01, SPIN)
        assert 1 - off == pytest.approx((1 - center) / 2, rel=1e-3)

    def test_broadcasts_over_grid(self):
        grid = np.linspace(2.7e9, 3.0e9, 101)
        trace = odmr_transmission(grid, 2.99e-3, SPIN)
        assert trace.shape == grid.shape
        assert np.all(trace > 0) and np.all(trace <= 1)

    def test_per_resonance_overrides(self):
        grid = np.linspace(2.7e9, 3.0e9, 2001)
        trace = odmr_transmission(
            grid, 2.99e-3, SPIN, contrast=(0.02, 0.08), fwhm_hz=(5e6, 20e6)
        )
        lower, upper = resonance_frequencies(2.99e-3, SPIN)
        at_lower = trace[np.argmin(abs(grid - lower))]
        at_upper = trace[np.argmin(abs(grid - upper))]
        assert 1 - at_upper > 3 * (1 - at_lower)

    def test_contrast_sum_validated(self):
        with pytest.raises(ValueError):
            odmr_transmission(2.87e9, 1e-3, SPIN, contrast=(0.6, 0.6))

    def test_spectrum_object(self):
        grid = np.linspace(2.80e9, 2.94e9, 801)
        spectrum = odmr_spectrum(grid, 2.99e-3, SPIN)
        assert isinstance(spectrum, OdmrSpectrum)
        assert spectrum.frequencies_hz.shape == (801,)
        with pytest.raises(ValueError):
            spectrum.transmission[0] = 2.0

    def test_overlapping_resonances_warn(self):
        with pytest.warns(UserWarning, match="closer than"):
            odmr_spectrum(np.linspace(2.86e9, 2.88e9, 101), 2e-5, SPIN)


class TestSensitivities:
    def test_shot_noise_at_detected_power(self):
        value = shot_noise_sensitivity(9e6, 0.071, 1.2064763765772856e16, SPIN)
        assert value == pytest.approx(7.132567169655285e-11, rel=1e-9)
        assert 67e-12 < value < 74e-12

    def test_shot_noise_scales_inverse_sqrt_power(self):
        base = shot_noise_sensitivity(9e6, 0.071, 1.2e16, SPIN)
        brighter = shot_noise_sensitivity(9e6, 0.071, 100 * 1.2e16, SPIN)
        assert brighter == pytest.approx(base / 10, rel=1e-12)

    def test_dephasing_time_from_linewidth(self):
        value = dephasing_time_s(9e6)
        assert value == pytest.approx(1 / (math.pi * 9e6), rel=1e-12)
        assert value == pytest.approx(3.5367765131532756e-8, rel=1e-9)

    def test_projection_noise_for_sensing_volume(self):
        count = 3.6666666666666665e23 * (90e-6 * 90e-6 * 200e-6)
        value = projection_noise_sensitivity(count, SPIN)
        assert value == pytest.approx(2.464024020544588e-13, rel=1e-9)
        assert 225e-15 < value < 275e-15

    @given(count=st.floats(1e6, 1e15))
    def test_projection_noise_scales_inverse_sqrt_n(self, count):
        one = projection_noise_sensitivity(count, SPIN)
        four = projection_noise_sensitivity(4 * count, SPIN)
        assert four == pytest.approx(one / 2, rel=1e-9)

    def test_temperature_cross_sensitivity(self):
        value = temperature_cross_sensitivity(SPIN)
        expected = 2.80e10 * math.cos(math.radians(54.7)) / 7.4e4
        assert value == pytest.approx(expected, rel=1e-12)
        assert 0.21 < value * 1e-6 < 0.23


class TestDefaults:
    def test_instrument_default_parameters(self):
        assert SPIN.zero_field_splitting_hz == 2.87e9
        assert SPIN.gyromagnetic_hz_per_t == 2.80e10
        assert SPIN.field_angle_rad == pytest.approx(math.radians(54.7), rel=0)
        assert SPIN.d_shift_hz_per_k == -7.4e4
        assert SPIN.resonance_fwhm_hz == 9.0e6
        assert SPIN.contrast == 0.071

    def test_spectrum_requires_increasing_grid(self):
        with pytest.raises(ValueError):
            OdmrSpectrum(np.array([1.0, 1.0, 2.0]), np.array([1.0, 1.0, 1.0]))

    def test_no_warning_at_bias_field(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            resonance_frequencies(2.99e-3, SPIN)
