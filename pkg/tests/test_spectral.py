import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cavmag.lockin import TimeSeries
from cavmag.spectral import Spectrum, noise_floor, psd_welch, rms_in_band
from cavmag.synthetic import white_noise_series


def tone_series(amplitude, frequency, rate=1e4, duration=10.0):
    times = np.arange(int(duration * rate)) / rate
    return TimeSeries(rate, amplitude * np.sin(2 * math.pi * frequency * times))


class TestWelch:
    def test_white_noise_floor_matches_theory(self):
        # One-sided ASD of white noise of std sigma is sigma sqrt(2 / fs).
        sigma, rate = 2.5e-3, 1e4
        series = white_noise_series(sigma, sample_rate_hz=rate, duration_s=10.0, seed=3)
        spectrum = psd_welch(series)
        expected = sigma * math.sqrt(2 / rate)
        floor = noise_floor(spectrum, (100.0, 4000.0))
        assert floor == pytest.approx(expected, rel=0.10)

    def test_rect_window_floor(self):
        sigma, rate = 1.0, 1e4
        series = white_noise_series(sigma, sample_rate_hz=rate, duration_s=10.0, seed=5)
        spectrum = psd_welch(series, window="rect")
        floor = noise_floor(spectrum, (100.0, 4000.0))
        assert floor == pytest.approx(sigma * math.sqrt(2 / rate), rel=0.10)

    def test_parseval_total_power(self):
        # Integrated PSD equals the variance of the record within a few
        # percent for white noise.
        series = white_noise_series(1.7e-2, sample_rate_hz=1e4, duration_s=20.0, seed=11)
        spectrum = psd_welch(series)
        nyquist = series.sample_rate_hz / 2
        total = rms_in_band(spectrum, (0.0, nyquist * (1 + 1e-9)))
        assert total == pytest.approx(float(np.std(series.samples)), rel=0.03)

    def test_sine_rms_recovered(self):
        series = tone_series(3.2e-4, 100.0)
        spectrum = psd_welch(series)
        rms = rms_in_band(spectrum, (50.0, 150.0))
        assert rms == pytest.approx(3.2e-4 / math.sqrt(2), rel=0.05)

    def test_default_segmentation_gives_eight_segments(self):
        series = white_noise_series(1.0, sample_rate_hz=1e4, duration_s=10.0, seed=1)
        spectrum = psd_welch(series)
        # 100000 samples, 50% overlap: segment near 100000 / 4.5.
        expected_bin = 1e4 / int(100000 / 4.5)
        assert spectrum.bin_width_hz == pytest.approx(expected_bin, rel=1e-9)

    def test_short_record_rejected(self):
        series = TimeSeries(1e4, np.zeros(100))
        with pytest.raises(ValueError, match="too short"):
            psd_welch(series, segment_length=80)

    def test_frequencies_start_at_dc_and_end_at_nyquist(self):
        series = white_noise_series(1.0, sample_rate_hz=1e4, duration_s=1.0, seed=2)
        spectrum = psd_welch(series, segment_length=1000)
        assert spectrum.frequencies_hz[0] == 0.0
        assert spectrum.frequencies_hz[-1] == pytest.approx(5000.0, rel=1e-12)


class TestBandStatistics:
    def test_flat_spectrum_rms_exact(self):
        # ASD a over bandwidth W integrates to a sqrt(W).
        frequencies = np.arange(0.0, 1000.0, 1.0)
        flat = Spectrum(frequencies, np.full(frequencies.size, 2.0e-6))
        value = rms_in_band(flat, (100.0, 600.0))
        assert value == pytest.approx(2.0e-6 * math.sqrt(500.0), rel=1e-12)

    def test_disjoint_bands_add_in_quadrature(self):
        frequencies = np.arange(0.0, 1000.0, 1.0)
        asd = np.abs(np.sin(frequencies / 50.0)) * 1e-5 + 1e-7
        spectrum = Spectrum(frequencies, asd)
        a = rms_in_band(spectrum, (0.0, 300.0))
        b = rms_in_band(spectrum, (300.0, 700.0))
        both = rms_in_band(spectrum, (0.0, 700.0))
        assert both == pytest.approx(math.hypot(a, b), rel=1e-12)

    def test_half_open_band_convention(self):
        frequencies = np.arange(0.0, 10.0, 1.0)
        asd = np.zeros(10)
        asd[5] = 1.0
        spectrum = Spectrum(frequencies, asd)
        assert rms_in_band(spectrum, (0.0, 5.0)) == 0.0
        assert rms_in_band(spectrum, (5.0, 6.0)) == 1.0

    def test_noise_floor_is_median_robust_to_spikes(self):
        frequencies = np.arange(0.0, 1000.0, 1.0)
        asd = np.full(frequencies.size, 3.0e-6)
        asd[100] = 1.0
        asd[600] = 2.0
        spectrum = Spectrum(frequencies, asd)
        assert noise_floor(spectrum, (0.0, 1000.0)) == pytest.approx(3.0e-6, rel=0)

    def test_empty_band_rejected(self):
        frequencies = np.arange(0.0, 10.0, 1.0)
        spectrum = Spectrum(frequencies, np.ones(10))
        with pytest.raises(ValueError):
            noise_floor(spectrum, (20.0, 30.0))
        with pytest.raises(ValueError):
            rms_in_band(spectrum, (5.0, 5.0))

    @given(
        split=st.floats(100.0, 900.0),
        level=st.floats(1e-9, 1e-3),
    )
    @settings(max_examples=30)
    def test_quadrature_property(self, split, level):
        frequencies = np.arange(0.0, 1000.0, 1.0)
        spectrum = Spectrum(frequencies, np.full(frequencies.size, level))
        a = rms_in_band(spectrum, (0.0, split))
        b = rms_in_band(spectrum, (split, 1000.0))
        both = rms_in_band(spectrum, (0.0, 1000.0))
        assert both == pytest.approx(math.hypot(a, b), rel=1e-9)


class TestSpectrumType:
    def test_immutable(self):
        spectrum = Spectrum(np.arange(5.0), np.ones(5))
        with pytest.raises(ValueError):
            spectrum.asd[0] = 2.0

    def test_validation(self):
        with pytest.raises(ValueError):
            Spectrum(np.array([0.0, 2.0, 1.0]), np.ones(3))
        with pytest.raises(ValueError):
            Spectrum(np.arange(3.0), np.ones(4))
        with pytest.raises(ValueError):
            Spectrum(np.arange(3.0), -np.ones(3))
