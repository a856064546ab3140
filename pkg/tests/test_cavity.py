import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cavmag import cavity
from cavmag.cavity import (
    CavityState,
    DiamondSample,
    MirrorSet,
    birefringence_from_splitting,
    birefringent_pair_difference,
    birefringent_splitting,
    contrast_enhancement,
    finesse,
    free_spectral_range,
    gouy_frequency_offset,
    loss_from_finesse,
    peak_transmission,
    phase_difference,
    reflectivity_from_finesse,
    resonance_comb,
    resonance_fwhm,
)

MIRRORS = MirrorSet(0.985)


class TestAiryTransmission:
    def test_lossless_peak_reaches_t_squared_over_one_minus_r_squared(self):
        # R + T = 1 and L = 1: peak transmission is exactly 1.
        peak = peak_transmission(0.985, 0.015, 1.0)
        assert peak == pytest.approx(1.0, rel=1e-12)

    def test_peak_with_intracavity_loss(self):
        peak = peak_transmission(0.985, 0.015, 0.9965)
        assert peak == pytest.approx(0.015**2 * 0.9965 / (1 - 0.985 * 0.9965) ** 2, rel=1e-12)
        assert peak == pytest.approx(0.6588473191219056, rel=1e-12)

    def test_antiresonance_value(self):
        value = cavity.airy_transmission(0.985, 0.015, 1.0, math.pi / 2)
        assert value == pytest.approx(0.015**2 / ((1 - 0.985) ** 2 + 4 * 0.985), rel=1e-12)
        assert value == pytest.approx(5.7103338007347296e-05, rel=1e-9)

    def test_pi_periodic(self):
        phases = np.linspace(-2 * math.pi, 2 * math.pi, 101)
        a = cavity.airy_transmission(0.985, 0.015, 0.9965, phases)
        b = cavity.airy_transmission(0.985, 0.015, 0.9965, phases + math.pi)
        np.testing.assert_allclose(a, b, rtol=1e-12)

    @given(
        reflectivity=st.floats(0.5, 0.999),
        loss=st.floats(0.9, 1.0, exclude_max=False),
        phase=st.floats(-10.0, 10.0),
    )
    def test_bounded_by_peak(self, reflectivity, loss, phase):
        value = cavity.airy_transmission(reflectivity, 1 - reflectivity, loss, phase)
        peak = peak_transmission(reflectivity, 1 - reflectivity, loss)
        assert 0.0 <= value <= peak * (1 + 1e-12)

    def test_state_transmission_matches_airy(self):
        state = CavityState(MIRRORS, 0.05, 0.9965)
        phases = np.linspace(0, math.pi, 7)
        np.testing.assert_allclose(
            cavity.transmission(state, phases),
            cavity.airy_transmission(0.985, 0.015, 0.9965, phases),
            rtol=1e-12,
        )


class TestFinesse:
    def test_lossless_value(self):
        assert finesse(0.985) == pytest.approx(207.86277882907913, rel=1e-12)

    def test_lossy_value(self):
        assert finesse(0.985, 0.9965) == pytest.approx(168.72, rel=1e-3)

    def test_rejects_unphysical_product(self):
        with pytest.raises(ValueError):
            finesse(1.0)
        with pytest.raises(ValueError):
            finesse(0.985, 0.0)

    def test_reflectivity_from_finesse_round_trip(self):
        reflectivity = reflectivity_from_finesse(202.0)
        assert finesse(reflectivity) == pytest.approx(202.0, rel=1e-9)
        assert 0.983 < reflectivity < 0.987

    def test_reflectivity_from_finesse_oracle(self):
        assert reflectivity_from_finesse(202.0) == pytest.approx(0.98457, rel=1e-4)

    def test_loss_from_finesse_round_trip(self):
        loss = loss_from_finesse(165.0, 0.985)
        assert finesse(0.985, loss) == pytest.approx(165.0, rel=1e-9)
        assert 0.0030 < 1 - loss < 0.0045

    def test_loss_from_finesse_oracle(self):
        assert loss_from_finesse(165.0, 0.985) == pytest.approx(0.996081, rel=1e-5)

    def test_unattainable_finesse_rejected(self):
        # Finesse above the lossless limit for this mirror set.
        with pytest.raises(ValueError):
            loss_from_finesse(250.0, 0.985)

    @given(target=st.floats(5.0, 5000.0))
    def test_reflectivity_inversion_property(self, target):
        reflectivity = reflectivity_from_finesse(target)
        assert 0.0 < reflectivity < 1.0
        assert finesse(reflectivity) == pytest.approx(target, rel=1e-8)

    def test_contrast_enhancement_oracle(self):
        assert contrast_enhancement(0.985) == pytest.approx(132.33, rel=1e-4)

    def test_contrast_enhancement_tracks_finesse(self):
        # (1 + RL)/(1 - RL) approaches 2F/pi for high finesse.
        value = contrast_enhancement(0.985)
        approx = 2 * finesse(0.985) / math.pi
        assert value == pytest.approx(approx, rel=0.01)


class TestSpectralLayout:
    def test_empty_cavity_fsr(self):
        assert free_spectral_range(0.05) == pytest.approx(2.99792458e9, rel=0)

    def test_diamond_loaded_fsr(self):
        # Optical path l_air + n d; spacing here keeps total spacing 5 cm.
        value = free_spectral_range(0.05 - 2e-4, 2.4, 2e-4)
        assert value == pytest.approx(299792458 / (2 * (0.0498 + 2.4 * 2e-4)), rel=1e-12)
        assert value == pytest.approx(2981229693.7151947, rel=1e-12)

    def test_fsr_requires_positive_path(self):
        with pytest.raises(ValueError):
            free_spectral_range(0.0)

    def test_resonance_fwhm(self):
        assert resonance_fwhm(3.0e9, 202.0) == pytest.approx(1.4851485148514852e7, rel=1e-12)

    def test_fwhm_matches_numeric_airy_width(self):
        # Width of the Airy peak measured on a dense grid agrees with
        # FSR / finesse to better than a percent at this finesse.
        reflectivity, loss = 0.985, 0.9965
        fsr = free_spectral_range(0.05)
        value = finesse(reflectivity, loss)
        phases = np.linspace(-0.05, 0.05, 400001)
        trace = cavity.airy_transmission(reflectivity, 0.015, loss, phases)
        half = trace.max() / 2
        above = phases[trace >= half]
        width_hz = (above[-1] - above[0]) / math.pi * fsr
        assert width_hz == pytest.approx(fsr / value, rel=1e-2)

    def test_gouy_offset_confocal(self):
        # l = r puts the one-way Gouy phase at pi/2: a quarter of an FSR.
        fsr = free_spectral_range(0.05)
        assert gouy_frequency_offset(0.05, 0.05, fsr) == pytest.approx(fsr / 2, rel=1e-12)

    def test_gouy_offset_short_cavity(self):
        fsr = 3.0e9
        value = gouy_frequency_offset(0.025, 0.05, fsr)
        assert value == pytest.approx(fsr * math.acos(0.5) / math.pi, rel=1e-12)

    def test_phase_at_frequency_zero_on_comb(self):
        state = CavityState(MIRRORS, 0.05, 1.0, None, 0.0)
        fsr = state.free_spectral_range_hz
        phase = cavity.phase_at_frequency(state, 7 * fsr)
        assert math.sin(phase) == pytest.approx(0.0, abs=1e-9)

    def test_comb_lines_are_transmission_maxima(self):
        state = CavityState(MIRRORS, 0.05, 0.9965, None, 1.2e8)
        lines = resonance_comb(state, 10, 14)
        peak = cavity.max_transmission(state)
        for line in lines:
            phase = cavity.phase_at_frequency(state, line)
            assert cavity.transmission(state, phase) == pytest.approx(peak, rel=1e-9)


class TestBirefringence:
    DIAMOND = DiamondSample(2e-4, 2.4, 6.1e-5, 0.9965)

    def test_splitting_forward_oracle(self):
        value = birefringent_splitting(6.1e-5, 2e-4, 0.05 - 2e-4, 2.4, 2.877e14)
        assert value == pytest.approx(6.1e-5 * 2e-4 / (0.05 - 2e-4 + 2.4 * 2e-4) * 2.877e14, rel=1e-12)

    def test_inversion_recovers_published_birefringence(self):
        optical = 2.877e14
        value = birefringence_from_splitting(70e6, 2e-4, 0.05 - 2e-4, 2.4, optical)
        assert value == pytest.approx(6.1e-5, rel=0.02)

    def test_splitting_round_trip(self):
        split = birefringent_splitting(6.1e-5, 2e-4, 0.0498, 2.4, 2.877e14)
        back = birefringence_from_splitting(split, 2e-4, 0.0498, 2.4, 2.877e14)
        assert back == pytest.approx(6.1e-5, rel=1e-12)

    def test_phase_difference_oracle(self):
        value = phase_difference(6.1e-5, 2e-4, 1.042e-6)
        assert math.degrees(value) == pytest.approx(4.2, rel=0.02)
        assert value == pytest.approx(2 * math.pi * 6.1e-5 * 2e-4 / 1.042e-6, rel=1e-12)

    def test_large_birefringence_warns(self):
        with pytest.warns(UserWarning):
            birefringent_splitting(0.1, 2e-4, 0.0498, 2.4, 2.877e14)
        with pytest.warns(UserWarning):
            birefringence_from_splitting(3e12, 2e-4, 0.0498, 2.4, 2.877e14)

    def test_exact_pair_difference_matches_comb(self):
        # The closed form for the slow/fast line separation must equal the
        # difference of the two comb frequencies it was derived from.
        state = CavityState(MIRRORS, 0.0498, 0.9965, self.DIAMOND, 0.0)
        m = 95000
        for k_offset in (-2, -1, 0, 1, 2):
            k = m + k_offset
            fast = resonance_comb(state, m, m, axis="fast")[0]
            slow = resonance_comb(state, k, k, axis="slow")[0]
            exact = birefringent_pair_difference(state, m, k)
            assert exact == pytest.approx(fast - slow, rel=1e-9)

    def test_exact_and_approximate_splitting_agree_when_small(self):
        state = CavityState(MIRRORS, 0.0498, 0.9965, self.DIAMOND, 0.0)
        fsr = state.free_spectral_range_hz
        optical = 2.877e14
        m = int(round(optical / fsr))
        # Same order on both axes: the fast line sits above the slow line
        # and the small-split approximation matches to first order.
        exact = birefringent_pair_difference(state, m, m)
        approx = birefringent_splitting(6.1e-5, 2e-4, 0.0498, 2.4, m * fsr)
        assert exact == pytest.approx(approx, rel=1e-3)

    @given(
        delta_n=st.floats(1e-6, 2e-4),
        thickness=st.floats(5e-5, 5e-4),
    )
    def test_inversion_property(self, delta_n, thickness):
        split = birefringent_splitting(delta_n, thickness, 0.0498, 2.4, 2.877e14)
        back = birefringence_from_splitting(split, thickness, 0.0498, 2.4, 2.877e14)
        assert back == pytest.approx(delta_n, rel=1e-9)


class TestValidation:
    def test_mirror_set_defaults_to_lossless_transmission(self):
        mirrors = MirrorSet(0.985)
        assert mirrors.transmissivity == pytest.approx(0.015, rel=1e-12)

    def test_mirror_set_rejects_gain(self):
        with pytest.raises(ValueError):
            MirrorSet(0.985, 0.02)

    def test_mirror_set_rejects_bad_reflectivity(self):
        for value in (0.0, 1.0, -0.1, 1.5):
            with pytest.raises(ValueError):
                MirrorSet(value)

    def test_comb_rejects_nonpositive_order(self):
        state = CavityState(MIRRORS, 0.05)
        with pytest.raises(ValueError):
            resonance_comb(state, 0, 3)

    def test_comb_axis_names(self):
        state = CavityState(MIRRORS, 0.0498, 0.9965, self.diamond(), 0.0)
        with pytest.raises(ValueError):
            resonance_comb(state, 5, 6, axis="diagonal")

    @staticmethod
    def diamond():
        return DiamondSample(2e-4, 2.4, 6.1e-5, 0.9965)

    def test_no_warning_for_small_birefringence(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            birefringent_splitting(6.1e-5, 2e-4, 0.0498, 2.4, 2.877e14)
