"""Cavity-enhanced infrared-absorption magnetometry with NV ensembles.

Forward models (cavity optics, pump saturation of the singlet
absorption, ODMR line shapes, frequency-modulated lock-in detection,
noise spectra) and the matching inversions (resonance fits, saturation
fits, field reconstruction).
"""

from .cavity import (
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
    transmission,
)
from .config import (
    ConfigError,
    ExperimentConfig,
    from_json_dict,
    load_config,
    instrument_defaults,
    to_json_dict,
)
from .fitting import FitResult, fit_lorentzian, fit_saturation, least_squares
from .gaussian_optics import (
    CavityGeometry,
    ModeGeometry,
    UnstableResonatorError,
    mode_geometry,
    peak_intensity,
    photon_rate,
)
from .lockin import (
    BandwidthModel,
    LockinConfig,
    ModulationConfig,
    TimeSeries,
    bandwidth_attenuation,
    calibrate_bandwidth,
    demodulate,
    field_from_lockin,
    slope_alpha,
    synthesize_transmission,
)
from .magnetometry import (
    OdmrSpectrum,
    SpinParams,
    field_from_splitting,
    odmr_spectrum,
    odmr_transmission,
    projection_noise_sensitivity,
    resonance_frequencies,
    shot_noise_sensitivity,
    temperature_cross_sensitivity,
    zeeman_shift,
)
from .nv_model import (
    PumpNvParams,
    SaturationModel,
    nv_density,
    nv_density_ppm,
    sat_intensity_singlet,
    sat_intensity_triplet,
    single_pass_transmission,
    transmission_vs_pump,
)
from .spectral import Spectrum, noise_floor, psd_welch, rms_in_band

__all__ = [
    "BandwidthModel",
    "CavityGeometry",
    "CavityState",
    "ConfigError",
    "DiamondSample",
    "ExperimentConfig",
    "FitResult",
    "LockinConfig",
    "MirrorSet",
    "ModeGeometry",
    "ModulationConfig",
    "OdmrSpectrum",
    "PumpNvParams",
    "SaturationModel",
    "SpinParams",
    "Spectrum",
    "TimeSeries",
    "UnstableResonatorError",
    "bandwidth_attenuation",
    "birefringence_from_splitting",
    "birefringent_pair_difference",
    "birefringent_splitting",
    "calibrate_bandwidth",
    "contrast_enhancement",
    "demodulate",
    "field_from_lockin",
    "field_from_splitting",
    "finesse",
    "fit_lorentzian",
    "fit_saturation",
    "free_spectral_range",
    "from_json_dict",
    "gouy_frequency_offset",
    "least_squares",
    "load_config",
    "loss_from_finesse",
    "mode_geometry",
    "noise_floor",
    "nv_density",
    "nv_density_ppm",
    "odmr_spectrum",
    "odmr_transmission",
    "instrument_defaults",
    "peak_intensity",
    "peak_transmission",
    "phase_difference",
    "photon_rate",
    "projection_noise_sensitivity",
    "psd_welch",
    "reflectivity_from_finesse",
    "resonance_comb",
    "resonance_frequencies",
    "resonance_fwhm",
    "rms_in_band",
    "sat_intensity_singlet",
    "sat_intensity_triplet",
    "shot_noise_sensitivity",
    "single_pass_transmission",
    "slope_alpha",
    "synthesize_transmission",
    "temperature_cross_sensitivity",
    "to_json_dict",
    "transmission",
    "transmission_vs_pump",
    "zeeman_shift",
]

__version__ = "0.1.0"
