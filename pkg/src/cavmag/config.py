"""Experiment configuration: JSON schema, validation and built-in defaults.

A configuration file is a single JSON object with a mandatory
schema_version field and one section per subsystem.  All quantities are
SI and every field name carries its unit as a suffix.  The built-in
configuration named ``instrument-defaults`` carries the full default parameter
set of the instrument the toolkit models, so every command runs without
any file.

The environment variable CAVMAG_CONFIG_DIR names a directory searched for
bare configuration names that are not paths to existing files.
"""

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

from .cavity import DiamondSample, MirrorSet
from .constants import SPEED_OF_LIGHT
from .gaussian_optics import CavityGeometry
from .lockin import BandwidthModel, LockinConfig, ModulationConfig, calibrate_bandwidth
from .magnetometry import SpinParams
from .nv_model import PumpNvParams, SaturationModel

SCHEMA_VERSION = 1
CONFIG_DIR_ENV = "CAVMAG_CONFIG_DIR"
BUILTIN_NAME = "instrument-defaults"


class ConfigError(ValueError):
    """Configuration file violates the schema."""


@dataclass(frozen=True)
class PumpConfig:
    """Pump beam and empirical saturation parameters."""

    params: PumpNvParams
    waist_m: float
    power_grid_w: Tuple[float, ...]
    absorbance_amplitude: float
    saturation_power_w: float

    def __post_init__(self) -> None:
        if self.waist_m <= 0:
            raise ConfigError("pump waist must be positive")
        if len(self.power_grid_w) < 2:
            raise ConfigError("power grid needs at least two points")
        if any(p < 0 for p in self.power_grid_w):
            raise ConfigError("pump powers must be non-negative")


@dataclass(frozen=True)
class DetectionConfig:
    """Detected infrared power and the interrogated sample volume."""

    detected_power_w: float
    sensing_volume_m3: float

    def __post_init__(self) -> None:
        if self.detected_power_w <= 0 or self.sensing_volume_m3 <= 0:
            raise ConfigError("detected power and sensing volume must be positive")


@dataclass(frozen=True)
class AcquisitionConfig:
    """Record lengths and sample rates for spectra and lock-in runs."""

    duration_s: float = 10.0
    sample_rate_hz: float = 1.0e4
    lockin_sample_rate_hz: float = 1.0e6

    def __post_init__(self) -> None:
        if min(self.duration_s, self.sample_rate_hz, self.lockin_sample_rate_hz) <= 0:
            raise ConfigError("acquisition parameters must be positive")


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete parameter set of one simulated experiment."""

    geometry: CavityGeometry
    mirrors: MirrorSet
    gouy_offset_hz: Optional[float]
    diamond: DiamondSample
    ir_cross_section_m2: float
    pump: PumpConfig
    spin: SpinParams
    bias_field_t: float
    modulation: ModulationConfig
    lockin: LockinConfig
    bandwidth: BandwidthModel
    detection: DetectionConfig
    acquisition: AcquisitionConfig
    seed: int

    @property
    def saturation(self) -> SaturationModel:
        return SaturationModel(
            absorbance_amplitude=self.pump.absorbance_amplitude,
            saturation_power_w=self.pump.saturation_power_w,
            baseline_transmission=self.diamond.baseline_transmission,
        )


def instrument_defaults() -> ExperimentConfig:
    """Built-in configuration with the instrument's default parameter set."""
    spin = SpinParams()
    wavelength = 1.042e-6
    optical_frequency = SPEED_OF_LIGHT / wavelength
    bias_field = 2.99e-3
    shift = spin.gyromagnetic_hz_per_t * bias_field * spin.cos_angle
    return ExperimentConfig(
        geometry=CavityGeometry(
            mirror_spacing_m=0.05, mirror_curvature_m=0.05, wavelength_m=wavelength
        ),
        mirrors=MirrorSet(reflectivity=0.985),
        gouy_offset_hz=None,
        diamond=DiamondSample(
            thickness_m=2.0e-4,
            refractive_index=2.4,
            birefringence=6.1e-5,
            baseline_transmission=0.9965,
        ),
        ir_cross_section_m2=3e-22,
        pump=PumpConfig(
            params=PumpNvParams(),
            waist_m=9.0e-5,
            power_grid_w=tuple(float(p) for p in _linspace(0.0, 2.0, 12)),
            absorbance_amplitude=0.022,
            saturation_power_w=0.88,
        ),
        spin=spin,
        bias_field_t=bias_field,
        modulation=ModulationConfig(
            center_frequency_hz=spin.zero_field_splitting_hz - shift,
            deviation_hz=spin.resonance_fwhm_hz / 2.0,
            modulation_frequency_hz=15.8e3,
        ),
        lockin=LockinConfig(),
        bandwidth=calibrate_bandwidth(13.5e3),
        detection=DetectionConfig(
            detected_power_w=2.3e-3, sensing_volume_m3=90e-6 * 90e-6 * 200e-6
        ),
        acquisition=AcquisitionConfig(),
        seed=1,
    )


def _linspace(lo: float, hi: float, count: int):
    step = (hi - lo) / (count - 1)
    return [lo + step * i for i in range(count)]


def _section(data: dict, name: str) -> dict:
    value = data.get(name)
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"section '{name}' must be a JSON object")
    return dict(value)


def _take_number(section: dict, key: str, default=None, allow_none: bool = False):
    if key not in section:
        if default is None and not allow_none:
            raise ConfigError(f"missing required field '{key}'")
        return default
    value = section.pop(key)
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"field '{key}' must be a number")
    return float(value)


def _take_int(section: dict, key: str, default: int) -> int:
    if key not in section:
        return default
    value = section.pop(key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"field '{key}' must be an integer")
    return value


def _reject_unknown(section: dict, name: str) -> None:
    if section:
        raise ConfigError(f"unknown fields in section '{name}': {sorted(section)}")


def from_json_dict(data: dict) -> ExperimentConfig:
    """Validate a parsed JSON object against the schema and build the config.

    Unknown sections or fields, missing schema_version and type mismatches
    all raise ConfigError; fields absent from the file fall back to the
    built-in defaults.
    """
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    data = dict(data)
    version = data.pop("schema_version", None)
    if version is None:
        raise ConfigError("missing required field 'schema_version'")
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported schema_version {version!r}; this build reads {SCHEMA_VERSION}"
        )
    defaults = instrument_defaults()

    seed = data.pop("seed", defaults.seed)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError("field 'seed' must be an integer")

    section = _section(data, "cavity")
    data.pop("cavity", None)
    geometry = CavityGeometry(
        mirror_spacing_m=_take_number(
            section, "mirror_spacing_m", defaults.geometry.mirror_spacing_m
        ),
        mirror_curvature_m=_take_number(
            section, "mirror_curvature_m", defaults.geometry.mirror_curvature_m
        ),
        wavelength_m=_take_number(
            section, "wavelength_m", defaults.geometry.wavelength_m
        ),
    )
    reflectivity = _take_number(
        section, "mirror_reflectivity", defaults.mirrors.reflectivity
    )
    transmissivity = _take_number(
        section, "mirror_transmissivity", None, allow_none=True
    )
    gouy = _take_number(section, "gouy_offset_hz", None, allow_none=True)
    _reject_unknown(section, "cavity")
    mirrors = MirrorSet(reflectivity=reflectivity, transmissivity=transmissivity)

    section = _section(data, "diamond")
    data.pop("diamond", None)
    diamond = DiamondSample(
        thickness_m=_take_number(section, "thickness_m", defaults.diamond.thickness_m),
        refractive_index=_take_number(
            section, "refractive_index", defaults.diamond.refractive_index
        ),
        birefringence=_take_number(
            section, "birefringence", defaults.diamond.birefringence
        ),
        baseline_transmission=_take_number(
            section, "baseline_transmission", defaults.diamond.baseline_transmission
        ),
    )
    ir_cross_section = _take_number(
        section, "ir_cross_section_m2", defaults.ir_cross_section_m2
    )
    _reject_unknown(section, "diamond")

    section = _section(data, "pump")
    data.pop("pump", None)
    pump_params = PumpNvParams(
        pump_cross_section_m2=_take_number(
            section, "cross_section_m2", defaults.pump.params.pump_cross_section_m2
        ),
        pump_wavelength_m=_take_number(
            section, "wavelength_m", defaults.pump.params.pump_wavelength_m
        ),
        triplet_decay_per_s=_take_number(
            section, "triplet_decay_per_s", defaults.pump.params.triplet_decay_per_s
        ),
        singlet_decay_per_s=_take_number(
            section, "singlet_decay_per_s", defaults.pump.params.singlet_decay_per_s
        ),
    )
    grid = section.pop("power_grid_w", list(defaults.pump.power_grid_w))
    if not isinstance(grid, (list, tuple)) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in grid
    ):
        raise ConfigError("field 'power_grid_w' must be a list of numbers")
    pump = PumpConfig(
        params=pump_params,
        waist_m=_take_number(section, "waist_m", defaults.pump.waist_m),
        power_grid_w=tuple(float(v) for v in grid),
        absorbance_amplitude=_take_number(
            section, "absorbance_amplitude", defaults.pump.absorbance_amplitude
        ),
        saturation_power_w=_take_number(
            section, "saturation_power_w", defaults.pump.saturation_power_w
        ),
    )
    _reject_unknown(section, "pump")

    section = _section(data, "spin")
    data.pop("spin", None)
    spin = SpinParams(
        zero_field_splitting_hz=_take_number(
            section, "zero_field_splitting_hz", defaults.spin.zero_field_splitting_hz
        ),
        gyromagnetic_hz_per_t=_take_number(
            section, "gyromagnetic_hz_per_t", defaults.spin.gyromagnetic_hz_per_t
        ),
        field_angle_rad=_take_number(
            section, "field_angle_rad", defaults.spin.field_angle_rad
        ),
        d_shift_hz_per_k=_take_number(
            section, "d_shift_hz_per_k", defaults.spin.d_shift_hz_per_k
        ),
        resonance_fwhm_hz=_take_number(
            section, "resonance_fwhm_hz", defaults.spin.resonance_fwhm_hz
        ),
        contrast=_take_number(section, "contrast", defaults.spin.contrast),
    )
    bias_field = _take_number(section, "bias_field_t", defaults.bias_field_t)
    _reject_unknown(section, "spin")

    section = _section(data, "modulation")
    data.pop("modulation", None)
    center = _take_number(section, "center_frequency_hz", None, allow_none=True)
    if center is None:
        shift = spin.gyromagnetic_hz_per_t * bias_field * spin.cos_angle
        center = spin.zero_field_splitting_hz - shift
    modulation = ModulationConfig(
        center_frequency_hz=center,
        deviation_hz=_take_number(
            section, "deviation_hz", spin.resonance_fwhm_hz / 2.0
        ),
        modulation_frequency_hz=_take_number(
            section,
            "modulation_frequency_hz",
            defaults.modulation.modulation_frequency_hz,
        ),
    )
    _reject_unknown(section, "modulation")

    section = _section(data, "lockin")
    data.pop("lockin", None)
    lockin = LockinConfig(
        time_constant_s=_take_number(
            section, "time_constant_s", defaults.lockin.time_constant_s
        ),
        filter_order=_take_int(section, "filter_order", defaults.lockin.filter_order),
        reference_phase_rad=_take_number(
            section, "reference_phase_rad", defaults.lockin.reference_phase_rad
        ),
    )
    _reject_unknown(section, "lockin")

    section = _section(data, "bandwidth")
    data.pop("bandwidth", None)
    f3db = _take_number(section, "f3db_hz", None, allow_none=True)
    factor2 = _take_number(section, "factor2_frequency_hz", None, allow_none=True)
    if f3db is not None and factor2 is not None:
        raise ConfigError("give either f3db_hz or factor2_frequency_hz, not both")
    if f3db is not None:
        bandwidth = BandwidthModel(f3db_hz=f3db)
    elif factor2 is not None:
        bandwidth = calibrate_bandwidth(factor2)
    else:
        bandwidth = defaults.bandwidth
    _reject_unknown(section, "bandwidth")

    section = _section(data, "detection")
    data.pop("detection", None)
    detection = DetectionConfig(
        detected_power_w=_take_number(
            section, "detected_power_w", defaults.detection.detected_power_w
        ),
        sensing_volume_m3=_take_number(
            section, "sensing_volume_m3", defaults.detection.sensing_volume_m3
        ),
    )
    _reject_unknown(section, "detection")

    section = _section(data, "acquisition")
    data.pop("acquisition", None)
    acquisition = AcquisitionConfig(
        duration_s=_take_number(
            section, "duration_s", defaults.acquisition.duration_s
        ),
        sample_rate_hz=_take_number(
            section, "sample_rate_hz", defaults.acquisition.sample_rate_hz
        ),
        lockin_sample_rate_hz=_take_number(
            section,
            "lockin_sample_rate_hz",
            defaults.acquisition.lockin_sample_rate_hz,
        ),
    )
    _reject_unknown(section, "acquisition")

    if data:
        raise ConfigError(f"unknown sections: {sorted(data)}")

    try:
        return ExperimentConfig(
            geometry=geometry,
            mirrors=mirrors,
            gouy_offset_hz=gouy,
            diamond=diamond,
            ir_cross_section_m2=ir_cross_section,
            pump=pump,
            spin=spin,
            bias_field_t=bias_field,
            modulation=modulation,
            lockin=lockin,
            bandwidth=bandwidth,
            detection=detection,
            acquisition=acquisition,
            seed=seed,
        )
    except ValueError as error:
        raise ConfigError(str(error)) from error


def to_json_dict(config: ExperimentConfig) -> dict:
    """Inverse of from_json_dict, for echoing configs into output sidecars."""
    return {
        "schema_version": SCHEMA_VERSION,
        "seed": config.seed,
        "cavity": {
            "mirror_spacing_m": config.geometry.mirror_spacing_m,
            "mirror_curvature_m": config.geometry.mirror_curvature_m,
            "wavelength_m": config.geometry.wavelength_m,
            "mirror_reflectivity": config.mirrors.reflectivity,
            "mirror_transmissivity": config.mirrors.transmissivity,
            "gouy_offset_hz": config.gouy_offset_hz,
        },
        "diamond": {
            "thickness_m": config.diamond.thickness_m,
            "refractive_index": config.diamond.refractive_index,
            "birefringence": config.diamond.birefringence,
            "baseline_transmission": config.diamond.baseline_transmission,
            "ir_cross_section_m2": config.ir_cross_section_m2,
        },
        "pump": {
            "cross_section_m2": config.pump.params.pump_cross_section_m2,
            "wavelength_m": config.pump.params.pump_wavelength_m,
            "triplet_decay_per_s": config.pump.params.triplet_decay_per_s,
            "singlet_decay_per_s": config.pump.params.singlet_decay_per_s,
            "waist_m": config.pump.waist_m,
            "power_grid_w": list(config.pump.power_grid_w),
            "absorbance_amplitude": config.pump.absorbance_amplitude,
            "saturation_power_w": config.pump.saturation_power_w,
        },
        "spin": {
            "zero_field_splitting_hz": config.spin.zero_field_splitting_hz,
            "gyromagnetic_hz_per_t": config.spin.gyromagnetic_hz_per_t,
            "field_angle_rad": config.spin.field_angle_rad,
            "d_shift_hz_per_k": config.spin.d_shift_hz_per_k,
            "resonance_fwhm_hz": config.spin.resonance_fwhm_hz,
            "contrast": config.spin.contrast,
            "bias_field_t": config.bias_field_t,
        },
        "modulation": {
            "center_frequency_hz": config.modulation.center_frequency_hz,
            "deviation_hz": config.modulation.deviation_hz,
            "modulation_frequency_hz": config.modulation.modulation_frequency_hz,
        },
        "lockin": {
            "time_constant_s": config.lockin.time_constant_s,
            "filter_order": config.lockin.filter_order,
            "reference_phase_rad": config.lockin.reference_phase_rad,
        },
        "bandwidth": {"f3db_hz": config.bandwidth.f3db_hz},
        "detection": {
            "detected_power_w": config.detection.detected_power_w,
            "sensing_volume_m3": config.detection.sensing_volume_m3,
        },
        "acquisition": {
            "duration_s": config.acquisition.duration_s,
            "sample_rate_hz": config.acquisition.sample_rate_hz,
            "lockin_sample_rate_hz": config.acquisition.lockin_sample_rate_hz,
        },
    }


def load_config(name_or_path: str) -> ExperimentConfig:
    """Load a configuration by built-in name, path, or name in CAVMAG_CONFIG_DIR."""
    if name_or_path == BUILTIN_NAME:
        return instrument_defaults()
    path = Path(name_or_path)
    if not path.exists():
        config_dir = os.environ.get(CONFIG_DIR_ENV)
        if config_dir:
            candidate = Path(config_dir) / name_or_path
            if not candidate.suffix:
                candidate = candidate.with_suffix(".json")
            if candidate.exists():
                path = candidate
    if not path.exists():
        raise ConfigError(f"configuration '{name_or_path}' not found")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as error:
        raise ConfigError(f"invalid JSON in {path}: {error}") from error
    return from_json_dict(data)
