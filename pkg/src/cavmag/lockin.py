"""Frequency-modulation synthesis and lock-in demodulation.

The microwave carrier is frequency modulated,

    f_MW(t) = f_c + f_dev cos(2 pi f_mod t)

and the infrared transmission through the ODMR line converts the
modulation into an amplitude signal at f_mod whose first harmonic is
proportional, near resonance, to the detuning f_c - f_res.  The ensemble
response cannot follow arbitrarily fast modulation; the measured slope
drops by the single-pole factor sqrt(1 + (f_mod / f_3dB)^2), which this
module applies as one lumped roll-off of the odd-harmonic part of the
synthesized transmission.

Demodulation multiplies by 2 cos(2 pi f_mod t + phase) and applies a
cascade of identical discrete single-pole low-pass stages with the exact
recursion

    y[k] = y[k-1] + (x[k] - y[k-1]) (1 - exp(-dt / tau)).

The demodulated output S_LI maps back to field through the calibrated
discriminant slope alpha:

    dB(t) = -S_LI(t) / (alpha (gamma / 2 pi) cos(theta)).
"""

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.signal import lfilter

from .magnetometry import SpinParams, odmr_transmission, resonance_frequencies

# Demodulation needs several samples per modulation cycle; below ten the
# mixing products start aliasing into the signal band.
_MIN_SAMPLES_PER_CYCLE = 10.0

FieldInput = Union[float, np.ndarray, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class ModulationConfig:
    """Carrier frequency, deviation and modulation rate of the FM drive."""

    center_frequency_hz: float
    deviation_hz: float
    modulation_frequency_hz: float

    def __post_init__(self) -> None:
        if self.center_frequency_hz <= 0:
            raise ValueError("carrier frequency must be positive")
        if not 0.0 <= self.deviation_hz < self.center_frequency_hz:
            raise ValueError("deviation must be non-negative and below the carrier")
        if self.modulation_frequency_hz <= 0:
            raise ValueError("modulation frequency must be positive")


@dataclass(frozen=True)
class LockinConfig:
    """Low-pass time constant, filter order and reference phase."""

    time_constant_s: float = 320e-6
    filter_order: int = 1
    reference_phase_rad: float = 0.0

    def __post_init__(self) -> None:
        if self.time_constant_s <= 0:
            raise ValueError("time constant must be positive")
        if not isinstance(self.filter_order, int) or self.filter_order < 1:
            raise ValueError("filter order must be a positive integer")


@dataclass(frozen=True)
class BandwidthModel:
    """Single-pole response of the ensemble to the modulation."""

    f3db_hz: float

    def __post_init__(self) -> None:
        if self.f3db_hz <= 0:
            raise ValueError("corner frequency must be positive")


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled record; immutable once constructed."""

    sample_rate_hz: float
    samples: np.ndarray
    start_time_s: float = 0.0

    def __post_init__(self) -> None:
        if self.sample_rate_hz <= 0:
            raise ValueError("sample rate must be positive")
        samples = np.array(self.samples, dtype=float)
        if samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def times(self) -> np.ndarray:
        return self.start_time_s + np.arange(self.samples.size) / self.sample_rate_hz

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz


@dataclass(frozen=True)
class SlopeCalibration:
    """Discriminant slope fit from a carrier scan over one resonance."""

    alpha_per_hz: float
    intercept: float
    offsets_hz: np.ndarray
    responses: np.ndarray
    residual_rms: float


def fm_waveform(times_s: np.ndarray, mod: ModulationConfig) -> np.ndarray:
    """Instantaneous microwave frequency of the FM drive."""
    times = np.asarray(times_s, dtype=float)
    return mod.center_frequency_hz + mod.deviation_hz * np.cos(
        2.0 * math.pi * mod.modulation_frequency_hz * times
    )


def bandwidth_attenuation(modulation_frequency_hz: float, bw: BandwidthModel) -> float:
    """Factor sqrt(1 + (f_mod / f_3dB)^2) by which the slope is reduced.

    Equals exactly 2 at f_mod = sqrt(3) f_3dB and approaches 1 for slow
    modulation.
    """
    if modulation_frequency_hz < 0:
        raise ValueError("modulation frequency must be non-negative")
    return math.sqrt(1.0 + (modulation_frequency_hz / bw.f3db_hz) ** 2)


def response_gain(modulation_frequency_hz: float, bw: Optional[BandwidthModel]) -> float:
    """Amplitude gain of the ensemble response at f_mod, in (0, 1]."""
    if bw is None:
        return 1.0
    return 1.0 / bandwidth_attenuation(modulation_frequency_hz, bw)


def calibrate_bandwidth(factor2_frequency_hz: float) -> BandwidthModel:
    """Bandwidth model from the frequency where the slope has halved.

    Attenuation reaches 2 at sqrt(3) f_3dB, so f_3dB is that frequency
    divided by sqrt(3).
    """
    if factor2_frequency_hz <= 0:
        raise ValueError("factor-2 frequency must be positive")
    return BandwidthModel(f3db_hz=factor2_frequency_hz / math.sqrt(3.0))


def _field_samples(field: FieldInput, times: np.ndarray) -> np.ndarray:
    if callable(field):
        values = np.asarray(field(times), dtype=float)
    elif isinstance(field, np.ndarray):
        values = np.asarray(field, dtype=float)
    else:
        values = np.full(times.size, float(field))
    if values.shape != times.shape:
        raise ValueError("field samples must match the time grid")
    return values


def synthesize_transmission(
    duration_s: float,
    sample_rate_hz: float,
    mod: ModulationConfig,
    spin: SpinParams,
    field: FieldInput,
    bw: Optional[BandwidthModel] = None,
    noise_sigma: float = 0.0,
    seed: Optional[int] = None,
    start_time_s: float = 0.0,
) -> TimeSeries:
    """Transmission record of the FM-driven ODMR line under a field B(t).

    The series is split into components even and odd under a half-period
    shift of the modulation; the odd part carries the first harmonic and
    is scaled by the single-pole response gain at f_mod before optional
    white Gaussian readout noise is added.
    """
    if duration_s <= 0:
        raise ValueError("duration must be positive")
    if sample_rate_hz <= _MIN_SAMPLES_PER_CYCLE * mod.modulation_frequency_hz:
        raise ValueError(
            "sample rate must exceed ten times the modulation frequency "
            "to keep mixing products out of the signal band"
        )
    if noise_sigma < 0:
        raise ValueError("noise level must be non-negative")
    count = int(round(duration_s * sample_rate_hz))
    times = start_time_s + np.arange(count) / sample_rate_hz
    field_t = _field_samples(field, times)
    deviation = mod.deviation_hz * np.cos(
        2.0 * math.pi * mod.modulation_frequency_hz * times
    )
    upper = odmr_transmission(mod.center_frequency_hz + deviation, field_t, spin)
    lower = odmr_transmission(mod.center_frequency_hz - deviation, field_t, spin)
    even = 0.5 * (np.asarray(upper) + np.asarray(lower))
    odd = 0.5 * (np.asarray(upper) - np.asarray(lower))
    samples = even + response_gain(mod.modulation_frequency_hz, bw) * odd
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        samples = samples + rng.normal(0.0, noise_sigma, count)
    return TimeSeries(
        sample_rate_hz=sample_rate_hz, samples=samples, start_time_s=start_time_s
    )


def _single_pole(samples: np.ndarray, sample_rate_hz: float, tau_s: float) -> np.ndarray:
    gain = 1.0 - math.exp(-1.0 / (sample_rate_hz * tau_s))
    return lfilter([gain], [1.0, gain - 1.0], samples)


def demodulate(
    series: TimeSeries, modulation_frequency_hz: float, config: LockinConfig
) -> TimeSeries:
    """In-phase lock-in output of the series at the modulation frequency.

    Multiplies by 2 cos(2 pi f_mod t + phase) and applies filter_order
    single-pole stages.  Shift the reference phase by pi/2 to read the
    quadrature channel.
    """
    if modulation_frequency_hz <= 0:
        raise ValueError("modulation frequency must be positive")
    if series.sample_rate_hz <= _MIN_SAMPLES_PER_CYCLE * modulation_frequency_hz:
        raise ValueError(
            "sample rate must exceed ten times the modulation frequency "
            "to keep mixing products out of the signal band"
        )
    times = series.times()
    reference = 2.0 * np.cos(
        2.0 * math.pi * modulation_frequency_hz * times + config.reference_phase_rad
    )
    mixed = series.samples * reference
    for _ in range(config.filter_order):
        mixed = _single_pole(mixed, series.sample_rate_hz, config.time_constant_s)
    return TimeSeries(
        sample_rate_hz=series.sample_rate_hz,
        samples=mixed,
        start_time_s=series.start_time_s,
    )


def _steady_mean(
    series: TimeSeries,
    settle_s: float,
    average_s: float,
    modulation_frequency_hz: float,
) -> float:
    """Mean of the settled output over an integer number of mod cycles."""
    cycles = max(1.0, round(average_s * modulation_frequency_hz))
    start = int(round(settle_s * series.sample_rate_hz))
    stop = start + int(round(cycles / modulation_frequency_hz * series.sample_rate_hz))
    if stop > series.samples.size:
        raise ValueError("series too short for the requested settle and average")
    return float(series.samples[start:stop].mean())


def slope_alpha(
    spin: SpinParams,
    bias_field_t: float,
    mod: ModulationConfig,
    config: LockinConfig,
    bw: Optional[BandwidthModel] = None,
    resonance: str = "lower",
    half_window_hz: Optional[float] = None,
    n_points: int = 9,
    sample_rate_hz: float = 1.0e6,
    settle_s: Optional[float] = None,
    average_s: float = 0.05,
) -> SlopeCalibration:
    """Discriminant slope from a carrier scan across one resonance.

    Steps the carrier over f_res + offsets, synthesizes the noiseless
    steady state at each point, and fits a least-squares line through the
    demodulated response; S_LI is approximately alpha (f_c - f_res) inside
    the scan window.  Warns when the residuals exceed 5% of the response
    range, the sign that the window left the linear part of the
    discriminant.
    """
    if n_points < 3:
        raise ValueError("slope fit needs at least three scan points")
    window = spin.resonance_fwhm_hz / 16.0 if half_window_hz is None else half_window_hz
    if not 0.0 < window < spin.resonance_fwhm_hz / 2.0:
        raise ValueError("scan window must stay inside the linear range")
    lower, upper = resonance_frequencies(bias_field_t, spin)
    if resonance == "lower":
        f_res = lower
    elif resonance == "upper":
        f_res = upper
    else:
        raise ValueError("resonance must be 'lower' or 'upper'")
    settle = 15.0 * config.time_constant_s if settle_s is None else settle_s
    duration = settle + average_s + 2.0 / mod.modulation_frequency_hz
    offsets = np.linspace(-window, window, n_points)
    responses = np.empty(n_points)
    for index, offset in enumerate(offsets):
        scan_mod = ModulationConfig(
            center_frequency_hz=f_res + offset,
            deviation_hz=mod.deviation_hz,
            modulation_frequency_hz=mod.modulation_frequency_hz,
        )
        series = synthesize_transmission(
            duration, sample_rate_hz, scan_mod, spin, bias_field_t, bw
        )
        output = demodulate(series, mod.modulation_frequency_hz, config)
        responses[index] = _steady_mean(
            output, settle, average_s, mod.modulation_frequency_hz
        )
    slope, intercept = np.polyfit(offsets, responses, 1)
    residuals = responses - (slope * offsets + intercept)
    span = responses.max() - responses.min()
    if span > 0 and np.max(np.abs(residuals)) > 0.05 * span:
        warnings.warn(
            "scan response deviates from a line by more than 5% of its "
            "range; narrow the window",
            UserWarning,
            stacklevel=2,
        )
    return SlopeCalibration(
        alpha_per_hz=float(slope),
        intercept=float(intercept),
        offsets_hz=offsets,
        responses=responses,
        residual_rms=float(np.sqrt(np.mean(residuals**2))),
    )


def field_from_lockin(
    series: TimeSeries, alpha_per_hz: float, spin: SpinParams
) -> TimeSeries:
    """Field record -S_LI / (alpha (gamma / 2 pi) cos(theta)) from lock-in output."""
    if alpha_per_hz == 0:
        raise ValueError("slope must be non-zero")
    cos_angle = spin.cos_angle
    if abs(cos_angle) < 1e-9:
        raise ValueError("field angle of 90 degrees gives no field response")
    scale = -1.0 / (alpha_per_hz * spin.gyromagnetic_hz_per_t * cos_angle)
    return TimeSeries(
        sample_rate_hz=series.sample_rate_hz,
        samples=scale * series.samples,
        start_time_s=series.start_time_s,
    )


def lowpass_amplitude_response(
    signal_frequency_hz: float, config: LockinConfig
) -> float:
    """Amplitude transfer of the demodulation filter cascade at a signal frequency.

    One stage passes 1 / sqrt(1 + (2 pi f tau)^2); the cascade raises that
    to filter_order.  Used to undo the known droop when reconstructing
    field amplitudes.
    """
    if signal_frequency_hz < 0:
        raise ValueError("signal frequency must be non-negative")
    omega_tau = 2.0 * math.pi * signal_frequency_hz * config.time_constant_s
    return (1.0 / math.sqrt(1.0 + omega_tau**2)) ** config.filter_order
