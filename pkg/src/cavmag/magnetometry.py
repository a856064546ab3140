"""Spin resonances, ODMR lineshape and sensitivity limits of the ensemble.

With all four NV orientations at the same angle theta to the bias field
(a [100]-cut sample), the m_s = +-1 ground-state sublevels shift by

    df(m_s) = m_s (gamma / 2 pi) B cos(theta)

so the two microwave resonances sit at D +- (gamma / 2 pi) B cos(theta)
and the field follows from their splitting.  The infrared transmission
versus microwave frequency is modelled as a pair of Lorentzian dips of
shared contrast C and width dnu_mr.

Sensitivity limits:

    photon shot noise   dB = dnu_mr / ((gamma / 2 pi) C sqrt(Phi) cos(theta))
    spin projection     dB = 1 / ((gamma / 2 pi) sqrt(N T2)),  T2 = 1 / (pi dnu_mr)

and the temperature cross-sensitivity of a splitting-free measurement is
(gamma / 2 pi) cos(theta) / |dD/dT| kelvin per tesla.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

# Zeeman shifts are treated to first order only; warn well before the
# ground-state spin Hamiltonian would need exact diagonalization.
_FIELD_WARN_T = 0.02
_FIELD_LIMIT_T = 0.2


@dataclass(frozen=True)
class SpinParams:
    """Ground-state spin constants and ODMR line parameters."""

    zero_field_splitting_hz: float = 2.87e9
    gyromagnetic_hz_per_t: float = 2.80e10
    field_angle_rad: float = math.radians(54.7)
    d_shift_hz_per_k: float = -7.4e4
    resonance_fwhm_hz: float = 9.0e6
    contrast: float = 0.071

    def __post_init__(self) -> None:
        if self.zero_field_splitting_hz <= 0:
            raise ValueError("zero-field splitting must be positive")
        if self.gyromagnetic_hz_per_t <= 0:
            raise ValueError("gyromagnetic ratio must be positive")
        if self.resonance_fwhm_hz <= 0:
            raise ValueError("resonance width must be positive")
        if not 0.0 < self.contrast < 1.0:
            raise ValueError("contrast must be in (0, 1)")

    @property
    def cos_angle(self) -> float:
        return math.cos(self.field_angle_rad)


@dataclass(frozen=True)
class OdmrSpectrum:
    """Normalized infrared transmission versus microwave frequency."""

    frequencies_hz: np.ndarray
    transmission: np.ndarray

    def __post_init__(self) -> None:
        freqs = np.asarray(self.frequencies_hz, dtype=float)
        trans = np.asarray(self.transmission, dtype=float)
        if freqs.shape != trans.shape or freqs.ndim != 1:
            raise ValueError("frequency and transmission arrays must match 1-d")
        if np.any(np.diff(freqs) <= 0):
            raise ValueError("frequencies must be strictly increasing")
        if np.any(trans <= 0) or np.any(trans > 1.0 + 1e-12):
            raise ValueError("transmission must be in (0, 1]")
        freqs.setflags(write=False)
        trans.setflags(write=False)
        object.__setattr__(self, "frequencies_hz", freqs)
        object.__setattr__(self, "transmission", trans)


def _check_field(field_t: float) -> None:
    if field_t < 0:
        raise ValueError("field magnitude must be non-negative")
    if field_t >= _FIELD_LIMIT_T:
        raise ValueError(
            f"field {field_t} T is beyond the first-order Zeeman treatment"
        )
    if field_t > _FIELD_WARN_T:
        warnings.warn(
            f"field {field_t} T is large for a first-order Zeeman treatment",
            UserWarning,
            stacklevel=3,
        )


def zeeman_shift(m_s: int, field_t: float, params: SpinParams) -> float:
    """First-order shift m_s (gamma / 2 pi) B cos(theta) of sublevel m_s, Hz."""
    if m_s not in (-1, 0, 1):
        raise ValueError("m_s must be -1, 0 or +1")
    _check_field(field_t)
    return m_s * params.gyromagnetic_hz_per_t * field_t * params.cos_angle


def resonance_frequencies(field_t: float, params: SpinParams) -> Tuple[float, float]:
    """Lower and upper microwave resonance, D -+ (gamma / 2 pi) B cos(theta)."""
    shift = zeeman_shift(+1, field_t, params)
    d = params.zero_field_splitting_hz
    return d - shift, d + shift


def field_from_splitting(
    f_upper_hz: float, f_lower_hz: float, params: SpinParams
) -> float:
    """Field magnitude (f_upper - f_lower) / (2 (gamma / 2 pi) cos(theta))."""
    if f_upper_hz < f_lower_hz:
        raise ValueError("upper resonance must not be below the lower one")
    cos_angle = params.cos_angle
    # cos(pi/2) is a few 1e-17 in floating point, never exactly zero.
    if abs(cos_angle) < 1e-9:
        raise ValueError("field angle of 90 degrees leaves no splitting to invert")
    return (f_upper_hz - f_lower_hz) / (2.0 * params.gyromagnetic_hz_per_t * cos_angle)


def _resolve_pair(value, default: float) -> Tuple[float, float]:
    if value is None:
        return default, default
    if isinstance(value, (int, float, np.integer, np.floating)):
        return float(value), float(value)
    pair = tuple(float(v) for v in value)
    if len(pair) != 2:
        raise ValueError("per-resonance overrides need exactly two values")
    return pair


def odmr_transmission(
    frequency_hz,
    field_t,
    params: SpinParams,
    contrast: Union[None, float, Sequence[float]] = None,
    fwhm_hz: Union[None, float, Sequence[float]] = None,
):
    """Normalized transmission 1 - sum of two Lorentzian dips.

    Broadcasts over microwave frequency and field arrays.  contrast and
    fwhm_hz default to the shared values in params; a two-element sequence
    overrides the lower and upper resonance separately.
    """
    contrasts = _resolve_pair(contrast, params.contrast)
    widths = _resolve_pair(fwhm_hz, params.resonance_fwhm_hz)
    if min(contrasts) <= 0 or sum(contrasts) >= 1.0:
        raise ValueError("contrasts must be positive and sum below 1")
    if min(widths) <= 0:
        raise ValueError("widths must be positive")
    frequency = np.asarray(frequency_hz, dtype=float)
    field = np.asarray(field_t, dtype=float)
    shift = params.gyromagnetic_hz_per_t * field * params.cos_angle
    d = params.zero_field_splitting_hz
    result = np.ones(np.broadcast(frequency, field).shape, dtype=float)
    for depth, width, center in (
        (contrasts[0], widths[0], d - shift),
        (contrasts[1], widths[1], d + shift),
    ):
        half_sq = (width / 2.0) ** 2
        result = result - depth * half_sq / ((frequency - center) ** 2 + half_sq)
    if result.ndim == 0:
        return float(result)
    return result


def odmr_spectrum(
    frequencies_hz: np.ndarray,
    field_t: float,
    params: SpinParams,
    contrast: Union[None, float, Sequence[float]] = None,
    fwhm_hz: Union[None, float, Sequence[float]] = None,
) -> OdmrSpectrum:
    """ODMR spectrum on a frequency grid at a static bias field.

    Warns when the two resonances are closer than their width, where the
    dips overlap and the splitting readout degrades.
    """
    _check_field(field_t)
    f_lower, f_upper = resonance_frequencies(field_t, params)
    widths = _resolve_pair(fwhm_hz, params.resonance_fwhm_hz)
    if f_upper - f_lower < max(widths):
        warnings.warn(
            "resonances closer than their width; dips overlap",
            UserWarning,
            stacklevel=2,
        )
    values = odmr_transmission(frequencies_hz, field_t, params, contrast, fwhm_hz)
    return OdmrSpectrum(frequencies_hz=np.asarray(frequencies_hz, dtype=float), transmission=values)


def shot_noise_sensitivity(
    fwhm_hz: float,
    contrast: float,
    photon_rate_per_s: float,
    params: SpinParams,
) -> float:
    """Photon-shot-noise field sensitivity, tesla per sqrt(hertz).

    dnu_mr / ((gamma / 2 pi) C sqrt(Phi) cos(theta)) for a detected photon
    rate Phi.
    """
    if fwhm_hz <= 0 or contrast <= 0 or photon_rate_per_s <= 0:
        raise ValueError("width, contrast and photon rate must be positive")
    cos_angle = params.cos_angle
    if abs(cos_angle) < 1e-9:
        raise ValueError("field angle of 90 degrees gives no field response")
    return fwhm_hz / (
        params.gyromagnetic_hz_per_t
        * contrast
        * math.sqrt(photon_rate_per_s)
        * cos_angle
    )


def dephasing_time_s(fwhm_hz: float) -> float:
    """Ensemble dephasing time T2 = 1 / (pi dnu_mr) from the ODMR width."""
    if fwhm_hz <= 0:
        raise ValueError("width must be positive")
    return 1.0 / (math.pi * fwhm_hz)


def projection_noise_sensitivity(
    nv_count: float,
    params: SpinParams,
    fwhm_hz: Optional[float] = None,
    t2_s: Optional[float] = None,
) -> float:
    """Spin-projection-noise limit 1 / ((gamma / 2 pi) sqrt(N T2)), T/sqrt(Hz).

    The coherence time defaults to T2 = 1 / (pi dnu_mr) from the ODMR
    width; pass t2_s to use an independently measured value.
    """
    if nv_count <= 0:
        raise ValueError("spin count must be positive")
    if t2_s is None:
        t2_s = dephasing_time_s(params.resonance_fwhm_hz if fwhm_hz is None else fwhm_hz)
    if t2_s <= 0:
        raise ValueError("coherence time must be positive")
    return 1.0 / (params.gyromagnetic_hz_per_t * math.sqrt(nv_count * t2_s))


def temperature_cross_sensitivity(params: SpinParams) -> float:
    """Temperature change mimicking a unit field change, kelvin per tesla.

    A single-resonance readout cannot distinguish a Zeeman shift from a
    thermal shift of D; the conversion factor is
    (gamma / 2 pi) cos(theta) / |dD/dT|.
    """
    if params.d_shift_hz_per_k == 0:
        raise ValueError("thermal shift of the zero-field splitting is zero")
    return (
        params.gyromagnetic_hz_per_t
        * params.cos_angle
        / abs(params.d_shift_hz_per_k)
    )
