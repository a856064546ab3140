"""Amplitude spectral density estimation and band statistics.

The estimator is Welch's method: the record is split into overlapping
segments, each windowed and periodogram-averaged with density scaling, so
white noise of variance sigma^2 sampled at f_s gives a flat one-sided
amplitude spectral density sigma sqrt(2 / f_s).  Segment averaging uses a
fixed summation order, making repeat runs bit-identical.

Band reductions: noise_floor takes the median density inside a band
(robust against narrow peaks riding on the floor); rms_in_band integrates
the power spectral density over a band, so a flat density a across a
bandwidth W gives a sqrt(W) and disjoint bands add in quadrature.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.signal import welch

from .lockin import TimeSeries

_WINDOWS = {"hann": "hann", "rect": "boxcar"}


@dataclass(frozen=True)
class Spectrum:
    """One-sided amplitude spectral density on a uniform frequency grid."""

    frequencies_hz: np.ndarray
    asd: np.ndarray

    def __post_init__(self) -> None:
        freqs = np.array(self.frequencies_hz, dtype=float)
        density = np.array(self.asd, dtype=float)
        if freqs.shape != density.shape or freqs.ndim != 1:
            raise ValueError("frequency and density arrays must match 1-d")
        if freqs.size and (np.any(np.diff(freqs) <= 0) or freqs[0] < 0):
            raise ValueError("frequencies must be non-negative and strictly increasing")
        if np.any(density < 0):
            raise ValueError("amplitude spectral density must be non-negative")
        freqs.setflags(write=False)
        density.setflags(write=False)
        object.__setattr__(self, "frequencies_hz", freqs)
        object.__setattr__(self, "asd", density)

    @property
    def bin_width_hz(self) -> float:
        if self.frequencies_hz.size < 2:
            raise ValueError("spectrum needs at least two bins")
        return float(self.frequencies_hz[1] - self.frequencies_hz[0])


def psd_welch(
    series: TimeSeries,
    segment_length: int | None = None,
    overlap_fraction: float = 0.5,
    window: str = "hann",
) -> Spectrum:
    """One-sided amplitude spectral density of a record by Welch averaging.

    segment_length defaults to the value that yields eight segments at the
    given overlap.  Raises when fewer than two segments fit.
    """
    if window not in _WINDOWS:
        raise ValueError(f"window must be one of {sorted(_WINDOWS)}")
    if not 0.0 <= overlap_fraction < 1.0:
        raise ValueError("overlap fraction must be in [0, 1)")
    count = series.samples.size
    if segment_length is None:
        # n segments of length m with overlap fraction v span
        # m (n (1 - v) + v) samples; solve for m at n = 8.
        segment_length = int(count / (8.0 * (1.0 - overlap_fraction) + overlap_fraction))
    if segment_length < 2:
        raise ValueError("record too short: segments would be degenerate")
    overlap = int(overlap_fraction * segment_length)
    step = segment_length - overlap
    n_segments = 1 + (count - segment_length) // step if count >= segment_length else 0
    if n_segments < 2:
        raise ValueError("record too short: fewer than two segments fit")
    frequencies, psd = welch(
        series.samples,
        fs=series.sample_rate_hz,
        window=_WINDOWS[window],
        nperseg=segment_length,
        noverlap=overlap,
        detrend="constant",
        scaling="density",
        return_onesided=True,
    )
    return Spectrum(frequencies_hz=frequencies, asd=np.sqrt(psd))


def _band_indices(spectrum: Spectrum, band: Tuple[float, float]) -> np.ndarray:
    lo, hi = band
    if hi <= lo:
        raise ValueError("band upper edge must exceed the lower edge")
    mask = (spectrum.frequencies_hz >= lo) & (spectrum.frequencies_hz < hi)
    if not np.any(mask):
        raise ValueError(f"no spectrum bins inside band [{lo}, {hi}) Hz")
    return mask


def noise_floor(spectrum: Spectrum, band: Tuple[float, float]) -> float:
    """Median amplitude spectral density inside [lo, hi).

    The median ignores narrow peaks that ride on an otherwise flat floor.
    """
    return float(np.median(spectrum.asd[_band_indices(spectrum, band)]))


def rms_in_band(spectrum: Spectrum, band: Tuple[float, float]) -> float:
    """Root of the integrated power spectral density over [lo, hi).

    Bins are counted with the uniform grid width, so a flat density a over
    a bandwidth W gives a sqrt(W), and disjoint bands add in quadrature.
    """
    mask = _band_indices(spectrum, band)
    return float(np.sqrt(np.sum(spectrum.asd[mask] ** 2) * spectrum.bin_width_hz))
