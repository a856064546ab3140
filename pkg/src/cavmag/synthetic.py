"""Deterministic synthetic data sets for tests, demos and CLI fixtures."""

from typing import Optional, Tuple

import numpy as np

from . import nv_model
from .cavity import MirrorSet
from .lockin import TimeSeries

DEFAULT_SEED = 1


def saturation_curve_samples(
    model: nv_model.SaturationModel,
    mirrors: MirrorSet,
    powers_w: Optional[np.ndarray] = None,
    noise_sigma: float = 0.01,
    seed: int = DEFAULT_SEED,
) -> Tuple[np.ndarray, np.ndarray]:
    """Noisy normalized-transmission curve versus pump power.

    Defaults to twelve points spanning 0 to 2 W with Gaussian noise of one
    percent of the unpumped transmission, generated reproducibly from the
    seed.
    """
    if powers_w is None:
        powers_w = np.linspace(0.0, 2.0, 12)
    powers = np.asarray(powers_w, dtype=float)
    curve = np.array(
        [nv_model.transmission_vs_pump(power, model, mirrors) for power in powers]
    )
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        curve = curve + rng.normal(0.0, noise_sigma, curve.size)
    return powers, curve


def white_noise_series(
    sigma: float,
    sample_rate_hz: float = 1.0e4,
    duration_s: float = 10.0,
    seed: int = DEFAULT_SEED,
) -> TimeSeries:
    """Gaussian white noise record with known standard deviation."""
    if sigma < 0:
        raise ValueError("noise level must be non-negative")
    count = int(round(duration_s * sample_rate_hz))
    rng = np.random.default_rng(seed)
    return TimeSeries(
        sample_rate_hz=sample_rate_hz, samples=rng.normal(0.0, sigma, count)
    )
