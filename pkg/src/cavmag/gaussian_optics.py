"""TEM00 mode geometry and intensity scales of a symmetric two-mirror resonator.

The fundamental Gaussian mode of a symmetric cavity with mirror spacing l
and mirror radius of curvature r has Rayleigh range

    z0 = sqrt(l (2 r - l)) / 2

and the waist follows from w0^2 = lambda z0 / pi.  A confined mode exists
only for 0 < l < 2 r.
"""

import math
from dataclasses import dataclass

from .constants import HC


class UnstableResonatorError(ValueError):
    """Mirror spacing outside the range that supports a confined mode."""


@dataclass(frozen=True)
class CavityGeometry:
    """Geometric description of a symmetric two-mirror cavity."""

    mirror_spacing_m: float
    mirror_curvature_m: float
    wavelength_m: float

    def __post_init__(self) -> None:
        if self.mirror_curvature_m <= 0:
            raise ValueError("mirror curvature must be positive")
        if self.wavelength_m <= 0:
            raise ValueError("wavelength must be positive")


@dataclass(frozen=True)
class ModeGeometry:
    """Waist and Rayleigh range of the fundamental transverse mode."""

    waist_m: float
    rayleigh_range_m: float


def mode_geometry(geometry: CavityGeometry) -> ModeGeometry:
    """Waist and Rayleigh range of the TEM00 mode of a symmetric cavity.

    Raises UnstableResonatorError when the spacing violates 0 < l < 2 r.
    """
    spacing = geometry.mirror_spacing_m
    curvature = geometry.mirror_curvature_m
    if spacing <= 0 or spacing >= 2.0 * curvature:
        raise UnstableResonatorError(
            f"spacing {spacing} m outside stability range (0, {2.0 * curvature}) m"
        )
    rayleigh = math.sqrt(spacing * (2.0 * curvature - spacing)) / 2.0
    waist = math.sqrt(geometry.wavelength_m * rayleigh / math.pi)
    return ModeGeometry(waist_m=waist, rayleigh_range_m=rayleigh)


def peak_intensity(power_w: float, waist_m: float) -> float:
    """On-axis intensity 2 P / (pi w0^2) of a Gaussian beam, in W / m^2."""
    if waist_m <= 0:
        raise ValueError("waist must be positive")
    if power_w < 0:
        raise ValueError("power must be non-negative")
    return 2.0 * power_w / (math.pi * waist_m**2)


def photon_rate(power_w: float, wavelength_m: float) -> float:
    """Photon flux P lambda / (h c) of a beam, in photons per second."""
    if wavelength_m <= 0:
        raise ValueError("wavelength must be positive")
    if power_w < 0:
        raise ValueError("power must be non-negative")
    return power_w * wavelength_m / HC
