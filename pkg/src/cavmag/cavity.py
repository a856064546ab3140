"""Plane-wave response of a two-mirror cavity with an intracavity absorber.

The cavity is modelled as two identical mirrors (intensity reflectivity R,
transmissivity T) enclosing a medium whose single-pass intensity
transmission is L.  As a function of the single-pass phase phi the
transmitted intensity relative to the input is

    I(phi) / I0 = T^2 L / ((1 - R L)^2 + 4 R L sin^2(phi))

which peaks at phi = m pi with value T^2 L / (1 - R L)^2.  The finesse of
the resulting fringe comb is pi sqrt(R L) / (1 - R L), the free spectral
range of a cavity with air gap l and an intracavity slab of index n and
thickness d is c / (2 (l + n d)), and the fringe width is their ratio.

An intracavity loss modulates the peak transmission much more strongly
than a single pass would: the small-signal enhancement factor is
(1 + R L) / (1 - R L), within a percent of 2 F / pi at high finesse.

Birefringence of the slab splits the resonance comb by polarization; the
split between fringe m of the fast axis (index n) and fringe k of the
slow axis (index n + dn) is, exactly,

    nu_m_fast - nu_k_slow = (m - k) / k * nu_k_slow
                            + dn d / (l + (n + dn) d) * nu_m_fast

with nu measured from the transverse-mode (Gouy) offset.  For m = k and
dn much smaller than n this reduces to dn d / (l + n d) * nu0.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constants import SPEED_OF_LIGHT

# Relative birefringence above which the small-splitting formulas start
# to drift away from the exact comb difference.
_SMALL_BIREFRINGENCE_FRACTION = 0.01


@dataclass(frozen=True)
class MirrorSet:
    """Identical mirror pair: intensity reflectivity and transmissivity.

    transmissivity defaults to 1 - reflectivity (lossless mirrors).
    """

    reflectivity: float
    transmissivity: Optional[float] = None

    def __post_init__(self) -> None:
        if not 0.0 < self.reflectivity < 1.0:
            raise ValueError("reflectivity must be in (0, 1)")
        if self.transmissivity is None:
            object.__setattr__(self, "transmissivity", 1.0 - self.reflectivity)
        if not 0.0 < self.transmissivity <= 1.0 - self.reflectivity + 1e-12:
            raise ValueError("transmissivity must be in (0, 1 - reflectivity]")


@dataclass(frozen=True)
class DiamondSample:
    """Intracavity slab: thickness, refractive index, birefringence, loss."""

    thickness_m: float
    refractive_index: float = 2.4
    birefringence: float = 0.0
    baseline_transmission: float = 1.0

    def __post_init__(self) -> None:
        if self.thickness_m <= 0:
            raise ValueError("thickness must be positive")
        if self.refractive_index < 1.0:
            raise ValueError("refractive index must be at least 1")
        if not 0.0 < self.baseline_transmission <= 1.0:
            raise ValueError("baseline transmission must be in (0, 1]")


@dataclass(frozen=True)
class CavityState:
    """Mirrors plus the current intracavity medium.

    single_pass_transmission is the lumped intensity transmission L of one
    pass through everything between the mirrors; it equals the slab's
    baseline value at zero pump and drops as the absorber saturates.
    gouy_offset_hz shifts the whole resonance comb; use
    gouy_frequency_offset() to derive it from the mirror curvature or set
    it directly.
    """

    mirrors: MirrorSet
    air_gap_m: float
    single_pass_transmission: float = 1.0
    diamond: Optional[DiamondSample] = None
    gouy_offset_hz: float = 0.0

    def __post_init__(self) -> None:
        if self.air_gap_m <= 0:
            raise ValueError("air gap must be positive")
        if not 0.0 < self.single_pass_transmission <= 1.0:
            raise ValueError("single-pass transmission must be in (0, 1]")

    @property
    def optical_path_length_m(self) -> float:
        """One-way optical path l + n d (just l without a slab)."""
        if self.diamond is None:
            return self.air_gap_m
        return self.air_gap_m + self.diamond.refractive_index * self.diamond.thickness_m

    @property
    def free_spectral_range_hz(self) -> float:
        return SPEED_OF_LIGHT / (2.0 * self.optical_path_length_m)


def _round_trip_product(reflectivity: float, single_pass: float) -> float:
    product = reflectivity * single_pass
    if not 0.0 < product < 1.0:
        raise ValueError(f"R*L = {product} outside (0, 1)")
    return product


def airy_transmission(
    reflectivity: float, transmissivity: float, single_pass: float, phase_rad
):
    """Relative transmitted intensity at single-pass phase phi.

    Accepts a scalar or array phase and broadcasts over it.
    """
    product = _round_trip_product(reflectivity, single_pass)
    numerator = transmissivity**2 * single_pass
    phase = np.asarray(phase_rad, dtype=float)
    denominator = (1.0 - product) ** 2 + 4.0 * product * np.sin(phase) ** 2
    result = numerator / denominator
    if result.ndim == 0:
        return float(result)
    return result


def peak_transmission(
    reflectivity: float, transmissivity: float, single_pass: float
) -> float:
    """On-resonance relative transmission T^2 L / (1 - R L)^2."""
    product = _round_trip_product(reflectivity, single_pass)
    return transmissivity**2 * single_pass / (1.0 - product) ** 2


def transmission(state: CavityState, phase_rad):
    """Relative transmitted intensity of the cavity at the given phase."""
    return airy_transmission(
        state.mirrors.reflectivity,
        state.mirrors.transmissivity,
        state.single_pass_transmission,
        phase_rad,
    )


def max_transmission(state: CavityState) -> float:
    """On-resonance relative transmission of the cavity."""
    return peak_transmission(
        state.mirrors.reflectivity,
        state.mirrors.transmissivity,
        state.single_pass_transmission,
    )


def phase_at_frequency(state: CavityState, frequency_hz) -> np.ndarray:
    """Single-pass phase of light at the given optical frequency.

    Defined so that the comb frequencies m * FSR + nu_G land exactly on
    transmission maxima: phi = pi (nu - nu_G) / FSR.
    """
    fsr = state.free_spectral_range_hz
    return math.pi * (np.asarray(frequency_hz, dtype=float) - state.gouy_offset_hz) / fsr


def finesse(reflectivity: float, single_pass: float = 1.0) -> float:
    """Fringe finesse pi sqrt(R L) / (1 - R L).

    Diverges as R L approaches 1; raises for R L outside (0, 1).
    """
    product = _round_trip_product(reflectivity, single_pass)
    return math.pi * math.sqrt(product) / (1.0 - product)


def _finesse_of_product(product: float) -> float:
    return math.pi * math.sqrt(product) / (1.0 - product)


def _bisect_increasing(fn, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Root of an increasing function on [lo, hi] by plain bisection."""
    f_lo = fn(lo)
    f_hi = fn(hi)
    if f_lo > 0 or f_hi < 0:
        raise ValueError("root not bracketed")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if fn(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _product_from_finesse(target_finesse: float) -> float:
    """Round-trip product R L that yields the target finesse."""
    if target_finesse <= 0:
        raise ValueError("finesse must be positive")
    return _bisect_increasing(
        lambda x: _finesse_of_product(x) - target_finesse, 1e-15, 1.0 - 1e-15
    )


def reflectivity_from_finesse(target_finesse: float, single_pass: float = 1.0) -> float:
    """Mirror reflectivity that produces the given finesse at fixed loss L.

    Raises when no reflectivity in (0, 1) can reach the target.
    """
    if not 0.0 < single_pass <= 1.0:
        raise ValueError("single-pass transmission must be in (0, 1]")
    product = _product_from_finesse(target_finesse)
    reflectivity = product / single_pass
    if not 0.0 < reflectivity < 1.0:
        raise ValueError(
            f"finesse {target_finesse} unattainable with single-pass {single_pass}"
        )
    return reflectivity


def loss_from_finesse(target_finesse: float, reflectivity: float) -> float:
    """Single-pass transmission L that produces the given finesse at fixed R.

    Raises when no L in (0, 1] can reach the target (the lossless cavity
    already falls short).
    """
    if not 0.0 < reflectivity < 1.0:
        raise ValueError("reflectivity must be in (0, 1)")
    product = _product_from_finesse(target_finesse)
    single_pass = product / reflectivity
    if not 0.0 < single_pass <= 1.0:
        raise ValueError(
            f"finesse {target_finesse} unattainable with reflectivity {reflectivity}"
        )
    return single_pass


def free_spectral_range(
    air_gap_m: float, refractive_index: float = 1.0, thickness_m: float = 0.0
) -> float:
    """Comb spacing c / (2 (l + n d)) of a cavity with an intracavity slab."""
    if air_gap_m <= 0:
        raise ValueError("air gap must be positive")
    if thickness_m < 0:
        raise ValueError("thickness must be non-negative")
    if refractive_index < 1.0 and thickness_m > 0:
        raise ValueError("refractive index must be at least 1")
    return SPEED_OF_LIGHT / (2.0 * (air_gap_m + refractive_index * thickness_m))


def resonance_fwhm(free_spectral_range_hz: float, cavity_finesse: float) -> float:
    """Full width at half maximum of one fringe, FSR / finesse."""
    if free_spectral_range_hz <= 0 or cavity_finesse <= 0:
        raise ValueError("free spectral range and finesse must be positive")
    return free_spectral_range_hz / cavity_finesse


def contrast_enhancement(reflectivity: float, single_pass: float = 1.0) -> float:
    """Small-loss contrast gain (1 + R L) / (1 - R L) of the peak transmission.

    A fractional change dL/L of the single-pass transmission changes the
    on-resonance transmission by this factor times dL/L.  At high finesse
    the factor approaches 2 F / pi.
    """
    product = _round_trip_product(reflectivity, single_pass)
    return (1.0 + product) / (1.0 - product)


def gouy_frequency_offset(
    mirror_spacing_m: float, mirror_curvature_m: float, free_spectral_range_hz: float
) -> float:
    """Comb offset FSR * arccos(1 - l / r) / pi of the symmetric resonator.

    Equals FSR / 2 for the confocal spacing l = r.
    """
    if mirror_spacing_m <= 0 or mirror_spacing_m >= 2.0 * mirror_curvature_m:
        raise ValueError("spacing outside stability range (0, 2 r)")
    fraction = math.acos(1.0 - mirror_spacing_m / mirror_curvature_m) / math.pi
    return free_spectral_range_hz * fraction


def _axis_index(state: CavityState, axis: str) -> float:
    if state.diamond is None:
        raise ValueError("polarization combs require an intracavity slab")
    if axis == "fast":
        return state.diamond.refractive_index
    if axis == "slow":
        return state.diamond.refractive_index + state.diamond.birefringence
    raise ValueError("axis must be 'fast' or 'slow'")


def resonance_comb(
    state: CavityState, m_lo: int, m_hi: int, axis: str = "fast"
) -> np.ndarray:
    """Resonance frequencies nu_m = m FSR + nu_G for m in [m_lo, m_hi].

    With a birefringent slab the fast axis sees index n and the slow axis
    n + dn; without a slab the axis argument is ignored.
    """
    if m_lo < 1 or m_hi < m_lo:
        raise ValueError("fringe orders must satisfy 1 <= m_lo <= m_hi")
    if state.diamond is None:
        fsr = free_spectral_range(state.air_gap_m)
    else:
        fsr = free_spectral_range(
            state.air_gap_m, _axis_index(state, axis), state.diamond.thickness_m
        )
    orders = np.arange(m_lo, m_hi + 1, dtype=float)
    return orders * fsr + state.gouy_offset_hz


def birefringent_pair_difference(state: CavityState, m: int, k: int) -> float:
    """Exact splitting between fast-axis fringe m and slow-axis fringe k.

    Evaluates the two-term decomposition

        (m - k) / k * nu_k_slow + dn d / (l + (n + dn) d) * nu_m_fast

    on the Gouy-free comb, which is algebraically identical to the direct
    comb difference (the Gouy offset cancels between the two combs).
    """
    if m < 1 or k < 1:
        raise ValueError("fringe orders must be positive")
    diamond = state.diamond
    if diamond is None:
        raise ValueError("birefringent splitting requires an intracavity slab")
    thickness = diamond.thickness_m
    dn = diamond.birefringence
    fast = m * free_spectral_range(state.air_gap_m, diamond.refractive_index, thickness)
    slow = k * free_spectral_range(
        state.air_gap_m, diamond.refractive_index + dn, thickness
    )
    slow_path = state.air_gap_m + (diamond.refractive_index + dn) * thickness
    return (m - k) / k * slow + dn * thickness / slow_path * fast


def _warn_large_birefringence(birefringence: float, refractive_index: float) -> None:
    if abs(birefringence) > _SMALL_BIREFRINGENCE_FRACTION * refractive_index:
        warnings.warn(
            "birefringence exceeds 1% of the refractive index; the small-"
            "splitting approximation degrades",
            UserWarning,
            stacklevel=3,
        )


def birefringent_splitting(
    birefringence: float,
    thickness_m: float,
    air_gap_m: float,
    refractive_index: float,
    optical_frequency_hz: float,
) -> float:
    """Polarization splitting dn d / (l + n d) * nu0 for small birefringence."""
    if thickness_m <= 0 or air_gap_m <= 0:
        raise ValueError("thickness and air gap must be positive")
    if optical_frequency_hz <= 0:
        raise ValueError("optical frequency must be positive")
    _warn_large_birefringence(birefringence, refractive_index)
    path = air_gap_m + refractive_index * thickness_m
    return birefringence * thickness_m / path * optical_frequency_hz


def birefringence_from_splitting(
    splitting_hz: float,
    thickness_m: float,
    air_gap_m: float,
    refractive_index: float,
    optical_frequency_hz: float,
) -> float:
    """Birefringence dn inferred from a measured polarization splitting."""
    if thickness_m <= 0 or air_gap_m <= 0:
        raise ValueError("thickness and air gap must be positive")
    if optical_frequency_hz <= 0:
        raise ValueError("optical frequency must be positive")
    path = air_gap_m + refractive_index * thickness_m
    birefringence = splitting_hz * path / (thickness_m * optical_frequency_hz)
    _warn_large_birefringence(birefringence, refractive_index)
    return birefringence


def phase_difference(birefringence: float, thickness_m: float, wavelength_m: float) -> float:
    """Single-pass polarization phase difference 2 pi |dn| d / lambda, radians."""
    if thickness_m <= 0:
        raise ValueError("thickness must be positive")
    if wavelength_m <= 0:
        raise ValueError("wavelength must be positive")
    return 2.0 * math.pi * abs(birefringence) * thickness_m / wavelength_m
