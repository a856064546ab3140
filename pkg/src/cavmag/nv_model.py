"""Rate model of pump-dependent singlet absorption in an NV ensemble.

A green pump drives ground-state NV centers at rate

    Gamma_P = sigma_P I_P / (h c / lambda_P)

which competes with the excited-state decay A21 and the singlet decay
Gamma_s.  Two intensity scales follow: the rate at which pumping matches
the triplet decay,

    I_sat_triplet = (A21 / sigma_P) (h c / lambda_P)

and the much lower intensity at which the slow singlet decay bottlenecks
the cycle,

    I_sat_singlet = (Gamma_s / A21) I_sat_triplet.

The steady-state singlet population is modelled as p_s = I / (I + I_sat),
giving a saturable single-pass infrared absorbance

    A(I) = sigma_IR n_NV d p_s

and a pump-power dependent single-pass transmission

    L(P) = L0 - A0 P / (P + P_sat).
"""

from dataclasses import dataclass

from . import cavity
from .constants import DENSITY_PER_PPM, photon_energy


@dataclass(frozen=True)
class PumpNvParams:
    """Pump interaction and decay rates of the ensemble."""

    pump_cross_section_m2: float = 3e-21
    pump_wavelength_m: float = 532e-9
    triplet_decay_per_s: float = 1.0 / 12e-9
    singlet_decay_per_s: float = 1.0 / 200e-9

    def __post_init__(self) -> None:
        if self.pump_cross_section_m2 <= 0:
            raise ValueError("pump cross section must be positive")
        if self.pump_wavelength_m <= 0:
            raise ValueError("pump wavelength must be positive")
        if self.triplet_decay_per_s <= 0 or self.singlet_decay_per_s <= 0:
            raise ValueError("decay rates must be positive")


@dataclass(frozen=True)
class SaturationModel:
    """Empirical pump saturation of the single-pass transmission."""

    absorbance_amplitude: float
    saturation_power_w: float
    baseline_transmission: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.absorbance_amplitude < 1.0:
            raise ValueError("absorbance amplitude must be in [0, 1)")
        if self.saturation_power_w <= 0:
            raise ValueError("saturation power must be positive")
        if not 0.0 < self.baseline_transmission <= 1.0:
            raise ValueError("baseline transmission must be in (0, 1]")
        if self.absorbance_amplitude >= self.baseline_transmission:
            raise ValueError("fully saturated transmission would be non-positive")


def pump_rate(intensity_w_m2: float, params: PumpNvParams) -> float:
    """Optical pumping rate sigma_P I / (h c / lambda_P), per second."""
    if intensity_w_m2 < 0:
        raise ValueError("intensity must be non-negative")
    return (
        params.pump_cross_section_m2
        * intensity_w_m2
        / photon_energy(params.pump_wavelength_m)
    )


def sat_intensity_triplet(params: PumpNvParams) -> float:
    """Intensity at which pumping matches the excited-state decay, W / m^2."""
    return (
        params.triplet_decay_per_s
        / params.pump_cross_section_m2
        * photon_energy(params.pump_wavelength_m)
    )


def sat_intensity_singlet(params: PumpNvParams) -> float:
    """Intensity at which the slow singlet decay saturates the cycle, W / m^2.

    Equals (Gamma_s / A21) times the triplet saturation intensity.
    """
    return (
        params.singlet_decay_per_s / params.triplet_decay_per_s
    ) * sat_intensity_triplet(params)


def singlet_population(intensity_w_m2: float, sat_intensity_w_m2: float) -> float:
    """Steady-state singlet fraction I / (I + I_sat)."""
    if intensity_w_m2 < 0:
        raise ValueError("intensity must be non-negative")
    if sat_intensity_w_m2 <= 0:
        raise ValueError("saturation intensity must be positive")
    return intensity_w_m2 / (intensity_w_m2 + sat_intensity_w_m2)


def absorbance(
    ir_cross_section_m2: float,
    nv_density_per_m3: float,
    thickness_m: float,
    singlet_fraction: float,
) -> float:
    """Single-pass infrared absorbance sigma_IR n_NV d p_s."""
    if ir_cross_section_m2 < 0 or nv_density_per_m3 < 0 or thickness_m < 0:
        raise ValueError("cross section, density and thickness must be non-negative")
    if not 0.0 <= singlet_fraction <= 1.0:
        raise ValueError("singlet fraction must be in [0, 1]")
    return ir_cross_section_m2 * nv_density_per_m3 * thickness_m * singlet_fraction


def single_pass_transmission(power_w: float, model: SaturationModel) -> float:
    """Pump-dependent single-pass transmission L0 - A0 P / (P + P_sat)."""
    if power_w < 0:
        raise ValueError("pump power must be non-negative")
    saturation = power_w / (power_w + model.saturation_power_w)
    return model.baseline_transmission - model.absorbance_amplitude * saturation


def transmission_vs_pump(
    power_w: float, model: SaturationModel, mirrors: cavity.MirrorSet
) -> float:
    """On-resonance cavity transmission at pump power P, relative to P = 0."""
    pumped = cavity.peak_transmission(
        mirrors.reflectivity, mirrors.transmissivity, single_pass_transmission(power_w, model)
    )
    unpumped = cavity.peak_transmission(
        mirrors.reflectivity, mirrors.transmissivity, model.baseline_transmission
    )
    return pumped / unpumped


def nv_density(
    absorbance_amplitude: float, ir_cross_section_m2: float, thickness_m: float
) -> float:
    """Ensemble density A0 / (sigma_IR d) implied by the saturable absorbance.

    Treats the saturable absorbance amplitude as the fully saturated
    singlet absorbance (p_s = 1), so the result is an estimate with the
    cross-section uncertainty attached.
    """
    if absorbance_amplitude < 0:
        raise ValueError("absorbance amplitude must be non-negative")
    if ir_cross_section_m2 <= 0 or thickness_m <= 0:
        raise ValueError("cross section and thickness must be positive")
    return absorbance_amplitude / (ir_cross_section_m2 * thickness_m)


def nv_density_ppm(density_per_m3: float) -> float:
    """Density expressed in ppm of the diamond carbon density."""
    if density_per_m3 < 0:
        raise ValueError("density must be non-negative")
    return density_per_m3 / DENSITY_PER_PPM


def saturation_discrepancy_ratio(
    observed_sat_intensity_w_m2: float, params: PumpNvParams
) -> float:
    """Rate-model singlet saturation intensity over the observed one.

    The observed scale is the on-axis intensity at the measured saturation
    power; a ratio well above 1 quantifies how much earlier the ensemble
    saturates than the three-level rate model predicts.
    """
    if observed_sat_intensity_w_m2 <= 0:
        raise ValueError("observed saturation intensity must be positive")
    return sat_intensity_singlet(params) / observed_sat_intensity_w_m2
