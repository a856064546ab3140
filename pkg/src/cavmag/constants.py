"""Shared physical constants.

Every module takes h and c from here so that derived quantities agree
bit for bit across the package.  Values are the CODATA exact ones as
shipped by scipy.
"""

import scipy.constants as _codata

PLANCK_H = _codata.h  # J s, 6.62607015e-34 exact
SPEED_OF_LIGHT = _codata.c  # m / s, 299792458 exact
HC = PLANCK_H * SPEED_OF_LIGHT  # J m

# Carbon number density of diamond, 1.76e23 atoms / cm^3.  Defect
# concentrations quoted in ppm are referenced to this value, so
# 1 ppm corresponds to 1.76e23 defects per cubic metre.
DIAMOND_CARBON_DENSITY_PER_M3 = 1.76e29
DENSITY_PER_PPM = DIAMOND_CARBON_DENSITY_PER_M3 * 1e-6


def photon_energy(wavelength_m: float) -> float:
    """Energy h c / lambda of a single photon, in joules."""
    if wavelength_m <= 0:
        raise ValueError("wavelength must be positive")
    return HC / wavelength_m
