"""Physical constants (CODATA 2018 / exact SI values)."""

ELEMENTARY_CHARGE = 1.602176634e-19   # C (exact)
PLANCK = 6.62607015e-34               # J s (exact)
SPEED_OF_LIGHT = 299792458.0          # m/s (exact)
BOLTZMANN = 1.380649e-23              # J/K (exact)


def photon_energy(wavelength_m: float) -> float:
    """Photon energy h*nu in joules for a vacuum wavelength in metres."""
    if wavelength_m <= 0:
        raise ValueError("wavelength must be positive")
    return PLANCK * SPEED_OF_LIGHT / wavelength_m
