"""Physical constants (SI, exact since the 2019 redefinition; CODATA 2018)."""

import math

PLANCK = 6.62607015e-34  # J s
HBAR = PLANCK / (2.0 * math.pi)  # J s
BOLTZMANN = 1.380649e-23  # J / K

TWO_PI = 2.0 * math.pi

# gyromagnetic ratio of the Kittel mode, gamma / 2pi = 2.8 MHz / Oe
GYROMAGNETIC_HZ_PER_OE = 2.8e6

DEFAULT_N_SPINS = 2.8e17
DEFAULT_KERR = TWO_PI * 8e-10  # rad/s
