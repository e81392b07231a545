"""Physical constants (CODATA 2018), SI units.

All modules import from here so that every report and every test uses
the same values bit for bit.
"""

HBAR = 1.054571817e-34  # reduced Planck constant [J s]
K_B = 1.380649e-23      # Boltzmann constant [J / K]
G_NEWTON = 6.67430e-11  # Newtonian gravitational constant [m^3 / (kg s^2)]

CONSTANTS_TABLE = {
    "hbar_j_s": HBAR,
    "k_b_j_per_k": K_B,
    "g_newton_m3_per_kg_s2": G_NEWTON,
}
