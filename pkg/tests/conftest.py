import math

from mirrorcat import ExperimentParams
from mirrorcat.constants import HBAR


def params_with_kappa(
    kappa: float,
    omega_m: float = 1e4,
    mass_m: float = 1e-6,
    length_l: float = 1e-5,
    gamma_a: float = 0.0,
    gamma_m: float = 1e-2,
    theta_env: float = 0.1,
    t_mirror: float = 0.1,
    n_fock: int = 1,
    density_d: float = 1e3,
) -> ExperimentParams:
    """Parameter set whose coupling ratio comes out at the requested kappa.

    Back-solves omega_0 = kappa * omega_m * L / x_zp; the achieved kappa
    matches the request to a few ulp.
    """
    x_zp = math.sqrt(HBAR / (2.0 * mass_m * omega_m))
    omega_0 = kappa * omega_m * length_l / x_zp
    return ExperimentParams(
        omega_0=omega_0,
        omega_m=omega_m,
        length_l=length_l,
        mass_m=mass_m,
        gamma_a=gamma_a,
        gamma_m=gamma_m,
        theta_env=theta_env,
        t_mirror=t_mirror,
        n_fock=n_fock,
        density_d=density_d,
        freq_convention="plain",
    )
