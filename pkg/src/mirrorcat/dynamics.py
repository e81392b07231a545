"""Closed-form evolution of the coupled cavity-field / movable-mirror system.

The field photon number is conserved, so within each field Fock sector the
mirror follows an exactly solvable driven-oscillator trajectory.  This
module provides that trajectory, the intensity-dependent (Kerr-like) phase
it accumulates, the spatial separation of two sector trajectories, the
joint density-operator blocks for a single coherent label, and the ideal
(decoherence-free) cavity state after one full mirror period.

Conventions (see docs/physics.md):

* The field rotating frame is used throughout: the constant sector energy
  hbar*omega_0*n is dropped, so sector phases are purely mechanical.
* ``freq_convention`` records how the stored frequencies were obtained
  from user input; the physics formulas consume the stored numbers as-is.
  "angular" means proper rad/s; "plain" reproduces order-of-magnitude
  arithmetic that treats quoted frequencies as plain rates.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .constants import HBAR, K_B
from .hilbert import nbar_from_temperature

__all__ = [
    "FREQ_CONVENTIONS",
    "ExperimentParams",
    "DerivedCouplings",
    "JointBlocks",
    "CavityQubitState",
    "derive_couplings",
    "mirror_trajectory",
    "kerr_phase",
    "trajectory_phase",
    "separation",
    "joint_blocks",
    "ideal_field_state",
]

FREQ_CONVENTIONS = ("angular", "plain")


@dataclass(frozen=True)
class ExperimentParams:
    """All physical knobs of the setup, SI units.

    ``theta_env`` (the enclosure temperature entering the dephasing
    formulas) and ``t_mirror`` (the mirror's initial temperature) are
    carried independently; nothing in the package identifies them.
    """

    omega_0: float      # field frequency [rad/s, or plain 1/s under "plain"]
    omega_m: float      # mirror frequency [rad/s, or plain 1/s under "plain"]
    length_l: float     # cavity length [m]
    mass_m: float       # mirror mass [kg]
    gamma_a: float      # cavity photon damping rate [1/s]
    gamma_m: float      # mirror mechanical damping rate [1/s]
    theta_env: float    # environment temperature [K]
    t_mirror: float     # initial mirror temperature [K]
    n_fock: int         # field Fock number n of the cat superposition
    density_d: float    # mirror material density [kg/m^3]
    freq_convention: str = "angular"

    def __post_init__(self):
        for name in ("omega_0", "omega_m", "length_l", "mass_m", "density_d"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        for name in ("gamma_a", "gamma_m", "theta_env", "t_mirror"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0.0):
                raise ValueError(f"{name} must be finite and non-negative")
        if int(self.n_fock) != self.n_fock or self.n_fock < 1:
            raise ValueError("n_fock must be an integer >= 1")
        object.__setattr__(self, "n_fock", int(self.n_fock))
        if self.freq_convention not in FREQ_CONVENTIONS:
            raise ValueError(
                f"freq_convention must be one of {FREQ_CONVENTIONS}, got {self.freq_convention!r}"
            )

    @property
    def period(self) -> float:
        """One full mirror period 2 pi / omega_m [s]."""
        return 2.0 * math.pi / self.omega_m


@dataclass(frozen=True)
class DerivedCouplings:
    """Quantities derived from ExperimentParams, recomputable bit-for-bit."""

    g: float          # optomechanical coupling rate [1/s]
    kappa: float      # g / omega_m, dimensionless
    x_zp: float       # zero-point width sqrt(hbar / 2 m omega_m) [m]
    nbar: float       # initial mirror occupation at t_mirror
    lambda_th: float  # thermal de Broglie wavelength at theta_env [m]
    omega_m: float    # mirror frequency carried through for convenience


def derive_couplings(p: ExperimentParams) -> DerivedCouplings:
    """Coupling rate g = (omega_0 / L) x_zp and friends."""
    x_zp = math.sqrt(HBAR / (2.0 * p.mass_m * p.omega_m))
    g = (p.omega_0 / p.length_l) * x_zp
    if p.theta_env > 0.0:
        lambda_th = HBAR / math.sqrt(2.0 * p.mass_m * K_B * p.theta_env)
    else:
        lambda_th = math.inf
    return DerivedCouplings(
        g=g,
        kappa=g / p.omega_m,
        x_zp=x_zp,
        nbar=nbar_from_temperature(p.omega_m, p.t_mirror),
        lambda_th=lambda_th,
        omega_m=p.omega_m,
    )


def _require_time(t: float) -> float:
    if not (math.isfinite(t) and t >= 0.0):
        raise ValueError("t must be finite and >= 0")
    return float(t)


def mirror_trajectory(beta: complex, n: int, kappa: float, omega_m: float, t: float) -> complex:
    """Coherent label of the mirror at time t in field Fock sector n.

    phi_n(t) = beta exp(-i w t) + kappa n (1 - exp(-i w t)); the circle
    returns to beta at every full period regardless of n.
    """
    t = _require_time(t)
    rot = cmath.exp(-1j * omega_m * t)
    return beta * rot + kappa * n * (1.0 - rot)


def kerr_phase(n: int, kappa: float, omega_m: float, t: float) -> float:
    """Intensity-dependent phase kappa^2 n^2 (w t - sin w t), unwrapped.

    Callers that only display the angle may reduce it mod 2 pi; the
    unwrapped branch is needed to invert readout signals.
    """
    t = _require_time(t)
    u = omega_m * t
    return (kappa * n) ** 2 * (u - math.sin(u))


def trajectory_phase(beta: complex, n: int, kappa: float, omega_m: float, t: float) -> float:
    """Exact phase of the sector-n propagated state relative to |phi_n(t)>.

    The propagator takes |beta> to exp(i theta) |phi_n(t)> with

        theta = kerr_phase + kappa n Im[beta (1 - exp(-i w t))].

    The label-dependent second term comes from the displacement algebra of
    the driven oscillator; it vanishes at full periods and for n = 0, so
    the full-period observables depend on the Kerr angle alone.
    """
    t = _require_time(t)
    rot = cmath.exp(-1j * omega_m * t)
    return kerr_phase(n, kappa, omega_m, t) + kappa * n * (beta * (1.0 - rot)).imag


def separation(n: int, couplings: DerivedCouplings, t: float) -> float:
    """Spatial separation Delta x(t) = x_zp 2 kappa n (1 - cos w t) [m].

    This is the difference of position expectation values of the sector-n
    and sector-0 trajectories (position operator x_zp (b + b^dag)); it is
    independent of the initial label beta.
    """
    t = _require_time(t)
    return couplings.x_zp * 2.0 * couplings.kappa * n * (1.0 - math.cos(couplings.omega_m * t))


@dataclass(frozen=True)
class JointBlocks:
    """Weights of the four field-sector blocks of the joint state.

    For a single mirror label beta, the joint density operator is

        w_00 |0><0| x |phi_0><phi_0| + w_0n |0><n| x |phi_0><phi_n|
      + w_n0 |n><0| x |phi_n><phi_0| + w_nn |n><n| x |phi_n><phi_n|

    with w_0n = conj(w_n0).  The off-diagonal weights carry the sign of the
    initial superposition and the Kerr phase exp(-/+ i kerr_angle).
    """

    beta: complex
    t: float
    phi_0: complex
    phi_n: complex
    kerr_angle: float
    w_00: float
    w_0n: complex
    w_n0: complex
    w_nn: float

    def __post_init__(self):
        if self.w_00 < 0.0 or self.w_nn < 0.0:
            raise ValueError("diagonal block weights must be non-negative")
        if abs(self.w_0n - self.w_n0.conjugate()) > 1e-12 * max(1.0, abs(self.w_0n)):
            raise ValueError("off-diagonal block weights must be conjugates")


def joint_blocks(beta: complex, p: ExperimentParams, t: float) -> JointBlocks:
    """Decoherence-free joint blocks for a single coherent label.

    All four weights have magnitude 1/2 at every time; disentanglement at
    full periods shows up as phi_0 = phi_n there.
    """
    t = _require_time(t)
    c = derive_couplings(p)
    phi_0 = mirror_trajectory(beta, 0, c.kappa, p.omega_m, t)
    phi_n = mirror_trajectory(beta, p.n_fock, c.kappa, p.omega_m, t)
    angle = kerr_phase(p.n_fock, c.kappa, p.omega_m, t)
    w_0n = -0.5 * cmath.exp(-1j * angle)
    return JointBlocks(
        beta=complex(beta),
        t=t,
        phi_0=phi_0,
        phi_n=phi_n,
        kerr_angle=angle,
        w_00=0.5,
        w_0n=w_0n,
        w_n0=w_0n.conjugate(),
        w_nn=0.5,
    )


@dataclass(frozen=True)
class CavityQubitState:
    """2x2 density matrix on the ordered basis (|0>_c, |n>_c)."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex, copy=True)
        if rho.shape != (2, 2):
            raise ValueError("rho must be a 2x2 matrix")
        if not np.all(np.isfinite(rho.view(np.float64))):
            raise ValueError("rho must be finite")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
            raise ValueError("rho must be Hermitian")
        if abs(rho.trace().real - 1.0) > 1e-12 or abs(rho.trace().imag) > 1e-12:
            raise ValueError("rho must have unit trace")
        if np.min(np.linalg.eigvalsh(rho)) < -1e-12:
            raise ValueError("rho must be positive semidefinite")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    def purity(self) -> float:
        return float(np.trace(self.rho @ self.rho).real)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.rho)


def ideal_field_state(p: ExperimentParams) -> CavityQubitState:
    """Cavity state after one full period with no decoherence at all.

    The pure state (|0> - exp(i kappa^2 n^2 2 pi)|n>)/sqrt(2): the mirror
    has returned to its initial state and factored out, so the result is
    independent of the mirror label and of its initial temperature.
    """
    c = derive_couplings(p)
    angle = 2.0 * math.pi * (c.kappa * p.n_fock) ** 2
    off = -0.5 * cmath.exp(1j * angle)  # coefficient of |n><0|
    rho = np.array([[0.5, off.conjugate()], [off, 0.5]], dtype=complex)
    return CavityQubitState(rho)
