"""The proposed run end-to-end with both decoherence channels.

Two channels degrade the cat: photon leakage from the cavity (rate
gamma_a) and dephasing of the mirror's motional superposition (average
rate Gamma_m).  Conditioned on no photon loss up to time t, the joint
blocks keep their form but the off-diagonals are suppressed by
exp(-(gamma_a/2 + Gamma_m) t) and the |1><1| block by exp(-gamma_a t).
If a photon does leak, the field collapses to |0><0| and decouples from
the mirror for good.

Block-weight convention: ``evolve_with_decoherence`` returns the no-loss
branch already weighted by its probability, i.e. its trace equals
p_noloss = (1 + exp(-gamma_a t)) / 2.  Adding the loss branch (weight
p_loss on |0><0| tensor the mirror state) then gives a unit-trace joint
state; see docs/physics.md for why this normalization is the consistent
one.

After one full mirror period the mirror factors out and the cavity is
left in a 2x2 state whose entries depend only on gamma_a, Gamma_m,
omega_m and kappa: not on the mirror's initial label or temperature.
Mapping that state onto a two-level atom (ideal half-Rabi swap
|1> -> |e>, |0> -> |g>) gives the measurable probability

    P(+) = (1 - exp(-(pi/omega_m)(gamma_a + 2 Gamma_m)) cos(2 pi kappa^2)) / 2,

which this module also inverts to recover Gamma_m from a measured P(+).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .constants import HBAR, K_B
from .dynamics import (
    CavityQubitState,
    ExperimentParams,
    JointBlocks,
    derive_couplings,
    joint_blocks,
)
from .errors import InfeasibleMeasurementError, UnidentifiableInversionError

__all__ = [
    "DECOHERENCE_SOURCES",
    "DecoherenceInputs",
    "PlusProbability",
    "branch_probabilities",
    "evolve_with_decoherence",
    "final_cavity_state",
    "atom_plus_probability",
    "plus_probability_detail",
    "infer_gamma_m",
    "gamma_m_uncertainty",
    "integrated_dephasing_exponent",
]

DECOHERENCE_SOURCES = ("external", "eid-model", "or-model")

COS_SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class DecoherenceInputs:
    """Mirror dephasing rate and where it came from."""

    gamma_m_rate: float  # averaged mirror decoherence rate Gamma_m [1/s]
    source: str = "external"

    def __post_init__(self):
        if not (math.isfinite(self.gamma_m_rate) or self.gamma_m_rate == math.inf):
            raise ValueError("gamma_m_rate must not be NaN")
        if self.gamma_m_rate < 0.0:
            raise ValueError("gamma_m_rate must be non-negative")
        if self.source not in DECOHERENCE_SOURCES:
            raise ValueError(f"source must be one of {DECOHERENCE_SOURCES}")


def branch_probabilities(gamma_a: float, t: float) -> tuple[float, float]:
    """(no-loss, loss) probabilities for the initial (|0> - |1>)/sqrt(2).

    p_noloss = (1 + exp(-gamma_a t)) / 2; the two always sum to one.
    """
    if gamma_a < 0.0 or t < 0.0:
        raise ValueError("gamma_a and t must be non-negative")
    e = math.exp(-gamma_a * t)
    return 0.5 * (1.0 + e), 0.5 * (1.0 - e)


def integrated_dephasing_exponent(p: ExperimentParams, t: float) -> float:
    """Time integral of the instantaneous position-dependent dephasing rate.

    Integrates 1/t_D(Delta x(t')) over [0, t] in closed form.  This is the
    time-resolved alternative to applying the constant period-averaged rate;
    it is exposed for sensitivity studies only and is not part of the
    baseline readout model.  At full periods it coincides exactly with
    Gamma_m_avg * t.
    """
    if t < 0.0:
        raise ValueError("t must be non-negative")
    c = derive_couplings(p)
    u = p.omega_m * t
    # integral of (1 - cos v)^2 dv from 0 to u
    f = 1.5 * u - 2.0 * math.sin(u) + 0.25 * math.sin(2.0 * u)
    prefactor = (
        4.0 * (c.kappa * p.n_fock) ** 2 * p.gamma_m * K_B * p.theta_env / (HBAR * p.omega_m)
    )
    return prefactor * f / p.omega_m


def evolve_with_decoherence(
    beta: complex,
    p: ExperimentParams,
    d: DecoherenceInputs,
    t: float,
    time_resolved: bool = False,
) -> JointBlocks:
    """Joint blocks of the no-loss branch at time t, probability-weighted.

    Only n_fock = 1 is supported: the photon-loss bookkeeping assumes the
    cat superposition (|0> - |1>)/sqrt(2).  With gamma_a = Gamma_m = 0 this
    reduces to the decoherence-free blocks of ``joint_blocks``.

    ``time_resolved=True`` replaces exp(-Gamma_m t) by the integrated
    instantaneous suppression (source must be "eid-model").
    """
    if p.n_fock != 1:
        raise ValueError("decoherence evolution is defined for n_fock = 1 only")
    base = joint_blocks(beta, p, t)
    decay_11 = math.exp(-p.gamma_a * t)
    if time_resolved:
        if d.source != "eid-model":
            raise ValueError("time-resolved dephasing requires the eid-model source")
        dephase = math.exp(-integrated_dephasing_exponent(p, t))
    else:
        dephase = math.exp(-d.gamma_m_rate * t) if d.gamma_m_rate != math.inf else 0.0
    off = math.exp(-0.5 * p.gamma_a * t) * dephase
    return JointBlocks(
        beta=base.beta,
        t=base.t,
        phi_0=base.phi_0,
        phi_n=base.phi_n,
        kerr_angle=base.kerr_angle,
        w_00=base.w_00,
        w_0n=base.w_0n * off,
        w_n0=base.w_n0 * off,
        w_nn=base.w_nn * decay_11,
    )


def final_cavity_state(p: ExperimentParams, d: DecoherenceInputs) -> CavityQubitState:
    """Cavity 2x2 state at t = 2 pi / omega_m, both branches summed.

    rho_00 = (2 - exp(-2 gamma_a pi / w)) / 2
    rho_11 = exp(-2 gamma_a pi / w) / 2
    rho_10 = -(exp(-gamma_a pi / w)/2) exp(-2 pi Gamma_m / w) exp(+i 2 pi kappa^2)

    Exactly independent of the mirror's initial label and temperature.
    """
    if p.n_fock != 1:
        raise ValueError("final cavity state is defined for n_fock = 1 only")
    c = derive_couplings(p)
    x = 2.0 * math.pi * p.gamma_a / p.omega_m
    damp = math.exp(-2.0 * math.pi * d.gamma_m_rate / p.omega_m) if d.gamma_m_rate != math.inf else 0.0
    angle = 2.0 * math.pi * c.kappa**2
    rho_10 = -0.5 * math.exp(-0.5 * x) * damp * cmath.exp(1j * angle)
    rho = np.array(
        [[(2.0 - math.exp(-x)) / 2.0, rho_10.conjugate()], [rho_10, math.exp(-x) / 2.0]],
        dtype=complex,
    )
    return CavityQubitState(rho)


@dataclass(frozen=True)
class PlusProbability:
    """P(+) computed two ways that must agree.

    ``closed_form`` evaluates the dedicated readout formula; ``projected``
    takes <+|rho|+> of the final cavity state under the ideal atom swap.
    The population asymmetry of the final state drops out of the
    projection (the diagonals sum to one), so the two coincide for all
    gamma_a, not just gamma_a = 0.
    """

    closed_form: float
    projected: float

    @property
    def discrepancy(self) -> float:
        return abs(self.closed_form - self.projected)


def plus_probability_detail(p: ExperimentParams, d: DecoherenceInputs) -> PlusProbability:
    """Both routes to P(+); see PlusProbability."""
    if p.n_fock != 1:
        raise ValueError("atom readout is defined for n_fock = 1 only")
    c = derive_couplings(p)
    envelope = math.exp(-(math.pi / p.omega_m) * (p.gamma_a + 2.0 * d.gamma_m_rate)) \
        if d.gamma_m_rate != math.inf else 0.0
    closed = 0.5 * (1.0 - envelope * math.cos(2.0 * math.pi * c.kappa**2))
    rho = final_cavity_state(p, d).rho
    plus = np.array([1.0, 1.0]) / math.sqrt(2.0)
    projected = float((plus @ rho @ plus).real)
    return PlusProbability(closed_form=closed, projected=projected)


def atom_plus_probability(p: ExperimentParams, d: DecoherenceInputs) -> float:
    """Probability of the readout atom exiting in |+> = (|g> + |e>)/sqrt(2)."""
    return plus_probability_detail(p, d).closed_form


def infer_gamma_m(p_measured: float, p: ExperimentParams) -> float:
    """Invert the readout formula for the mirror dephasing rate.

    Gamma_m = -(omega_m / 2 pi) ln[(1 - 2 P) / cos(2 pi kappa^2)] - gamma_a / 2.

    Raises UnidentifiableInversionError when cos(2 pi kappa^2) is
    numerically zero (the signal carries no Gamma_m information) and
    InfeasibleMeasurementError when the measured probability cannot be
    produced by the model for any Gamma_m >= 0.
    """
    if not (0.0 <= p_measured <= 1.0):
        raise InfeasibleMeasurementError(f"P(+) must lie in [0, 1], got {p_measured}")
    c = derive_couplings(p)
    cos_term = math.cos(2.0 * math.pi * c.kappa**2)
    if abs(cos_term) < COS_SINGULAR_TOL:
        raise UnidentifiableInversionError(
            "cos(2 pi kappa^2) is numerically zero; P(+) does not depend on Gamma_m"
        )
    ratio = (1.0 - 2.0 * p_measured) / cos_term
    if not (0.0 < ratio <= 1.0 + 1e-12):
        raise InfeasibleMeasurementError(
            f"(1 - 2P)/cos(2 pi kappa^2) = {ratio!r} is outside (0, 1]; "
            "inconsistent with the readout model"
        )
    gamma = -(p.omega_m / (2.0 * math.pi)) * math.log(min(ratio, 1.0)) - 0.5 * p.gamma_a
    # Rounding can leave a negligible negative residue near Gamma_m = 0.
    floor = max(1e-9, 64.0 * np.finfo(float).eps * (p.omega_m / (2.0 * math.pi) + p.gamma_a))
    if gamma < -floor:
        raise InfeasibleMeasurementError(
            f"inferred Gamma_m = {gamma!r} is negative beyond tolerance"
        )
    return max(gamma, 0.0)


def gamma_m_uncertainty(p_measured: float, p: ExperimentParams, p_sigma: float) -> float:
    """First-order error bar |dGamma/dP| * sigma_P for the inversion."""
    if p_sigma < 0.0:
        raise ValueError("p_sigma must be non-negative")
    denominator = abs(1.0 - 2.0 * p_measured)
    if denominator == 0.0:
        return math.inf
    return (p.omega_m / math.pi) / denominator * p_sigma
