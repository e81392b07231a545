"""mirrorcat: probing the decoherence of a movable cavity mirror.

A cavity field prepared in (|0> - |n>)/sqrt(2) drives the mirror it
presses on into Fock-number-dependent oscillations, entangling with it
and disentangling again after one full mechanical period.  The coherence
that survives the round trip, read out by a single atom, measures the
dephasing rate of the mirror's spatially separated motional
superposition.  This package evolves that system in closed form, applies
the photon-loss and mirror-dephasing channels, inverts the readout for
the dephasing rate, evaluates the thermal and gravitational-collapse rate
models, and checks the experimental feasibility constraints, all
validated against an independent truncated-Fock-space propagator.
"""

__version__ = "0.1.0"

from .constants import G_NEWTON, HBAR, K_B
from .dynamics import (
    CavityQubitState,
    DerivedCouplings,
    ExperimentParams,
    JointBlocks,
    derive_couplings,
    ideal_field_state,
    joint_blocks,
    kerr_phase,
    mirror_trajectory,
    separation,
    trajectory_phase,
)
from .errors import (
    ConfigError,
    InfeasibleMeasurementError,
    MirrorCatError,
    TruncationError,
    UnidentifiableInversionError,
)
from .hilbert import (
    FockVector,
    ThermalEnsemble,
    coherent_overlap,
    coherent_vector,
    nbar_from_temperature,
    suggested_dim,
    thermal_ensemble,
)
from .oracle import (
    FidelityReport,
    SectorHamiltonian,
    build_sector_hamiltonian,
    propagate,
    propagate_many,
    verify_analytic,
)
from .presets import PRESET_NAMES, preset
from .rates import (
    ConstraintReport,
    GridSpec,
    RateReport,
    ScanTable,
    check_constraints,
    decoherence_from_source,
    decoherence_timescale,
    eid_rate,
    max_separation,
    or_dominance_threshold,
    or_rate,
    rate_report,
    scan,
    solve_omega_m_for_kappa,
)
from .scheme import (
    DecoherenceInputs,
    PlusProbability,
    atom_plus_probability,
    branch_probabilities,
    evolve_with_decoherence,
    final_cavity_state,
    gamma_m_uncertainty,
    infer_gamma_m,
    plus_probability_detail,
)
