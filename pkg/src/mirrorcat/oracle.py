"""Brute-force verification of the closed-form mirror dynamics.

The field photon number commutes with the Hamiltonian, so the dynamics
block-diagonalizes over field Fock sectors.  Within sector n the mirror
sees H_n / hbar = omega_m b^dag b - g n (b + b^dag), written here as a
dense tridiagonal matrix in a truncated Fock basis and propagated by exact
Hermitian eigendecomposition (unitary for arbitrary t, no time-stepping
error).  The constant sector energy hbar omega_0 n is dropped (field
rotating frame), matching the closed-form phase bookkeeping.

The numerically propagated state is compared against the analytic
coherent trajectory and its exact accumulated phase; see
``dynamics.trajectory_phase`` for the phase convention this oracle
validates, including its sign.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    DerivedCouplings,
    ExperimentParams,
    derive_couplings,
    mirror_trajectory,
    trajectory_phase,
)
from .errors import TruncationError
from .hilbert import FockVector, coherent_vector, suggested_dim

__all__ = [
    "SectorHamiltonian",
    "FidelityReport",
    "build_sector_hamiltonian",
    "propagate",
    "propagate_many",
    "verify_analytic",
    "ensemble_fidelity",
]

DEFICIT_BUDGET = 1e-10


@dataclass(frozen=True)
class SectorHamiltonian:
    """H_n / hbar for field sector n: dim x dim Hermitian, units of 1/s."""

    n: int
    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex, copy=True)
        if m.shape != (self.dim, self.dim) or self.dim < 2:
            raise ValueError("matrix must be dim x dim with dim >= 2")
        scale = float(np.max(np.abs(m))) or 1.0
        if float(np.max(np.abs(m - m.conj().T))) > 1e-13 * scale:
            raise ValueError("sector Hamiltonian must be Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def build_sector_hamiltonian(n: int, p: ExperimentParams, dim: int) -> SectorHamiltonian:
    """Tridiagonal sector matrix: diag k*omega_m, off-diagonals -g n sqrt(k+1)."""
    if dim < 2:
        raise ValueError("dim must be >= 2")
    if n < 0:
        raise ValueError("n must be >= 0")
    c = derive_couplings(p)
    m = np.zeros((dim, dim), dtype=complex)
    k = np.arange(dim)
    m[k, k] = p.omega_m * k
    off = -c.g * n * np.sqrt(np.arange(1, dim))
    m[k[:-1], k[:-1] + 1] = off
    m[k[:-1] + 1, k[:-1]] = off
    return SectorHamiltonian(n=n, dim=dim, matrix=m)


def _eigh(h: SectorHamiltonian) -> tuple[np.ndarray, np.ndarray]:
    return np.linalg.eigh(h.matrix)


def _evolve(amps: np.ndarray, evals: np.ndarray, evecs: np.ndarray, t: float) -> np.ndarray:
    coeff = evecs.conj().T @ amps
    return evecs @ (np.exp(-1j * evals * t) * coeff)


def propagate(psi0: FockVector, h: SectorHamiltonian, t: float) -> FockVector:
    """Evolve psi0 under h for time t by exact diagonalization."""
    if psi0.dim != h.dim:
        raise ValueError(f"state dim {psi0.dim} != Hamiltonian dim {h.dim}")
    if not (math.isfinite(t) and t >= 0.0):
        raise ValueError("t must be finite and >= 0")
    if t == 0.0:
        return psi0
    evals, evecs = _eigh(h)
    return FockVector(_evolve(psi0.amps, evals, evecs, t))


def propagate_many(psi0: FockVector, h: SectorHamiltonian, times) -> list[FockVector]:
    """Evolve psi0 to several times, diagonalizing only once."""
    if psi0.dim != h.dim:
        raise ValueError(f"state dim {psi0.dim} != Hamiltonian dim {h.dim}")
    evals, evecs = _eigh(h)
    return [FockVector(_evolve(psi0.amps, evals, evecs, float(t))) for t in times]


@dataclass(frozen=True)
class FidelityReport:
    """Agreement between numeric propagation and the closed form."""

    overlap_modulus: float   # |<phi_n(t) | psi_numeric(t)>|, in [0, 1]
    phase_residual: float    # arg overlap - analytic phase, wrapped to (-pi, pi]
    truncation_deficit: float

    def __post_init__(self):
        if self.overlap_modulus > 1.0 + 1e-10:
            raise ValueError("overlap modulus exceeds 1 + 1e-10")


def _wrap_phase(x: float) -> float:
    r = math.remainder(x, 2.0 * math.pi)
    return r if r != -math.pi else math.pi


def _fidelity_from_amps(
    psi_t: np.ndarray,
    beta: complex,
    n: int,
    c: DerivedCouplings,
    omega_m: float,
    t: float,
    dim: int,
    deficit_budget: float,
) -> FidelityReport:
    target_label = mirror_trajectory(beta, n, c.kappa, omega_m, t)
    target = coherent_vector(target_label, dim)
    if target.deficit > deficit_budget:
        raise TruncationError(
            f"target coherent state deficit {target.deficit:.3e} exceeds "
            f"budget {deficit_budget:.1e} at dim {dim}"
        )
    overlap = complex(np.vdot(target.amps, psi_t))
    expected = trajectory_phase(beta, n, c.kappa, omega_m, t)
    return FidelityReport(
        overlap_modulus=abs(overlap),
        phase_residual=_wrap_phase(cmath.phase(overlap) - expected),
        truncation_deficit=max(target.deficit, 0.0),
    )


def verify_analytic(
    beta: complex,
    p: ExperimentParams,
    t: float,
    dim: int | None = None,
    n: int | None = None,
    deficit_budget: float = DEFICIT_BUDGET,
) -> FidelityReport:
    """Propagate |beta> numerically in sector n and compare to the closed form.

    Raises TruncationError instead of certifying when either the initial or
    the target coherent state loses more than ``deficit_budget`` of its
    norm to the truncation.
    """
    if n is None:
        n = p.n_fock
    c = derive_couplings(p)
    if dim is None:
        dim = suggested_dim(beta, c.kappa, n)
    psi0 = coherent_vector(beta, dim)
    if psi0.deficit > deficit_budget:
        raise TruncationError(
            f"initial coherent state deficit {psi0.deficit:.3e} exceeds "
            f"budget {deficit_budget:.1e} at dim {dim}"
        )
    h = build_sector_hamiltonian(n, p, dim)
    psi_t = propagate(psi0, h, t)
    report = _fidelity_from_amps(psi_t.amps, beta, n, c, p.omega_m, t, dim, deficit_budget)
    return FidelityReport(
        overlap_modulus=report.overlap_modulus,
        phase_residual=report.phase_residual,
        truncation_deficit=max(report.truncation_deficit, max(psi0.deficit, 0.0)),
    )


def ensemble_fidelity(
    p: ExperimentParams,
    labels,
    times,
    dim: int | None = None,
    n: int | None = None,
    deficit_budget: float = DEFICIT_BUDGET,
) -> list[dict]:
    """Fidelity rows for every (label, time) pair, diagonalizing once.

    Returns one dict per pair with keys beta, t, dim, overlap_modulus,
    phase_residual, truncation_deficit and ok.  Rows whose truncation
    budget is exceeded carry ok=False and NaN fidelity figures instead of
    silently certifying.
    """
    if n is None:
        n = p.n_fock
    c = derive_couplings(p)
    labels = [complex(b) for b in labels]
    times = [float(t) for t in times]
    if dim is None:
        dim = max(suggested_dim(b, c.kappa, n) for b in labels)
    h = build_sector_hamiltonian(n, p, dim)
    evals, evecs = _eigh(h)
    rows = []
    for beta in labels:
        psi0 = coherent_vector(beta, dim)
        for t in times:
            row = {"beta": beta, "t": t, "dim": dim}
            try:
                if psi0.deficit > deficit_budget:
                    raise TruncationError(
                        f"initial deficit {psi0.deficit:.3e} exceeds budget at dim {dim}"
                    )
                psi_t = _evolve(psi0.amps, evals, evecs, t)
                rep = _fidelity_from_amps(
                    psi_t, beta, n, c, p.omega_m, t, dim, deficit_budget
                )
            except TruncationError as exc:
                row.update(
                    overlap_modulus=math.nan,
                    phase_residual=math.nan,
                    truncation_deficit=max(psi0.deficit, 0.0),
                    ok=False,
                    error=str(exc),
                )
            else:
                row.update(
                    overlap_modulus=rep.overlap_modulus,
                    phase_residual=rep.phase_residual,
                    truncation_deficit=max(rep.truncation_deficit, max(psi0.deficit, 0.0)),
                    ok=True,
                    error="",
                )
            rows.append(row)
    return rows
