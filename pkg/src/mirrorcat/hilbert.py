"""Truncated-Fock-space primitives for the mirror mode.

Coherent-state vectors in a finite number basis, the analytic overlap of
two coherent states, thermal ensembles of coherent labels, and the mean
thermal occupation of an oscillator mode.  Amplitudes and labels are
dimensionless; SI units enter only through ``nbar_from_temperature``.

Everything here is a pure function of its inputs.  Random sampling is
confined to a per-call generator seeded explicitly, so ensembles are
reproducible and safe to build from parallel workers.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .constants import HBAR, K_B

__all__ = [
    "FockVector",
    "ThermalEnsemble",
    "coherent_vector",
    "coherent_overlap",
    "nbar_from_temperature",
    "suggested_dim",
    "thermal_ensemble",
]


def _require_finite_label(beta: complex, name: str = "beta") -> complex:
    beta = complex(beta)
    if not (math.isfinite(beta.real) and math.isfinite(beta.imag)):
        raise ValueError(f"{name} must have finite real and imaginary parts, got {beta!r}")
    return beta


@dataclass(frozen=True)
class FockVector:
    """Complex amplitudes over the truncated Fock basis |0>, ..., |dim-1>.

    For vectors meant to represent physical states the squared norm is at
    most 1 (up to rounding); the shortfall ``deficit`` measures how much
    probability the truncation discarded.
    """

    amps: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amps, dtype=complex, copy=True)
        if amps.ndim != 1 or amps.size < 1:
            raise ValueError("amps must be a non-empty 1-d complex array")
        if not np.all(np.isfinite(amps.view(np.float64))):
            raise ValueError("amps must be finite")
        if float(np.vdot(amps, amps).real) > 1.0 + 1e-12:
            raise ValueError("squared norm exceeds 1 + 1e-12; not a physical state vector")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @property
    def dim(self) -> int:
        return self.amps.size

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    @property
    def deficit(self) -> float:
        """Truncation deficit 1 - sum |amps|^2 of a unit-norm state."""
        return 1.0 - self.norm_sq


@dataclass(frozen=True)
class ThermalEnsemble:
    """Discrete stand-in for a thermal mixture of coherent states.

    ``labels[i]`` is a coherent amplitude carrying probability weight
    ``weights[i]``; the weights are normalized and the ensemble mean of
    |label|^2 approximates ``nbar``.
    """

    labels: np.ndarray
    weights: np.ndarray
    nbar: float

    def __post_init__(self):
        labels = np.array(self.labels, dtype=complex, copy=True)
        weights = np.array(self.weights, dtype=float, copy=True)
        if labels.ndim != 1 or labels.size < 1:
            raise ValueError("labels must be a non-empty 1-d array")
        if weights.shape != labels.shape:
            raise ValueError("weights and labels must have matching shapes")
        if np.any(weights < 0.0):
            raise ValueError("weights must be non-negative")
        if abs(float(weights.sum()) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1 within 1e-12")
        if self.nbar < 0.0:
            raise ValueError("nbar must be non-negative")
        labels.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self) -> int:
        return self.labels.size

    def mean_abs_sq(self) -> float:
        return float(np.sum(self.weights * np.abs(self.labels) ** 2))


def coherent_vector(beta: complex, dim: int) -> FockVector:
    """Expand the coherent state |beta> over the first ``dim`` Fock levels.

    Amplitudes are built by the running recurrence
    ``a_k = a_{k-1} * beta / sqrt(k)`` from ``a_0 = exp(-|beta|^2 / 2)``,
    which stays bounded for any dim (no factorial overflow).  The result's
    ``deficit`` property reports the discarded tail weight.
    """
    beta = _require_finite_label(beta)
    if dim < 1:
        raise ValueError("dim must be >= 1")
    amps = np.empty(dim, dtype=complex)
    amps[0] = math.exp(-0.5 * abs(beta) ** 2)
    for k in range(1, dim):
        amps[k] = amps[k - 1] * beta / math.sqrt(k)
    return FockVector(amps)


def coherent_overlap(alpha: complex, beta: complex) -> complex:
    """Analytic inner product <alpha|beta> of two coherent states.

    Equals exp(-(|alpha|^2 + |beta|^2)/2 + conj(alpha) * beta); its modulus
    is exp(-|alpha - beta|^2 / 2).
    """
    alpha = _require_finite_label(alpha, "alpha")
    beta = _require_finite_label(beta, "beta")
    return cmath.exp(
        -0.5 * (abs(alpha) ** 2 + abs(beta) ** 2) + alpha.conjugate() * beta
    )


def nbar_from_temperature(omega_m: float, temperature: float) -> float:
    """Mean thermal occupation 1 / (exp(hbar w / kB T) - 1) of a mode.

    Parameters
    ----------
    omega_m : float
        Mode angular frequency [rad/s], > 0.
    temperature : float
        Temperature [K], >= 0.  Zero temperature gives zero occupation.
    """
    if omega_m <= 0.0:
        raise ValueError("omega_m must be positive")
    if temperature < 0.0:
        raise ValueError("temperature must be non-negative")
    if temperature == 0.0:
        return 0.0
    x = HBAR * omega_m / (K_B * temperature)
    if x > 700.0:  # expm1 would overflow; occupation is indistinguishable from 0
        return 0.0
    return 1.0 / math.expm1(x)


def suggested_dim(beta: complex, kappa: float = 0.0, n: int = 0) -> int:
    """Truncation size for representing a driven coherent trajectory.

    Uses dim = ceil((|beta| + kappa*n + 6)^2), which keeps the Poisson tail
    of every state visited along the trajectory below ~1e-10 including the
    displacement excursion.  Floors at 16 so tiny labels still get a few
    working levels.
    """
    beta = _require_finite_label(beta)
    base = abs(beta) + kappa * n + 6.0
    return max(16, int(math.ceil(base * base)))


def _monte_carlo_labels(nbar: float, size: int, seed: int) -> np.ndarray:
    # Antithetic +/- pairs: each draw enters with its negation, which keeps
    # the Gaussian P-function unbiased while cancelling odd moments exactly.
    rng = np.random.default_rng(seed)
    half = (size + 1) // 2
    g = rng.standard_normal((half, 2))
    raw = math.sqrt(nbar / 2.0) * (g[:, 0] + 1j * g[:, 1])
    labels = np.empty(2 * half, dtype=complex)
    labels[0::2] = raw
    labels[1::2] = -raw
    return labels[:size]


def _radial_quadrature(nbar: float, size: int) -> tuple[np.ndarray, np.ndarray]:
    # Gauss-Laguerre in s = |beta|^2 / nbar (weight e^-s) crossed with a
    # uniform phase ring; exact for the mean of |beta|^2 at any node count.
    n_radial = max(1, math.isqrt(size))
    n_phase = max(1, math.ceil(size / n_radial))
    nodes, wts = np.polynomial.laguerre.laggauss(n_radial)
    wts = wts / wts.sum()
    phases = 2.0 * math.pi * (np.arange(n_phase) + 0.5) / n_phase
    radii = np.sqrt(nbar * nodes)
    labels = (radii[:, None] * np.exp(1j * phases)[None, :]).ravel()
    weights = np.repeat(wts / n_phase, n_phase)
    return labels, weights


def thermal_ensemble(
    nbar: float,
    scheme: str = "monte-carlo",
    size: int = 4096,
    seed: int = 0,
) -> ThermalEnsemble:
    """Discretize a thermal state into weighted coherent labels.

    Parameters
    ----------
    nbar : float
        Mean thermal occupation, >= 0.  Zero collapses the ensemble to the
        single label beta = 0.
    scheme : str
        "monte-carlo": labels sqrt(nbar) * (g1 + i g2) / sqrt(2) with g1, g2
        standard normal, equal weights, antithetic pairing.
        "radial-quadrature": Gauss-Laguerre nodes in |beta|^2 crossed with a
        uniform phase ring (deterministic; seed is ignored).
    size : int
        Number of labels requested (>= 1).  The quadrature scheme may round
        up to fill its radial x phase grid.
    seed : int
        Seed for the Monte-Carlo generator; identical arguments always give
        an identical ensemble.
    """
    if nbar < 0.0:
        raise ValueError("nbar must be non-negative")
    if size < 1:
        raise ValueError("size must be >= 1")
    if scheme not in ("monte-carlo", "radial-quadrature"):
        raise ValueError(f"unknown sampling scheme {scheme!r}")
    if nbar == 0.0:
        return ThermalEnsemble(np.array([0j]), np.array([1.0]), 0.0)
    if scheme == "monte-carlo":
        labels = _monte_carlo_labels(nbar, size, seed)
        weights = np.full(labels.size, 1.0 / labels.size)
    else:
        labels, weights = _radial_quadrature(nbar, size)
    return ThermalEnsemble(labels, weights, nbar)
