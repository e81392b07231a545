"""Decoherence-rate models, feasibility constraints, and parameter scans.

The position-dephasing heuristic says a superposition separated by
Delta x decoheres on the timescale

    t_D = hbar^2 / (2 m gamma_m k_B theta (Delta x)^2),

valid when Delta x exceeds the thermal de Broglie wavelength
lambda_th = hbar / sqrt(2 m k_B theta).  Averaging 1/t_D over one mirror
period with Delta x(t) = x_zp 2 kappa n (1 - cos w t) gives the closed
form

    Gamma_m = 3 n^2 omega_0^2 / (L^2 omega_m^4 m) * k_B theta gamma_m,

where the 3 is exact: the period mean of (1 - cos u)^2 is 3/2 and the
prefactors contribute another factor 2.  The gravitational-collapse
estimate for a sphere of density D (radius from R^3 = m/D) has identical
parameter dependence; with the same period-averaging factor applied,

    gamma_OR = 3 n^2 omega_0^2 / (L^2 omega_m^4 m) * G hbar D,

so gamma_OR / Gamma_m = G hbar D / (k_B theta gamma_m) independent of
n, omega_0, L, omega_m and m.  Collapse effects dominate the thermal
channel exactly when G hbar D > k_B theta gamma_m.

Feasibility verdicts use explicit thresholds (documented on
``check_constraints``) in place of order-of-magnitude language.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from typing import NamedTuple

from .constants import G_NEWTON, HBAR, K_B
from .dynamics import ExperimentParams, derive_couplings, separation
from .errors import ConfigError
from .scheme import DECOHERENCE_SOURCES, DecoherenceInputs, atom_plus_probability

__all__ = [
    "TimescaleResult",
    "OrRateResult",
    "OrDominance",
    "RateReport",
    "ConstraintReport",
    "GridSpec",
    "ScanTable",
    "SCAN_COLUMNS",
    "eid_rate",
    "decoherence_timescale",
    "or_rate",
    "or_dominance_threshold",
    "max_separation",
    "rate_report",
    "check_constraints",
    "solve_omega_m_for_kappa",
    "decoherence_from_source",
    "scan",
]


def eid_rate(p: ExperimentParams) -> float:
    """Period-averaged thermal dephasing rate Gamma_m [1/s]."""
    return (
        3.0
        * p.n_fock**2
        * p.omega_0**2
        / (p.length_l**2 * p.omega_m**4 * p.mass_m)
        * K_B
        * p.theta_env
        * p.gamma_m
    )


class TimescaleResult(NamedTuple):
    t_d: float                # dephasing timescale [s]
    within_validity: bool     # dx > lambda_th, where the formula applies


def decoherence_timescale(p: ExperimentParams, dx: float) -> TimescaleResult:
    """t_D at a given separation, with a validity flag.

    The flag is True only when dx exceeds the thermal de Broglie
    wavelength; below that the formula is outside its regime and the
    number should not be trusted.
    """
    if dx <= 0.0:
        raise ValueError("dx must be positive")
    c = derive_couplings(p)
    denom = 2.0 * p.mass_m * p.gamma_m * K_B * p.theta_env * dx**2
    t_d = math.inf if denom == 0.0 else HBAR**2 / denom
    return TimescaleResult(t_d=t_d, within_validity=dx > c.lambda_th)


def max_separation(p: ExperimentParams) -> float:
    """Largest separation over one period, 4 kappa n x_zp [m]."""
    c = derive_couplings(p)
    return separation(p.n_fock, c, math.pi / p.omega_m)


class OrRateResult(NamedTuple):
    rate: float                    # gravitational-collapse rate estimate [1/s]
    separation_within_radius: bool # max Delta x < R = (m/D)^(1/3)


def or_rate(p: ExperimentParams) -> OrRateResult:
    """Gravitational-collapse rate estimate with the factor-3 averaging.

    The estimate assumes the separation stays below the mirror radius;
    the flag reports whether that applies at max Delta x.
    """
    rate = (
        3.0
        * p.n_fock**2
        * p.omega_0**2
        / (p.length_l**2 * p.omega_m**4 * p.mass_m)
        * G_NEWTON
        * HBAR
        * p.density_d
    )
    radius = (p.mass_m / p.density_d) ** (1.0 / 3.0)
    return OrRateResult(rate=rate, separation_within_radius=max_separation(p) < radius)


class OrDominance(NamedTuple):
    theta_gamma_product: float  # theta_env * gamma_m [K/s]
    threshold: float            # G hbar D / k_B [K/s]
    dominant: bool              # collapse rate exceeds thermal rate


def or_dominance_threshold(p: ExperimentParams) -> OrDominance:
    """Whether G hbar D > k_B theta gamma_m, i.e. collapse outpaces EID."""
    product = p.theta_env * p.gamma_m
    threshold = G_NEWTON * HBAR * p.density_d / K_B
    return OrDominance(theta_gamma_product=product, threshold=threshold, dominant=threshold > product)


@dataclass(frozen=True)
class RateReport:
    """All rate figures for one parameter point."""

    gamma_m_eid: float        # closed-form thermal rate [1/s]
    t_d_at_dx_max: float      # t_D evaluated at max separation [s]
    t_d_within_validity: bool
    gamma_or: float           # collapse rate estimate [1/s]
    or_within_radius: bool
    lambda_th: float          # thermal de Broglie wavelength [m]
    dx_max: float             # max separation over a period [m]
    ratio_or_over_eid: float  # gamma_or / gamma_m_eid = G hbar D / (k_B theta gamma_m)


def rate_report(p: ExperimentParams) -> RateReport:
    c = derive_couplings(p)
    dx_max = max_separation(p)
    eid = eid_rate(p)
    orr = or_rate(p)
    timescale = decoherence_timescale(p, dx_max)
    if eid > 0.0:
        ratio = orr.rate / eid
    else:
        ratio = math.inf if orr.rate > 0.0 else math.nan
    return RateReport(
        gamma_m_eid=eid,
        t_d_at_dx_max=timescale.t_d,
        t_d_within_validity=timescale.within_validity,
        gamma_or=orr.rate,
        or_within_radius=orr.separation_within_radius,
        lambda_th=c.lambda_th,
        dx_max=dx_max,
        ratio_or_over_eid=ratio,
    )


@dataclass(frozen=True)
class ConstraintReport:
    """The three feasibility constraints with explicit verdicts."""

    gamma_m_used: float  # the Gamma_m the verdicts were computed from
    c1_ratio_wm: float   # Gamma_m / omega_m
    c1_ratio_ga: float   # Gamma_m / gamma_a (inf when gamma_a = 0)
    c2_value: float      # (omega_0^2 / L^2 omega_m^4 m) k_B theta
    c3_kappa: float      # kappa
    c1_verdict: str
    c2_verdict: str
    c3_verdict: str


def _c1_verdict(gamma_m: float, gamma_a: float, omega_m: float) -> str:
    ratio_wm = gamma_m / omega_m
    if gamma_m >= gamma_a and 1e-2 <= ratio_wm <= 1e2:
        return "pass"
    if gamma_m >= gamma_a / 10.0 and 1e-3 <= ratio_wm <= 1e3:
        return "marginal"
    return "fail"


def _c2_verdict(value: float) -> str:
    if value >= 1e2:
        return "pass"
    if value >= 10.0:
        return "marginal"
    return "fail"


def _c3_verdict(kappa: float) -> str:
    if kappa >= 1.0:
        return "pass"
    if kappa >= 0.3:
        return "marginal"
    return "fail"


def check_constraints(p: ExperimentParams, gamma_m: float | None = None) -> ConstraintReport:
    """Evaluate the three constraints; verdicts are pure functions of the values.

    Thresholds (explicit stand-ins for "about the same order"):

    * c1 (measurable rate): pass when Gamma_m >= gamma_a and
      Gamma_m/omega_m is within [1e-2, 1e2]; marginal when both hold
      within a further factor 10; fail otherwise.
    * c2 (separation above lambda_th): pass >= 100, marginal [10, 100).
    * c3 (separation above packet width): pass kappa >= 1,
      marginal [0.3, 1).

    ``gamma_m`` defaults to the thermal closed form; pass an external
    rate to test other dephasing models against the same constraints.
    """
    c = derive_couplings(p)
    if gamma_m is None:
        gamma_m = eid_rate(p)
    if gamma_m < 0.0:
        raise ValueError("gamma_m must be non-negative")
    c2_value = p.omega_0**2 / (p.length_l**2 * p.omega_m**4 * p.mass_m) * K_B * p.theta_env
    ratio_ga = gamma_m / p.gamma_a if p.gamma_a > 0.0 else math.inf
    return ConstraintReport(
        gamma_m_used=gamma_m,
        c1_ratio_wm=gamma_m / p.omega_m,
        c1_ratio_ga=ratio_ga,
        c2_value=c2_value,
        c3_kappa=c.kappa,
        c1_verdict=_c1_verdict(gamma_m, p.gamma_a, p.omega_m),
        c2_verdict=_c2_verdict(c2_value),
        c3_verdict=_c3_verdict(c.kappa),
    )


def solve_omega_m_for_kappa(
    p: ExperimentParams,
    kappa_target: float = 1.0,
    bracket: tuple[float, float] = (1e-15, 1e15),
) -> float:
    """Mirror frequency at which kappa reaches the target, by bisection.

    kappa(omega_m) = (omega_0 / L) sqrt(hbar / 2 m) omega_m^(-3/2) is
    strictly decreasing, so the root in the bracket is unique.  Bisection
    runs on log(omega_m) to a relative width of 1e-13.
    """
    if kappa_target <= 0.0:
        raise ValueError("kappa_target must be positive")

    amplitude = (p.omega_0 / p.length_l) * math.sqrt(HBAR / (2.0 * p.mass_m))

    def log_kappa(log_w: float) -> float:
        return math.log(amplitude) - 1.5 * log_w - math.log(kappa_target)

    lo, hi = math.log(bracket[0]), math.log(bracket[1])
    f_lo, f_hi = log_kappa(lo), log_kappa(hi)
    if f_lo * f_hi > 0.0:
        raise ValueError("kappa target is not bracketed; widen the bracket")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if log_kappa(mid) * f_lo <= 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-13:
            break
    return math.exp(0.5 * (lo + hi))


def decoherence_from_source(
    p: ExperimentParams,
    source: str,
    external_rate: float | None = None,
) -> DecoherenceInputs:
    """Build DecoherenceInputs with the rate resolved from its source."""
    if source not in DECOHERENCE_SOURCES:
        raise ConfigError(f"unknown gamma_m source {source!r}")
    if source == "external":
        if external_rate is None:
            raise ConfigError("external gamma_m source requires an explicit rate")
        return DecoherenceInputs(gamma_m_rate=external_rate, source="external")
    if source == "eid-model":
        return DecoherenceInputs(gamma_m_rate=eid_rate(p), source="eid-model")
    return DecoherenceInputs(gamma_m_rate=or_rate(p).rate, source="or-model")


SWEEPABLE_FIELDS = (
    "omega_0",
    "omega_m",
    "length_l",
    "mass_m",
    "gamma_a",
    "gamma_m",
    "theta_env",
    "t_mirror",
    "n_fock",
    "density_d",
)

SCAN_COLUMNS = (
    "g",
    "kappa",
    "x_zp_m",
    "nbar",
    "lambda_th_m",
    "dx_max_m",
    "gamma_m_eid",
    "gamma_or",
    "ratio_or_over_eid",
    "c1_ratio_wm",
    "c1_ratio_ga",
    "c2_value",
    "c3_kappa",
    "c1_verdict",
    "c2_verdict",
    "c3_verdict",
    "p_plus",
)


@dataclass(frozen=True)
class GridSpec:
    """A sweep: base parameters plus 1-3 axes of explicit values."""

    base: ExperimentParams
    axes: tuple[tuple[str, tuple[float, ...]], ...]
    gamma_m_source: str = "eid-model"
    external_rate: float | None = None

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 3:
            raise ValueError("a scan needs between 1 and 3 swept axes")
        seen = set()
        axes = []
        for name, values in self.axes:
            if name not in SWEEPABLE_FIELDS:
                raise ValueError(f"{name!r} is not a sweepable parameter field")
            if name in seen:
                raise ValueError(f"axis {name!r} listed twice")
            seen.add(name)
            values = tuple(float(v) for v in values)
            if len(values) < 2:
                raise ValueError(f"axis {name!r} needs at least 2 points")
            if not all(math.isfinite(v) for v in values):
                raise ValueError(f"axis {name!r} has non-finite values")
            axes.append((name, values))
        object.__setattr__(self, "axes", tuple(axes))
        if self.gamma_m_source not in DECOHERENCE_SOURCES:
            raise ValueError(f"unknown gamma_m source {self.gamma_m_source!r}")


@dataclass(frozen=True)
class ScanTable:
    """Result of a sweep: fixed column set, one row per grid point."""

    axis_names: tuple[str, ...]
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]


def _scan_row(p: ExperimentParams, source: str, external_rate: float | None) -> tuple:
    c = derive_couplings(p)
    rr = rate_report(p)
    cr = check_constraints(p)
    if p.n_fock == 1:
        d = decoherence_from_source(p, source, external_rate)
        p_plus = atom_plus_probability(p, d)
    else:
        p_plus = math.nan
    return (
        c.g,
        c.kappa,
        c.x_zp,
        c.nbar,
        c.lambda_th,
        rr.dx_max,
        rr.gamma_m_eid,
        rr.gamma_or,
        rr.ratio_or_over_eid,
        cr.c1_ratio_wm,
        cr.c1_ratio_ga,
        cr.c2_value,
        cr.c3_kappa,
        cr.c1_verdict,
        cr.c2_verdict,
        cr.c3_verdict,
        p_plus,
    )


def scan(grid: GridSpec) -> ScanTable:
    """Evaluate every grid point, rows in lexicographic axis order.

    Each row is independent of the others; the table is emitted in
    deterministic order regardless of how rows might be computed.
    """
    axis_names = tuple(name for name, _ in grid.axes)
    rows = []
    for combo in itertools.product(*(values for _, values in grid.axes)):
        overrides = dict(zip(axis_names, combo))
        if "n_fock" in overrides:
            overrides["n_fock"] = int(overrides["n_fock"])
        point = replace(grid.base, **overrides)
        rows.append(tuple(combo) + _scan_row(point, grid.gamma_m_source, grid.external_rate))
    return ScanTable(
        axis_names=axis_names,
        columns=axis_names + SCAN_COLUMNS,
        rows=tuple(rows),
    )
