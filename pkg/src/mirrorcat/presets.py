"""Named parameter regimes shipped with the package.

Three reference operating points for the feasibility analysis:

* ``regime-a``: milligram mirror on a 10 um optical cavity, 10 kHz
  mechanics, 0.1 K.  All three constraints land near their thresholds
  and the thermal rate comes out comparable to omega_m.
* ``regime-b``: femtogram mirror at 10 MHz with today's cavity damping;
  trades mirror mass for oscillation frequency.
* ``microwave``: centimetre cavity with a 0.1 g mirror, where the
  packet-separation constraint pins omega_m at fractions of a hertz.

Each preset is available in both frequency conventions: "plain" stores
the quoted frequencies as plain rates (reproducing the published
order-of-magnitude arithmetic), "angular" multiplies the two mode
frequencies by 2 pi.
"""

from __future__ import annotations

import math

from .dynamics import ExperimentParams

__all__ = ["PRESET_NAMES", "preset"]

_PRESET_VALUES = {
    "regime-a": dict(
        omega_0=1e15,
        omega_m=1e4,
        length_l=1e-5,
        mass_m=1e-6,
        gamma_a=1e4,
        gamma_m=1e-2,
        theta_env=0.1,
        t_mirror=0.1,
        n_fock=1,
        density_d=1e3,
    ),
    "regime-b": dict(
        omega_0=1e15,
        omega_m=1e7,
        length_l=1e-5,
        mass_m=1e-15,
        gamma_a=1e7,
        gamma_m=1e2,
        theta_env=10.0,
        t_mirror=10.0,
        n_fock=1,
        density_d=1e3,
    ),
    "microwave": dict(
        omega_0=1e10,
        omega_m=1e-2,
        length_l=1e-2,
        mass_m=1e-4,
        gamma_a=10.0,
        gamma_m=1e-2,
        theta_env=0.1,
        t_mirror=0.1,
        n_fock=1,
        density_d=1e3,
    ),
}

PRESET_NAMES = tuple(sorted(_PRESET_VALUES))


def preset(name: str, convention: str = "plain") -> ExperimentParams:
    """Build the named preset under the requested frequency convention."""
    if name not in _PRESET_VALUES:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}")
    values = dict(_PRESET_VALUES[name])
    if convention == "angular":
        values["omega_0"] *= 2.0 * math.pi
        values["omega_m"] *= 2.0 * math.pi
    elif convention != "plain":
        raise ValueError(f"convention must be 'plain' or 'angular', got {convention!r}")
    return ExperimentParams(freq_convention=convention, **values)
