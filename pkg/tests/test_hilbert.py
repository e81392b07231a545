import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mirrorcat import (
    FockVector,
    coherent_overlap,
    coherent_vector,
    nbar_from_temperature,
    suggested_dim,
    thermal_ensemble,
)
from mirrorcat.constants import HBAR, K_B

labels = st.complex_numbers(max_magnitude=4.0, allow_nan=False, allow_infinity=False)


class TestCoherentVector:
    def test_vacuum(self):
        vec = coherent_vector(0.0, 4)
        assert np.allclose(vec.amps, [1, 0, 0, 0])
        assert vec.deficit == 0.0

    def test_beta_one_dim_30_deficit(self):
        # Poisson(1) tail beyond k = 29 is astronomically small
        assert coherent_vector(1.0, 30).deficit < 1e-12

    def test_poisson_weight_at_k4(self):
        # independent route: |<4|2i>|^2 = Poisson pmf at k=4 with mean 4
        vec = coherent_vector(2j, 40)
        pmf = math.exp(-4.0) * 4.0**4 / math.factorial(4)
        assert abs(abs(vec.amps[4]) ** 2 - pmf) < 1e-12
        assert pmf == pytest.approx(0.19536681481316456, rel=1e-12)

    def test_deficit_monotone_in_dim(self):
        deficits = [coherent_vector(2.0 - 1j, d).deficit for d in (8, 12, 20, 40)]
        assert all(a >= b - 1e-15 for a, b in zip(deficits, deficits[1:]))
        assert deficits[-1] < 1e-10

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            coherent_vector(complex("nan"), 8)
        with pytest.raises(ValueError):
            coherent_vector(1.0, 0)

    def test_large_label_no_overflow(self):
        # running recurrence never forms beta^k / sqrt(k!) directly
        vec = coherent_vector(12.0, suggested_dim(12.0))
        assert vec.deficit < 1e-10


class TestCoherentOverlap:
    def test_identical_labels(self):
        assert coherent_overlap(1.3, 1.3) == pytest.approx(1.0, abs=1e-15)
        assert coherent_overlap(0.0, 0.0) == 1.0

    def test_vacuum_vs_two(self):
        val = coherent_overlap(0.0, 2.0)
        assert val.real == pytest.approx(math.exp(-2.0), rel=1e-14)
        assert val.imag == 0.0
        # cross-check by truncated inner product of the expansions
        a = coherent_vector(0.0, 60)
        b = coherent_vector(2.0, 60)
        assert abs(np.vdot(a.amps, b.amps) - val) < 1e-13

    @given(alpha=labels, beta=labels)
    @settings(max_examples=80, deadline=None)
    def test_modulus_formula(self, alpha, beta):
        assert abs(coherent_overlap(alpha, beta)) == pytest.approx(
            math.exp(-0.5 * abs(alpha - beta) ** 2), rel=1e-10, abs=1e-300
        )

    @given(alpha=labels, beta=labels)
    @settings(max_examples=50, deadline=None)
    def test_matches_truncated_inner_product(self, alpha, beta):
        dim = max(suggested_dim(alpha), suggested_dim(beta))
        a = coherent_vector(alpha, dim)
        b = coherent_vector(beta, dim)
        analytic = coherent_overlap(alpha, beta)
        truncated = complex(np.vdot(a.amps, b.amps))
        bound = math.sqrt(max(a.deficit, 0.0) * max(b.deficit, 0.0)) + 1e-12
        assert abs(analytic - truncated) <= bound


class TestFockVector:
    def test_rejects_supernormalized(self):
        with pytest.raises(ValueError):
            FockVector(np.array([1.0, 0.5]))

    def test_amps_read_only(self):
        vec = coherent_vector(1.0, 8)
        with pytest.raises(ValueError):
            vec.amps[0] = 0.0


class TestNbarFromTemperature:
    def test_zero_temperature(self):
        assert nbar_from_temperature(1e4, 0.0) == 0.0

    def test_ln2_point(self):
        # hbar w / kB T = ln 2  =>  nbar = 1
        omega = 1e4
        temperature = HBAR * omega / (K_B * math.log(2.0))
        assert nbar_from_temperature(omega, temperature) == pytest.approx(1.0, rel=1e-12)

    def test_classical_limit_value(self):
        value = nbar_from_temperature(2 * math.pi * 1e4, 0.1)
        assert value == pytest.approx(208365.69136134564, rel=1e-9)

    def test_rejects_nonpositive_frequency(self):
        with pytest.raises(ValueError):
            nbar_from_temperature(0.0, 1.0)


class TestThermalEnsemble:
    def test_ground_state_collapses(self):
        for scheme in ("monte-carlo", "radial-quadrature"):
            ens = thermal_ensemble(0.0, scheme=scheme, size=32)
            assert ens.size == 1
            assert ens.labels[0] == 0.0
            assert ens.weights[0] == 1.0

    def test_monte_carlo_mean(self):
        ens = thermal_ensemble(2.0, scheme="monte-carlo", size=100_000, seed=7)
        assert ens.mean_abs_sq() == pytest.approx(2.0, abs=0.03)

    def test_determinism(self):
        a = thermal_ensemble(2.0, scheme="monte-carlo", size=256, seed=11)
        b = thermal_ensemble(2.0, scheme="monte-carlo", size=256, seed=11)
        assert np.array_equal(a.labels, b.labels)
        assert np.array_equal(a.weights, b.weights)
        c = thermal_ensemble(2.0, scheme="monte-carlo", size=256, seed=12)
        assert not np.array_equal(a.labels, c.labels)

    def test_antithetic_pairing(self):
        ens = thermal_ensemble(3.0, scheme="monte-carlo", size=64, seed=0)
        assert np.allclose(ens.labels[0::2], -ens.labels[1::2])

    def test_radial_quadrature_exact_mean(self):
        for size in (1, 4, 16, 50):
            ens = thermal_ensemble(5.0, scheme="radial-quadrature", size=size)
            assert ens.mean_abs_sq() == pytest.approx(5.0, rel=1e-12)

    def test_weights_normalized(self):
        ens = thermal_ensemble(1.5, scheme="radial-quadrature", size=16)
        assert abs(ens.weights.sum() - 1.0) <= 1e-12
        assert np.all(ens.weights >= 0.0)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            thermal_ensemble(-1.0)
        with pytest.raises(ValueError):
            thermal_ensemble(1.0, size=0)
        with pytest.raises(ValueError):
            thermal_ensemble(1.0, scheme="bogus")


def test_suggested_dim_floor_and_growth():
    assert suggested_dim(0.0) == 36
    assert suggested_dim(3.0, kappa=1.5, n=2) == 144
    assert suggested_dim(0.1) >= 16
