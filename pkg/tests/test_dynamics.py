import cmath
import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import params_with_kappa
from mirrorcat import (
    ExperimentParams,
    derive_couplings,
    ideal_field_state,
    joint_blocks,
    kerr_phase,
    mirror_trajectory,
    preset,
    separation,
    trajectory_phase,
)

labels = st.complex_numbers(max_magnitude=4.0, allow_nan=False, allow_infinity=False)
phases = st.floats(min_value=0.0, max_value=6.0)  # time in units of 1/omega_m


class TestDeriveCouplings:
    def test_regime_a_plain(self):
        c = derive_couplings(preset("regime-a"))
        assert c.kappa == pytest.approx(0.7261445506922157, rel=1e-12)
        assert 0.5 <= c.kappa <= 1.5
        assert c.x_zp == pytest.approx(7.261445506922158e-17, rel=1e-12)

    def test_regime_a_angular(self):
        c = derive_couplings(preset("regime-a", convention="angular"))
        assert c.kappa == pytest.approx(0.2896897629542262, rel=1e-12)

    def test_x_zp_mass_scaling(self):
        p = preset("regime-a")
        heavier = replace(p, mass_m=2.0 * p.mass_m)
        assert derive_couplings(heavier).x_zp == pytest.approx(
            derive_couplings(p).x_zp / math.sqrt(2.0), rel=1e-14
        )

    def test_lambda_th(self):
        c = derive_couplings(preset("regime-a"))
        assert c.lambda_th == pytest.approx(6.346284270344597e-20, rel=1e-12)

    def test_invalid_params_rejected(self):
        with pytest.raises(ValueError):
            ExperimentParams(
                omega_0=1e15, omega_m=-1.0, length_l=1e-5, mass_m=1e-6,
                gamma_a=0.0, gamma_m=0.0, theta_env=0.1, t_mirror=0.1,
                n_fock=1, density_d=1e3,
            )
        with pytest.raises(ValueError):
            ExperimentParams(
                omega_0=1e15, omega_m=1e4, length_l=1e-5, mass_m=1e-6,
                gamma_a=0.0, gamma_m=0.0, theta_env=0.1, t_mirror=0.1,
                n_fock=0, density_d=1e3,
            )


class TestMirrorTrajectory:
    def test_t_zero(self):
        assert mirror_trajectory(1.0 + 2j, 1, 0.7, 1e4, 0.0) == 1.0 + 2j

    def test_full_period_returns_for_every_n(self):
        beta = 0.5 - 1.5j
        T = 2.0 * math.pi / 1e4
        for n in range(4):
            phi = mirror_trajectory(beta, n, 0.73, 1e4, T)
            assert abs(phi - beta) < 1e-11

    def test_free_oscillation_at_n_zero(self):
        beta, w, t = 1.0 + 1j, 1e4, 3.3e-4
        assert mirror_trajectory(beta, 0, 0.9, w, t) == pytest.approx(
            beta * cmath.exp(-1j * w * t)
        )

    @given(beta=labels, u=phases)
    @settings(max_examples=100, deadline=None)
    def test_periodicity(self, beta, u):
        w = 1e4
        t = u / w
        a = mirror_trajectory(beta, 1, 0.73, w, t)
        b = mirror_trajectory(beta, 1, 0.73, w, t + 2.0 * math.pi / w)
        assert abs(a - b) < 1e-9

    @given(beta=labels, u=phases)
    @settings(max_examples=100, deadline=None)
    def test_difference_is_label_independent(self, beta, u):
        w, kappa, n = 1e4, 0.73, 2
        t = u / w
        diff = mirror_trajectory(beta, n, kappa, w, t) - mirror_trajectory(beta, 0, kappa, w, t)
        expected = kappa * n * (1.0 - cmath.exp(-1j * w * t))
        assert abs(diff - expected) < 1e-12
        assert abs(abs(diff) - 2.0 * kappa * n * abs(math.sin(0.5 * u))) < 1e-12


class TestKerrPhase:
    def test_zero_time(self):
        assert kerr_phase(1, 0.73, 1e4, 0.0) == 0.0

    def test_full_period(self):
        w = 1e4
        value = kerr_phase(2, 0.73, w, 2.0 * math.pi / w)
        assert value == pytest.approx(2.0 * math.pi * 0.73**2 * 4, rel=1e-12)

    def test_n_zero(self):
        assert kerr_phase(0, 0.73, 1e4, 1e-3) == 0.0

    def test_unwrapped_accumulation(self):
        # grows by 2 pi kappa^2 n^2 every period instead of wrapping
        w, kappa = 1e4, 1.5
        T = 2.0 * math.pi / w
        one = kerr_phase(1, kappa, w, T)
        five = kerr_phase(1, kappa, w, 5 * T)
        assert five == pytest.approx(5.0 * one, rel=1e-9)
        assert five > 2.0 * math.pi


class TestTrajectoryPhase:
    def test_reduces_to_kerr_at_full_period(self):
        w = 1e4
        T = 2.0 * math.pi / w
        full = trajectory_phase(1.0 + 2j, 1, 0.73, w, T)
        assert full == pytest.approx(kerr_phase(1, 0.73, w, T), abs=1e-11)

    def test_vanishes_for_n_zero(self):
        assert trajectory_phase(1.0 + 2j, 0, 0.73, 1e4, 1e-4) == 0.0

    def test_label_term(self):
        w, kappa, t = 1e4, 0.73, 2.5e-4
        beta = 0.8 - 0.3j
        expected = kappa * (beta * (1.0 - cmath.exp(-1j * w * t))).imag
        assert trajectory_phase(beta, 1, kappa, w, t) - kerr_phase(1, kappa, w, t) == pytest.approx(
            expected, rel=1e-12
        )


class TestSeparation:
    def test_zero_at_t_zero(self):
        p = preset("regime-a")
        assert separation(1, derive_couplings(p), 0.0) == 0.0

    def test_maximum_at_half_period(self):
        p = preset("regime-a")
        c = derive_couplings(p)
        dx = separation(1, c, math.pi / p.omega_m)
        assert dx == pytest.approx(4.0 * c.kappa * c.x_zp, rel=1e-12)
        assert dx == pytest.approx(2.1091436339999996e-16, rel=1e-12)
        assert 1e-16 <= dx <= 4e-16

    @given(u=phases)
    @settings(max_examples=60, deadline=None)
    def test_matches_position_expectation_difference(self, u):
        # independent route: Delta x = 2 x_zp Re(phi_n - phi_0)
        p = preset("regime-a")
        c = derive_couplings(p)
        t = u / p.omega_m
        beta = 0.4 + 0.9j
        diff = mirror_trajectory(beta, 1, c.kappa, p.omega_m, t) - mirror_trajectory(
            beta, 0, c.kappa, p.omega_m, t
        )
        # both routes evaluate (1 - cos u), whose float error is ~eps in
        # absolute terms; compare with a matching absolute floor
        assert separation(1, c, t) == pytest.approx(
            2.0 * c.x_zp * diff.real, rel=1e-9, abs=1e-30
        )


class TestJointBlocks:
    def test_initial_time(self):
        p = preset("regime-a")
        blocks = joint_blocks(0.3 + 0.1j, p, 0.0)
        assert blocks.phi_0 == blocks.phi_n == 0.3 + 0.1j
        assert blocks.kerr_angle == 0.0
        assert blocks.w_00 == blocks.w_nn == 0.5
        assert blocks.w_0n == -0.5

    def test_full_period_factorizes(self):
        p = preset("regime-a")
        beta = 1.2 - 0.4j
        blocks = joint_blocks(beta, p, p.period)
        assert abs(blocks.phi_0 - blocks.phi_n) < 1e-11
        assert abs(blocks.phi_0 - beta) < 1e-11
        c = derive_couplings(p)
        assert blocks.kerr_angle == pytest.approx(2.0 * math.pi * c.kappa**2, rel=1e-12)

    @given(beta=labels, u=phases)
    @settings(max_examples=60, deadline=None)
    def test_hermiticity_and_magnitudes(self, beta, u):
        p = preset("regime-a")
        blocks = joint_blocks(beta, p, u / p.omega_m)
        assert blocks.w_0n == blocks.w_n0.conjugate()
        for w in (blocks.w_00, abs(blocks.w_0n), abs(blocks.w_n0), blocks.w_nn):
            assert w == pytest.approx(0.5, rel=1e-12)


class TestIdealFieldState:
    def test_purity_is_one(self):
        for name in ("regime-a", "regime-b", "microwave"):
            state = ideal_field_state(preset(name))
            assert abs(state.purity() - 1.0) <= 1e-12

    def test_integer_kappa_squared_recovers_input_state(self):
        p = params_with_kappa(1.0)
        state = ideal_field_state(p)
        expected = 0.5 * np.array([[1.0, -1.0], [-1.0, 1.0]])
        assert np.allclose(state.rho, expected, atol=1e-12)

    def test_off_diagonal_phase(self):
        p = params_with_kappa(0.73)
        state = ideal_field_state(p)
        phase = cmath.phase(-2.0 * state.rho[1, 0])
        assert phase == pytest.approx(3.3483094501960013 - 2.0 * math.pi, abs=1e-9)

    def test_independent_of_mirror_temperature(self):
        p = preset("regime-a")
        cold = ideal_field_state(p)
        warm = ideal_field_state(replace(p, t_mirror=1.0))
        assert np.array_equal(cold.rho, warm.rho)
