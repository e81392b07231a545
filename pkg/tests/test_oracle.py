import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import params_with_kappa
from mirrorcat import (
    TruncationError,
    build_sector_hamiltonian,
    coherent_vector,
    derive_couplings,
    preset,
    propagate,
    propagate_many,
    suggested_dim,
    verify_analytic,
)
from mirrorcat.hilbert import FockVector
from mirrorcat.oracle import ensemble_fidelity


class TestSectorHamiltonian:
    def test_n_zero_is_free_oscillator(self):
        p = preset("regime-a")
        h = build_sector_hamiltonian(0, p, 6)
        assert np.allclose(h.matrix, np.diag(p.omega_m * np.arange(6)))

    def test_two_level_block(self):
        p = preset("regime-a")
        g = derive_couplings(p).g
        h = build_sector_hamiltonian(1, p, 2)
        assert np.allclose(h.matrix, [[0.0, -g], [-g, p.omega_m]])

    def test_ground_state_energy_is_displaced(self):
        # completing the square gives E_min -> -g^2 n^2 / omega_m
        p = params_with_kappa(0.73)
        c = derive_couplings(p)
        for n in (1, 2):
            h = build_sector_hamiltonian(n, p, 200)
            e_min = np.linalg.eigvalsh(h.matrix)[0]
            assert e_min == pytest.approx(-c.g**2 * n**2 / p.omega_m, rel=1e-10)

    def test_spectrum_is_shifted_ladder(self):
        p = params_with_kappa(0.73)
        c = derive_couplings(p)
        h = build_sector_hamiltonian(1, p, 200)
        evals = np.linalg.eigvalsh(h.matrix)
        expected = p.omega_m * (np.arange(20) - c.kappa**2)
        assert np.allclose(evals[:20], expected, rtol=0.0, atol=1e-8 * p.omega_m)

    def test_rejects_small_dim(self):
        with pytest.raises(ValueError):
            build_sector_hamiltonian(1, preset("regime-a"), 1)


class TestPropagate:
    def test_t_zero_returns_input(self):
        p = preset("regime-a")
        psi = coherent_vector(1.0, 40)
        h = build_sector_hamiltonian(1, p, 40)
        assert propagate(psi, h, 0.0) is psi

    def test_dimension_mismatch(self):
        p = preset("regime-a")
        psi = coherent_vector(1.0, 30)
        h = build_sector_hamiltonian(1, p, 40)
        with pytest.raises(ValueError):
            propagate(psi, h, 1e-5)

    @given(t_frac=st.floats(min_value=0.0, max_value=3.0), seed=st.integers(0, 2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_unitarity(self, t_frac, seed):
        p = params_with_kappa(0.9)
        rng = np.random.default_rng(seed)
        raw = rng.standard_normal(24) + 1j * rng.standard_normal(24)
        psi = FockVector(raw / np.linalg.norm(raw))
        h = build_sector_hamiltonian(1, p, 24)
        out = propagate(psi, h, t_frac * p.period)
        assert abs(out.norm_sq - psi.norm_sq) < 1e-10

    def test_free_sector_rotates_coherent_state(self):
        p = preset("regime-a")
        beta, t = 1.5, 0.37 * p.period
        dim = suggested_dim(beta)
        psi = coherent_vector(beta, dim)
        h = build_sector_hamiltonian(0, p, dim)
        out = propagate(psi, h, t)
        target = coherent_vector(beta * np.exp(-1j * p.omega_m * t), dim)
        overlap = abs(np.vdot(target.amps, out.amps))
        assert overlap >= 1.0 - 10.0 * max(psi.deficit, 1e-16)

    def test_energy_conservation_over_period(self):
        p = params_with_kappa(1.2)
        dim = suggested_dim(2.0, 1.2, 1)
        psi = coherent_vector(2.0, dim)
        h = build_sector_hamiltonian(1, p, dim)
        times = np.linspace(0.0, p.period, 9)
        states = propagate_many(psi, h, times)
        energies = [np.vdot(s.amps, h.matrix @ s.amps).real for s in states]
        scale = max(abs(e) for e in energies)
        assert max(energies) - min(energies) <= 1e-8 * scale


class TestVerifyAnalytic:
    def test_decoupled_sector(self):
        p = preset("regime-a")
        rep = verify_analytic(1.0 + 1j, p, 0.3 * p.period, n=0)
        assert rep.overlap_modulus == pytest.approx(1.0, abs=1e-9)
        assert abs(rep.phase_residual) < 1e-9

    def test_full_period_return(self):
        for kappa in (0.3, 0.73):
            p = params_with_kappa(kappa)
            for beta in (0.0, 2.0, 1.0 - 2j):
                rep = verify_analytic(beta, p, p.period)
                assert rep.overlap_modulus >= 1.0 - 1e-6
                assert abs(rep.phase_residual) <= 1e-6

    def test_half_period_case(self):
        p = params_with_kappa(0.73)
        rep = verify_analytic(1.0, p, 0.5 * p.period)
        assert rep.overlap_modulus >= 1.0 - 1e-6

    def test_residual_decreases_with_dim(self):
        p = params_with_kappa(0.73)
        t = 0.31 * p.period
        errors = []
        for dim in (40, 60, 90, 130):
            rep = verify_analytic(2.0 + 1j, p, t, dim=dim, deficit_budget=1.0)
            errors.append(1.0 - rep.overlap_modulus)
        floor = 1e-12
        assert all(b <= a + floor for a, b in zip(errors, errors[1:]))
        assert errors[-1] < 1e-9

    def test_truncation_refusal(self):
        p = params_with_kappa(0.73)
        with pytest.raises(TruncationError):
            verify_analytic(3.0, p, 0.2 * p.period, dim=8)


class TestEnsembleFidelity:
    def test_rows_shape_and_contract(self):
        p = params_with_kappa(0.73)
        labels = [0.0, 1.0, 1.5j]
        times = [k * p.period / 4.0 for k in range(1, 5)]
        rows = ensemble_fidelity(p, labels, times)
        assert len(rows) == len(labels) * len(times)
        for row in rows:
            assert row["ok"]
            assert row["overlap_modulus"] >= 1.0 - 1e-6
            assert abs(row["phase_residual"]) <= 1e-6

    def test_small_dim_flags_rows(self):
        p = params_with_kappa(0.73)
        rows = ensemble_fidelity(p, [2.5], [0.5 * p.period], dim=6)
        assert all(not row["ok"] for row in rows)
        assert all(math.isnan(row["overlap_modulus"]) for row in rows)
