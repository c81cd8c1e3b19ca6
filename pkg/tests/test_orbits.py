"""Tests for the Hamiltonian orbit pipeline."""

import numpy as np
import pytest

from symindex.errors import MalformedInputError
from symindex.halfint import HalfInteger
from symindex.hormander import hormander_index_formula, hormander_index_quadratic_form
from symindex.linalg import inf_norm, is_symplectic, standard_j
from symindex.maslov import hormander_via_paths
from symindex.orbits import (
    build_transverse_section,
    find_symmetric_orbit,
    integrate_with_variations,
    reduced_monodromy,
)
from symindex.returnmap import nondegeneracy_check, reversal_matrix, validate_blocks
from symindex.systems import (
    henon_heiles_brake_seed,
    henon_heiles_system,
    oscillator_system,
    parse_system_spec,
    validate_system,
)


def mode_rotation(w, t):
    """Closed-form (q, p) fundamental block of a 1-d oscillator with
    frequency w."""
    return np.array(
        [[np.cos(w * t), np.sin(w * t) / w], [-w * np.sin(w * t), np.cos(w * t)]]
    )


def oscillator_fundamental(w1, w2, t):
    out = np.zeros((4, 4))
    for i, w in enumerate((w1, w2)):
        r = mode_rotation(w, t)
        out[i, i] = r[0, 0]
        out[i, i + 2] = r[0, 1]
        out[i + 2, i] = r[1, 0]
        out[i + 2, i + 2] = r[1, 1]
    return out


class TestSystems:
    def test_oscillator_invariants(self):
        validate_system(oscillator_system(1.0, 2.0), rng_seed=1)

    def test_henon_heiles_invariants(self):
        validate_system(henon_heiles_system(), rng_seed=2)

    def test_brake_seed_energy(self):
        hh = henon_heiles_system()
        for energy in (0.01, 1.0 / 12.0, 0.16):
            seed = henon_heiles_brake_seed(energy)
            assert hh.hamiltonian(seed) == pytest.approx(energy, abs=1e-12)

    def test_parse_spec(self):
        sys = parse_system_spec("oscillator:1.0:2.5")
        assert sys.meta["omega2"] == 2.5
        assert parse_system_spec("henon-heiles").name == "henon-heiles"
        with pytest.raises(MalformedInputError):
            parse_system_spec("pendulum:1")
        with pytest.raises(MalformedInputError):
            parse_system_spec("oscillator:1.0")


class TestIntegration:
    def test_oscillator_closed_form(self):
        sys = oscillator_system(1.0, 2.0)
        _, fund = integrate_with_variations(sys, [1.0, 0.0, 0.0, 0.0], 2 * np.pi)
        assert inf_norm(fund - oscillator_fundamental(1.0, 2.0, 2 * np.pi)) <= 1e-8

    def test_zero_time_is_identity(self):
        sys = oscillator_system(1.0, 2.0)
        traj, fund = integrate_with_variations(sys, [0.3, 0.1, 0.0, 0.2], 0.0)
        np.testing.assert_array_equal(fund, np.eye(4))
        assert traj.states.shape == (1, 4)

    def test_henon_heiles_symplectic_fundamental(self):
        hh = henon_heiles_system()
        x0 = henon_heiles_brake_seed(0.05)
        for t_final in (1.0, 4.0, 9.0):
            _, fund = integrate_with_variations(hh, x0, t_final)
            assert is_symplectic(fund, 1e-7 * max(1.0, inf_norm(fund) ** 2))

    def test_energy_conservation(self):
        hh = henon_heiles_system()
        x0 = henon_heiles_brake_seed(1.0 / 12.0)
        traj, _ = integrate_with_variations(hh, x0, 10.0)
        h0 = hh.hamiltonian(x0)
        drift = max(abs(hh.hamiltonian(x) - h0) for x in traj.states)
        assert drift <= 1e-8 * max(1.0, abs(h0))


class TestOrbitSearch:
    def test_oscillator_normal_mode(self):
        sys = oscillator_system(1.0, np.sqrt(2.0))
        orbit = find_symmetric_orbit(sys, [1.0, 0.0, 0.0, 0.0], half_period_guess=3.0)
        assert orbit.eta == pytest.approx(2 * np.pi, abs=1e-9)
        assert orbit.residual <= 1e-10

    def test_converges_from_perturbed_seed(self):
        # Irrational frequency ratio: the only symmetric orbits near the q1
        # mode are the pure modes, so shooting must drive p2 back to zero.
        sys = oscillator_system(1.0, np.sqrt(2.0))
        orbit = find_symmetric_orbit(sys, [1.0, 0.0, 0.0, 0.03], half_period_guess=3.2)
        assert orbit.eta == pytest.approx(2 * np.pi, abs=1e-8)
        assert abs(orbit.x[3]) <= 1e-9

    def test_off_fixed_set_seed_rejected(self):
        sys = oscillator_system(1.0, 2.0)
        with pytest.raises(ValueError):
            find_symmetric_orbit(sys, [1.0, 0.2, 0.0, 0.0], half_period_guess=3.0)

    def test_henon_heiles_brake_orbit(self):
        hh = henon_heiles_system()
        orbit = find_symmetric_orbit(
            hh, henon_heiles_brake_seed(1.0 / 12.0), half_period_guess=3.2,
            energy=1.0 / 12.0,
        )
        assert orbit.residual <= 1e-8
        assert orbit.energy == pytest.approx(1.0 / 12.0, abs=1e-10)
        # Stays on the q2 axis.
        assert abs(orbit.x[0]) <= 1e-10
        assert abs(orbit.x[3]) <= 1e-10


class TestSectionAndReduction:
    def setup_method(self):
        self.w2 = np.sqrt(2.0)
        self.sys = oscillator_system(1.0, self.w2)
        self.orbit = find_symmetric_orbit(
            self.sys, [1.0, 0.0, 0.0, 0.0], half_period_guess=np.pi
        )

    def test_section_invariants(self):
        section = build_transverse_section(self.sys, self.orbit, rng_seed=3)
        j = standard_j(2)
        e = section.basis_plus
        f = section.basis_minus
        np.testing.assert_allclose(e.T @ j @ f, np.eye(1), atol=1e-10)
        np.testing.assert_allclose(e.T @ j @ e, 0.0, atol=1e-10)
        x_h = self.sys.vector_field(self.orbit.x)
        for col in np.column_stack([e, f]).T:
            assert abs(col @ j @ x_h) <= 1e-9
            assert abs(col @ j @ section.v_aux) <= 1e-9

    def test_oscillator_canonical_section_is_q2p2_plane(self):
        # With the canonical transversal w = dq1 the section is exactly the
        # (q2, p2) plane; with random w the plane tilts into p1 but L+ and
        # the indices are unchanged.
        section = build_transverse_section(
            self.sys, self.orbit, w_vector=np.array([1.0, 0.0, 0.0, 0.0])
        )
        basis = section.symplectic_basis_matrix
        assert inf_norm(basis[[0, 2], :]) <= 1e-9
        plus = section.basis_plus / np.linalg.norm(section.basis_plus)
        np.testing.assert_allclose(np.abs(plus.ravel()), [0, 0, 0, 1], atol=1e-9)

    def test_l_plus_independent_of_w(self):
        # L+ = V ∩ Fix(rho) does not depend on the sampled transversal.
        for rng_seed in (4, 14, 24):
            section = build_transverse_section(self.sys, self.orbit, rng_seed=rng_seed)
            plus = section.basis_plus / np.linalg.norm(section.basis_plus)
            np.testing.assert_allclose(np.abs(plus.ravel()), [0, 0, 0, 1], atol=1e-9)

    def test_restricted_involution_is_reversal(self):
        section = build_transverse_section(self.sys, self.orbit, rng_seed=5)
        basis = section.symplectic_basis_matrix
        r_coords, *_ = np.linalg.lstsq(basis, self.sys.involution @ basis, rcond=None)
        assert inf_norm(r_coords - reversal_matrix(1)) <= 1e-9

    def test_reduced_blocks_sqrt2(self):
        section = build_transverse_section(self.sys, self.orbit, rng_seed=6)
        blocks = reduced_monodromy(self.sys, self.orbit, section)
        alpha = 2 * np.pi * self.w2
        assert abs(blocks.a[0, 0] - np.cos(alpha)) <= 1e-7
        assert abs(blocks.c[0, 0] + np.sin(alpha) / self.w2) <= 1e-7
        assert validate_blocks(blocks, tol=1e-6).passed

    def test_rational_ratio_degenerate_reported(self):
        sys = oscillator_system(1.0, 2.0)
        orbit = find_symmetric_orbit(sys, [1.0, 0.0, 0.0, 0.0], half_period_guess=np.pi)
        section = build_transverse_section(sys, orbit, rng_seed=7)
        blocks = reduced_monodromy(sys, orbit, section)
        # Transverse rotation by 4 pi: a = 1, degenerate at every iterate.
        assert blocks.a[0, 0] == pytest.approx(1.0, abs=1e-7)
        report = nondegeneracy_check(blocks, k_max=3)
        assert not any(report.nondegenerate)

    def test_monodromy_reversal_relation(self):
        _, fund = integrate_with_variations(
            self.sys, self.orbit.x, self.orbit.eta, tol=1e-11
        )
        rho = self.sys.involution
        resid = inf_norm(fund - rho @ np.linalg.inv(fund) @ rho)
        assert resid <= 1e-8 * max(1.0, inf_norm(fund) ** 2)

    def test_index_invariant_under_w_resampling(self):
        values = set()
        for rng_seed in (11, 22, 33):
            section = build_transverse_section(self.sys, self.orbit, rng_seed=rng_seed)
            blocks = reduced_monodromy(self.sys, self.orbit, section)
            values.add(hormander_index_formula(blocks, 1).s)
        assert len(values) == 1


class TestPipelineIndices:
    def test_sqrt2_indices_match_scalar_closed_form(self):
        w2 = np.sqrt(2.0)
        sys = oscillator_system(1.0, w2)
        orbit = find_symmetric_orbit(sys, [1.0, 0.0, 0.0, 0.0], half_period_guess=np.pi)
        section = build_transverse_section(sys, orbit, rng_seed=8)
        blocks = reduced_monodromy(sys, orbit, section)
        alpha = 2 * np.pi * w2
        for k in range(1, 7):
            # Scalar oracle from the closed-form reduced dynamics:
            # sign matrix (1 - cos(k alpha)) / c_k with c_k = -sin(k alpha)/w2.
            c_k = -np.sin(k * alpha) / w2
            expected = 1 if (1 - np.cos(k * alpha)) / c_k > 0 else -1
            result = hormander_index_formula(blocks, k)
            assert result.s == HalfInteger(expected), k

    def test_henon_heiles_triple_oracle(self):
        hh = henon_heiles_system()
        orbit = find_symmetric_orbit(
            hh, henon_heiles_brake_seed(1.0 / 12.0), half_period_guess=3.2,
            energy=1.0 / 12.0,
        )
        section = build_transverse_section(hh, orbit, rng_seed=9)
        blocks = reduced_monodromy(hh, orbit, section)
        assert validate_blocks(blocks, tol=1e-6).passed
        formula = hormander_index_formula(blocks, 1)
        qform = hormander_index_quadratic_form(blocks.assemble())
        paths = hormander_via_paths(blocks.assemble(), seed=77)
        assert formula.s == qform.s == paths.s
