import math

import numpy as np
import pytest

from tnvqe.hamiltonians import build_tfim_1d
from tnvqe.pauli import PauliSum, PauliTerm, to_dense
from tnvqe.simulator import (
    AnsatzSpec,
    NoiseModel,
    energy,
    energy_and_gradients,
    expectation,
    make_template,
    noisy_energy,
    parameter_shift_gradient,
    run,
    state_energy,
    template_a,
    template_b,
    template_c,
)
from tnvqe.tn_rotation import layout_umpo_1d, rotate_hamiltonian


def single_ry(n=1):
    return AnsatzSpec(n, (("ry", 0, 0),), 1, name="ry")


class TestTemplates:
    def test_template_a_counts(self):
        a = template_a(4, 1)
        assert a.param_count == 4
        assert sum(1 for g in a.gates if g[0] == "cz") == 3

    def test_template_c_16_7(self):
        assert template_c(16, 7).param_count == 112

    def test_template_b_param_count(self):
        assert template_b(11).param_count == 44

    def test_make_template(self):
        assert make_template("A", 4, 2).param_count == 8
        with pytest.raises(ValueError):
            make_template("D", 4)

    def test_dense_param_indices(self):
        with pytest.raises(ValueError):
            AnsatzSpec(2, (("ry", 0, 0), ("ry", 1, 2)), 3)


class TestRun:
    def test_zero_parameters_fix_point(self):
        a = template_a(3, 2)
        psi = run(a, np.zeros(a.param_count))
        want = np.zeros(8)
        want[0] = 1.0
        np.testing.assert_allclose(psi, want, atol=1e-12)

    def test_ry_pi_flips(self):
        psi = run(single_ry(), np.array([math.pi]))
        np.testing.assert_allclose(np.abs(psi), [0.0, 1.0], atol=1e-12)

    def test_norm_preserved(self):
        a = template_b(4)
        phi = np.random.default_rng(0).uniform(0, 2 * math.pi,
                                               a.param_count)
        assert np.linalg.norm(run(a, phi)) == pytest.approx(1.0,
                                                            abs=1e-12)

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            run(single_ry(), np.zeros(2))


class TestExpectation:
    def test_z_on_zero_state(self):
        psi = run(template_a(2, 1), np.zeros(2))
        assert expectation(psi, PauliTerm.from_label("ZI")) == 1.0

    def test_x_on_zero_state(self):
        psi = run(template_a(2, 1), np.zeros(2))
        assert expectation(psi, PauliTerm.from_label("XI")) == \
            pytest.approx(0.0, abs=1e-12)

    def test_matches_dense_quadratic_form(self):
        rng = np.random.default_rng(2)
        a = template_b(4)
        psi = run(a, rng.uniform(0, 2 * math.pi, a.param_count))
        for _ in range(10):
            p = PauliTerm(4, int(rng.integers(16)), int(rng.integers(16)))
            want = np.vdot(psi, p.to_dense() @ psi).real
            assert expectation(psi, p) == pytest.approx(want, abs=1e-12)


class TestEnergy:
    def test_zero_state_tfim(self):
        h = build_tfim_1d(4, 0.1, 1.0)
        a = template_a(4, 1)
        assert energy(h, a, np.zeros(4)) == pytest.approx(-0.3, abs=1e-12)

    def test_identity_rotation_reduces_to_vqe(self):
        h = build_tfim_1d(4, 1.0, 0.7)
        lay = layout_umpo_1d(4, 2)
        r = rotate_hamiltonian(h, lay, np.zeros(lay.param_count), eps=0.0)
        a = template_a(4, 2)
        phi = np.random.default_rng(3).uniform(0, 2 * math.pi, 8)
        assert energy(r, a, phi) == pytest.approx(energy(h, a, phi),
                                                  abs=1e-12)

    def test_variational_bound(self):
        h = build_tfim_1d(4, 1.0, 0.7)
        ground = np.linalg.eigvalsh(to_dense(h))[0]
        a = template_a(4, 2)
        rng = np.random.default_rng(4)
        for _ in range(10):
            phi = rng.uniform(0, 2 * math.pi, a.param_count)
            assert energy(h, a, phi) >= ground - 1e-10

    def test_dense_oracle(self):
        h = build_tfim_1d(5, 0.8, 0.6)
        lay = layout_umpo_1d(5, 1)
        theta = np.random.default_rng(5).uniform(0, 2 * math.pi,
                                                 lay.param_count)
        r = rotate_hamiltonian(h, lay, theta, eps=0.0)
        a = template_c(5, 2)
        phi = np.random.default_rng(6).uniform(0, 2 * math.pi,
                                               a.param_count)
        psi = run(a, phi)
        want = np.vdot(psi, to_dense(r.sum) @ psi).real
        assert energy(r, a, phi) == pytest.approx(want, abs=1e-9)


class TestGradients:
    def test_single_ry_closed_form(self):
        h = PauliSum(1, {PauliTerm.from_label("Z"): 1.0})
        for phi0 in (0.0, 0.3, 1.7):
            g = parameter_shift_gradient(h, single_ry(),
                                         np.array([phi0]))
            assert g[0] == pytest.approx(-math.sin(phi0), abs=1e-12)

    def test_matches_finite_differences(self):
        h = build_tfim_1d(4, 1.0, 0.7)
        a = template_b(4)
        rng = np.random.default_rng(7)
        phi = rng.uniform(0, 2 * math.pi, a.param_count)
        g = parameter_shift_gradient(h, a, phi)
        step = 1e-5
        for k in range(a.param_count):
            up, dn = phi.copy(), phi.copy()
            up[k] += step
            dn[k] -= step
            fd = (energy(h, a, up) - energy(h, a, dn)) / (2 * step)
            assert g[k] == pytest.approx(fd, abs=1e-6)

    def test_adjoint_matches_parameter_shift(self):
        h = build_tfim_1d(4, 1.0, 0.7)
        lay = layout_umpo_1d(4, 2)
        a = template_c(4, 2)
        rng = np.random.default_rng(8)
        phi = rng.uniform(0, 2 * math.pi, a.param_count)
        theta = rng.uniform(0, 2 * math.pi, lay.param_count)
        e, gphi, gtheta = energy_and_gradients(h, a, phi, lay, theta)
        r = rotate_hamiltonian(h, lay, theta, eps=0.0)
        assert e == pytest.approx(energy(r, a, phi), abs=1e-10)
        np.testing.assert_allclose(
            gphi, parameter_shift_gradient(r, a, phi), atol=1e-10)

    def test_adjoint_theta_matches_coefficient_formula(self):
        from tnvqe.tn_rotation import coefficient_gradients

        h = build_tfim_1d(4, 1.0, 0.7)
        lay = layout_umpo_1d(4, 2)
        a = template_c(4, 2)
        rng = np.random.default_rng(9)
        phi = rng.uniform(0, 2 * math.pi, a.param_count)
        theta = rng.uniform(0, 2 * math.pi, lay.param_count)
        _, _, gtheta = energy_and_gradients(h, a, phi, lay, theta)
        psi = run(a, phi)
        grads = coefficient_gradients(h, lay, theta, eps=0.0)
        want = [state_energy(g, psi) for g in grads]
        np.testing.assert_allclose(gtheta, want, atol=1e-10)


class TestNoise:
    def test_no_noise_is_exact(self):
        h = build_tfim_1d(3, 1.0, 0.5)
        a = template_c(3, 1)
        phi = np.random.default_rng(10).uniform(0, 2 * math.pi,
                                                a.param_count)
        est = noisy_energy(h, a, phi, NoiseModel(0.0, 0.0,
                                                 trajectories=5, seed=0))
        assert est.mean == pytest.approx(energy(h, a, phi), abs=1e-12)
        assert est.error_bar == 0.0

    def test_error_bar_formula(self):
        h = build_tfim_1d(3, 1.0, 0.5)
        a = template_c(3, 1)
        phi = np.random.default_rng(11).uniform(0, 2 * math.pi,
                                                a.param_count)
        est = noisy_energy(h, a, phi, NoiseModel(0.2, 0.2,
                                                 trajectories=30, seed=1))
        v = est.values
        want = 3 * math.sqrt(np.sum((v - v.mean()) ** 2) / len(v) ** 2)
        assert est.error_bar == pytest.approx(want, rel=1e-12)

    def test_single_qubit_channel_average(self):
        # uniform X/Y/Z insertion after RY(phi) acting on |0> gives the
        # depolarizing-channel average of <Z>:
        # (1-p) cos(phi) + (p/3)(cos - cos - cos)(phi)
        h = PauliSum(1, {PauliTerm.from_label("Z"): 1.0})
        phi0 = 0.7
        p = 1.0
        est = noisy_energy(h, single_ry(), np.array([phi0]),
                           NoiseModel(p, 0.0, trajectories=20000, seed=2))
        want = (1 - p) * math.cos(phi0) - (p / 3) * math.cos(phi0)
        se = np.std(est.values, ddof=1) / math.sqrt(len(est.values))
        assert abs(est.mean - want) < 3 * se + 1e-12

    def test_two_qubit_channel_average(self):
        # one CNOT under two-qubit noise: compare the trajectory mean with
        # the exact Kraus average (1-p) rho + (p/15) sum_{P != I} P rho P
        rng = np.random.default_rng(3)
        a = AnsatzSpec(2, (("ry", 0, 0), ("ry", 1, 1), ("cnot", 0, 1)), 2)
        phi = rng.uniform(0, 2 * math.pi, 2)
        h = build_tfim_1d(2, 1.0, 0.5)
        p2 = 0.3
        clean = run(a, phi)
        rho = np.outer(clean, clean.conj())
        mixed = (1 - p2) * rho
        for code in range(1, 16):
            pt = PauliTerm(2, code & 3, code >> 2)
            m = pt.to_dense()
            mixed += (p2 / 15) * (m @ rho @ m.conj().T)
        want = np.trace(to_dense(h) @ mixed).real
        est = noisy_energy(h, a, phi,
                           NoiseModel(0.0, p2, trajectories=40000, seed=4))
        se = np.std(est.values, ddof=1) / math.sqrt(len(est.values))
        assert abs(est.mean - want) < 3 * se + 1e-12

    def test_invalid_probability(self):
        with pytest.raises(ValueError):
            NoiseModel(-0.1, 0.0)
