import math

import numpy as np
import pytest

from tnvqe.analysis import (
    BipartitionSpec,
    EnsembleSpec,
    GradientVarianceSetup,
    delta_t,
    ensemble_moment,
    exact_ground_energy,
    gradient_variance_experiment,
    haar_moment,
    purity_moment,
    random_partition_sweep,
    reduced_density_matrix,
)
from tnvqe.hamiltonians import build_tfim_1d, build_time_crystal
from tnvqe.pauli import PauliSum, PauliTerm, to_dense
from tnvqe.simulator import make_template
from tnvqe.tn_rotation import make_layout


def ghz(n):
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = psi[-1] = 1 / math.sqrt(2)
    return psi


class TestExactGroundEnergy:
    def test_single_z(self):
        h = PauliSum(1, {PauliTerm.from_label("Z"): -1.0})
        assert exact_ground_energy(h) == pytest.approx(-1.0, abs=1e-12)

    def test_tfim_n2_classical(self):
        assert exact_ground_energy(build_tfim_1d(2, 1.0, 0.0)) == \
            pytest.approx(-1.0, abs=1e-10)

    def test_time_crystal_n8(self):
        h = build_time_crystal(8, 1.0, 0.1, 0.1)
        want = np.linalg.eigvalsh(to_dense(h))[0]
        assert exact_ground_energy(h) == pytest.approx(want, abs=1e-8)

    def test_sparse_path_classical_chain(self):
        # n=12 exercises the matrix-free eigensolver branch; at g=0 the
        # chain is classical with ground energy -J (n - 1)
        got = exact_ground_energy(build_tfim_1d(12, 1.0, 0.0))
        assert got == pytest.approx(-11.0, abs=1e-8)

    def test_size_guard(self):
        with pytest.raises(ValueError):
            exact_ground_energy(build_tfim_1d(17, 1.0, 1.0))


class TestPurity:
    def test_product_state(self):
        psi = np.zeros(8, dtype=complex)
        psi[5] = 1.0
        assert purity_moment(psi, BipartitionSpec((1,)), 2) == \
            pytest.approx(1.0, abs=1e-12)

    def test_bell_pair(self):
        assert purity_moment(ghz(2), BipartitionSpec((0,)), 2) == \
            pytest.approx(0.5, abs=1e-12)

    def test_ghz4_third_moment(self):
        assert purity_moment(ghz(4), BipartitionSpec((0, 1)), 3) == \
            pytest.approx(0.25, abs=1e-12)

    def test_reduced_density_matrix_properties(self):
        rng = np.random.default_rng(0)
        psi = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        psi /= np.linalg.norm(psi)
        rho = reduced_density_matrix(psi, BipartitionSpec((0, 3)))
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
        assert np.min(np.linalg.eigvalsh(rho)) >= -1e-10

    def test_purity_bounds(self):
        rng = np.random.default_rng(1)
        for t in (2, 3):
            for _ in range(5):
                psi = rng.standard_normal(16) + 1j * rng.standard_normal(16)
                psi /= np.linalg.norm(psi)
                v = purity_moment(psi, BipartitionSpec((0, 1)), t)
                assert 1 / 4 ** (t - 1) - 1e-12 <= v <= 1 + 1e-12

    def test_complement_invariance(self):
        rng = np.random.default_rng(2)
        psi = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        psi /= np.linalg.norm(psi)
        a = BipartitionSpec((0, 2, 4))
        b = BipartitionSpec((1, 3, 5))
        for t in (2, 3):
            assert purity_moment(psi, a, t) == pytest.approx(
                purity_moment(psi, b, t), abs=1e-12)

    def test_invalid_moment(self):
        with pytest.raises(ValueError):
            purity_moment(ghz(2), BipartitionSpec((0,)), 4)

    def test_empty_subset_rejected(self):
        with pytest.raises(ValueError):
            BipartitionSpec(())


class TestHaarMoment:
    def test_full_system_is_pure(self):
        m = haar_moment(3, BipartitionSpec((0, 1, 2)), 2, samples=10)
        assert m.estimate == 1.0
        assert m.std_error == 0.0

    def test_n2_single_site_frozen_value(self):
        # the exact mean of Tr(rho_A^2) for a 1|1 cut of 2 qubits is
        # (2 + 2) / (2 * 2 + 1) = 0.8
        m = haar_moment(2, BipartitionSpec((0,)), 2, samples=40000, seed=0)
        assert abs(m.estimate - 0.8) < 3 * m.std_error

    def test_n4_half_cut_closed_forms(self):
        a = BipartitionSpec((0, 1))
        m2 = haar_moment(4, a, 2, samples=40000, seed=1)
        assert abs(m2.estimate - 8 / 17) < 3 * m2.std_error
        m3 = haar_moment(4, a, 3, samples=40000, seed=2)
        want3 = (16 + 16 + 3 * 16 + 1) / (17 * 18)
        assert abs(m3.estimate - want3) < 3 * m3.std_error


class TestDelta:
    def test_haar_ensemble_is_zero(self):
        e = EnsembleSpec(n=4, samples=800, seed=3, kind="haar")
        d = delta_t(e, BipartitionSpec((0, 1)), 2, haar_samples=40000)
        assert abs(d.estimate) <= 3 * d.std_error

    def test_product_state_negative(self):
        e = EnsembleSpec(n=4, samples=5, kind="product")
        d = delta_t(e, BipartitionSpec((0, 1)), 2, haar_samples=5000)
        assert d.ensemble.estimate == 1.0
        assert d.estimate < 0

    def test_assisted_circuit_closer_to_zero(self):
        n, m = 6, 2
        a = BipartitionSpec(tuple(range(3)))
        ansatz = make_template("A", n, m)
        plain = EnsembleSpec(n=n, samples=150, seed=4, kind="circuit",
                             ansatz=ansatz)
        assisted = EnsembleSpec(n=n, samples=150, seed=4, kind="circuit",
                                ansatz=ansatz,
                                layout=make_layout("umpo1d", n, 4))
        d_plain = delta_t(plain, a, 2, haar_samples=10000)
        d_assisted = delta_t(assisted, a, 2, haar_samples=10000)
        assert d_plain.estimate < d_assisted.estimate <= 0 + \
            3 * d_assisted.std_error

    def test_circuit_delta_nonpositive(self):
        n = 4
        e = EnsembleSpec(n=n, samples=200, seed=5, kind="circuit",
                         ansatz=make_template("B", n))
        d = delta_t(e, BipartitionSpec((0, 1)), 3, haar_samples=20000)
        assert d.estimate <= 3 * d.std_error


class TestPartitionSweep:
    def test_enumerated_half_subsets_n4(self):
        from itertools import combinations

        e = EnsembleSpec(n=4, samples=100, seed=6, kind="circuit",
                         ansatz=make_template("A", 4, 2))
        haar = haar_moment(4, BipartitionSpec((0, 1)), 2, samples=20000)
        values = {}
        for sub in combinations(range(4), 2):
            d = delta_t(e, BipartitionSpec(sub), 2, haar=haar)
            values[sub] = d.estimate
        # complementary subsets agree exactly for pure global states
        assert values[(0, 1)] == pytest.approx(values[(2, 3)], abs=1e-12)
        assert values[(0, 2)] == pytest.approx(values[(1, 3)], abs=1e-12)

    def test_sweep_includes_contiguous_first_half(self):
        e = EnsembleSpec(n=4, samples=60, seed=7, kind="haar")
        sweep = random_partition_sweep(e, 2, trials=4, haar_samples=5000)
        assert sweep[0][0] == (0, 1)
        assert len(sweep) == 5
        for subset, d in sweep:
            assert len(subset) == 2
            assert math.isfinite(d.estimate)

    def test_odd_n_rejected(self):
        e = EnsembleSpec(n=3, samples=10, kind="haar")
        with pytest.raises(ValueError):
            random_partition_sweep(e, 2, trials=1)


class TestGradientVariance:
    def test_depth0_control_half(self):
        # Var over uniform phi of d<Z>/dphi = Var(-sin phi) = 1/2
        h = PauliSum(1, {PauliTerm.from_label("Z"): 1.0})
        setup = GradientVarianceSetup(ns=(1,), depths=(0,),
                                      include_tn=False,
                                      hamiltonians={1: h})
        rep = gradient_variance_experiment(setup, samples=3000)
        st = rep.cells[(0, 1)]["pqc_only"]
        se_var = st.variance * math.sqrt(2 / (st.samples - 1))
        assert abs(st.variance - 0.5) < 5 * se_var

    def test_mean_derivative_near_zero(self):
        setup = GradientVarianceSetup(ns=(4,), depths=(6,))
        rep = gradient_variance_experiment(setup, samples=400)
        for tag, st in rep.cells[(6, 4)].items():
            assert abs(st.mean) < 4 * st.mean_std_error + 1e-3

    def test_variance_nonnegative_and_tagged(self):
        setup = GradientVarianceSetup(ns=(4,), depths=(1,))
        rep = gradient_variance_experiment(setup, samples=60)
        tags = rep.cells[(1, 4)]
        assert set(tags) == {"tn_quantum", "tn_classical",
                             "matched_quantum", "pqc_only"}
        assert all(st.variance >= 0 for st in tags.values())

    def test_seed_stability(self):
        setup_a = GradientVarianceSetup(ns=(4,), depths=(2,), seed=0,
                                        include_tn=False)
        setup_b = GradientVarianceSetup(ns=(4,), depths=(2,), seed=99,
                                        include_tn=False)
        sa = gradient_variance_experiment(setup_a, samples=500)
        sb = gradient_variance_experiment(setup_b, samples=500)
        va = sa.cells[(2, 4)]["pqc_only"]
        vb = sb.cells[(2, 4)]["pqc_only"]
        se = math.sqrt((va.variance * math.sqrt(2 / 499)) ** 2
                       + (vb.variance * math.sqrt(2 / 499)) ** 2)
        assert abs(va.variance - vb.variance) < 5 * se
