import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tnvqe.pauli import (
    PauliSum,
    PauliTerm,
    commutes,
    decompose_dense,
    mul,
    neighboring_width,
    neighboring_width_2d,
    to_dense,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)
MATS = {"I": I2, "X": X, "Z": Z, "Y": Y}


def dense_from_label(label):
    m = np.array([[1.0 + 0j]])
    # site 0 is the least significant bit, so it goes last in the kron
    for ch in label:
        m = np.kron(MATS[ch], m)
    return m


def pauli_terms(n):
    return st.tuples(
        st.integers(0, (1 << n) - 1), st.integers(0, (1 << n) - 1)
    ).map(lambda xz: PauliTerm(n, xz[0], xz[1]))


class TestPauliTerm:
    def test_label_round_trip(self):
        for label in ("XIZY", "I", "ZZ", "YXIZ"):
            assert PauliTerm.from_label(label).to_label() == label

    def test_site_zero_is_leftmost(self):
        p = PauliTerm.from_label("XIZ")
        assert p.site(0) == "X"
        assert p.site(2) == "Z"
        assert p.x_bits == 0b001
        assert p.z_bits == 0b100

    def test_invalid_label(self):
        with pytest.raises(ValueError):
            PauliTerm.from_label("XQ")

    def test_mask_bounds(self):
        with pytest.raises(ValueError):
            PauliTerm(2, 4, 0)

    @given(st.integers(1, 5).flatmap(lambda n: pauli_terms(n)))
    def test_dense_matches_kron(self, p):
        np.testing.assert_allclose(p.to_dense(),
                                   dense_from_label(p.to_label()),
                                   atol=1e-14)


class TestMul:
    def test_x_times_z(self):
        phase, p = mul(PauliTerm.from_label("X"), PauliTerm.from_label("Z"))
        assert phase == -1j
        assert p.to_label() == "Y"

    def test_identity(self):
        p = PauliTerm.from_label("XZYI")
        phase, q = mul(PauliTerm.identity(4), p)
        assert phase == 1
        assert q == p

    def test_square_is_identity(self):
        p = PauliTerm.from_label("ZZ")
        phase, q = mul(p, p)
        assert phase == 1
        assert q.is_identity

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            mul(PauliTerm.identity(2), PauliTerm.identity(3))

    @given(st.integers(1, 3).flatmap(
        lambda n: st.tuples(pauli_terms(n), pauli_terms(n))))
    @settings(max_examples=60)
    def test_matches_dense_product(self, ab):
        a, b = ab
        phase, p = mul(a, b)
        np.testing.assert_allclose(phase * p.to_dense(),
                                   a.to_dense() @ b.to_dense(), atol=1e-12)

    @given(st.integers(1, 3).flatmap(
        lambda n: st.tuples(pauli_terms(n), pauli_terms(n), pauli_terms(n))))
    @settings(max_examples=40)
    def test_associativity(self, abc):
        a, b, c = abc
        ph1, ab = mul(a, b)
        phl, left = mul(ab, c)
        ph2, bc = mul(b, c)
        phr, right = mul(a, bc)
        assert left == right
        assert ph1 * phl == ph2 * phr

    @given(st.integers(1, 4).flatmap(
        lambda n: st.tuples(pauli_terms(n), pauli_terms(n))))
    @settings(max_examples=40)
    def test_commutes_matches_dense(self, ab):
        a, b = ab
        comm = a.to_dense() @ b.to_dense() - b.to_dense() @ a.to_dense()
        assert commutes(a, b) == (np.max(np.abs(comm)) < 1e-12)


class TestNeighboringWidth:
    def test_examples(self):
        assert neighboring_width(PauliTerm.from_label("XIXIII")) == 3
        assert neighboring_width(PauliTerm.from_label("ZZ")) == 2
        assert neighboring_width(PauliTerm.identity(6)) == 0

    def test_2d_chebyshev(self):
        # sites 0 and 5 of a 2x3 grid are corners (0,0) and (1,2)
        p = PauliTerm(6, 0b100001, 0)
        assert neighboring_width_2d(p, 2, 3) == 3
        assert neighboring_width_2d(PauliTerm.identity(6), 2, 3) == 0
        with pytest.raises(ValueError):
            neighboring_width_2d(p, 2, 2)


class TestPauliSum:
    def test_dense_z(self):
        s = PauliSum(1, {PauliTerm.from_label("Z"): 1.0})
        np.testing.assert_allclose(to_dense(s), np.diag([1, -1]), atol=0)

    def test_dense_scaled_identity(self):
        s = PauliSum(2, {PauliTerm.identity(2): 0.5})
        np.testing.assert_allclose(to_dense(s), 0.5 * np.eye(4), atol=0)

    def test_dense_tfim_n2_hand_assembly(self):
        zz = PauliTerm.from_label("ZZ")
        x0 = PauliTerm.from_label("XI")
        x1 = PauliTerm.from_label("IX")
        s = PauliSum(2, {zz: -1.0, x0: -0.5, x1: -0.5})
        hand = -np.kron(Z, Z) - 0.5 * np.kron(I2, X) - 0.5 * np.kron(X, I2)
        np.testing.assert_allclose(to_dense(s), hand, atol=1e-14)

    def test_prune_threshold(self):
        p = PauliTerm.from_label("Z")
        assert len(PauliSum(1, {p: 1e-13}, eps=1e-12)) == 0
        assert len(PauliSum(1, {p: 1e-13}, eps=0.0)) == 1

    def test_dense_size_guard(self):
        with pytest.raises(ValueError):
            to_dense(PauliSum(13, {PauliTerm.identity(13): 1.0}))

    def test_addition_merges(self):
        p = PauliTerm.from_label("X")
        s = PauliSum(1, {p: 0.25}) + PauliSum(1, {p: 0.5})
        assert s[p] == 0.75


class TestDecomposeDense:
    def test_identity(self):
        s = decompose_dense(np.eye(2, dtype=complex), 1)
        assert s.terms == {PauliTerm.identity(1): 1.0}

    def test_diag_z(self):
        s = decompose_dense(np.diag([1.0, -1.0]).astype(complex), 1)
        assert s.terms == {PauliTerm.from_label("Z"): 1.0}

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            decompose_dense(np.array([[0, 1], [0, 0]], dtype=complex), 1)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_round_trip_random_hermitian(self, n):
        rng = np.random.default_rng(n)
        dim = 1 << n
        a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal(
            (dim, dim))
        m = (a + a.conj().T) / 2
        s = decompose_dense(m, n)
        np.testing.assert_allclose(to_dense(s), m, atol=1e-10)

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_round_trip_from_sum(self, n):
        rng = np.random.default_rng(n + 10)
        terms = {
            PauliTerm(n, int(rng.integers(1 << n)),
                      int(rng.integers(1 << n))): float(c)
            for c in rng.standard_normal(8)
        }
        s = PauliSum(n, terms)
        back = decompose_dense(to_dense(s), n)
        for p, c in s:
            assert back[p] == pytest.approx(c, abs=1e-10)

    def test_hilbert_schmidt_orthogonality(self):
        # Tr(P Q) / 2^n = delta_PQ over every pair on n=2
        for a in range(16):
            for b in range(16):
                pa = PauliTerm(2, a & 3, a >> 2)
                pb = PauliTerm(2, b & 3, b >> 2)
                tr = np.trace(pa.to_dense() @ pb.to_dense()) / 4
                expect = 1.0 if pa == pb else 0.0
                assert tr == pytest.approx(expect, abs=1e-12)

    def test_single_pauli_decomposes_to_itself(self):
        for code in range(1, 16):
            p = PauliTerm(2, code & 3, code >> 2)
            got = decompose_dense(p.to_dense(), 2)
            assert got.terms == {p: 1.0}
