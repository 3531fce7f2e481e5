"""Lattice Hamiltonians as Pauli sums, plus an explicit MPO oracle.

The builders produce the transverse-field Ising chain/grid and the 1D
time-crystal Hamiltonian with open boundaries.  The W-block matrix-product
form of the Ising chain is kept as an independent construction so the
Pauli-sum builder can be cross-checked by dense contraction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pauli import PauliSum, PauliTerm

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _zz(n: int, i: int, j: int) -> PauliTerm:
    return PauliTerm(n, 0, (1 << i) | (1 << j))


def _x(n: int, i: int) -> PauliTerm:
    return PauliTerm(n, 1 << i, 0)


def build_tfim_1d(n: int, J: float, g: float) -> PauliSum:
    """Open transverse-field Ising chain ``-J sum Z_i Z_{i+1} - g sum X_i``."""
    if n < 2:
        raise ValueError("chain needs at least 2 sites")
    terms: dict[PauliTerm, float] = {}
    if J != 0.0:
        for i in range(n - 1):
            terms[_zz(n, i, i + 1)] = -J
    if g != 0.0:
        for i in range(n):
            terms[_x(n, i)] = -g
    return PauliSum(n, terms)


def build_tfim_2d(rows: int, cols: int, J: float, g: float) -> PauliSum:
    """Open-boundary TFIM on a grid, sites linearized row-major."""
    if rows < 2 or cols < 2:
        raise ValueError("grid needs at least 2 rows and 2 columns")
    n = rows * cols
    terms: dict[PauliTerm, float] = {}
    if J != 0.0:
        for r in range(rows):
            for c in range(cols):
                s = r * cols + c
                if c + 1 < cols:
                    terms[_zz(n, s, s + 1)] = -J
                if r + 1 < rows:
                    terms[_zz(n, s, s + cols)] = -J
    if g != 0.0:
        for s in range(n):
            terms[_x(n, s)] = -g
    return PauliSum(n, terms)


def build_time_crystal(n: int, J: float, V: float, h: float) -> PauliSum:
    """Open-chain time-crystal Hamiltonian with uniform couplings.

    ``-J Z_{k-1} X_k Z_{k+1}`` on interior sites, ``-V X_k X_{k+1}`` on
    bonds, ``-h X_k`` on every site.
    """
    if n < 3:
        raise ValueError("time-crystal chain needs at least 3 sites")
    terms: dict[PauliTerm, float] = {}
    for k in range(1, n - 1):
        p = PauliTerm(n, 1 << k, (1 << (k - 1)) | (1 << (k + 1)))
        terms[p] = terms.get(p, 0.0) - J
    for k in range(n - 1):
        p = PauliTerm(n, (1 << k) | (1 << (k + 1)), 0)
        terms[p] = terms.get(p, 0.0) - V
    for k in range(n):
        p = _x(n, k)
        terms[p] = terms.get(p, 0.0) - h
    return PauliSum(n, {p: c for p, c in terms.items() if c != 0.0})


@dataclass(frozen=True)
class HamiltonianSpec:
    """Declarative Hamiltonian choice used by experiment configs."""

    variant: str  # "tfim1d" | "tfim2d" | "time_crystal"
    params: dict = field(default_factory=dict)

    def build(self) -> PauliSum:
        p = self.params
        if self.variant == "tfim1d":
            return build_tfim_1d(p["n"], p["J"], p["g"])
        if self.variant == "tfim2d":
            return build_tfim_2d(p["rows"], p["cols"], p["J"], p["g"])
        if self.variant == "time_crystal":
            return build_time_crystal(p["n"], p["J"], p["V"], p["h"])
        raise ValueError(f"unknown Hamiltonian variant {self.variant!r}")

    @property
    def n(self) -> int:
        if self.variant == "tfim2d":
            return self.params["rows"] * self.params["cols"]
        return self.params["n"]

    @property
    def grid(self) -> tuple[int, int] | None:
        if self.variant == "tfim2d":
            return self.params["rows"], self.params["cols"]
        return None


@dataclass
class Mpo:
    """W-block matrix-product operator: boundary row/column vectors of
    2x2 operator slots around 3x3 operator-valued bulk matrices, with a
    scalar prefactor applied on contraction."""

    blocks: list[np.ndarray]
    prefactor: float = 1.0

    @property
    def n(self) -> int:
        return len(self.blocks)


def build_tfim_mpo(n: int, J: float, g: float) -> Mpo:
    """TFIM chain as an MPO whose contraction equals :func:`build_tfim_1d`.

    Sign resolution: with the W-matrices taken literally, interior bonds
    contract to ``-ZZ`` while the bond ending at the last site gives
    ``+ZZ``.  Carrying the minus on the bulk pass-through slot (``-Z``
    instead of ``Z`` in the middle column) makes every bond ``+ZZ``, and
    the overall prefactor ``-J`` with field slot ``g/J`` then reproduces
    ``-J sum ZZ - g sum X`` exactly.  ``J=0`` keeps the literal zero
    prefactor and contracts to the zero matrix.
    """
    if n < 2:
        raise ValueError("chain needs at least 2 sites")
    gj = g / J if J != 0.0 else 0.0
    w_first = np.stack([_I2, -_Z, gj * _X])  # (3, 2, 2) row vector
    w_last = np.stack([gj * _X, -_Z, _I2])  # (3, 2, 2) column vector
    w_bulk = np.zeros((3, 3, 2, 2), dtype=complex)
    w_bulk[0, 0] = _I2
    w_bulk[0, 1] = -_Z
    w_bulk[0, 2] = gj * _X
    w_bulk[1, 2] = -_Z
    w_bulk[2, 2] = _I2
    blocks = [w_first] + [w_bulk.copy() for _ in range(n - 2)] + [w_last]
    return Mpo(blocks, prefactor=-J)


def mpo_to_dense(m: Mpo) -> np.ndarray:
    """Contract the MPO bond indices left to right into a dense matrix.

    Site ``i`` occupies bit ``i`` of the basis index, matching
    :func:`tnvqe.pauli.to_dense`.
    """
    n = m.n
    if n > 12:
        raise ValueError(f"n={n} too large for dense contraction")
    # Running row vector over the bond index; new sites go to higher bits.
    v = [m.blocks[0][b] for b in range(3)]
    for w in m.blocks[1:-1]:
        v = [
            sum(np.kron(w[b1, b2], v[b1]) for b1 in range(3))
            for b2 in range(3)
        ]
    last = m.blocks[-1]
    out = sum(np.kron(last[b], v[b]) for b in range(3))
    return m.prefactor * out
