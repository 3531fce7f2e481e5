"""Parametrized unitary tensor networks acting on Hamiltonians.

The networks (brick-wall uMPO and coarse-graining uTTN, 1D and 2D) are
ordered lists of two-qubit blocks ``exp(i(t1*XX + t2*YY + t3*ZZ))``.
Conjugation ``U^dag H U`` is carried out in the Heisenberg picture as
Pauli propagation: each block maps a two-qubit sub-Pauli to at most four
strings with real coefficients, so a Hamiltonian stays an exact
real-coefficient Pauli sum throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _statevec
from .pauli import PauliSum, PauliTerm, neighboring_width

# Two-qubit Paulis are indexed q = qa + 4*qb with qa, qb in
# {0: I, 1: X, 2: Z, 3: Y} (the same (x + 2z) site code used in pauli.py).
_GEN_XX, _GEN_ZZ, _GEN_YY = 5, 10, 15

_PAULI1 = {
    0: np.eye(2, dtype=complex),
    1: np.array([[0, 1], [1, 0]], dtype=complex),
    2: np.array([[1, 0], [0, -1]], dtype=complex),
    3: np.array([[0, -1j], [1j, 0]], dtype=complex),
}


def _build_prod16():
    from .pauli import _SITE_PHASE_EXP

    prod = np.zeros((16, 16), dtype=np.int64)
    phexp = np.zeros((16, 16), dtype=np.int64)
    for p in range(16):
        for q in range(16):
            pa, pb = p & 3, p >> 2
            qa, qb = q & 3, q >> 2
            # site code is x + 2z and both masks xor under multiplication
            prod[p, q] = (pa ^ qa) + 4 * (pb ^ qb)
            phexp[p, q] = (_SITE_PHASE_EXP[pa, qa] + _SITE_PHASE_EXP[pb, qb]) % 4
    return prod, phexp


_PROD16, _PHEXP16 = _build_prod16()


def _commutes16(p: int, q: int) -> bool:
    xp = (p & 1) | ((p >> 2 & 1) << 1)
    zp = (p >> 1 & 1) | ((p >> 3 & 1) << 1)
    xq = (q & 1) | ((q >> 2 & 1) << 1)
    zq = (q >> 1 & 1) | ((q >> 3 & 1) << 1)
    return ((xp & zq).bit_count() + (zp & xq).bit_count()) % 2 == 0


def _pauli16_dense(q: int) -> np.ndarray:
    # local basis index 2*bit_b + bit_a, so site b is the kron high factor
    return np.kron(_PAULI1[q >> 2], _PAULI1[q & 3])


def block_unitary(theta1: float, theta2: float, theta3: float) -> np.ndarray:
    """Dense 4x4 ``exp(i(t1*XX + t2*YY + t3*ZZ))``.

    The three generators commute and square to the identity, so the
    exponential is the exact product of ``cos(t) I + i sin(t) A`` factors.
    """
    u = np.eye(4, dtype=complex)
    for q, t in ((_GEN_XX, theta1), (_GEN_YY, theta2), (_GEN_ZZ, theta3)):
        u = (math.cos(t) * np.eye(4) + 1j * math.sin(t) * _pauli16_dense(q)) @ u
    return u


def _conj_table(theta1: float, theta2: float, theta3: float) -> list[list[tuple[int, float]]]:
    """Heisenberg action of one block on each two-qubit Pauli.

    Entry ``q`` lists ``(q_out, coeff)`` with ``B^dag P_q B = sum coeff *
    P_q_out``; at most four outputs, all coefficients real.
    """
    table = []
    for q0 in range(16):
        cur = {q0: 1.0}
        for gq, t in ((_GEN_XX, theta1), (_GEN_YY, theta2), (_GEN_ZZ, theta3)):
            nxt: dict[int, float] = {}
            c2, s2 = math.cos(2 * t), math.sin(2 * t)
            for q, c in cur.items():
                if _commutes16(q, gq):
                    nxt[q] = nxt.get(q, 0.0) + c
                else:
                    # B^dag P B = cos(2t) P + i sin(2t) P*A with {P, A} = 0
                    nxt[q] = nxt.get(q, 0.0) + c * c2
                    q2 = int(_PROD16[q, gq])
                    sign = -1.0 if _PHEXP16[q, gq] == 1 else 1.0
                    nxt[q2] = nxt.get(q2, 0.0) + c * s2 * sign
            cur = nxt
        table.append([(q, c) for q, c in cur.items() if c != 0.0])
    return table


@dataclass(frozen=True)
class TnLayout:
    """Ordered two-qubit block structure of a unitary tensor network.

    ``blocks`` is layer-major: ``(layer, site_a, site_b)`` with layer 1
    applied first to states.  ``grid`` is set for 2D layouts.
    """

    n: int
    kind: str  # "umpo1d" | "uttn1d" | "umpo2d" | "uttn2d"
    layers: int
    blocks: tuple[tuple[int, int, int], ...]
    grid: tuple[int, int] | None = None

    def __post_init__(self):
        for layer in range(1, self.layers + 1):
            used: set[int] = set()
            for lay, a, b in self.blocks:
                if lay != layer:
                    continue
                if a == b or not (0 <= a < self.n and 0 <= b < self.n):
                    raise ValueError(f"invalid block sites ({a}, {b})")
                if a in used or b in used:
                    raise ValueError("overlapping blocks within a layer")
                used.update((a, b))

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    @property
    def param_count(self) -> int:
        return 3 * len(self.blocks)


def layout_umpo_1d(n: int, l: int) -> TnLayout:
    """Brick-wall layout: odd layers pair (0,1),(2,3),...; even layers
    pair (1,2),(3,4),..."""
    if n < 2 or l < 1:
        raise ValueError("need n >= 2 and l >= 1")
    blocks = []
    for layer in range(1, l + 1):
        start = 0 if layer % 2 == 1 else 1
        for a in range(start, n - 1, 2):
            blocks.append((layer, a, a + 1))
    return TnLayout(n, "umpo1d", l, tuple(blocks))


def layout_uttn_1d(n: int) -> TnLayout:
    """Binary-tree coarse-graining; the higher-index site of each pair is
    the representative carried upward."""
    if n < 2 or n & (n - 1):
        raise ValueError("uTTN needs a power-of-two qubit count")
    l = n.bit_length() - 1
    blocks = []
    for layer in range(1, l + 1):
        s = 1 << (layer - 1)
        for j in range(0, n // s, 2):
            blocks.append((layer, (j + 1) * s - 1, (j + 2) * s - 1))
    return TnLayout(n, "uttn1d", l, tuple(blocks))


def layout_umpo_2d(rows: int, cols: int, l: int) -> TnLayout:
    """Alternating row-direction and column-direction brick layers on a
    row-major grid; brick offsets alternate within each direction."""
    if rows < 2 or cols < 2 or l < 1:
        raise ValueError("need rows, cols >= 2 and l >= 1")
    n = rows * cols
    blocks = []
    row_phase = col_phase = 0
    for layer in range(1, l + 1):
        if layer % 2 == 1:  # row direction: pair horizontally adjacent sites
            for r in range(rows):
                for c in range(row_phase, cols - 1, 2):
                    s = r * cols + c
                    blocks.append((layer, s, s + 1))
            row_phase ^= 1
        else:  # column direction
            for c in range(cols):
                for r in range(col_phase, rows - 1, 2):
                    s = r * cols + c
                    blocks.append((layer, s, s + cols))
            col_phase ^= 1
    return TnLayout(n, "umpo2d", l, tuple(blocks), grid=(rows, cols))


def layout_uttn_2d(rows: int, cols: int) -> TnLayout:
    """Tree coarse-graining on a grid, pairing alternately along rows and
    columns; representatives are the higher-index member of each pair."""
    n = rows * cols
    if rows < 2 or cols < 2 or n & (n - 1):
        raise ValueError("uTTN grid needs rows, cols >= 2 with a "
                         "power-of-two site count")
    reps = [[r * cols + c for c in range(cols)] for r in range(rows)]
    blocks = []
    layer = 0
    along_rows = True
    while len(reps) * len(reps[0]) > 1:
        layer += 1
        nr, nc = len(reps), len(reps[0])
        if along_rows and nc == 1:
            along_rows = False
        if not along_rows and nr == 1:
            along_rows = True
        if along_rows:
            new = []
            for row in reps:
                kept = []
                for j in range(0, nc, 2):
                    blocks.append((layer, row[j], row[j + 1]))
                    kept.append(row[j + 1])
                new.append(kept)
            reps = new
        else:
            new = [[] for _ in range(nr // 2)]
            for c in range(nc):
                for i in range(0, nr, 2):
                    blocks.append((layer, reps[i][c], reps[i + 1][c]))
                    new[i // 2].append(reps[i + 1][c])
            reps = new
        along_rows = not along_rows
    return TnLayout(n, "uttn2d", layer, tuple(blocks), grid=(rows, cols))


def make_layout(kind: str, n: int, layers: int = 2,
                grid: tuple[int, int] | None = None) -> TnLayout:
    """Dispatch on the layout kind names used in experiment configs."""
    if kind == "umpo1d":
        return layout_umpo_1d(n, layers)
    if kind == "uttn1d":
        return layout_uttn_1d(n)
    if kind == "umpo2d":
        rows, cols = grid
        return layout_umpo_2d(rows, cols, layers)
    if kind == "uttn2d":
        rows, cols = grid
        return layout_uttn_2d(rows, cols)
    raise ValueError(f"unknown layout kind {kind!r}")


def split_block_params(layout: TnLayout, theta: np.ndarray) -> np.ndarray:
    """Reshape a flat parameter vector to (block, 3) angles."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (layout.param_count,):
        raise ValueError(
            f"expected {layout.param_count} parameters, got {theta.shape}")
    return theta.reshape(len(layout.blocks), 3)


def _conjugate_arrays(xs, zs, cs, a, b, table):
    """Propagate mask arrays through one block; returns unmerged arrays."""
    qa = ((xs >> np.uint64(a)) & np.uint64(1)) | (
        ((zs >> np.uint64(a)) & np.uint64(1)) << np.uint64(1))
    qb = ((xs >> np.uint64(b)) & np.uint64(1)) | (
        ((zs >> np.uint64(b)) & np.uint64(1)) << np.uint64(1))
    q = (qa | (qb << np.uint64(2))).astype(np.int64)
    clear = np.uint64(~((1 << a) | (1 << b)) & ((1 << 64) - 1))
    out_x, out_z, out_c = [], [], []
    for cls in np.unique(q):
        sel = q == cls
        bx, bz, bc = xs[sel], zs[sel], cs[sel]
        for oq, oc in table[cls]:
            oxa, oza = oq & 1, (oq >> 1) & 1
            oxb, ozb = (oq >> 2) & 1, (oq >> 3) & 1
            setx = np.uint64((oxa << a) | (oxb << b))
            setz = np.uint64((oza << a) | (ozb << b))
            out_x.append((bx & clear) | setx)
            out_z.append((bz & clear) | setz)
            out_c.append(bc * oc)
    return (np.concatenate(out_x), np.concatenate(out_z),
            np.concatenate(out_c))


def _merge_arrays(xs, zs, cs, eps):
    keys = (xs << np.uint64(32)) | zs
    uniq, inv = np.unique(keys, return_inverse=True)
    sums = np.bincount(inv, weights=cs, minlength=len(uniq))
    keep = np.abs(sums) > eps if eps > 0.0 else sums != 0.0
    uniq, sums = uniq[keep], sums[keep]
    return (uniq >> np.uint64(32), uniq & np.uint64(0xFFFFFFFF), sums)


def conjugate_term(p: PauliTerm, coefficient: float, sites: tuple[int, int],
                   angles: tuple[float, float, float]) -> PauliSum:
    """``B^dag (c P) B`` for a single block; at most 16 output terms."""
    a, b = sites
    if a == b or not (0 <= a < p.n and 0 <= b < p.n):
        raise ValueError(f"invalid block sites ({a}, {b})")
    table = _conj_table(*angles)
    xs = np.array([p.x_bits], dtype=np.uint64)
    zs = np.array([p.z_bits], dtype=np.uint64)
    cs = np.array([float(coefficient)])
    xs, zs, cs = _conjugate_arrays(xs, zs, cs, a, b, table)
    xs, zs, cs = _merge_arrays(xs, zs, cs, 0.0)
    return PauliSum.from_arrays(p.n, xs, zs, cs)


@dataclass
class RotatedHamiltonian:
    """``U^dag(theta) H U(theta)`` plus the provenance that produced it."""

    sum: PauliSum
    layout: TnLayout
    theta: np.ndarray
    eps: float
    source: PauliSum | None = None  # pre-rotation Hamiltonian, if known

    @property
    def n(self) -> int:
        return self.sum.n

    @property
    def term_count(self) -> int:
        return len(self.sum)

    @property
    def max_width(self) -> int:
        return self.sum.max_width()

    def to_json_dict(self) -> dict:
        return {
            "n": self.sum.n,
            "layout": {"kind": self.layout.kind, "n": self.layout.n,
                       "layers": self.layout.layers,
                       "grid": list(self.layout.grid) if self.layout.grid else None},
            "theta": [float(t) for t in self.theta],
            "eps": self.eps,
            "terms": [
                {"pauli": p.to_label(), "coefficient": c} for p, c in self.sum
            ],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "RotatedHamiltonian":
        lay = d["layout"]
        layout = make_layout(lay["kind"], lay["n"], lay.get("layers", 2),
                             tuple(lay["grid"]) if lay.get("grid") else None)
        terms = {
            PauliTerm.from_label(t["pauli"]): t["coefficient"]
            for t in d["terms"]
        }
        return cls(PauliSum(d["n"], terms), layout,
                   np.asarray(d["theta"], dtype=float), d["eps"])


def _propagate(h: PauliSum, layout: TnLayout, angles: np.ndarray, eps: float,
               keep_intermediates: bool = False):
    """Conjugate term arrays through all blocks in reverse order.

    Returns final ``(xs, zs, cs)`` and, when requested, the intermediate
    arrays after each block (indexed by block position, last block first).
    """
    xs, zs, cs = h.to_arrays()
    inters = []
    for j in range(len(layout.blocks) - 1, -1, -1):
        _, a, b = layout.blocks[j]
        table = _conj_table(*angles[j])
        xs, zs, cs = _conjugate_arrays(xs, zs, cs, a, b, table)
        xs, zs, cs = _merge_arrays(xs, zs, cs, eps)
        if keep_intermediates:
            inters.append((j, xs, zs, cs))
    return xs, zs, cs, inters


def rotate_hamiltonian(h: PauliSum, layout: TnLayout, theta: np.ndarray,
                       eps: float = 1e-12) -> RotatedHamiltonian:
    """Heisenberg-picture conjugation of ``h`` through the network.

    The network ``U = B_L ... B_1`` applies layer 1 first to states, so
    the Hamiltonian propagates through ``B_L`` first.  Identical strings
    merge after every block; ``eps`` prunes merged coefficients (0 keeps
    everything that does not cancel exactly).
    """
    if layout.n != h.n:
        raise ValueError("layout and Hamiltonian qubit counts differ")
    angles = split_block_params(layout, theta)
    xs, zs, cs, _ = _propagate(h, layout, angles, eps)
    return RotatedHamiltonian(PauliSum.from_arrays(h.n, xs, zs, cs),
                              layout, np.asarray(theta, float), eps,
                              source=h)


def _commutator_seed(xs, zs, cs, a, b, gen_q):
    """``i [S, G]`` for a generator Pauli G on the block sites."""
    qa = ((xs >> np.uint64(a)) & np.uint64(1)) | (
        ((zs >> np.uint64(a)) & np.uint64(1)) << np.uint64(1))
    qb = ((xs >> np.uint64(b)) & np.uint64(1)) | (
        ((zs >> np.uint64(b)) & np.uint64(1)) << np.uint64(1))
    q = (qa | (qb << np.uint64(2))).astype(np.int64)
    anti = np.array([not _commutes16(int(c), gen_q) for c in range(16)])
    sel = anti[q]
    if not np.any(sel):
        return (np.empty(0, np.uint64), np.empty(0, np.uint64),
                np.empty(0, np.float64))
    q = q[sel]
    xs, zs, cs = xs[sel], zs[sel], cs[sel]
    prod = _PROD16[q, gen_q]
    # i[P, G] = 2i P G for anticommuting P; the product phase is +-i so
    # the surviving coefficient is -+2.
    sign = np.where(_PHEXP16[q, gen_q] == 1, -2.0, 2.0)
    clear = np.uint64(~((1 << a) | (1 << b)) & ((1 << 64) - 1))
    oxa, oza = prod & 1, (prod >> 1) & 1
    oxb, ozb = (prod >> 2) & 1, (prod >> 3) & 1
    new_x = (xs & clear) | (oxa.astype(np.uint64) << np.uint64(a)) | (
        oxb.astype(np.uint64) << np.uint64(b))
    new_z = (zs & clear) | (oza.astype(np.uint64) << np.uint64(a)) | (
        ozb.astype(np.uint64) << np.uint64(b))
    return new_x, new_z, cs * sign


def coefficient_gradients(h: PauliSum, layout: TnLayout, theta: np.ndarray,
                          eps: float = 1e-12) -> list[PauliSum]:
    """``d(U^dag H U)/d theta_k`` as one Hermitian Pauli sum per parameter.

    For a block with commuting generators the derivative inserts
    ``i[. , G]`` at the block's position in the propagation sequence and
    continues through the remaining blocks.
    """
    if layout.n != h.n:
        raise ValueError("layout and Hamiltonian qubit counts differ")
    angles = split_block_params(layout, theta)
    _, _, _, inters = _propagate(h, layout, angles, eps,
                                 keep_intermediates=True)
    tables = [None] * len(layout.blocks)
    grads: list[PauliSum] = [None] * layout.param_count
    for j, xs, zs, cs in inters:
        _, a, b = layout.blocks[j]
        for gi, gen_q in enumerate((_GEN_XX, _GEN_YY, _GEN_ZZ)):
            gx, gz, gc = _commutator_seed(xs, zs, cs, a, b, gen_q)
            # continue through the blocks that conjugate after block j
            for k in range(j - 1, -1, -1):
                if len(gc) == 0:
                    break
                _, ka, kb = layout.blocks[k]
                if tables[k] is None:
                    tables[k] = _conj_table(*angles[k])
                gx, gz, gc = _conjugate_arrays(gx, gz, gc, ka, kb, tables[k])
                gx, gz, gc = _merge_arrays(gx, gz, gc, eps)
            grads[3 * j + gi] = PauliSum.from_arrays(h.n, gx, gz, gc)
    return grads


def coefficient_gradient(h: PauliSum, layout: TnLayout, theta: np.ndarray,
                         k: int, eps: float = 1e-12) -> PauliSum:
    """Single-parameter variant of :func:`coefficient_gradients`."""
    if layout.n != h.n:
        raise ValueError("layout and Hamiltonian qubit counts differ")
    if not 0 <= k < layout.param_count:
        raise ValueError(f"parameter index {k} out of range")
    angles = split_block_params(layout, theta)
    j, gi = divmod(k, 3)
    xs, zs, cs = h.to_arrays()
    for i in range(len(layout.blocks) - 1, j - 1, -1):
        _, a, b = layout.blocks[i]
        xs, zs, cs = _conjugate_arrays(xs, zs, cs, a, b,
                                       _conj_table(*angles[i]))
        xs, zs, cs = _merge_arrays(xs, zs, cs, eps)
    _, a, b = layout.blocks[j]
    gen_q = (_GEN_XX, _GEN_YY, _GEN_ZZ)[gi]
    xs, zs, cs = _commutator_seed(xs, zs, cs, a, b, gen_q)
    for i in range(j - 1, -1, -1):
        if len(cs) == 0:
            break
        _, a, b = layout.blocks[i]
        xs, zs, cs = _conjugate_arrays(xs, zs, cs, a, b,
                                       _conj_table(*angles[i]))
        xs, zs, cs = _merge_arrays(xs, zs, cs, eps)
    return PauliSum.from_arrays(h.n, xs, zs, cs)


def string_statistics(r: RotatedHamiltonian) -> dict:
    """Term count, maximal neighboring width and a width histogram."""
    widths = [neighboring_width(p) for p, _ in r.sum]
    hist: dict[int, int] = {}
    for w in widths:
        hist[w] = hist.get(w, 0) + 1
    return {
        "term_count": len(r.sum),
        "max_width": max(widths, default=0),
        "width_histogram": dict(sorted(hist.items())),
    }


def layout_unitary_dense(layout: TnLayout, theta: np.ndarray) -> np.ndarray:
    """Dense ``U = B_L ... B_1`` (test oracle, small n only)."""
    if layout.n > 12:
        raise ValueError("dense layout unitary limited to small n")
    angles = split_block_params(layout, theta)
    dim = 1 << layout.n
    u = np.eye(dim, dtype=complex)
    for j, (_, a, b) in enumerate(layout.blocks):
        b4 = block_unitary(*angles[j])
        cols = [
            _statevec.apply_two_qubit(u[:, k], b4, a, b, layout.n)
            for k in range(dim)
        ]
        u = np.column_stack(cols)
    return u


def apply_layout_to_state(psi: np.ndarray, layout: TnLayout,
                          theta: np.ndarray) -> np.ndarray:
    """Apply the network to a state: ``U(theta) |psi>``, layer 1 first."""
    angles = split_block_params(layout, theta)
    for j, (_, a, b) in enumerate(layout.blocks):
        psi = _statevec.apply_two_qubit(psi, block_unitary(*angles[j]),
                                        a, b, layout.n)
    return psi
