"""Exact Pauli-string algebra on bitmasks.

A Pauli string on ``n`` qubits is stored as a pair of integer bitmasks
``(x, z)``: bit ``i`` of ``x`` set means an X component on site ``i``, bit
``i`` of ``z`` a Z component, and both set means Y.  Site 0 is the leftmost
character in the textual ``"XIZY..."`` format.  Strings themselves are
phase-free; phases produced by multiplication are returned separately or
folded into real coefficients of a :class:`PauliSum`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_DENSE_N_MAX = 12

# Single-site products P(x1,z1) * P(x2,z2) = i^e * P(x1^x2, z1^z2).
# Index (x1 + 2*z1, x2 + 2*z2); entries are the exponent e mod 4.
_SITE_PHASE_EXP = np.array(
    [
        [0, 0, 0, 0],  # I * {I,X,Z,Y}
        [0, 0, 3, 1],  # X * {I,X,Z,Y}:  XZ = -iY, XY = iZ
        [0, 1, 0, 3],  # Z * {I,X,Z,Y}:  ZX = iY,  ZY = -iX
        [0, 3, 1, 0],  # Y * {I,X,Z,Y}:  YX = -iZ, YZ = iX
    ],
    dtype=np.int64,
)

_PHASES = np.array([1, 1j, -1, -1j])

_CHAR_TO_XZ = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_XZ_TO_CHAR = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}


@dataclass(frozen=True)
class PauliTerm:
    """A single phase-free Pauli string on ``n`` qubits."""

    n: int
    x_bits: int
    z_bits: int

    def __post_init__(self):
        mask = (1 << self.n) - 1
        if self.n < 1:
            raise ValueError("qubit count must be positive")
        if self.x_bits & ~mask or self.z_bits & ~mask:
            raise ValueError("bitmask exceeds qubit count")

    @classmethod
    def from_label(cls, label: str) -> "PauliTerm":
        x = z = 0
        for i, ch in enumerate(label):
            try:
                xi, zi = _CHAR_TO_XZ[ch]
            except KeyError:
                raise ValueError(f"invalid Pauli character {ch!r}") from None
            x |= xi << i
            z |= zi << i
        return cls(len(label), x, z)

    @classmethod
    def identity(cls, n: int) -> "PauliTerm":
        return cls(n, 0, 0)

    def to_label(self) -> str:
        return "".join(
            _XZ_TO_CHAR[(self.x_bits >> i) & 1, (self.z_bits >> i) & 1]
            for i in range(self.n)
        )

    def site(self, i: int) -> str:
        return _XZ_TO_CHAR[(self.x_bits >> i) & 1, (self.z_bits >> i) & 1]

    @property
    def support(self) -> tuple[int, ...]:
        """Indices of non-identity sites."""
        xz = self.x_bits | self.z_bits
        return tuple(i for i in range(self.n) if (xz >> i) & 1)

    @property
    def is_identity(self) -> bool:
        return self.x_bits == 0 and self.z_bits == 0

    @property
    def y_count(self) -> int:
        return (self.x_bits & self.z_bits).bit_count()

    def to_dense(self) -> np.ndarray:
        """Dense matrix of this string (small n only)."""
        if self.n > _DENSE_N_MAX:
            raise ValueError(f"n={self.n} too large for dense materialization")
        dim = 1 << self.n
        idx = np.arange(dim)
        signs = 1.0 - 2.0 * (np.bitwise_count(idx & self.z_bits) & 1)
        m = np.zeros((dim, dim), dtype=complex)
        m[idx ^ self.x_bits, idx] = (1j**self.y_count) * signs
        return m

    def __repr__(self):
        return f"PauliTerm({self.to_label()!r})"


def mul(a: PauliTerm, b: PauliTerm) -> tuple[complex, PauliTerm]:
    """Product ``a @ b`` as ``(phase, string)`` with phase in {1, i, -1, -i}."""
    if a.n != b.n:
        raise ValueError(f"qubit count mismatch: {a.n} != {b.n}")
    exp = 0
    rest = a.x_bits | a.z_bits | b.x_bits | b.z_bits
    i = 0
    while rest >> i:
        pa = ((a.x_bits >> i) & 1) + 2 * ((a.z_bits >> i) & 1)
        pb = ((b.x_bits >> i) & 1) + 2 * ((b.z_bits >> i) & 1)
        exp += _SITE_PHASE_EXP[pa, pb]
        i += 1
    phase = complex(_PHASES[exp % 4])
    return phase, PauliTerm(a.n, a.x_bits ^ b.x_bits, a.z_bits ^ b.z_bits)


def commutes(a: PauliTerm, b: PauliTerm) -> bool:
    """Whether two Pauli strings commute (symplectic product is even)."""
    if a.n != b.n:
        raise ValueError(f"qubit count mismatch: {a.n} != {b.n}")
    anti = (a.x_bits & b.z_bits).bit_count() + (a.z_bits & b.x_bits).bit_count()
    return anti % 2 == 0


def neighboring_width(p: PauliTerm) -> int:
    """Span of the non-identity support in the 1D site order.

    A string is m-neighboring iff its width is at most m; the identity has
    width 0.
    """
    xz = p.x_bits | p.z_bits
    if xz == 0:
        return 0
    lo = (xz & -xz).bit_length() - 1
    hi = xz.bit_length() - 1
    return hi - lo + 1


def neighboring_width_2d(p: PauliTerm, rows: int, cols: int) -> int:
    """Chebyshev span of the support over lattice coordinates.

    Sites are the row-major linearization of a ``rows x cols`` grid.
    """
    if rows * cols != p.n:
        raise ValueError("grid shape does not match qubit count")
    sup = p.support
    if not sup:
        return 0
    rs = [s // cols for s in sup]
    cs = [s % cols for s in sup]
    return max(max(rs) - min(rs), max(cs) - min(cs)) + 1


class PauliSum:
    """A Hermitian operator ``sum_P c_P P`` with real coefficients.

    Terms are stored in a dict keyed by :class:`PauliTerm`; an optional
    prune threshold ``eps`` drops coefficients with ``|c| <= eps`` on
    construction (``eps=0`` keeps everything, i.e. exact arithmetic).
    """

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms: dict[PauliTerm, float] | None = None,
                 eps: float = 0.0):
        if eps < 0:
            raise ValueError("prune threshold must be non-negative")
        self.n = n
        self._terms: dict[PauliTerm, float] = {}
        if terms:
            for p, c in terms.items():
                if p.n != n:
                    raise ValueError("term size does not match sum")
                c = float(c)
                if eps == 0.0 or abs(c) > eps:
                    self._terms[p] = c

    @property
    def terms(self) -> dict[PauliTerm, float]:
        return dict(self._terms)

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def __getitem__(self, p: PauliTerm) -> float:
        return self._terms.get(p, 0.0)

    def __eq__(self, other):
        return (isinstance(other, PauliSum) and self.n == other.n
                and self._terms == other._terms)

    def coefficient_norm_sq(self) -> float:
        """``sum_P c_P^2``, conserved under unitary conjugation."""
        return float(sum(c * c for c in self._terms.values()))

    def scaled(self, factor: float) -> "PauliSum":
        return PauliSum(self.n, {p: factor * c for p, c in self._terms.items()})

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if self.n != other.n:
            raise ValueError("qubit count mismatch")
        merged = dict(self._terms)
        for p, c in other._terms.items():
            merged[p] = merged.get(p, 0.0) + c
        return PauliSum(self.n, merged)

    def pruned(self, eps: float) -> "PauliSum":
        return PauliSum(self.n, self._terms, eps=eps)

    def max_width(self) -> int:
        return max((neighboring_width(p) for p in self._terms), default=0)

    def to_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(x_masks, z_masks, coefficients)`` as flat arrays."""
        k = len(self._terms)
        xs = np.empty(k, dtype=np.uint64)
        zs = np.empty(k, dtype=np.uint64)
        cs = np.empty(k, dtype=np.float64)
        for i, (p, c) in enumerate(self._terms.items()):
            xs[i] = p.x_bits
            zs[i] = p.z_bits
            cs[i] = c
        return xs, zs, cs

    @classmethod
    def from_arrays(cls, n: int, xs: np.ndarray, zs: np.ndarray,
                    cs: np.ndarray, eps: float = 0.0) -> "PauliSum":
        terms = {
            PauliTerm(n, int(x), int(z)): float(c)
            for x, z, c in zip(xs, zs, cs)
        }
        return cls(n, terms, eps=eps)

    def __repr__(self):
        body = " + ".join(
            f"{c:+g}*{p.to_label()}" for p, c in list(self._terms.items())[:4]
        )
        tail = " + ..." if len(self._terms) > 4 else ""
        return f"PauliSum(n={self.n}, {len(self._terms)} terms: {body}{tail})"


def to_dense(s: PauliSum) -> np.ndarray:
    """Dense Hermitian matrix of a PauliSum (guarded to small n)."""
    if s.n > _DENSE_N_MAX:
        raise ValueError(f"n={s.n} too large for dense materialization")
    dim = 1 << s.n
    m = np.zeros((dim, dim), dtype=complex)
    idx = np.arange(dim)
    for p, c in s:
        signs = 1.0 - 2.0 * (np.bitwise_count(idx & p.z_bits) & 1)
        m[idx ^ p.x_bits, idx] += c * (1j**p.y_count) * signs
    return m


def _fwht(v: np.ndarray) -> np.ndarray:
    """In-place fast Walsh-Hadamard transform along the last axis."""
    h = 1
    n = v.shape[-1]
    while h < n:
        v = v.reshape(v.shape[:-1] + (n // (2 * h), 2, h))
        a = v[..., 0, :] + v[..., 1, :]
        b = v[..., 0, :] - v[..., 1, :]
        v = np.stack([a, b], axis=-2).reshape(v.shape[:-3] + (n,))
        h *= 2
    return v


def decompose_dense(m: np.ndarray, n: int, eps: float = 0.0,
                    herm_tol: float = 1e-9) -> PauliSum:
    """Pauli decomposition ``c_P = Tr(P m) / 2^n`` of a Hermitian matrix.

    Round-trips with :func:`to_dense`: the reconstruction ``sum_P c_P P``
    equals ``m`` exactly (up to float arithmetic) at ``eps=0``.
    """
    if n > _DENSE_N_MAX:
        raise ValueError(f"n={n} too large for dense decomposition")
    dim = 1 << n
    if m.shape != (dim, dim):
        raise ValueError(f"matrix shape {m.shape} does not match n={n}")
    if np.max(np.abs(m - m.conj().T)) > herm_tol:
        raise ValueError("matrix is not Hermitian within tolerance")
    idx = np.arange(dim)
    terms: dict[PauliTerm, float] = {}
    for x in range(dim):
        # Tr(P_{x,z} m) = i^{|Y|} * sum_b (-1)^{parity(b & z)} m[b, b ^ x];
        # the sum over b is the Walsh-Hadamard transform evaluated at z.
        v = _fwht(m[idx, idx ^ x].copy())
        for z in range(dim):
            pre = 1j ** int(np.bitwise_count(np.uint64(x) & np.uint64(z)))
            c = pre * v[z] / dim
            if abs(c.imag) > herm_tol:
                raise ValueError("matrix is not Hermitian within tolerance")
            if abs(c.real) > max(eps, 1e-14):
                terms[PauliTerm(n, x, z)] = float(c.real)
    return PauliSum(n, terms)
