"""Low-level dense state-vector primitives shared across modules.

State amplitudes are indexed so that site ``i`` occupies bit ``i`` of the
basis index (site 0 is the least significant bit).  Two-qubit gates on
sites ``(a, b)`` use the local basis index ``2*bit_b + bit_a``.
"""

from __future__ import annotations

import numpy as np


def zero_state(n: int) -> np.ndarray:
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = 1.0
    return psi


def apply_one_qubit(psi: np.ndarray, u2: np.ndarray, q: int, n: int) -> np.ndarray:
    t = psi.reshape((2,) * n)
    ax = n - 1 - q
    t = np.moveaxis(t, ax, 0).reshape(2, -1)
    t = u2 @ t
    return np.moveaxis(t.reshape((2,) * n), 0, ax).reshape(-1)


def apply_two_qubit(psi: np.ndarray, u4: np.ndarray, a: int, b: int,
                    n: int) -> np.ndarray:
    t = psi.reshape((2,) * n)
    ax_a, ax_b = n - 1 - a, n - 1 - b
    t = np.moveaxis(t, (ax_b, ax_a), (0, 1)).reshape(4, -1)
    t = u4 @ t
    t = t.reshape((2, 2) + (2,) * (n - 2))
    return np.moveaxis(t, (0, 1), (ax_b, ax_a)).reshape(-1)


def apply_pauli(psi: np.ndarray, x: int, z: int) -> np.ndarray:
    """Apply the Pauli string with masks ``(x, z)``."""
    dim = psi.size
    idx = np.arange(dim)
    ny = (x & z).bit_count()
    signs = 1.0 - 2.0 * (np.bitwise_count(idx & z) & 1)
    out = np.empty(dim, dtype=complex)
    out[idx ^ x] = (1j**ny) * signs * psi
    return out


def pauli_expectation(psi: np.ndarray, x: int, z: int) -> float:
    """Exact ``<psi|P|psi>`` for the Pauli string with masks ``(x, z)``."""
    dim = psi.size
    idx = np.arange(dim)
    ny = (x & z).bit_count()
    signs = 1.0 - 2.0 * (np.bitwise_count(idx & z) & 1)
    val = (1j**ny) * np.vdot(psi[idx ^ x], signs * psi)
    return float(val.real)


def apply_pauli_sum(psi: np.ndarray, xs: np.ndarray, zs: np.ndarray,
                    cs: np.ndarray) -> np.ndarray:
    """``H |psi>`` for a real-coefficient Pauli sum given as mask arrays."""
    dim = psi.size
    idx = np.arange(dim, dtype=np.uint64)
    out = np.zeros(dim, dtype=complex)
    for x, z, c in zip(xs, zs, cs):
        ny = int(x & z).bit_count()
        signs = 1.0 - 2.0 * (np.bitwise_count(idx & z) & 1)
        out[idx ^ x] += (c * 1j**ny) * signs * psi
    return out


def pauli_sum_expectation(psi: np.ndarray, xs: np.ndarray, zs: np.ndarray,
                          cs: np.ndarray) -> float:
    """Exact ``<psi| sum_t c_t P_t |psi>`` grouped over shared X masks."""
    dim = psi.size
    idx = np.arange(dim, dtype=np.uint64)
    total = 0.0 + 0.0j
    order = np.argsort(xs, kind="stable")
    xs, zs, cs = xs[order], zs[order], cs[order]
    start = 0
    for stop in range(1, len(xs) + 1):
        if stop < len(xs) and xs[stop] == xs[start]:
            continue
        x = xs[start]
        gathered = np.conj(psi[idx ^ x]) * psi
        for t in range(start, stop):
            ny = int(xs[t] & zs[t]).bit_count()
            signs = 1.0 - 2.0 * (np.bitwise_count(idx & zs[t]) & 1)
            total += (cs[t] * 1j**ny) * np.sum(gathered * signs)
        start = stop
    return float(total.real)
