"""Dense state-vector simulation of the parametrized quantum circuit part.

Ansatz templates, exact (infinite-shot) Pauli expectations, the energy
functional over a rotated Hamiltonian, parameter-shift gradients, and
depolarizing-noise trajectory sampling.  States are plain complex numpy
arrays of 2^n amplitudes with site ``i`` on bit ``i`` of the index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._statevec import (apply_one_qubit, apply_pauli, apply_pauli_sum,
                        apply_two_qubit, pauli_expectation,
                        pauli_sum_expectation, zero_state)
from .pauli import PauliSum, PauliTerm
from .tn_rotation import (RotatedHamiltonian, apply_layout_to_state,
                          block_unitary, split_block_params)

_CZ = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
# local two-qubit basis is 2*bit_b + bit_a; with (a, b) = (control, target)
# the control is the low bit, so indices 1 and 3 swap.
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
)


def _ry(alpha: float) -> np.ndarray:
    c, s = math.cos(alpha / 2), math.sin(alpha / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rx(alpha: float) -> np.ndarray:
    c, s = math.cos(alpha / 2), math.sin(alpha / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


@dataclass(frozen=True)
class AnsatzSpec:
    """A gate program: ``("ry"|"rx", site, param_index)`` rotations plus
    ``("cz"|"cnot", a, b)`` entanglers, applied in list order."""

    n: int
    gates: tuple[tuple, ...]
    param_count: int
    name: str = ""

    def __post_init__(self):
        seen = set()
        for g in self.gates:
            kind = g[0]
            if kind in ("ry", "rx"):
                _, site, pidx = g
                if not 0 <= site < self.n:
                    raise ValueError(f"gate site {site} out of range")
                seen.add(pidx)
            elif kind in ("cz", "cnot"):
                _, a, b = g
                if a == b or not (0 <= a < self.n and 0 <= b < self.n):
                    raise ValueError(f"invalid entangler sites ({a}, {b})")
            else:
                raise ValueError(f"unknown gate kind {kind!r}")
        if seen != set(range(self.param_count)):
            raise ValueError("parameter indices must be dense 0..k-1")


def template_a(n: int, m: int) -> AnsatzSpec:
    """m repetitions of [RY on every site, nearest-neighbor CZ chain]."""
    if n < 2 or m < 1:
        raise ValueError("need n >= 2 and m >= 1")
    gates = []
    pidx = 0
    for _ in range(m):
        for i in range(n):
            gates.append(("ry", i, pidx))
            pidx += 1
        for i in range(n - 1):
            gates.append(("cz", i, i + 1))
    return AnsatzSpec(n, tuple(gates), pidx, name=f"A(m={m})")


def template_b(n: int) -> AnsatzSpec:
    """Two repetitions of [RY layer, RX layer, CNOT chain]; 4n parameters."""
    if n < 2:
        raise ValueError("need n >= 2")
    gates = []
    pidx = 0
    for _ in range(2):
        for i in range(n):
            gates.append(("ry", i, pidx))
            pidx += 1
        for i in range(n):
            gates.append(("rx", i, pidx))
            pidx += 1
        for i in range(n - 1):
            gates.append(("cnot", i, i + 1))
    return AnsatzSpec(n, tuple(gates), pidx, name="B")


def template_c(n: int, m: int) -> AnsatzSpec:
    """m repetitions of [RY layer, nearest-neighbor CNOT chain]."""
    if n < 2 or m < 1:
        raise ValueError("need n >= 2 and m >= 1")
    gates = []
    pidx = 0
    for _ in range(m):
        for i in range(n):
            gates.append(("ry", i, pidx))
            pidx += 1
        for i in range(n - 1):
            gates.append(("cnot", i, i + 1))
    return AnsatzSpec(n, tuple(gates), pidx, name=f"C(m={m})")


def make_template(name: str, n: int, m: int = 1) -> AnsatzSpec:
    if name == "A":
        return template_a(n, m)
    if name == "B":
        return template_b(n)
    if name == "C":
        return template_c(n, m)
    raise ValueError(f"unknown ansatz template {name!r}")


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing trajectory noise: after each single-qubit (two-qubit)
    gate a uniformly random non-identity Pauli is inserted on the gate's
    qubit(s) with probability p1 (p2)."""

    p1: float
    p2: float
    trajectories: int = 40
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.p1 <= 1.0 and 0.0 <= self.p2 <= 1.0):
            raise ValueError("noise probabilities must lie in [0, 1]")
        if self.trajectories < 1:
            raise ValueError("need at least one trajectory")


def _gate_matrix(gate: tuple, phi: np.ndarray):
    kind = gate[0]
    if kind == "ry":
        return _ry(phi[gate[2]]), (gate[1],)
    if kind == "rx":
        return _rx(phi[gate[2]]), (gate[1],)
    if kind == "cz":
        return _CZ, (gate[1], gate[2])
    return _CNOT, (gate[1], gate[2])


def run(ansatz: AnsatzSpec, phi: np.ndarray,
        noise: NoiseModel | None = None,
        rng: np.random.Generator | None = None) -> np.ndarray:
    """Prepare ``U(phi)|0...0>``, optionally with stochastic Pauli noise
    inserted after each gate."""
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (ansatz.param_count,):
        raise ValueError(
            f"expected {ansatz.param_count} parameters, got {phi.shape}")
    if noise is not None and rng is None:
        rng = np.random.default_rng(noise.seed)
    psi = zero_state(ansatz.n)
    for gate in ansatz.gates:
        mat, sites = _gate_matrix(gate, phi)
        if len(sites) == 1:
            psi = apply_one_qubit(psi, mat, sites[0], ansatz.n)
        else:
            psi = apply_two_qubit(psi, mat, sites[0], sites[1], ansatz.n)
        if noise is not None:
            p = noise.p1 if len(sites) == 1 else noise.p2
            if p > 0.0 and rng.random() < p:
                psi = _insert_random_pauli(psi, sites, rng)
    return psi


def _insert_random_pauli(psi: np.ndarray, sites: tuple[int, ...],
                         rng: np.random.Generator) -> np.ndarray:
    # site codes 1..3 (X, Z, Y); two-qubit draws exclude the identity pair
    if len(sites) == 1:
        codes = [(int(rng.integers(1, 4)), sites[0])]
    else:
        k = int(rng.integers(1, 16))
        codes = [(k & 3, sites[0]), (k >> 2, sites[1])]
    x = z = 0
    for code, site in codes:
        x |= (code & 1) << site
        z |= ((code >> 1) & 1) << site
    return apply_pauli(psi, x, z)


def expectation(state: np.ndarray, p: PauliTerm) -> float:
    """Exact ``<psi|P|psi>`` in [-1, 1]."""
    if state.size != 1 << p.n:
        raise ValueError("state and Pauli term sizes differ")
    return pauli_expectation(state, p.x_bits, p.z_bits)


def _sum_arrays(h) -> tuple[int, np.ndarray, np.ndarray, np.ndarray]:
    s = h.sum if isinstance(h, RotatedHamiltonian) else h
    xs, zs, cs = s.to_arrays()
    return s.n, xs, zs, cs


def energy(r, ansatz: AnsatzSpec, phi: np.ndarray) -> float:
    """``E = sum_P c_P <P>_phi`` for a PauliSum or RotatedHamiltonian."""
    n, xs, zs, cs = _sum_arrays(r)
    if n != ansatz.n:
        raise ValueError("Hamiltonian and ansatz qubit counts differ")
    psi = run(ansatz, phi)
    return pauli_sum_expectation(psi, xs, zs, cs)


def state_energy(r, psi: np.ndarray) -> float:
    """``sum_P c_P <P>`` evaluated on an existing state."""
    n, xs, zs, cs = _sum_arrays(r)
    if psi.size != 1 << n:
        raise ValueError("state and Hamiltonian sizes differ")
    return pauli_sum_expectation(psi, xs, zs, cs)


def parameter_shift_gradient(r, ansatz: AnsatzSpec,
                             phi: np.ndarray) -> np.ndarray:
    """Exact gradient from +-pi/2 shifted energy evaluations."""
    phi = np.asarray(phi, dtype=float)
    grad = np.empty(ansatz.param_count)
    for k in range(ansatz.param_count):
        shifted = phi.copy()
        shifted[k] = phi[k] + math.pi / 2
        e_plus = energy(r, ansatz, shifted)
        shifted[k] = phi[k] - math.pi / 2
        e_minus = energy(r, ansatz, shifted)
        grad[k] = 0.5 * (e_plus - e_minus)
    return grad


_GEN_SITE = {"ry": (1, 1), "rx": (1, 0)}  # (x, z) mask bits of the generator


def energy_and_gradients(h: PauliSum, ansatz: AnsatzSpec, phi: np.ndarray,
                         layout=None, theta: np.ndarray | None = None):
    """Energy and analytic gradients in one reverse sweep.

    Evaluates ``E = <psi| U(theta)^dag H U(theta) |psi>`` with
    ``psi = U(phi)|0>`` and returns ``(E, dE/dphi, dE/dtheta)``.  The
    values coincide with the parameter-shift rule on the circuit side and
    with the coefficient-gradient formula on the network side; both
    equalities are exercised by tests.
    """
    phi = np.asarray(phi, dtype=float)
    n = ansatz.n
    psi = run(ansatz, phi)
    if layout is not None:
        angles = split_block_params(layout, theta)
        psi = apply_layout_to_state(psi, layout, theta)
    xs, zs, cs = h.to_arrays()
    bra = apply_pauli_sum(psi, xs, zs, cs)
    e = float(np.vdot(psi, bra).real)
    ket = psi

    grad_theta = None
    if layout is not None:
        grad_theta = np.zeros(layout.param_count)
        for j in range(len(layout.blocks) - 1, -1, -1):
            _, a, b = layout.blocks[j]
            for gi, (gx, gz) in enumerate(
                    (((1 << a) | (1 << b), 0),  # XX
                     ((1 << a) | (1 << b), (1 << a) | (1 << b)),  # YY
                     (0, (1 << a) | (1 << b)))):  # ZZ
                # dB/dt = iG B  =>  dE/dt = -2 Im <bra|G|ket>
                gk = apply_pauli(ket, gx, gz)
                grad_theta[3 * j + gi] = -2.0 * float(np.vdot(bra, gk).imag)
            bd = block_unitary(*angles[j]).conj().T
            ket = apply_two_qubit(ket, bd, a, b, n)
            bra = apply_two_qubit(bra, bd, a, b, n)

    grad_phi = np.zeros(ansatz.param_count)
    for gate in reversed(ansatz.gates):
        mat, sites = _gate_matrix(gate, phi)
        if gate[0] in _GEN_SITE:
            xbit, zbit = _GEN_SITE[gate[0]]
            site = gate[1]
            # dR/da = -i G/2 R  =>  dE/da = Im <bra|G|ket>
            gk = apply_pauli(ket, xbit << site, zbit << site)
            grad_phi[gate[2]] = float(np.vdot(bra, gk).imag)
        md = mat.conj().T
        if len(sites) == 1:
            ket = apply_one_qubit(ket, md, sites[0], n)
            bra = apply_one_qubit(bra, md, sites[0], n)
        else:
            ket = apply_two_qubit(ket, md, sites[0], sites[1], n)
            bra = apply_two_qubit(bra, md, sites[0], sites[1], n)
    return e, grad_phi, grad_theta


@dataclass
class NoisyEnergy:
    mean: float
    error_bar: float
    values: np.ndarray


def noisy_energy(r, ansatz: AnsatzSpec, phi: np.ndarray,
                 noise: NoiseModel,
                 rng: np.random.Generator | None = None) -> NoisyEnergy:
    """Trajectory-sampled energy under depolarizing gate noise.

    The error bar is ``3 * sqrt(sum_i (v_i - mean)^2 / S^2)`` over the
    ``S`` per-trajectory estimates.
    """
    if rng is None:
        rng = np.random.default_rng(noise.seed)
    base = None
    if isinstance(r, RotatedHamiltonian) and r.source is not None:
        base = r.source.to_arrays()
    n, xs, zs, cs = _sum_arrays(r)
    values = np.empty(noise.trajectories)
    for t in range(noise.trajectories):
        psi = run(ansatz, phi, noise=noise, rng=rng)
        if base is not None:
            # <H(theta)> on the noisy circuit state equals <H> on the
            # network-transformed state; the network itself is classical
            # and noise-free.
            rot = apply_layout_to_state(psi, r.layout, r.theta)
            values[t] = pauli_sum_expectation(rot, *base)
        else:
            values[t] = pauli_sum_expectation(psi, xs, zs, cs)
    mean = float(values.mean())
    s = noise.trajectories
    err = 3.0 * math.sqrt(float(np.sum((values - mean) ** 2)) / s**2)
    return NoisyEnergy(mean, err, values)
