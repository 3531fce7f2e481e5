"""Diagnostics: exact ground energies, purity-based expressivity metrics
with Haar baselines, random-bipartition sweeps, and gradient-variance
experiments for barren-plateau behaviour.

The expressivity indicator is

    delta_t = log( E_Haar[Tr rho_A^t] / E_ensemble[Tr rho_A^t] ),

which is 0 for Haar-equivalent ensembles and negative otherwise.  The
Haar baseline is estimated by Monte Carlo over normalized complex
Gaussian vectors; both Monte Carlo errors propagate into the reported
standard error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh

from . import simulator, tn_rotation
from ._statevec import apply_pauli_sum, pauli_sum_expectation, zero_state
from .hamiltonians import build_tfim_1d
from .pauli import PauliSum
from .simulator import AnsatzSpec
from .tn_rotation import TnLayout, apply_layout_to_state, make_layout


def exact_ground_energy(h: PauliSum) -> float:
    """Smallest eigenvalue of a Pauli sum.

    Dense diagonalization up to 10 qubits, otherwise a Lanczos iteration
    driven by matrix-free Pauli-sum application.  The returned value is
    checked to satisfy ``|H v - lambda v| <= 1e-8``.
    """
    if h.n > 16:
        raise ValueError("ground-state oracle limited to 16 qubits")
    if len(h) == 0:
        return 0.0
    xs, zs, cs = h.to_arrays()
    dim = 1 << h.n
    if h.n <= 10:
        from .pauli import to_dense

        w, v = np.linalg.eigh(to_dense(h))
        return float(w[0])
    op = LinearOperator(
        (dim, dim),
        matvec=lambda v: apply_pauli_sum(np.asarray(v, dtype=complex),
                                         xs, zs, cs),
        dtype=complex,
    )
    w, v = eigsh(op, k=1, which="SA", maxiter=2000)
    vec = v[:, 0]
    resid = np.linalg.norm(apply_pauli_sum(vec, xs, zs, cs) - w[0] * vec)
    if resid > 1e-8:
        raise RuntimeError(
            f"eigensolver residual {resid:.3e} exceeds 1e-8")
    return float(w[0])


@dataclass(frozen=True)
class BipartitionSpec:
    """Kept subsystem of a bipartition."""

    subset: tuple[int, ...]

    def __post_init__(self):
        if len(self.subset) == 0:
            raise ValueError("subset must be non-empty")
        if len(set(self.subset)) != len(self.subset):
            raise ValueError("subset has repeated sites")

    def complement(self, n: int) -> tuple[int, ...]:
        keep = set(self.subset)
        return tuple(q for q in range(n) if q not in keep)


def _split_matrix(state: np.ndarray, subset: tuple[int, ...]) -> np.ndarray:
    """Reshape a pure state into a (kept, discarded) matrix."""
    n = state.size.bit_length() - 1
    keep = sorted(subset, reverse=True)
    if any(q < 0 or q >= n for q in keep):
        raise ValueError("subset site out of range")
    rest = [q for q in range(n - 1, -1, -1) if q not in set(keep)]
    axes = [n - 1 - q for q in keep] + [n - 1 - q for q in rest]
    t = state.reshape((2,) * n).transpose(axes)
    return t.reshape(1 << len(keep), -1)


def reduced_density_matrix(state: np.ndarray,
                           a: BipartitionSpec) -> np.ndarray:
    """Partial trace onto the kept subsystem (site order preserved, the
    lowest kept site is the least significant bit of the reduced index)."""
    if len(a.subset) > 13:
        raise ValueError("kept subsystem too large (limit 13 sites)")
    m = _split_matrix(state, a.subset)
    return m @ m.conj().T


def purity_moment(state: np.ndarray, a: BipartitionSpec, t: int) -> float:
    """``Tr(rho_A^t)`` for the reduced state over ``a``, t in {2, 3}.

    Pure global states give equal moments for a subsystem and its
    complement, so the Gram matrix is built on the smaller side.
    """
    if t not in (2, 3):
        raise ValueError("moment order must be 2 or 3")
    n = state.size.bit_length() - 1
    subset = a.subset
    if len(subset) > n - len(subset):
        subset = a.complement(n)
    if len(subset) == 0:  # degenerate full-system cut of a pure state
        return 1.0
    if len(subset) > 13:
        raise ValueError("kept subsystem too large (limit 13 sites)")
    m = _split_matrix(state, subset)
    g = m @ m.conj().T
    if t == 2:
        return float(np.vdot(g, g).real)
    return float(np.einsum("ij,jk,ki->", g, g, g).real)


@dataclass(frozen=True)
class MomentEstimate:
    estimate: float
    std_error: float
    samples: int


def haar_moment(n: int, a: BipartitionSpec, t: int,
                samples: int = 20000, seed: int = 0) -> MomentEstimate:
    """Monte Carlo estimate of ``E_Haar[Tr rho_A^t]``.

    Haar-random pure states are normalized complex Gaussian vectors; the
    moment depends only on the two subsystem dimensions.
    """
    if t not in (2, 3):
        raise ValueError("moment order must be 2 or 3")
    ka = len(a.subset)
    if ka == n:
        return MomentEstimate(1.0, 0.0, samples)
    ka = min(ka, n - ka)
    da, db = 1 << ka, 1 << (n - ka)
    rng = np.random.default_rng(seed)
    vals = np.empty(samples)
    batch = max(1, min(samples, (1 << 22) // (da * db)))
    done = 0
    while done < samples:
        b = min(batch, samples - done)
        m = rng.standard_normal((b, da, db)) + 1j * rng.standard_normal(
            (b, da, db))
        m /= np.linalg.norm(m.reshape(b, -1), axis=1)[:, None, None]
        g = np.einsum("sij,skj->sik", m, m.conj())
        if t == 2:
            vals[done:done + b] = np.einsum("sik,sik->s", g,
                                            g.conj()).real
        else:
            vals[done:done + b] = np.einsum("sij,sjk,ski->s", g, g, g).real
        done += b
    mean = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(samples))
    return MomentEstimate(mean, se, samples)


@dataclass(frozen=True)
class EnsembleSpec:
    """State ensemble over which purity moments are averaged.

    ``kind`` selects the sampler: ``"circuit"`` runs the ansatz (and the
    optional network layout) at Uniform[0, 2 pi) parameters, ``"haar"``
    draws Haar-random states, ``"product"`` is the fixed all-zero state.
    """

    n: int
    samples: int
    seed: int = 0
    kind: str = "circuit"
    ansatz: AnsatzSpec | None = None
    layout: TnLayout | None = None

    def __post_init__(self):
        if self.samples < 2:
            raise ValueError("need at least 2 ensemble samples")
        if self.kind not in ("circuit", "haar", "product"):
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.kind == "circuit" and self.ansatz is None:
            raise ValueError("circuit ensemble needs an ansatz")

    def sample_states(self):
        rng = np.random.default_rng(self.seed)
        for _ in range(self.samples):
            if self.kind == "product":
                yield zero_state(self.n)
            elif self.kind == "haar":
                v = rng.standard_normal(1 << self.n) + \
                    1j * rng.standard_normal(1 << self.n)
                yield v / np.linalg.norm(v)
            else:
                phi = rng.uniform(0.0, 2.0 * math.pi,
                                  self.ansatz.param_count)
                psi = simulator.run(self.ansatz, phi)
                if self.layout is not None:
                    theta = rng.uniform(0.0, 2.0 * math.pi,
                                        self.layout.param_count)
                    psi = apply_layout_to_state(psi, self.layout, theta)
                yield psi


def ensemble_moment(e: EnsembleSpec, a: BipartitionSpec,
                    t: int) -> MomentEstimate:
    vals = np.array([purity_moment(s, a, t) for s in e.sample_states()])
    mean = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(len(vals)))
    return MomentEstimate(mean, se, len(vals))


@dataclass(frozen=True)
class DeltaEstimate:
    estimate: float
    std_error: float
    haar: MomentEstimate
    ensemble: MomentEstimate


def delta_t(e: EnsembleSpec, a: BipartitionSpec, t: int,
            haar_samples: int = 20000, haar_seed: int = 1,
            haar: MomentEstimate | None = None) -> DeltaEstimate:
    """``log(E_Haar[Tr rho_A^t] / E_ensemble[Tr rho_A^t])`` with the two
    Monte Carlo errors propagated through the log ratio."""
    if haar is None:
        haar = haar_moment(e.n, a, t, haar_samples, haar_seed)
    ens = ensemble_moment(e, a, t)
    est = math.log(haar.estimate / ens.estimate)
    se = math.hypot(haar.std_error / haar.estimate,
                    ens.std_error / ens.estimate)
    return DeltaEstimate(est, se, haar, ens)


def random_partition_sweep(e: EnsembleSpec, t: int, trials: int,
                           seed: int = 0, haar_samples: int = 20000
                           ) -> list[tuple[tuple[int, ...], DeltaEstimate]]:
    """delta_t over random half-size subsets plus the contiguous first
    half.  The Haar baseline depends only on the cut size, so one
    estimate is shared across partitions."""
    if e.n % 2 != 0:
        raise ValueError("partition sweep needs an even site count")
    half = e.n // 2
    first = tuple(range(half))
    haar = haar_moment(e.n, BipartitionSpec(first), t, haar_samples,
                       seed + 1)
    rng = np.random.default_rng(seed)
    subsets = [first]
    for _ in range(trials):
        pick = rng.choice(e.n, size=half, replace=False)
        subsets.append(tuple(sorted(int(q) for q in pick)))
    return [(s, delta_t(e, BipartitionSpec(s), t, haar=haar))
            for s in subsets]


# Gradient-variance experiments.  The circuit layer used here is a
# row of RY gates, a row of RX gates and a chain of CNOTs; depth counts
# repetitions of that layer.  Depth 0 degenerates to a single RY row
# with no entanglers.


def _layered_ansatz(n: int, reps: int, extra_params: int = 0,
                    name: str = "layered") -> AnsatzSpec:
    gates = []
    pidx = 0
    if reps == 0 and extra_params == 0:
        for i in range(n):
            gates.append(("ry", i, pidx))
            pidx += 1
        return AnsatzSpec(n, tuple(gates), pidx, name=name)
    rounds = reps
    if extra_params > 0:
        rounds += -(-extra_params // (2 * n))  # append until count reached
    target = None if extra_params == 0 else reps * 2 * n + extra_params
    for _ in range(rounds):
        for kind in ("ry", "rx"):
            for i in range(n):
                if target is not None and pidx >= target:
                    break
                gates.append((kind, i, pidx))
                pidx += 1
        for i in range(n - 1):
            gates.append(("cnot", i, i + 1))
        if target is not None and pidx >= target:
            break
    return AnsatzSpec(n, tuple(gates), pidx, name=name)


@dataclass(frozen=True)
class GradientVarianceSetup:
    """Grid for the variance experiments.

    Four tagged derivatives per (depth, n) cell:

    - ``tn_quantum``: network-assisted circuit, first circuit parameter;
    - ``tn_classical``: network-assisted circuit, first network parameter;
    - ``matched_quantum``: network replaced by extra circuit layers with
      the same parameter count, first replacement parameter;
    - ``pqc_only``: bare circuit, first circuit parameter.

    Quantum derivatives use the parameter shift rule, the classical one
    the coefficient-gradient formula.  The cost function is the energy
    of the transverse-field Ising chain (J=1, g=1) unless ``hamiltonians``
    overrides it per site count.
    """

    ns: tuple[int, ...] = (4, 6, 8, 10)
    depths: tuple[int, ...] = (1, 4, 8)
    tn_layers: int = 2
    seed: int = 0
    include_tn: bool = True
    hamiltonians: dict | None = None

    def hamiltonian(self, n: int) -> PauliSum:
        if self.hamiltonians is not None and n in self.hamiltonians:
            return self.hamiltonians[n]
        return build_tfim_1d(n, 1.0, 1.0)


@dataclass(frozen=True)
class TagStats:
    samples: int
    mean: float
    variance: float
    mean_std_error: float


@dataclass
class VarianceReport:
    setup: GradientVarianceSetup
    samples: int
    cells: dict = field(default_factory=dict)  # (depth, n) -> {tag: TagStats}


def _stats(vals: np.ndarray) -> TagStats:
    return TagStats(len(vals), float(np.mean(vals)),
                    float(np.var(vals, ddof=1)),
                    float(np.std(vals, ddof=1) / math.sqrt(len(vals))))


def _shift_derivative(energy_fn, phi: np.ndarray, k: int) -> float:
    up = phi.copy()
    up[k] += math.pi / 2
    dn = phi.copy()
    dn[k] -= math.pi / 2
    return 0.5 * (energy_fn(up) - energy_fn(dn))


def gradient_variance_experiment(setup: GradientVarianceSetup,
                                 samples: int = 1000) -> VarianceReport:
    """Var(d_k C) over uniform parameter draws for the tagged parameters
    of each grid cell; cost C is the energy at the all-zero input."""
    report = VarianceReport(setup, samples)
    for depth in setup.depths:
        for n in setup.ns:
            h = setup.hamiltonian(n)
            base = _layered_ansatz(n, depth)
            cell: dict[str, TagStats] = {}
            layout = None
            if setup.include_tn and n >= 2:
                layout = make_layout("umpo1d", n, setup.tn_layers)
            rng = np.random.default_rng([setup.seed, depth, n])

            def base_energy(phi, psi_post=None):
                psi = simulator.run(base, phi)
                return simulator.state_energy(h, psi)

            if layout is not None:
                tnq = np.empty(samples)
                tnc = np.empty(samples)
                for s in range(samples):
                    phi = rng.uniform(0, 2 * math.pi, base.param_count)
                    theta = rng.uniform(0, 2 * math.pi, layout.param_count)

                    def e_tn(p):
                        psi = simulator.run(base, p)
                        psi = apply_layout_to_state(psi, layout, theta)
                        return simulator.state_energy(h, psi)

                    tnq[s] = _shift_derivative(e_tn, phi, 0)
                    g = tn_rotation.coefficient_gradient(h, layout, theta, 0)
                    gx, gz, gc = g.to_arrays()
                    psi = simulator.run(base, phi)
                    tnc[s] = pauli_sum_expectation(psi, gx, gz, gc) \
                        if len(gc) else 0.0
                cell["tn_quantum"] = _stats(tnq)
                cell["tn_classical"] = _stats(tnc)

                matched = _layered_ansatz(
                    n, depth, extra_params=layout.param_count,
                    name="matched")
                first_extra = base.param_count
                rng_m = np.random.default_rng([setup.seed, depth, n, 1])
                mq = np.empty(samples)
                for s in range(samples):
                    phi = rng_m.uniform(0, 2 * math.pi, matched.param_count)

                    def e_m(p):
                        return simulator.state_energy(
                            h, simulator.run(matched, p))

                    mq[s] = _shift_derivative(e_m, phi, first_extra)
                cell["matched_quantum"] = _stats(mq)

            rng_p = np.random.default_rng([setup.seed, depth, n, 2])
            pq = np.empty(samples)
            for s in range(samples):
                phi = rng_p.uniform(0, 2 * math.pi, base.param_count)
                pq[s] = _shift_derivative(base_energy, phi, 0)
            cell["pqc_only"] = _stats(pq)
            report.cells[(depth, n)] = cell
    return report
