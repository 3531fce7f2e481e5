"""Optimization schedules for the network-assisted eigensolver.

Three strategies: alternating descent on the circuit parameters ``phi``
and the network parameters ``theta``, a parallel schedule that updates
both from the same cycle start, and the plain VQE baseline (``theta``
absent).  Plain gradient descent with a fixed learning rate keeps the
traces attributable to the schedule itself.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import simulator, tn_rotation
from .pauli import PauliSum
from .simulator import AnsatzSpec
from .tn_rotation import TnLayout


@dataclass
class OptimizerConfig:
    learning_rate: float = 0.05
    max_steps: int = 100
    tolerance: float = 1e-3
    strategy: str = "alternating"  # "alternating" | "parallel" | "pure_vqe"
    n_c: int = 1  # classical sub-steps per cycle (parallel strategy)
    n_q: int = 1  # quantum sub-steps per cycle (parallel strategy)
    seed: int = 0
    initial_phi: np.ndarray | None = None
    initial_theta: np.ndarray | None = None
    freeze_theta: bool = False
    prune_eps: float = 1e-12
    # "statevector" evaluates the analytic gradients by adjoint sweeps;
    # "pauli" goes through the explicit Pauli expansion (parameter shift
    # plus coefficient gradients).  Both produce the same numbers; the
    # equality is covered by tests.
    gradient_mode: str = "statevector"
    record_term_counts: bool = True
    record_parameters: bool = False

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError("learning rate must be non-negative")
        if self.n_c < 1 or self.n_q < 1:
            raise ValueError("n_c and n_q must be at least 1")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.strategy not in ("alternating", "parallel", "pure_vqe"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.gradient_mode not in ("statevector", "pauli"):
            raise ValueError(f"unknown gradient mode {self.gradient_mode!r}")


@dataclass
class StepRecord:
    step: int
    energy: float
    grad_phi_norm: float
    grad_theta_norm: float
    term_count: int
    wall_time: float
    phi: np.ndarray | None = None
    theta: np.ndarray | None = None


@dataclass
class RunRecord:
    steps: list[StepRecord] = field(default_factory=list)
    converged: bool = False
    failed: bool = False
    message: str = ""
    best_energy: float = math.inf
    best_phi: np.ndarray | None = None
    best_theta: np.ndarray | None = None

    @property
    def final_energy(self) -> float:
        return self.steps[-1].energy if self.steps else math.nan

    def _note(self, step, energy, gphi, gtheta, terms, t0,
              phi=None, theta=None):
        self.steps.append(StepRecord(step, energy, gphi, gtheta, terms,
                                     time.perf_counter() - t0, phi, theta))


class _Evaluator:
    """Energy/gradient backend shared by the strategies.

    The Pauli mode keeps an expectation cache keyed by the Pauli masks,
    valid for one fixed ``phi``; the parallel strategy relies on this to
    reuse the cycle's measured expectations across classical sub-steps.
    """

    def __init__(self, h: PauliSum, layout: TnLayout | None,
                 ansatz: AnsatzSpec, cfg: OptimizerConfig):
        self.h = h
        self.layout = layout
        self.ansatz = ansatz
        self.cfg = cfg
        self._cache_phi: tuple | None = None
        self._cache: dict = {}
        self._sweep_key: tuple | None = None
        self._sweep: tuple | None = None

    def _adjoint(self, theta, phi):
        # successive calls often land on the same (theta, phi) point
        # (e.g. the convergence energy and the next cycle's gradient),
        # so keep the last sweep around
        key = (None if theta is None else theta.tobytes(), phi.tobytes())
        if self._sweep_key != key:
            self._sweep = simulator.energy_and_gradients(
                self.h, self.ansatz, phi, self.layout, theta)
            self._sweep_key = key
        return self._sweep

    def energy(self, theta, phi) -> float:
        if self.cfg.gradient_mode == "statevector" or self.layout is None:
            return self._adjoint(theta, phi)[0]
        rot = self._rotated(theta)
        return simulator.energy(rot, self.ansatz, phi)

    def phi_gradient(self, theta, phi) -> np.ndarray:
        if self.cfg.gradient_mode == "statevector":
            return self._adjoint(theta, phi)[1]
        rot = self._rotated(theta) if self.layout is not None else self.h
        return simulator.parameter_shift_gradient(rot, self.ansatz, phi)

    def theta_gradient(self, theta, phi) -> np.ndarray:
        if self.cfg.gradient_mode == "statevector":
            return self._adjoint(theta, phi)[2]
        grads = tn_rotation.coefficient_gradients(
            self.h, self.layout, theta, self.cfg.prune_eps)
        psi = simulator.run(self.ansatz, phi)
        key = tuple(np.asarray(phi).tolist())
        if self._cache_phi != key:
            self._cache_phi = key
            self._cache = {}
        out = np.empty(len(grads))
        from ._statevec import pauli_expectation
        for k, g in enumerate(grads):
            acc = 0.0
            for p, c in g:
                pk = (p.x_bits, p.z_bits)
                if pk not in self._cache:
                    self._cache[pk] = pauli_expectation(psi, p.x_bits,
                                                        p.z_bits)
                acc += c * self._cache[pk]
            out[k] = acc
        return out

    def term_count(self, theta) -> int:
        if self.layout is None:
            return len(self.h)
        return self._rotated(theta).term_count

    def _rotated(self, theta):
        return tn_rotation.rotate_hamiltonian(self.h, self.layout, theta,
                                              self.cfg.prune_eps)


def _init_params(cfg: OptimizerConfig, ansatz: AnsatzSpec,
                 layout: TnLayout | None):
    rng = np.random.default_rng(cfg.seed)
    if cfg.initial_phi is not None:
        phi = np.asarray(cfg.initial_phi, dtype=float).copy()
        if phi.shape != (ansatz.param_count,):
            raise ValueError("initial phi has wrong length")
    else:
        phi = rng.uniform(0.0, 2.0 * math.pi, ansatz.param_count)
    theta = None
    if layout is not None:
        if cfg.initial_theta is not None:
            theta = np.asarray(cfg.initial_theta, dtype=float).copy()
            if theta.shape != (layout.param_count,):
                raise ValueError("initial theta has wrong length")
        else:
            theta = rng.uniform(0.0, 2.0 * math.pi, layout.param_count)
    return phi, theta


def _finish(rec: RunRecord, energy, phi, theta, converged):
    if energy < rec.best_energy:
        rec.best_energy = energy
        rec.best_phi = phi.copy()
        rec.best_theta = None if theta is None else theta.copy()
    rec.converged = converged


def _run_schedule(h, layout, ansatz, cfg: OptimizerConfig) -> RunRecord:
    ev = _Evaluator(h, layout, ansatz, cfg)
    phi, theta = _init_params(cfg, ansatz, layout)
    eta = cfg.learning_rate
    rec = RunRecord()
    t0 = time.perf_counter()
    prev_e = None
    for step in range(1, cfg.max_steps + 1):
        gth_norm = 0.0
        if cfg.strategy == "parallel" and layout is not None:
            phi0, theta0 = phi.copy(), theta.copy()
            for _ in range(cfg.n_q):
                gphi = ev.phi_gradient(theta0, phi)
                phi = phi - eta * gphi
            if not cfg.freeze_theta:
                for _ in range(cfg.n_c):
                    gth = ev.theta_gradient(theta, phi0)
                    theta = theta - eta * gth
                gth_norm = float(np.linalg.norm(gth))
        else:
            gphi = ev.phi_gradient(theta, phi)
            phi = phi - eta * gphi
            if layout is not None and not cfg.freeze_theta:
                gth = ev.theta_gradient(theta, phi)
                theta = theta - eta * gth
                gth_norm = float(np.linalg.norm(gth))
        if not (np.all(np.isfinite(phi))
                and (theta is None or np.all(np.isfinite(theta)))):
            rec.failed = True
            rec.message = f"non-finite parameters at step {step}"
            rec._note(step, math.nan, float(np.linalg.norm(gphi)),
                      gth_norm, -1, t0)
            return rec
        e = ev.energy(theta, phi)
        if not math.isfinite(e):
            rec.failed = True
            rec.message = f"non-finite energy at step {step}"
            rec._note(step, e, float(np.linalg.norm(gphi)), gth_norm, -1, t0)
            return rec
        terms = ev.term_count(theta) if cfg.record_term_counts else -1
        rec._note(step, e, float(np.linalg.norm(gphi)), gth_norm, terms, t0,
                  phi.copy() if cfg.record_parameters else None,
                  theta.copy() if cfg.record_parameters and theta is not None
                  else None)
        _finish(rec, e, phi, theta,
                prev_e is not None and abs(e - prev_e) < cfg.tolerance)
        if rec.converged:
            break
        prev_e = e
    return rec


def optimize_alternating(h: PauliSum, layout: TnLayout, ansatz: AnsatzSpec,
                         cfg: OptimizerConfig) -> RunRecord:
    """Per cycle: one descent step on phi at fixed theta, then one on
    theta at the fresh phi."""
    cfg = _with_strategy(cfg, "alternating")
    _check_dims(h, layout, ansatz)
    return _run_schedule(h, layout, ansatz, cfg)


def optimize_parallel(h: PauliSum, layout: TnLayout, ansatz: AnsatzSpec,
                      cfg: OptimizerConfig) -> RunRecord:
    """Per cycle both parameter sets start from the cycle's initial
    values: n_q circuit steps at fixed theta_0 and n_c network steps at
    fixed phi_0 (expectations measured once at phi_0 are reused)."""
    cfg = _with_strategy(cfg, "parallel")
    _check_dims(h, layout, ansatz)
    return _run_schedule(h, layout, ansatz, cfg)


def optimize_pure_vqe(h: PauliSum, ansatz: AnsatzSpec,
                      cfg: OptimizerConfig) -> RunRecord:
    """Baseline without the classical network."""
    cfg = _with_strategy(cfg, "pure_vqe")
    if h.n != ansatz.n:
        raise ValueError("Hamiltonian and ansatz qubit counts differ")
    return _run_schedule(h, None, ansatz, cfg)


def _with_strategy(cfg: OptimizerConfig, strategy: str) -> OptimizerConfig:
    if cfg.strategy != strategy:
        from dataclasses import replace
        cfg = replace(cfg, strategy=strategy)
    return cfg


def _check_dims(h, layout, ansatz):
    if layout is None:
        raise ValueError("this strategy needs a network layout")
    if not (h.n == layout.n == ansatz.n):
        raise ValueError("Hamiltonian, layout and ansatz sizes differ")
