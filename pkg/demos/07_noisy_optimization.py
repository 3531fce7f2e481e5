"""Depolarizing trajectory noise on the quantum part of the eigensolver.

Noise is simulated by stochastically inserting uniform non-identity
Paulis after each gate; repeating the circuit gives a mean energy and an
error bar 3*sqrt(sum (v_i - mean)^2 / S^2).  The network part is a
classical transformation and stays noise-free.

Run: python3 demos/07_noisy_optimization.py
"""

import numpy as np

from tnvqe.analysis import exact_ground_energy
from tnvqe.hamiltonians import build_tfim_1d
from tnvqe.optimize import OptimizerConfig, optimize_alternating
from tnvqe.simulator import NoiseModel, make_template, noisy_energy
from tnvqe.tn_rotation import make_layout, rotate_hamiltonian

n = 8
h = build_tfim_1d(n, 1.0, 1.0)
exact = exact_ground_energy(h)
ansatz = make_template("C", n, 2)
layout = make_layout("umpo1d", n, 2)

cfg = OptimizerConfig(seed=1, max_steps=40, learning_rate=0.1,
                      tolerance=1e-8, record_parameters=True)
rec = optimize_alternating(h, layout, ansatz, cfg)
noise = NoiseModel(p1=1e-3, p2=2e-3, trajectories=40, seed=5)

print(f"exact ground energy {exact:.4f}\n")
print(f"{'step':>4} {'noiseless':>10} {'noisy mean':>11} {'error bar':>10}")
for st in rec.steps[::8]:
    r = rotate_hamiltonian(h, layout, st.theta)
    est = noisy_energy(r, ansatz, st.phi, noise)
    print(f"{st.step:>4} {st.energy:>10.4f} {est.mean:>11.4f} "
          f"{est.error_bar:>10.4f}")
