"""Expressivity metric: how close an ensemble's average purity is to Haar.

delta_t = log(E_Haar[Tr rho^t] / E_ensemble[Tr rho^t]) is 0 for a
Haar-equivalent ensemble and more negative the less expressive the
ensemble.  Appending network layers pushes a shallow circuit closer to 0.

Run: python3 demos/05_expressivity.py
"""

from tnvqe.analysis import BipartitionSpec, EnsembleSpec, delta_t, \
    haar_moment
from tnvqe.simulator import make_template
from tnvqe.tn_rotation import make_layout

n = 6
a = BipartitionSpec(tuple(range(n // 2)))
haar = haar_moment(n, a, 2, samples=20000, seed=1)
print(f"Haar second-moment baseline: {haar.estimate:.5f} "
      f"+- {haar.std_error:.5f}\n")

for m in (1, 2):
    ansatz = make_template("A", n, m)
    plain = EnsembleSpec(n=n, samples=300, seed=5, kind="circuit",
                         ansatz=ansatz)
    d = delta_t(plain, a, 2, haar=haar)
    line = f"circuit depth {m}:  plain {d.estimate:+.4f}"
    for k in (2, 4):
        assisted = EnsembleSpec(n=n, samples=300, seed=5, kind="circuit",
                                ansatz=ansatz,
                                layout=make_layout("umpo1d", n, k))
        dk = delta_t(assisted, a, 2, haar=haar)
        line += f"   +{k} network layers {dk.estimate:+.4f}"
    print(line)

ctrl = EnsembleSpec(n=n, samples=400, seed=9, kind="haar")
d0 = delta_t(ctrl, a, 2, haar=haar)
print(f"\nHaar control: {d0.estimate:+.4f} +- {d0.std_error:.4f} "
      "(consistent with 0)")
