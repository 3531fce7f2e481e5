"""Gradient variances: barren plateaus and the classical escape hatch.

For each (depth, n) cell the experiment samples uniform parameters and
measures the variance of the derivative of the energy with respect to
four tagged parameters.  Two effects show up: variances decay with n at
fixed deep depth, and the classical network parameter keeps a much
larger variance than a position-matched quantum parameter.

Run: python3 demos/06_gradient_variance.py
"""

import math

import numpy as np

from tnvqe.analysis import GradientVarianceSetup, \
    gradient_variance_experiment

setup = GradientVarianceSetup(ns=(4, 6, 8), depths=(1, 6), tn_layers=2,
                              seed=0)
report = gradient_variance_experiment(setup, samples=300)

print(f"{'depth':>5} {'n':>3} {'classical':>10} {'quantum':>10} "
      f"{'matched':>10} {'bare':>10}")
for (depth, n), tags in sorted(report.cells.items()):
    print(f"{depth:>5} {n:>3} {tags['tn_classical'].variance:>10.4f} "
          f"{tags['tn_quantum'].variance:>10.4f} "
          f"{tags['matched_quantum'].variance:>10.4f} "
          f"{tags['pqc_only'].variance:>10.4f}")

ns = np.array(setup.ns)
deep = [report.cells[(6, n)]["tn_quantum"].variance for n in ns]
slope = np.polyfit(ns, np.log(deep), 1)[0]
print(f"\nfitted slope of log Var vs n at depth 6: {slope:.3f} "
      "(negative: exponential decay)")
