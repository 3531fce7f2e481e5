"""Pauli strings as bitmask pairs: multiplication, widths, dense oracles.

Run: python3 demos/01_pauli_algebra.py
"""

import numpy as np

from tnvqe.pauli import PauliSum, PauliTerm, decompose_dense, mul, \
    neighboring_width, to_dense

a = PauliTerm.from_label("XIZY")
b = PauliTerm.from_label("ZYIX")
phase, p = mul(a, b)
print(f"{a.to_label()} * {b.to_label()} = {phase} * {p.to_label()}")
print(f"width of {p.to_label()}: {neighboring_width(p)}")

s = PauliSum(2, {
    PauliTerm.from_label("ZZ"): -1.0,
    PauliTerm.from_label("XI"): -0.5,
    PauliTerm.from_label("IX"): -0.5,
})
m = to_dense(s)
print("\ndense matrix of -ZZ - 0.5(XI + IX):")
print(np.real_if_close(m))

back = decompose_dense(m, 2)
print("\ndecomposed back:", back)
print("round trip exact:", back == s)
