"""Exact commutators on the circle and Connes' norm bound."""

import numpy as np

from dirac_torus import circle_example
from dirac_torus.fredholm import circle_general, connes_bound, connes_operator

np.set_printoptions(precision=3, suppress=True, linewidth=120)
l, K = 2, 5
deformed = circle_example(l, K, True)
print(f"deformed commutator for the shift by {l}, frequencies {deformed.frequencies.tolist()}:")
print(deformed.matrix)
print("entry (3, 1) =", deformed.entry(3, 1), "= 8/3")
print("matches generic machinery:", np.abs(circle_general(l, K, True) - deformed.matrix).max())

for shift in (1, 2, 3, 4):
    plain = circle_example(shift, 8, False)
    print(f"undeformed [F, z^{shift}] has rank {plain.rank}")

rng = np.random.default_rng(1)
poly = {j: complex(rng.normal(), rng.normal()) for j in (-3, -1, 1, 2)}
print(f"\n||B_a|| = {np.linalg.norm(connes_operator(poly, 20), 2):.4f} <= {connes_bound(poly):.4f}")
