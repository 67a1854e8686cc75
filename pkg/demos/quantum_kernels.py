"""
Density matrices, partial traces and entropies
==============================================

    python3 demos/quantum_kernels.py
"""

import math

import numpy as np

from qgm import DensityMatrix, eigh, partial_trace, quantum_cmi, von_neumann_entropy
from qgm.graph import SeparatorTriple

# %%
# A Bell pair is pure, but each half on its own is maximally mixed
bell = DensityMatrix.from_pure(np.array([1, 0, 0, 1]), dims=(2, 2))
half = partial_trace(bell.matrix, [2, 2], [1])
print("reduced state of site 0:\n", half.real)
print(f"S(AB) = {von_neumann_entropy(bell):.3e}, S(A) = {von_neumann_entropy(half):.6f}, ln 2 = {math.log(2):.6f}")

# %%
# The in-house Jacobi eigensolver against LAPACK
rng = np.random.default_rng(1)
m = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
a = (m + m.conj().T) / 2
print("max eigenvalue difference vs LAPACK:", np.max(np.abs(eigh(a).eigenvalues - np.linalg.eigvalsh(a))))

# %%
# Strong subadditivity: I(A:C|B) >= 0 for every state
worst = math.inf
for _ in range(200):
    g = rng.normal(size=(16, 4)) + 1j * rng.normal(size=(16, 4))
    rho = g @ g.conj().T
    rho = DensityMatrix((2, 2, 2, 2), rho / np.trace(rho).real)
    worst = min(worst, quantum_cmi(rho, SeparatorTriple({0}, {1, 2}, {3})))
print(f"smallest I(0:3|1,2) over 200 random rank-4 states: {worst:.4f}")
