"""Dense Hermitian operators: spectral clustering, functional calculus,
Schatten norms, and the two equivalent resolvent smallness conditions."""

import numpy as np

from opshift import (
    HermitianOperator,
    func_calculus,
    rational_from_poles,
    resolvent_comparability,
    schatten_norm,
    spectral_decompose,
)

# --- spectral decomposition with eigenvalue clustering ---------------------

H = HermitianOperator(np.diag([0.3, 0.3 + 1e-12, 5.0]))
dec = spectral_decompose(H, cluster_tolerance=1e-9)
print("eigenvalue clusters:", dec.eigenvalues)
print("multiplicities:     ", dec.multiplicities())
print("reconstruction error:", np.linalg.norm(dec.reconstruct() - H.entries, 2))

# --- functional calculus ----------------------------------------------------

pauli_x = HermitianOperator([[0.0, 1.0], [1.0, 0.0]])
f = rational_from_poles([2j, -2j])  # 1/((x-2i)(x+2i)) = 1/(x^2+4), real valued
print("\nf(X) for f(x) = 1/(x^2 + 4):")
print(np.real(func_calculus(f, pauli_x)))

# --- Schatten norms ---------------------------------------------------------

A = np.diag([3.0, 4.0])
print("\nSchatten norms of diag(3, 4):")
for p in (1, 2, np.inf):
    print(f"  p = {p}: {schatten_norm(A, p)}")

# --- resolvent comparability ------------------------------------------------

rng = np.random.default_rng(0)
M = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
H4 = HermitianOperator(0.5 * (M + M.conj().T))
V4 = HermitianOperator(np.diag([0.5, -0.25, 0.0, 0.1]))
rep = resolvent_comparability(H4, V4, n=2)
print("\nresolvent difference   (Schatten-2):", rep.lhs_norm)
print("dressed perturbation   (Schatten-2):", rep.rhs_norm)
print("factorization residuals:            ", rep.identity_residuals)
