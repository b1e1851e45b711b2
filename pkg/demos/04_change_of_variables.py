"""Signature-driven change of variables for operator integrals.

A word over {L, 0, R} dictates where resolvents are attached; the
integral then expands into a signed sum of weighted integrals whose
arguments carry improved summability.  The trace of any such integral
is an explicit weighted measure integral.
"""

from opshift import (
    EpsilonSignature,
    corollary_expand,
    cov_expand,
    cov_scalar_identity,
    expansion_terms_json,
    pJ_alpha,
    rational_from_poles,
    signature_for_J,
    trace_via_measure,
)
from opshift.ensembles import random_hermitian, rng_stream

rng = rng_stream(11, 0)
g = rational_from_poles([2j, -1 - 1.5j, 1 + 2j, -0.5 - 1j])

# --- scalar identity ----------------------------------------------------------

eps = EpsilonSignature(("R", "0", "L", "L"))
nodes = [0.3, -1.1, 0.8, 2.0]
lhs, rhs, res, scale = cov_scalar_identity(g, eps, nodes)
print("scalar identity residual:", res / scale)

# --- operator expansion ---------------------------------------------------------

m = 3
Hs = [random_hermitian(rng, 3, 1.0) for _ in range(m + 1)]
Vs = [random_hermitian(rng, 3, 0.8).entries for _ in range(m)]
exp = cov_expand(g, eps, Hs, Vs)
print("operator expansion: residual", exp.residual / exp.scale, "with", len(exp.terms), "terms")
print("term dump (first 120 chars):", expansion_terms_json(exp)[:120], "...")

# --- alternating signatures (the Taylor-remainder workhorses) --------------------

odd = corollary_expand(g, "odd", Hs, Vs)
print("alternating odd decomposition residual:", odd.residual / odd.scale)

# --- dressing chosen slots with double resolvents --------------------------------

eps_j = signature_for_J({2}, m)
print("signature double-dressing slot 2:", eps_j.entries)

# --- trace as a weighted measure integral ----------------------------------------

U0 = random_hermitian(rng, 3, 1.0).entries
Us = [random_hermitian(rng, 3, 0.8).entries for _ in range(2)]
Hs2 = [random_hermitian(rng, 3, 1.0) for _ in range(3)]
rep = trace_via_measure(U0, g, Us, Hs2)
print("\ntrace two ways:")
print("  operator algebra:", rep.trace)
print("  measure integral:", rep.integral)
print("  measure norm:", rep.measure_norm, " mixed-norm product:", rep.p_value)

bound = pJ_alpha([U0] + Us, Hs2, set(), (3.0, 3.0, 3.0), n=2)
print("  uniform-exponent product:", bound.p_value, " r =", bound.r)
