"""Signature-driven change-of-variables expansions for operator integrals.

A signature is a word over {L, 0, R} prescribing, for each argument
slot, on which side resolvents are attached.  The machinery here covers

* the checked-operator construction (the four-case resolvent table),
* the scalar expansion identity for divided-difference symbols,
* the operator expansion of a generic integral into weighted integrals
  of resolvent-dressed arguments,
* the alternating-signature decompositions used for Taylor remainders,
* the mixed-norm product bounding trace measures, and
* the constructive trace measure: the trace of U_0 T_{g^[m]}(U_1..U_m)
  as an integral of g^(m) u^(m+2) against an explicit piecewise density.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np
from .errors import ValidationError
from .functions import TestFunction, divided_difference, peano_kernel, weight_multiply
from .linalg import HermitianOperator, schatten_norm
from .moi import MoiSymbol, OperatorTuple, moi_eval
from .piecewise import PiecewisePolynomial, integral_against_derivative

__all__ = [
    "EpsilonSignature",
    "ExpansionTerm",
    "CovExpansion",
    "BoundReport",
    "WeightedTraceMeasure",
    "TraceMeasureReport",
    "build_check_operators",
    "checked_product",
    "signature_for_J",
    "alternating_signature",
    "cov_scalar_identity",
    "cov_expand",
    "corollary_expand",
    "basic_change_of_variables",
    "pJ_alpha",
    "eigen_tuple_density",
    "trace_via_measure",
    "expansion_terms_json",
]

_U_INV = lambda lam: 1.0 / (lam - 1j)


@dataclass(frozen=True)
class EpsilonSignature:
    """Word over {L, 0, R}; the first letter may not be L, the last not R."""

    entries: tuple

    def __post_init__(self):
        ent = tuple(str(e) for e in self.entries)
        for e in ent:
            if e not in ("L", "0", "R"):
                raise ValidationError("signature letters must be 'L', '0' or 'R'")
        if len(ent) < 1:
            raise ValidationError("signature must be nonempty")
        if ent[0] == "L":
            raise ValidationError("first signature letter may not be 'L'")
        if ent[-1] == "R":
            raise ValidationError("last signature letter may not be 'R'")
        object.__setattr__(self, "entries", ent)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @property
    def m(self):
        return len(self.entries) - 1

    def zero_set(self):
        return tuple(i for i, e in enumerate(self.entries) if e == "0")

    @property
    def q(self):
        return len(self.zero_set())


def alternating_signature(m: int) -> EpsilonSignature:
    """(R, L, R, L, ...) of length m+1 for odd m; trailing 0 for even m."""
    if m < 1:
        raise ValidationError("need m >= 1")
    if m % 2 == 1:
        return EpsilonSignature(tuple("R" if i % 2 == 0 else "L" for i in range(m + 1)))
    ent = ["R" if i % 2 == 0 else "L" for i in range(m)] + ["0"]
    return EpsilonSignature(tuple(ent))


def build_check_operators(eps: EpsilonSignature, Hs, Us):
    """Checked operators per the four-case resolvent table (eps[-1] := 0)."""
    if len(eps) != len(Hs) or len(Us) != len(Hs):
        raise ValidationError("signature, operators and arguments must have equal length")
    out = []
    for j, u in enumerate(Us):
        u = np.asarray(u.entries if isinstance(u, HermitianOperator) else u, dtype=complex)
        left = eps[j - 1] == "R" if j >= 1 else False
        right = eps[j] == "L"
        if left:
            u = Hs[j - 1].resolvent() @ u
        if right:
            u = u @ Hs[j].resolvent()
        out.append(u)
    return out


def checked_product(checked, i, j, dim):
    """Product checked[i+1] ... checked[j]; the empty product is the identity."""
    if j < i:
        raise ValidationError("need i <= j")
    out = np.eye(dim, dtype=complex)
    for k in range(i + 1, j + 1):
        out = out @ checked[k]
    return out


def signature_for_J(J, m: int) -> EpsilonSignature:
    """An {L, R} signature with eps_0 = R, eps_m = L that double-dresses
    exactly the slots in J (which must be pairwise at distance >= 2)."""
    J = sorted(set(int(j) for j in J))
    for j in J:
        if not (1 <= j <= m):
            raise ValidationError("J must be a subset of 1..m")
    for a, b in zip(J, J[1:]):
        if b - a < 2:
            raise ValidationError("indices in J must be pairwise at distance >= 2")
    ent = ["R"] * m + ["L"]
    for j in J:
        ent[j - 1] = "R"
        ent[j] = "L"
    eps = EpsilonSignature(tuple(ent))
    for j in J:
        if not (eps[j - 1] == "R" and eps[j] == "L"):  # pragma: no cover - construction guarantees it
            raise ValidationError("signature construction failed")
    return eps


# ---------------------------------------------------------------------------
# scalar expansion identity


def _index_tuples(m, k, must_contain):
    must = set(must_contain)
    for combo in itertools.combinations(range(m + 1), k + 1):
        if must.issubset(combo):
            yield combo


def cov_scalar_identity(g: TestFunction, eps: EpsilonSignature, lambdas):
    """Evaluate both sides of the scalar expansion identity at explicit nodes.

    Returns (lhs, rhs, residual, scale) where lhs = g^[m](lambdas) and
    rhs is the signed sum over admissible index tuples of weighted
    divided differences times reciprocal-u factors.
    """
    lam = [float(v) for v in lambdas]
    m = len(lam) - 1
    if len(eps) != m + 1:
        raise ValidationError("signature length must match the node count")
    q = eps.q
    zeros = eps.zero_set()
    u_factor = math.prod(
        (_U_INV(lam[i]) for i in range(m + 1) if eps[i] != "0"), start=1.0 + 0.0j
    )
    lhs = divided_difference(g, lam)
    rhs = 0.0 + 0.0j
    mag = 0.0
    for k in range(max(0, q - 1), m + 1):
        fk = weight_multiply(g, k - q + 1)
        for combo in _index_tuples(m, k, zeros):
            term = (-1.0) ** (m - k) * divided_difference(fk, [lam[i] for i in combo]) * u_factor
            rhs += term
            mag += abs(term)
    scale = 1.0 + abs(lhs) + mag
    return lhs, rhs, abs(lhs - rhs), scale


# ---------------------------------------------------------------------------
# operator expansion


@dataclass(frozen=True)
class ExpansionTerm:
    sign: int
    k: int
    indices: tuple
    weight_power: int
    value: np.ndarray  # unsigned contribution
    left_descriptor: str
    inner_descriptors: tuple
    right_descriptor: str


@dataclass(frozen=True)
class CovExpansion:
    terms: tuple
    lhs: np.ndarray
    rhs: np.ndarray
    residual: float
    scale: float


def _product_descriptor(i, j):
    if j <= i:
        return "I"
    return "V(" + ",".join(str(t) for t in range(i + 1, j + 1)) + ")"


def cov_expand(g: TestFunction, eps: EpsilonSignature, Hs, Vs) -> CovExpansion:
    """Expand T_{g^[m]}(V_1..V_m) along a signature.

    The left side is the plain spectral-sum evaluation; the right side
    sums, over k = max(0, q-1)..m and index tuples containing the zero
    set of the signature, products of checked arguments around weighted
    integrals of (g u^(k-q+1))^[k].
    """
    m = len(Vs)
    if len(Hs) != m + 1 or len(eps) != m + 1:
        raise ValidationError("need m+1 operators and a length-m+1 signature")
    dim = Hs[0].dim
    args = [np.asarray(v.entries if isinstance(v, HermitianOperator) else v, dtype=complex) for v in Vs]
    lhs = moi_eval(MoiSymbol(g, 0, m), OperatorTuple(tuple(Hs), tuple(args)))
    # slot 0 is never touched by the expansion products; a placeholder keeps
    # the checked list aligned with the argument indexing 1..m
    checked = build_check_operators(eps, Hs, [np.zeros((dim, dim))] + args)
    q = eps.q
    zeros = eps.zero_set()
    rhs = np.zeros((dim, dim), dtype=complex)
    terms = []
    mag = 0.0
    for k in range(max(0, q - 1), m + 1):
        power = k - q + 1
        for combo in _index_tuples(m, k, zeros):
            left = checked_product(checked, 0, combo[0], dim)
            right = checked_product(checked, combo[-1], m, dim)
            inner_ops = tuple(Hs[i] for i in combo)
            inner_args = tuple(checked_product(checked, a, b, dim) for a, b in zip(combo[:-1], combo[1:]))
            core = moi_eval(MoiSymbol(g, power, k), OperatorTuple(inner_ops, inner_args))
            value = left @ core @ right
            sign = (-1) ** (m - k)
            rhs = rhs + sign * value
            mag += float(np.linalg.norm(value, 2))
            terms.append(
                ExpansionTerm(
                    sign=sign,
                    k=k,
                    indices=combo,
                    weight_power=power,
                    value=value,
                    left_descriptor=_product_descriptor(0, combo[0]),
                    inner_descriptors=tuple(
                        _product_descriptor(a, b) for a, b in zip(combo[:-1], combo[1:])
                    ),
                    right_descriptor=_product_descriptor(combo[-1], m),
                )
            )
    residual = float(np.linalg.norm(lhs - rhs, 2))
    scale = 1.0 + float(np.linalg.norm(lhs, 2)) + mag
    return CovExpansion(tuple(terms), lhs, rhs, residual, scale)


def corollary_expand(f: TestFunction, parity: str, Hs, Vs) -> CovExpansion:
    """Alternating-signature decomposition of f^[2n-1] or f^[2n].

    parity="odd" expects 2n-1 arguments and uses the fully alternating
    signature; parity="even" expects 2n arguments and a trailing zero,
    whose k = 0 term degenerates to (product of checked arguments) f(H_m).
    """
    m = len(Vs)
    if parity == "odd":
        if m % 2 == 0:
            raise ValidationError("odd parity needs an odd argument count")
    elif parity == "even":
        if m % 2 == 1:
            raise ValidationError("even parity needs an even argument count")
    else:
        raise ValidationError("parity must be 'odd' or 'even'")
    return cov_expand(f, alternating_signature(m), Hs, Vs)


def basic_change_of_variables(f: TestFunction, Hs, Vs, variant, j=None):
    """The three single-step weight-shift identities.

    variant "left": resolvent extracted at the first operator,
    "inner": at argument slot j (1 <= j <= n-1), "right": at the last.
    Returns (lhs, rhs, residual, scale).
    """
    n = len(Vs)
    if len(Hs) != n + 1:
        raise ValidationError("need n+1 operators")
    args = [np.asarray(v.entries if isinstance(v, HermitianOperator) else v, dtype=complex) for v in Vs]
    fu = weight_multiply(f, 1)
    lhs = moi_eval(MoiSymbol(f, 0, n), OperatorTuple(tuple(Hs), tuple(args)))
    if variant == "left":
        r0 = Hs[0].resolvent()
        t1 = r0 @ moi_eval(MoiSymbol(fu, 0, n), OperatorTuple(tuple(Hs), tuple(args)))
        t2 = r0 @ args[0] @ moi_eval(
            MoiSymbol(f, 0, n - 1), OperatorTuple(tuple(Hs[1:]), tuple(args[1:]))
        )
        rhs = t1 - t2
    elif variant == "inner":
        if j is None or not (1 <= j <= n - 1):
            raise ValidationError("inner variant needs 1 <= j <= n-1")
        rj = Hs[j].resolvent()
        dressed = list(args)
        dressed[j - 1] = args[j - 1] @ rj
        t1 = moi_eval(MoiSymbol(fu, 0, n), OperatorTuple(tuple(Hs), tuple(dressed)))
        merged = list(args)
        merged[j - 1] = args[j - 1] @ rj @ args[j]
        del merged[j]
        ops = tuple(Hs[:j]) + tuple(Hs[j + 1 :])
        t2 = moi_eval(MoiSymbol(f, 0, n - 1), OperatorTuple(ops, tuple(merged)))
        rhs = t1 - t2
    elif variant == "right":
        rn = Hs[n].resolvent()
        t1 = moi_eval(MoiSymbol(fu, 0, n), OperatorTuple(tuple(Hs), tuple(args))) @ rn
        t2 = moi_eval(
            MoiSymbol(f, 0, n - 1), OperatorTuple(tuple(Hs[:-1]), tuple(args[:-1]))
        ) @ args[-1] @ rn
        rhs = t1 - t2
    else:
        raise ValidationError("variant must be 'left', 'inner' or 'right'")
    residual = float(np.linalg.norm(lhs - rhs, 2))
    scale = 1.0 + float(np.linalg.norm(lhs, 2)) + float(np.linalg.norm(rhs, 2))
    return lhs, rhs, residual, scale


# ---------------------------------------------------------------------------
# mixed-norm bound


@dataclass(frozen=True)
class BoundReport:
    J: tuple
    r: float
    p_value: float
    operator_norm_factor: float
    resolvent_factors: dict
    schatten_factors: dict


def pJ_alpha(Us, Hs, J, alphas, n: int) -> BoundReport:
    """Mixed-norm product from operator norms, double-resolvented
    Schatten-n norms over J, and Schatten-alpha norms elsewhere."""
    m = len(Us) - 1
    if len(Hs) != m + 1 or len(alphas) != m + 1:
        raise ValidationError("need matching operator, argument and exponent counts")
    J = sorted(set(int(j) for j in J))
    for j in J:
        if not (1 <= j <= m):
            raise ValidationError("J must be a subset of 1..m")
    for a, b in zip(J, J[1:]):
        if b - a < 2:
            raise ValidationError("indices in J must be pairwise at distance >= 2")
    inv = 0.0
    for j, a in enumerate(alphas):
        a = float(a)
        if not a >= 1.0:
            raise ValidationError("exponents must lie in [1, inf]")
        if j in J and not np.isinf(a):
            raise ValidationError("slots in J must carry the exponent infinity")
        inv += 0.0 if np.isinf(a) else 1.0 / a
    if abs(inv - 1.0) > 1e-12:
        raise ValidationError("exponents must satisfy sum 1/alpha_j = 1")
    mats = [np.asarray(u.entries if isinstance(u, HermitianOperator) else u, dtype=complex) for u in Us]
    r = len(J) / (n + len(J))
    op_factor = math.prod(schatten_norm(u, np.inf) ** r for u in mats)
    res_factors = {}
    for j in J:
        left = Hs[j - 1].resolvent() if j - 1 >= 0 else Hs[m].resolvent()
        dressed = left @ mats[j] @ Hs[j].resolvent()
        res_factors[j] = schatten_norm(dressed, n) ** (1.0 - r)
    sch_factors = {}
    for j in range(m + 1):
        if j in J:
            continue
        sch_factors[j] = schatten_norm(mats[j], alphas[j]) ** (1.0 - r)
    p_value = op_factor * math.prod(res_factors.values(), start=1.0) * math.prod(sch_factors.values(), start=1.0)
    return BoundReport(tuple(J), r, float(p_value), float(op_factor), res_factors, sch_factors)


# ---------------------------------------------------------------------------
# constructive trace measure


@dataclass(frozen=True)
class WeightedTraceMeasure:
    """Measure d(mu) = u^(-weight_exponent) * density(x) dx (plus atoms).

    ``density`` is the piecewise-polynomial part before the u-weighting,
    so integrals of h * u^weight_exponent against the measure reduce to
    exact integrals of h against the density.
    """

    density: PiecewisePolynomial
    weight_exponent: int

    def integrate_weighted_derivative(self, g: TestFunction, order: int):
        """Integral of g^(order) * u^weight_exponent d(mu), closed form."""
        return integral_against_derivative(g, order, self.density)

    def norm(self):
        """Total variation: Gauss quadrature of |u|^(-w) |density| with
        intervals split at component roots (the magnitude kinks there)."""
        from .piecewise import _real_roots_in

        w = self.weight_exponent
        nodes, weights = np.polynomial.legendre.leggauss(48)
        total = 0.0
        bp = self.density.breakpoints
        mids = 0.5 * (bp[:-1] + bp[1:])
        for i, (lo, hi) in enumerate(zip(bp[:-1], bp[1:])):
            c = self.density.coeffs[i]
            cuts = sorted(
                set(
                    mids[i] + r
                    for part in (np.real(c), np.imag(c))
                    for r in _real_roots_in(part, lo - mids[i], hi - mids[i])
                )
            )
            for a, b in zip([lo] + cuts, cuts + [hi]):
                xs = 0.5 * (b - a) * nodes + 0.5 * (a + b)
                vals = np.abs(self.density(xs)) * (1.0 + xs * xs) ** (-w / 2.0)
                total += 0.5 * (b - a) * float(np.dot(weights, vals))
        for x, mass in self.density.atoms:
            total += abs(complex(mass)) * (1.0 + x * x) ** (-w / 2.0)
        return total


@dataclass(frozen=True)
class TraceMeasureReport:
    measure: WeightedTraceMeasure
    trace: complex
    integral: complex
    residual: float
    scale: float
    measure_norm: float
    p_value: float
    ratio: float


def eigen_tuple_density(U0, Us, Hs):
    """Density rho with Tr(U_0 P_{j0} U_1 P_{j1} ... U_m P_{jm}) summed
    against divided-difference kernels:

        Tr(U_0 T_{g^[m]}(U_1..U_m)) = integral of g^(m) * rho.

    Weights are grouped by node multiset before kernels are accumulated.
    Returns (density, total_kernel_weight).
    """
    m = len(Us)
    if len(Hs) != m + 1:
        raise ValidationError("need m+1 operators")
    mats = [np.asarray(u.entries if isinstance(u, HermitianOperator) else u, dtype=complex) for u in Us]
    u0 = np.asarray(U0.entries if isinstance(U0, HermitianOperator) else U0, dtype=complex)
    decs = [h.decomposition() for h in Hs]
    counts = [len(d.eigenvalues) for d in decs]

    # chained blocks C_k[a][b] = P^k_a U_{k+1} P^{k+1}_b and the closing
    # block D[b][a] = P^m_b U_0 P^0_a so that each tuple weight is one trace
    blocks = []
    for k in range(m):
        pa = decs[k].projections
        pb = decs[k + 1].projections
        blocks.append([[pa[a] @ mats[k] @ pb[b] for b in range(counts[k + 1])] for a in range(counts[k])])
    closing = [[decs[m].projections[b] @ u0 @ decs[0].projections[a] for a in range(counts[0])] for b in range(counts[m])]

    weight_by_nodes: dict = {}
    for idx in itertools.product(*(range(c) for c in counts)):
        prod = closing[idx[m]][idx[0]]
        if not np.any(prod):
            continue
        ok = True
        for k in range(m):
            blk = blocks[k][idx[k]][idx[k + 1]]
            if not np.any(blk):
                ok = False
                break
            prod = prod @ blk
        if not ok:
            continue
        w = complex(np.trace(prod))
        if w == 0.0:
            continue
        nodes = tuple(sorted(float(decs[k].eigenvalues[idx[k]]) for k in range(m + 1)))
        weight_by_nodes[nodes] = weight_by_nodes.get(nodes, 0.0 + 0.0j) + w

    density = None
    total_weight = 0.0
    if m == 0:
        # degenerate order: pure atoms with unit kernels
        for nodes, w in sorted(weight_by_nodes.items()):
            contrib = PiecewisePolynomial.atom(nodes[0], w)
            density = contrib if density is None else density + contrib
            total_weight += abs(w)
    else:
        for nodes, w in sorted(weight_by_nodes.items()):
            kern = peano_kernel(nodes) if len(set(nodes)) > 1 else PiecewisePolynomial.atom(nodes[0], 1.0 / math.factorial(m))
            contrib = kern.scaled(w)
            density = contrib if density is None else density + contrib
            total_weight += abs(w) / math.factorial(m)
    if density is None:
        hull = [float(np.min([d.eigenvalues.min() for d in decs])), float(np.max([d.eigenvalues.max() for d in decs]))]
        if hull[1] <= hull[0]:
            hull[1] = hull[0] + 1.0
        density = PiecewisePolynomial.zero(hull)
    return density, total_weight


def trace_via_measure(U0, g: TestFunction, Us, Hs, J=(), alphas=None, n=2) -> TraceMeasureReport:
    """Trace of U_0 T_{g^[m]}(U_1..U_m) as an explicit weighted integral.

    The measure is assembled from eigen-tuple weights and divided-
    difference kernels, so the integral side never touches the operator
    integral; the trace side evaluates the plain spectral sum.  The
    report also carries the measure norm and its ratio against the
    mixed-norm product (with the supplied or uniform exponents).
    """
    m = len(Us)
    if len(Hs) != m + 1:
        raise ValidationError("need m+1 operators")
    mats = [np.asarray(u.entries if isinstance(u, HermitianOperator) else u, dtype=complex) for u in Us]
    u0 = np.asarray(U0.entries if isinstance(U0, HermitianOperator) else U0, dtype=complex)
    decs = [h.decomposition() for h in Hs]
    density, total_weight = eigen_tuple_density(u0, mats, Hs)
    measure = WeightedTraceMeasure(density, m + 2)
    if m == 0:
        trace_direct = complex(np.trace(u0 @ _func_on(decs[0], g)))
    else:
        core = moi_eval(MoiSymbol(g, 0, m), OperatorTuple(tuple(Hs), tuple(mats)))
        trace_direct = complex(np.trace(u0 @ core))
    integral = measure.integrate_weighted_derivative(g, m)
    residual = abs(trace_direct - integral)
    scale = 1.0 + abs(trace_direct) + total_weight * max(1.0, g.sup_deriv(m, *_hull(decs)))
    measure_norm = measure.norm()
    if alphas is None:
        alphas = tuple(float(m + 1) for _ in range(m + 1)) if m >= 1 else (1.0,)
        J = ()
    report = pJ_alpha([u0] + mats, list(Hs), J, alphas, n)
    ratio = measure_norm / report.p_value if report.p_value > 0 else math.inf if measure_norm > 0 else 0.0
    return TraceMeasureReport(
        measure=measure,
        trace=trace_direct,
        integral=integral,
        residual=residual,
        scale=scale,
        measure_norm=measure_norm,
        p_value=report.p_value,
        ratio=ratio,
    )


def _hull(decs):
    lo = float(min(d.eigenvalues.min() for d in decs))
    hi = float(max(d.eigenvalues.max() for d in decs))
    if hi <= lo:
        hi = lo + 1.0
    return lo, hi


def _func_on(dec, g):
    return dec.apply([complex(g.eval_deriv(0, lam)) for lam in dec.eigenvalues])


def expansion_terms_json(expansion: CovExpansion) -> str:
    """Expansion-term dump: sign, indices, weight power, slot descriptors."""
    rows = []
    for t in expansion.terms:
        rows.append(
            {
                "sign": t.sign,
                "k": t.k,
                "indices": list(t.indices),
                "weight_power": t.weight_power,
                "left": t.left_descriptor,
                "inner": list(t.inner_descriptors),
                "right": t.right_descriptor,
            }
        )
    return json.dumps(rows, sort_keys=True, separators=(",", ":"))
