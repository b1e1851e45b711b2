"""Structured scalar test functions with exact derivatives.

Four families are supported, each closed under multiplication by powers
of the weight u(x) = x - i and equipped with closed-form derivatives of
every order:

* products of complex linear factors with integer exponents
  (bounded rationals, written multiplicatively so that decay order is
  exact bookkeeping rather than a numerical question),
* polynomial-prefactor Gaussians,
* compactly supported polynomial bumps of prescribed smoothness,
* plain polynomials.

On top of these the module provides divided differences (with a
confluent path for coincident nodes), analytic weighted-class
membership decisions, and the B-spline representation of divided
differences as integrals of a piecewise-polynomial kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ValidationError
from .piecewise import PiecewisePolynomial, _polymul, _polyval, _polyder

__all__ = [
    "TestFunction",
    "RationalFunction",
    "GaussianFunction",
    "BumpFunction",
    "PolynomialFunction",
    "bump",
    "ClassMembership",
    "rational_from_poles",
    "divided_difference",
    "weight_multiply",
    "class_membership",
    "peano_kernel",
    "leibniz_weighted_sup_bound",
    "NODE_MERGE_RELTOL",
]

NODE_MERGE_RELTOL = 1e-8  # nodes closer than this (times 1 + span) are treated confluently

_U_ROOT = 1j  # u(x) = x - i vanishes at x = i


class TestFunction:
    """Base class; subclasses provide exact derivatives of all orders."""

    kind = "abstract"
    weight_power = 0
    # smoothness: largest m with f in C^m globally (math.inf when smooth)
    smoothness = math.inf
    # decay_order d: f(x) = O(|x|^-d); None means faster than any power
    decay_order: int | None = None
    support: tuple | None = None
    kink_points: tuple = ()

    def eval(self, x):
        return self.eval_deriv(0, x)

    def __call__(self, x):
        return self.eval_deriv(0, x)

    def eval_deriv(self, order, x):
        raise NotImplementedError

    def times_u(self, power=1):
        raise NotImplementedError

    def poles(self):
        return ()

    def is_real_valued(self):
        return False

    def sup_deriv(self, order, lo=None, hi=None, n_grid=4001):
        """Grid estimate of sup |f^(order)| on [lo, hi] (or the support)."""
        if lo is None or hi is None:
            if self.support is None:
                raise ValidationError("sup estimate needs an interval for unbounded-support functions")
            lo, hi = self.support
        xs = np.linspace(lo, hi, n_grid)
        return float(np.max(np.abs(self.eval_deriv(order, xs))))


@dataclass(frozen=True)
class RationalFunction(TestFunction):
    """scale * prod_j (x - z_j)^(-m_j) with all z_j off the real axis.

    Positive exponents m_j are pole orders, negative exponents are
    numerator factors; the representation is closed under products and
    u-multiplication, and derivative evaluation uses the logarithmic
    derivative recurrence f^(k+1) = (f * s)^(k), s = -sum m_j/(x-z_j).
    """

    factors: tuple  # ((z, m), ...), m != 0
    scale: complex = 1.0
    weight_power: int = 0

    kind = "rational"

    def __post_init__(self):
        for z, m in self.factors:
            if abs(complex(z).imag) == 0.0:
                raise ValidationError("rational factors must have poles/zeros off the real axis")
            if m == 0:
                raise ValidationError("zero exponents are not allowed")

    @property
    def decay_order(self):
        return int(sum(m for _, m in self.factors))

    def poles(self):
        return tuple(z for z, m in self.factors if m > 0)

    def eval_deriv(self, order, x):
        x = np.asarray(x, dtype=complex)
        f = np.full(x.shape, complex(self.scale))
        for z, m in self.factors:
            f = f * (x - z) ** (-m)
        if order == 0:
            return f
        # s^(r) for r = 0..order-1
        s_derivs = []
        for r in range(order):
            s = np.zeros(x.shape, dtype=complex)
            for z, m in self.factors:
                s += -m * (-1.0) ** r * math.factorial(r) * (x - z) ** (-(r + 1))
            s_derivs.append(s)
        derivs = [f]
        for k in range(order):
            nxt = np.zeros(x.shape, dtype=complex)
            for i in range(k + 1):
                nxt += math.comb(k, i) * derivs[i] * s_derivs[k - i]
            derivs.append(nxt)
        return derivs[order]

    def times_u(self, power=1):
        if power == 0:
            return self
        return self._times_factor(_U_ROOT, -power, weight_bump=power)

    def _times_factor(self, z, m, weight_bump=0):
        fac = dict()
        for zz, mm in self.factors:
            fac[complex(zz)] = fac.get(complex(zz), 0) + mm
        fac[complex(z)] = fac.get(complex(z), 0) + m
        factors = tuple((zz, mm) for zz, mm in sorted(fac.items(), key=lambda t: (t[0].real, t[0].imag)) if mm != 0)
        return RationalFunction(factors, self.scale, self.weight_power + weight_bump)

    def multiply(self, other: "RationalFunction"):
        out = self
        for z, m in other.factors:
            out = out._times_factor(z, m)
        return RationalFunction(out.factors, out.scale * other.scale, self.weight_power + other.weight_power)

    def is_real_valued(self):
        fac = dict(self.factors)
        conj = {complex(z).conjugate(): m for z, m in self.factors}
        return fac == {complex(z): m for z, m in conj.items()} and complex(self.scale).imag == 0.0


def rational_from_poles(poles, scale=1.0):
    """Product of simple reciprocal factors prod (x - z)^(-1)."""
    fac = dict()
    for z in poles:
        fac[complex(z)] = fac.get(complex(z), 0) + 1
    factors = tuple(sorted(fac.items(), key=lambda t: (t[0].real, t[0].imag)))
    return RationalFunction(factors, scale)


@dataclass(frozen=True)
class GaussianFunction(TestFunction):
    """prefactor(x) * exp(-(x-center)^2 / (2 width^2))."""

    center: float = 0.0
    width: float = 1.0
    prefactor: tuple = (1.0,)  # ascending coefficients in (x - center)
    weight_power: int = 0

    kind = "gaussian"
    decay_order = None

    def __post_init__(self):
        if not self.width > 0:
            raise ValidationError("gaussian width must be positive")
        object.__setattr__(self, "prefactor", tuple(complex(c) for c in self.prefactor))

    def eval_deriv(self, order, x):
        x = np.asarray(x, dtype=float)
        s = x - self.center
        q = np.asarray(self.prefactor, dtype=complex)
        w2 = self.width**2
        for _ in range(order):
            # (q e^g)' = (q' + q g') e^g with g' = -s/w^2
            q = np.polynomial.polynomial.polyadd(_polyder(q), _polymul(q, [0.0, -1.0 / w2]))
        return _polyval(q, s) * np.exp(-(s**2) / (2.0 * w2))

    def times_u(self, power=1):
        q = np.asarray(self.prefactor, dtype=complex)
        for _ in range(power):
            # u(x) = (x - center) + (center - i) in the local variable
            q = _polymul(q, [self.center - 1j, 1.0])
        return GaussianFunction(self.center, self.width, tuple(q), self.weight_power + power)

    def is_real_valued(self):
        return all(abs(complex(c).imag) == 0.0 for c in self.prefactor)


@dataclass(frozen=True)
class BumpFunction(TestFunction):
    """Polynomial bump: prefactor(x) * ((x-a)(b-x))^(smoothness+1) on (a, b).

    Globally C^smoothness, identically zero outside (a, b).  Use
    :func:`bump` for a peak-normalized instance.
    """

    a: float
    b: float
    smoothness: int = 4
    prefactor: tuple = (1.0,)  # ascending coefficients in (x - (a+b)/2)
    weight_power: int = 0

    kind = "bump"
    decay_order = None

    def __post_init__(self):
        if not self.b > self.a:
            raise ValidationError("bump needs a < b")
        if self.smoothness < 1:
            raise ValidationError("bump smoothness must be >= 1")
        object.__setattr__(self, "prefactor", tuple(complex(c) for c in self.prefactor))
        mid = 0.5 * (self.a + self.b)
        half = 0.5 * (self.b - self.a)
        # ((x-a)(b-x)) = half^2 - s^2 in s = x - mid
        base = np.array([half**2, 0.0, -1.0], dtype=complex)
        poly = np.asarray(self.prefactor, dtype=complex)
        for _ in range(self.smoothness + 1):
            poly = _polymul(poly, base)
        object.__setattr__(self, "_poly", poly)
        object.__setattr__(self, "kink_points", (self.a, self.b))

    @property
    def support(self):
        return (self.a, self.b)

    def eval_deriv(self, order, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xv = np.atleast_1d(x)
        mid = 0.5 * (self.a + self.b)
        inside = (xv > self.a) & (xv < self.b)
        out = np.zeros(xv.shape, dtype=complex)
        if np.any(inside):
            out[inside] = _polyval(_polyder(self._poly, order) if order else self._poly, xv[inside] - mid)
        return out[0] if scalar else out

    def times_u(self, power=1):
        q = np.asarray(self.prefactor, dtype=complex)
        mid = 0.5 * (self.a + self.b)
        for _ in range(power):
            q = _polymul(q, [mid - 1j, 1.0])
        return BumpFunction(self.a, self.b, self.smoothness, tuple(q), self.weight_power + power)

    def is_real_valued(self):
        return all(abs(complex(c).imag) == 0.0 for c in self.prefactor)


def bump(a, b, smoothness=4, prefactor=None):
    """Bump on (a, b) scaled so that the value at the midpoint is prefactor(mid)."""
    half = 0.5 * (b - a)
    scale = half ** (-2 * (smoothness + 1))
    pre = (scale,) if prefactor is None else tuple(scale * complex(c) for c in prefactor)
    return BumpFunction(a, b, smoothness, pre)


@dataclass(frozen=True)
class PolynomialFunction(TestFunction):
    """Plain polynomial with ascending coefficients."""

    coefficients: tuple
    weight_power: int = 0

    kind = "polynomial"

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(complex(c) for c in self.coefficients))

    @property
    def decay_order(self):
        deg = len(np.trim_zeros(np.asarray(self.coefficients), "b")) - 1
        return -max(deg, 0)

    def degree(self):
        c = np.trim_zeros(np.asarray(self.coefficients), "b")
        return len(c) - 1 if len(c) else -1

    def eval_deriv(self, order, x):
        x = np.asarray(x, dtype=complex)
        c = np.asarray(self.coefficients, dtype=complex)
        return _polyval(_polyder(c, order) if order else c, x)

    def times_u(self, power=1):
        c = np.asarray(self.coefficients, dtype=complex)
        for _ in range(power):
            c = _polymul(c, [-1j, 1.0])
        return PolynomialFunction(tuple(c), self.weight_power + power)

    def is_real_valued(self):
        return all(abs(complex(c).imag) == 0.0 for c in self.coefficients)


def weight_multiply(f: TestFunction, power: int) -> TestFunction:
    """Multiply f by u^power, u(x) = x - i, tracking the weight bookkeeping."""
    if power < 0:
        raise ValidationError("weight power must be nonnegative")
    if power == 0:
        return f
    return f.times_u(power)


# ---------------------------------------------------------------------------
# divided differences


def _merge_nodes(nodes):
    """Sort nodes and merge clusters closer than NODE_MERGE_RELTOL * (1 + span)."""
    xs = sorted(float(v) for v in nodes)
    span = xs[-1] - xs[0] if len(xs) > 1 else 0.0
    tol = NODE_MERGE_RELTOL * (1.0 + span)
    groups = [[xs[0]]]
    for v in xs[1:]:
        if v - groups[-1][-1] <= tol:
            groups[-1].append(v)
        else:
            groups.append([v])
    merged = []
    for g in groups:
        rep = sum(g) / len(g)
        merged.extend([rep] * len(g))
    return merged


def divided_difference(f: TestFunction, nodes) -> complex:
    """Divided difference of order len(nodes)-1, confluent at repeated nodes."""
    nodes = list(nodes)
    if len(nodes) == 0:
        raise ValidationError("need at least one node")
    zs = _merge_nodes(nodes)
    p = len(zs) - 1
    # a confluent group of size g needs derivative order g-1, which only
    # fails where global smoothness is finite and the node hits a kink
    if f.smoothness != math.inf and f.kink_points:
        run = 1
        for i in range(1, len(zs)):
            run = run + 1 if zs[i] == zs[i - 1] else 1
            near_kink = any(abs(zs[i] - kk) <= NODE_MERGE_RELTOL * (1.0 + abs(kk)) for kk in f.kink_points)
            if run - 1 > f.smoothness and near_kink:
                raise ValidationError(
                    f"nodes require derivative order {run - 1} at a C^{f.smoothness} point"
                )
    vals = {}

    def fval(order, x):
        key = (order, x)
        if key not in vals:
            vals[key] = complex(f.eval_deriv(order, x))
        return vals[key]

    table = [[fval(0, z) for z in zs]]
    for j in range(1, p + 1):
        row = []
        for i in range(p + 1 - j):
            if zs[i + j] == zs[i]:
                row.append(fval(j, zs[i]) / math.factorial(j))
            else:
                row.append((table[j - 1][i + 1] - table[j - 1][i]) / (zs[i + j] - zs[i]))
        table.append(row)
    return table[p][0]


# ---------------------------------------------------------------------------
# weighted-class membership


@dataclass(frozen=True)
class ClassMembership:
    n: int
    k: int
    member: bool
    reason: str


def class_membership(f: TestFunction, n: int, k: int) -> ClassMembership:
    """Analytic decision whether all weighted derivatives (f u^l)^(m),
    l <= k, m <= n, have integrable Fourier transforms.

    The decision is a function of the kind and the decay/smoothness
    bookkeeping only; it never inspects sampled values.
    """
    if n < 0 or k < 0:
        raise ValidationError("orders must be nonnegative")
    if f.kind == "rational":
        d = f.decay_order
        if d >= k + 1:
            return ClassMembership(n, k, True, f"rational with decay order {d} >= k+1 = {k + 1}")
        return ClassMembership(n, k, False, f"rational decay order {d} < k+1 = {k + 1}; f*u^{k} does not vanish at infinity")
    if f.kind == "gaussian":
        return ClassMembership(n, k, True, "Schwartz-type function")
    if f.kind == "bump":
        if f.smoothness >= n + 1:
            return ClassMembership(n, k, True, f"compactly supported C^{f.smoothness} with {f.smoothness} >= n+1")
        return ClassMembership(n, k, False, f"bump is only C^{f.smoothness} < n+1 = {n + 1}")
    if f.kind == "polynomial":
        deg = f.degree()
        if deg < 0:
            return ClassMembership(n, k, True, "identically zero")
        if deg >= 1:
            return ClassMembership(n, k, False, "nonconstant polynomial is unbounded")
        return ClassMembership(n, k, False, "nonzero constant does not vanish at infinity")
    raise ValidationError(f"unknown function kind {f.kind!r}")


# ---------------------------------------------------------------------------
# Peano kernels (B-spline representation of divided differences)


def fourier_l1_diagnostic(f: TestFunction, n: int, k: int, window=60.0, samples=2**14):
    """Numerical estimate of the transform L1 norms of (f u^l)^(m).

    A reporting tool only, never a membership gate: the analytic
    decision of :func:`class_membership` stands on its own.  For
    genuine members the estimates stabilize as the window grows; for
    non-members (slow decay) they drift with the window.  Returns a
    dict keyed by (l, m).
    """
    xs = np.linspace(-window / 2.0, window / 2.0, samples, endpoint=False)
    dx = xs[1] - xs[0]
    dxi = 2.0 * math.pi / window
    out = {}
    for l in range(k + 1):
        g = weight_multiply(f, l)
        for m in range(n + 1):
            vals = np.asarray(g.eval_deriv(m, xs), dtype=complex)
            spectrum = np.fft.fft(vals) * dx / (2.0 * math.pi)
            out[(l, m)] = float(np.sum(np.abs(spectrum)) * dxi)
    return out


def peano_kernel(nodes) -> PiecewisePolynomial:
    """Density K with divided_difference(f, nodes) = integral of f^(p) * K.

    K is the B-spline over the given knots scaled to total mass 1/p!.
    All-equal node tuples yield a pure atom of mass 1/p! at the common
    value; otherwise the kernel is built by the Cox-de Boor recursion on
    exact piecewise-polynomial arithmetic (repeated knots allowed).
    """
    zs = _merge_nodes(nodes)
    p = len(zs) - 1
    if p < 1:
        raise ValidationError("a kernel needs at least two nodes")
    if zs[0] == zs[-1]:
        return PiecewisePolynomial.atom(zs[0], 1.0 / math.factorial(p))
    return _bspline_kernel(tuple(zs))


@lru_cache(maxsize=4096)
def _bspline_kernel(knots):
    zs = list(knots)
    p = len(zs) - 1
    grid = np.array(sorted(set(zs)), dtype=float)
    zero = PiecewisePolynomial(grid, tuple(np.zeros(1) for _ in range(len(grid) - 1)))

    def indicator(i):
        if zs[i + 1] > zs[i]:
            lo = np.searchsorted(grid, zs[i])
            hi = np.searchsorted(grid, zs[i + 1])
            coeffs = [np.ones(1) if lo <= j < hi else np.zeros(1) for j in range(len(grid) - 1)]
            return PiecewisePolynomial(grid, tuple(coeffs))
        return zero

    level = [indicator(i) for i in range(p)]
    for k in range(1, p):
        nxt = []
        for i in range(p - k):
            acc = zero
            if zs[i + k] > zs[i]:
                acc = acc + level[i].multiply_linear(-zs[i], 1.0).scaled(1.0 / (zs[i + k] - zs[i]))
            if zs[i + k + 1] > zs[i + 1]:
                acc = acc + level[i + 1].multiply_linear(zs[i + k + 1], -1.0).scaled(
                    1.0 / (zs[i + k + 1] - zs[i + 1])
                )
            nxt.append(acc)
        level = nxt
    n_spline = level[0]
    return n_spline.scaled(1.0 / ((zs[-1] - zs[0]) * math.factorial(p - 1)))


def leibniz_weighted_sup_bound(n: int, k: int, a: float, p: int) -> float:
    """Explicit constant c with sup |(f u^k)^(p)| <= c * sup |f^(n)|
    for every f supported in (-a, a) with n continuous derivatives.

    Combines the product rule, |u| <= sqrt(1+a^2) on (-a, a), and the
    mean-value bound sup|f^(j)| <= (2a)^(n-j) sup|f^(n)|.
    """
    if p > n:
        raise ValidationError("derivative order exceeds available smoothness")
    total = 0.0
    mod_u = math.sqrt(1.0 + a * a)
    for j in range(0, p + 1):
        q = p - j  # derivative order falling on u^k
        if q > k:
            continue
        falling = math.prod(range(k - q + 1, k + 1)) if q else 1
        total += math.comb(p, j) * (2.0 * a) ** (n - j) * falling * mod_u ** (k - q)
    return total
