"""Dense Hermitian operators: spectral decompositions with eigenvalue
clustering, functional calculus, resolvents, traces and Schatten norms.

Everything is immutable after construction and safe to share across
threads; decompositions at the default clustering tolerance are cached
on the operator.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericError, ValidationError

__all__ = [
    "HermitianOperator",
    "SpectralDecomposition",
    "SchattenIndex",
    "spectral_decompose",
    "func_calculus",
    "schatten_norm",
    "trace",
    "resolvent_comparability",
    "ResolventComparabilityReport",
    "operator_from_json",
    "operator_to_json",
]

MAX_DIM = 64
HERMITICITY_WARN_TOL = 1e-12
HERMITICITY_REJECT_TOL = 1e-6


def default_cluster_tolerance(norm):
    # divided differences at nearly coincident nodes are unstable; clustering
    # routes them to the confluent path
    return 1e-9 * (1.0 + norm)


class HermitianOperator:
    """Dense complex Hermitian matrix with cached spectral data."""

    __slots__ = ("entries", "dim", "_decomp", "_norm", "_resolvent")

    def __init__(self, entries):
        a = np.array(entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValidationError("operator entries must form a square matrix")
        if a.shape[0] < 1:
            raise ValidationError("dimension must be at least 1")
        if a.shape[0] > MAX_DIM:
            raise ValidationError(f"dimension {a.shape[0]} exceeds the dense cap {MAX_DIM}")
        scale = max(1.0, float(np.max(np.abs(a))))
        asym = float(np.max(np.abs(a - a.conj().T)))
        if asym > HERMITICITY_REJECT_TOL * scale:
            raise ValidationError(f"matrix is not Hermitian (asymmetry {asym:.3e})")
        if asym > HERMITICITY_WARN_TOL * scale:
            warnings.warn(f"symmetrizing input with asymmetry {asym:.3e}", stacklevel=2)
        a = 0.5 * (a + a.conj().T)
        a.setflags(write=False)
        self.entries = a
        self.dim = a.shape[0]
        self._decomp = None
        self._norm = None
        self._resolvent = None

    def __add__(self, other):
        if isinstance(other, HermitianOperator):
            return HermitianOperator(self.entries + other.entries)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, HermitianOperator):
            return HermitianOperator(self.entries - other.entries)
        return NotImplemented

    def __mul__(self, scalar):
        return HermitianOperator(self.entries * float(scalar))

    __rmul__ = __mul__

    def norm(self):
        if self._norm is None:
            self._norm = float(np.linalg.norm(self.entries, 2)) if self.dim > 1 else float(abs(self.entries[0, 0]))
        return self._norm

    def resolvent(self):
        """(H - i)^(-1); cached."""
        if self._resolvent is None:
            r = np.linalg.inv(self.entries - 1j * np.eye(self.dim))
            r.setflags(write=False)
            self._resolvent = r
        return self._resolvent

    def decomposition(self, cluster_tolerance=None):
        if cluster_tolerance is None:
            if self._decomp is None:
                self._decomp = spectral_decompose(self, default_cluster_tolerance(self.norm()))
            return self._decomp
        return spectral_decompose(self, cluster_tolerance)

    def __repr__(self):
        return f"HermitianOperator(dim={self.dim})"


@dataclass(frozen=True)
class SpectralDecomposition:
    """Clustered eigenvalues with orthogonal spectral projections."""

    eigenvalues: np.ndarray
    projections: tuple
    cluster_tolerance: float

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        ev.setflags(write=False)
        object.__setattr__(self, "eigenvalues", ev)
        object.__setattr__(self, "projections", tuple(self.projections))

    @property
    def dim(self):
        return self.projections[0].shape[0]

    def multiplicities(self):
        return [int(round(np.real(np.trace(p)))) for p in self.projections]

    def reconstruct(self):
        out = np.zeros_like(self.projections[0])
        for lam, p in zip(self.eigenvalues, self.projections):
            out = out + lam * p
        return out

    def apply(self, values):
        """Sum of values[j] * P_j."""
        out = np.zeros_like(self.projections[0])
        for v, p in zip(values, self.projections):
            out = out + complex(v) * p
        return out

    def verify(self):
        """Residuals of the defining invariants, for tests and reports."""
        eye = np.eye(self.dim)
        total = sum(self.projections)
        res = {
            "partition_of_unity": float(np.max(np.abs(total - eye))),
            "idempotent": max(
                float(np.max(np.abs(p @ p - p))) for p in self.projections
            ),
            "self_adjoint": max(
                float(np.max(np.abs(p - p.conj().T))) for p in self.projections
            ),
        }
        ortho = 0.0
        for i, p in enumerate(self.projections):
            for q in self.projections[i + 1 :]:
                ortho = max(ortho, float(np.max(np.abs(p @ q))))
        res["orthogonal"] = ortho
        gaps = np.diff(self.eigenvalues)
        res["separated"] = bool(np.all(gaps > self.cluster_tolerance)) if len(gaps) else True
        return res


def spectral_decompose(H, cluster_tolerance=None) -> SpectralDecomposition:
    """Eigendecomposition with eigenvalues merged into clusters.

    Eigenvalues closer than ``cluster_tolerance`` (chained) are merged
    into a single cluster whose projection is the sum of the individual
    spectral projections and whose eigenvalue is the cluster mean.
    """
    if not isinstance(H, HermitianOperator):
        H = HermitianOperator(H)
    if cluster_tolerance is None:
        cluster_tolerance = default_cluster_tolerance(H.norm())
    if cluster_tolerance < 0:
        raise ValidationError("cluster tolerance must be nonnegative")
    try:
        lam, U = np.linalg.eigh(H.entries)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - hard to trigger on lapack
        raise NumericError("eigensolver failed to converge") from exc
    groups = [[0]]
    for i in range(1, len(lam)):
        if lam[i] - lam[groups[-1][-1]] <= cluster_tolerance:
            groups[-1].append(i)
        else:
            groups.append([i])
    eigenvalues = []
    projections = []
    for g in groups:
        eigenvalues.append(float(np.mean(lam[g])))
        vecs = U[:, g]
        p = vecs @ vecs.conj().T
        p = 0.5 * (p + p.conj().T)
        p.setflags(write=False)
        projections.append(p)
    return SpectralDecomposition(np.array(eigenvalues), tuple(projections), float(cluster_tolerance))


def _eval_scalar_function(f, x):
    if hasattr(f, "eval_deriv"):
        return complex(f.eval_deriv(0, x))
    return complex(f(x))


def _check_poles_off(f, values, what="spectrum"):
    for z in getattr(f, "poles", lambda: ())():
        dist = min(abs(complex(z) - v) for v in values)
        if dist < 1e-12:
            raise DomainError(f"function pole {z} lies on the {what}")


def func_calculus(f, H) -> np.ndarray:
    """f(H) = sum f(lambda_j) P_j for a scalar function f."""
    if not isinstance(H, HermitianOperator):
        H = HermitianOperator(H)
    dec = H.decomposition()
    _check_poles_off(f, dec.eigenvalues)
    vals = [_eval_scalar_function(f, lam) for lam in dec.eigenvalues]
    return dec.apply(vals)


@dataclass(frozen=True)
class SchattenIndex:
    """Summability exponent p in [1, inf]; p = inf is the operator norm."""

    p: float

    def __post_init__(self):
        if not (self.p >= 1.0):
            raise ValidationError("Schatten exponent must satisfy p >= 1")

    @property
    def is_operator_norm(self):
        return np.isinf(self.p)


def schatten_norm(A, p) -> float:
    """(sum sigma_i^p)^(1/p) of the singular values; p = inf gives the largest."""
    if isinstance(p, SchattenIndex):
        p = p.p
    p = float(p)
    if not p >= 1.0:
        raise ValidationError("Schatten exponent must satisfy p >= 1")
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2:
        raise ValidationError("Schatten norms are defined for matrices")
    sv = np.linalg.svd(A, compute_uv=False)
    if np.isinf(p):
        return float(sv[0]) if len(sv) else 0.0
    return float(np.sum(sv**p) ** (1.0 / p))


def trace(A) -> complex:
    return complex(np.trace(np.asarray(A)))


@dataclass(frozen=True)
class ResolventComparabilityReport:
    lhs_norm: float
    rhs_norm: float
    identity_residuals: tuple
    scale: float


def resolvent_comparability(H: HermitianOperator, V: HermitianOperator, n) -> ResolventComparabilityReport:
    """Schatten-n data for the two equivalent smallness conditions and the
    residuals of the two second-resolvent-identity factorizations that
    prove their equivalence.
    """
    if H.dim != V.dim:
        raise ValidationError("operators must act on the same space")
    if isinstance(n, SchattenIndex):
        n = n.p
    if not float(n) >= 1.0:
        raise ValidationError("Schatten exponent must satisfy n >= 1")
    rH = H.resolvent()
    rHV = (H + V).resolvent()
    v = V.entries
    lhs = rHV - rH
    rhs = rH @ v @ rH
    base = rH - rHV
    fact1 = rhs - (rH - rHV) @ v @ rH
    fact2 = rhs - rHV @ v @ rH @ v @ rH
    scale = 1.0 + schatten_norm(base, np.inf) + schatten_norm(rhs, np.inf)
    return ResolventComparabilityReport(
        lhs_norm=schatten_norm(lhs, n),
        rhs_norm=schatten_norm(rhs, n),
        identity_residuals=(
            float(np.max(np.abs(base - fact1))),
            float(np.max(np.abs(base - fact2))),
        ),
        scale=scale,
    )


def operator_to_json(H: HermitianOperator) -> str:
    """JSON wire format: {"dim": d, "re": [[...]], "im": [[...]]}, row-major."""
    return json.dumps(
        {
            "dim": H.dim,
            "re": [[float(v) for v in row] for row in np.real(H.entries)],
            "im": [[float(v) for v in row] for row in np.imag(H.entries)],
        },
        sort_keys=True,
        separators=(",", ":"),
    )


def operator_from_json(s: str) -> HermitianOperator:
    d = json.loads(s)
    re = np.asarray(d["re"], dtype=float)
    im = np.asarray(d["im"], dtype=float)
    if re.shape != (d["dim"], d["dim"]) or im.shape != re.shape:
        raise ValidationError("matrix payload does not match declared dimension")
    return HermitianOperator(re + 1j * im)
