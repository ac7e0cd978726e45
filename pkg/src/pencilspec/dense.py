"""Dense real/complex matrix helpers shared by every other module.

Matrices are plain ``numpy`` arrays.  Functions never modify their inputs and
always hand back fresh arrays; arrays stored inside the result dataclasses of
this package are additionally marked read-only.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import DimensionMismatch, NonSymmetric, NotOrthogonal, ValidationError

__all__ = [
    "Tolerances",
    "DEFAULT_TOLERANCES",
    "as_matrix",
    "as_symmetric",
    "frozen",
    "multiply",
    "determinant",
    "cofactor",
    "inf_norm",
    "approx_eq",
    "asymmetry",
    "orthogonality_defect",
    "check_orthogonal",
    "random_orthogonal",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used throughout the package.

    All thresholds are absolute unless a function documents a scaling.
    """

    sym_tol: float = 1e-9
    commute_tol: float = 1e-8
    eig_residual_tol: float = 1e-8
    distinct_tol: float = 1e-7
    conj_pair_tol: float = 1e-9
    root_tol: float = 1e-10

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not (np.isfinite(value) and value > 0):
                raise ValidationError(f"tolerance {name} must be positive, got {value!r}")

    def as_dict(self):
        return asdict(self)


DEFAULT_TOLERANCES = Tolerances()


def frozen(a):
    """Return a read-only copy of ``a``."""
    out = np.array(a, copy=True)
    out.flags.writeable = False
    return out


def as_matrix(a, *, dtype=float) -> np.ndarray:
    """Validate ``a`` as a finite square matrix and return a fresh copy."""
    try:
        out = np.array(a, dtype=dtype, copy=True)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"not a numeric matrix: {exc}") from exc
    if out.ndim != 2 or out.shape[0] != out.shape[1] or out.shape[0] < 1:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValidationError("matrix contains non-finite entries")
    return out


def asymmetry(a) -> float:
    """Largest entrywise ``|a[i, j] - a[j, i]|``."""
    a = np.asarray(a)
    return float(np.max(np.abs(a - a.T))) if a.size else 0.0


def as_symmetric(a, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Validate symmetry within ``tol.sym_tol`` and return the symmetrized copy."""
    out = as_matrix(a)
    defect = asymmetry(out)
    if defect > tol.sym_tol:
        raise NonSymmetric(f"matrix is not symmetric (max |a_ij - a_ji| = {defect:.3g})")
    return 0.5 * (out + out.T)


def _same_order(a, b):
    if a.shape != b.shape:
        raise DimensionMismatch(f"order mismatch: {a.shape} vs {b.shape}")


def multiply(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    _same_order(a, b)
    return a @ b


def determinant(a):
    """Determinant of a square real or complex matrix.

    Orders up to 3 use the explicit expansion; larger orders go through
    LU factorization with partial pivoting (LAPACK ``getrf``).
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"determinant needs a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        return 1.0
    if n == 1:
        return a[0, 0].item()
    if n == 2:
        return (a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]).item()
    if n == 3:
        return (
            a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
            - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
            + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0])
        ).item()
    return np.linalg.det(a).item()


def _minor(a, i, j):
    return np.delete(np.delete(a, i, axis=0), j, axis=1)


def cofactor(a, i: int, j: int) -> float:
    """Signed cofactor ``(-1)**(i+j) * det(minor(i, j))`` with 0-based indices.

    A 1x1 matrix has the single cofactor 1 by convention.
    """
    a = np.asarray(a)
    n = a.shape[0]
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"cofactor index ({i}, {j}) out of range for order {n}")
    if n == 1:
        return 1.0
    sign = -1.0 if (i + j) % 2 else 1.0
    return sign * determinant(_minor(a, i, j))


def cofactor_row(a, i: int) -> np.ndarray:
    """All cofactors of row ``i`` (one row of the transposed adjugate)."""
    a = np.asarray(a)
    n = a.shape[0]
    if n == 1:
        return np.ones(1, dtype=a.dtype)
    rest = np.delete(a, i, axis=0)
    minors = np.stack([np.delete(rest, j, axis=1) for j in range(n)])
    dets = np.array([determinant(m) for m in minors]) if n <= 4 else np.linalg.det(minors)
    signs = np.where((i + np.arange(n)) % 2, -1.0, 1.0)
    return signs * dets


def inf_norm(a) -> float:
    """Induced infinity norm (maximum absolute row sum); vectors use max-abs."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    if a.ndim == 1:
        return float(np.max(np.abs(a)))
    return float(np.max(np.sum(np.abs(a), axis=1)))


def approx_eq(a, b, tol: float) -> bool:
    """True iff the max-abs entrywise difference is at most ``tol``."""
    a = np.asarray(a)
    b = np.asarray(b)
    _same_order(a, b)
    return bool(np.max(np.abs(a - b), initial=0.0) <= tol)


def orthogonality_defect(q) -> float:
    """``||Q Q^T - I||`` in the infinity norm."""
    q = np.asarray(q, dtype=float)
    return inf_norm(q @ q.T - np.eye(q.shape[0]))


def check_orthogonal(q, tol: float = 1e-10) -> np.ndarray:
    q = as_matrix(q)
    defect = orthogonality_defect(q)
    if defect > tol:
        raise NotOrthogonal(f"matrix is not orthogonal (||QQ^T - I|| = {defect:.3g})")
    return q


def random_orthogonal(n: int, seed: int) -> np.ndarray:
    """Deterministic orthogonal matrix built from n(n-1)/2 Givens rotations.

    Angles are drawn uniformly from [-pi, pi) by ``numpy.random.default_rng(seed)``;
    a random sign flip of the first row lets 1x1 outputs be either ``[[1]]``
    or ``[[-1]]``.
    """
    if n < 1:
        raise ValidationError(f"order must be positive, got {n}")
    rng = np.random.default_rng(seed)
    q = np.eye(n)
    if rng.random() < 0.5:
        q[0] = -q[0]
    for p in range(n - 1):
        for r in range(p + 1, n):
            theta = rng.uniform(-np.pi, np.pi)
            c, s = np.cos(theta), np.sin(theta)
            rp, rr = q[p].copy(), q[r].copy()
            q[p] = c * rp - s * rr
            q[r] = s * rp + c * rr
    return q
